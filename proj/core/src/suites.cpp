#include "plateswarm/suites.hpp"

#include "plateswarm/presets.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace plateswarm::suites {

using sampling::Rng;

namespace {

using AllocMatrix = Eigen::Matrix<double, 6, 9>;

CheckResult make(std::string suite, std::string name, double value, double threshold,
                 std::string detail = {}) {
    CheckResult r;
    r.suite = std::move(suite);
    r.name = std::move(name);
    r.value = value;
    r.threshold = threshold;
    r.passed = std::isfinite(value) && value <= threshold;
    r.detail = std::move(detail);
    return r;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

double inf_norm(const Eigen::Ref<const Eigen::VectorXd>& v) { return v.cwiseAbs().maxCoeff(); }

AllocMatrix allocation_oracle(const SystemParams& p) {
    AllocMatrix A;
    for (int i = 0; i < kVehicles; ++i) {
        A.block<3, 3>(0, 3 * i).setIdentity();
        A.block<3, 3>(3, 3 * i) = geom::hat(p.quad[i].attachment);
    }
    return A;
}

Eigen::Matrix<double, 9, 1> stacked_plate_frame(const TensionSet& mu, const Rotation& R_p) {
    Eigen::Matrix<double, 9, 1> x;
    for (int i = 0; i < kVehicles; ++i) x.segment<3>(3 * i) = R_p.transpose() * mu[i];
    return x;
}

Wrench random_wrench(Rng& rng) {
    return {sampling::uniform_vec(rng, 20.0), sampling::uniform_vec(rng, 5.0)};
}

bool brute_force_negative(Rng& rng, const Mat6& W, int vectors) {
    std::normal_distribution<double> n;
    for (int k = 0; k < vectors; ++k) {
        Vec6 x;
        for (int j = 0; j < 6; ++j) x(j) = n(rng);
        if (x.dot(W * x) >= 0.0) return false;
    }
    return true;
}

SystemState run_passive(SystemState s, const SystemParams& p, double dt, double duration) {
    const ControlInput zero = ControlInput::zero();
    const auto n = static_cast<long>(std::llround(duration / dt));
    for (long k = 0; k < n; ++k) s = sim::step(s, zero, p, dt);
    return s;
}

Scenario trajectory_scenario(const SuiteOptions& opt) {
    return opt.scenario ? *opt.scenario : presets::paper_scenario();
}

std::vector<CheckResult> algebra(const SuiteOptions& opt) {
    Rng rng(opt.seed);
    const SystemParams p;
    return {hat_vee_round_trip(rng, 1000), exp_log_round_trip(rng, 1000),
            allocation_reconstruction(rng, 1000, p), allocation_min_norm(rng, 100, 100, p)};
}

std::vector<CheckResult> conservation(const SuiteOptions& opt) {
    Rng rng(opt.seed);
    const SystemParams p;
    return {passive_energy(rng, 10.0, 1e-3, p), momentum_without_gravity(rng, 2.0, 1e-3, p),
            euler_lagrange(rng, 2.0, 1e-3, p), integrator_order(rng, p)};
}

std::vector<CheckResult> pfl(const SuiteOptions& opt) {
    Rng rng(opt.seed);
    const SystemParams p;
    std::vector<CheckResult> out{cross_model(rng, 1000, p)};
    for (CheckResult& r : pfl_consistency(rng, 1000, p)) out.push_back(std::move(r));
    out.push_back(closed_loop_ball(rng, 1000, p));
    return out;
}

std::vector<CheckResult> lyapunov(const SuiteOptions& opt) {
    std::vector<CheckResult> out;
    Scenario sc = trajectory_scenario(opt);
    sc.mode = Mode::ClosedLoop;
    try {
        const Trajectory traj = sim::simulate(sc);
        const MonotonicityReport m = verify::lyapunov_monotonicity(traj, 0.5, 1e-9);
        const HeightConditionReport h = verify::height_condition(traj, sc.gains, sc.params, 0.5);
        out.push_back(make("lyapunov", "V non-increasing after 0.5 s",
                           static_cast<double>(m.violations), 0.0,
                           "worst increase " + fmt(m.worst_increase) + " at t=" + fmt(m.t_worst) +
                               " s; height-rate condition violated at " +
                               std::to_string(h.violations) + "/" + std::to_string(h.samples) +
                               " samples"));
    } catch (const SimulationDiverged& e) {
        out.push_back(make("lyapunov", "V non-increasing after 0.5 s", INFINITY, 0.0, e.what()));
    }

    Scenario att = sc;
    att.mode = Mode::AttitudeOnly;
    att.integrator.duration = std::min(att.integrator.duration, 5.0);
    try {
        const Trajectory traj = sim::simulate(att);
        std::vector<double> t, v2;
        for (const Sample& smp : traj.samples) {
            t.push_back(smp.t);
            v2.push_back(smp.diag.V2);
        }
        DecayFitOptions fo;
        fo.skip = 0.5;
        fo.floor_ratio = 1e-6;
        const DecayFit fit = verify::fit_exponential_decay(t, v2, fo);
        out.push_back(make("lyapunov", "V2 exponential decay (1 - R^2)", 1.0 - fit.r_squared, 0.01,
                           "rate " + fmt(fit.rate) + " 1/s over [" + fmt(fit.t_start) + ", " +
                               fmt(fit.t_end) + "] s"));
    } catch (const SimulationDiverged& e) {
        out.push_back(make("lyapunov", "V2 exponential decay (1 - R^2)", INFINITY, 0.01, e.what()));
    }
    return out;
}

std::vector<CheckResult> gains(const SuiteOptions& opt) {
    Rng rng(opt.seed);
    const Scenario sc = trajectory_scenario(opt);
    const Gains& g = sc.gains;
    const AttitudeBounds b = verify::attitude_bounds_from_initial(sc.initial, g, g.c0);
    const GainCertificate cert = verify::gain_condition_check(g, g.c0, g.c1, g.c2, b.C1, b.C2);
    std::ostringstream os;
    os << (cert.accepted ? "accepted" : "rejected") << "; C1=" << fmt(b.C1)
       << " C2=" << fmt(b.C2) << "; spectrum [";
    for (int k = 0; k < 6; ++k) os << (k ? ", " : "") << fmt(cert.eigenvalues(k));
    os << "]";
    if (cert.positive_diagonal) os << "; a diagonal entry is >= 0";
    return {make("gains", "certificate: eigenvalue and charpoly verdicts agree",
                 cert.consistent() ? 0.0 : 1.0, 0.0, os.str()),
            definiteness_oracle(rng, 100, 100000),
            definiteness_oracle_generic(rng, 100, 100000)};
}

}  // namespace

const std::vector<std::string>& names() {
    static const std::vector<std::string> all{"algebra", "conservation", "pfl", "lyapunov", "gains"};
    return all;
}

std::vector<CheckResult> run(std::string_view suite, const SuiteOptions& opt) {
    if (suite == "all") {
        std::vector<CheckResult> out;
        for (const std::string& name : names()) {
            for (CheckResult& r : run(name, opt)) out.push_back(std::move(r));
        }
        return out;
    }
    if (suite == "algebra") return algebra(opt);
    if (suite == "conservation") return conservation(opt);
    if (suite == "pfl") return pfl(opt);
    if (suite == "lyapunov") return lyapunov(opt);
    if (suite == "gains") return gains(opt);
    throw Error(ErrorKind::InvalidConfig, "unknown suite '" + std::string(suite) + "'");
}

double state_distance(const SystemState& a, const SystemState& b) {
    double d = (a.o_p - b.o_p).norm() + (a.v_p - b.v_p).norm() + (a.R_p - b.R_p).norm() +
               (a.Omega_p - b.Omega_p).norm() + (a.r_b - b.r_b).norm() +
               (a.rdot_b - b.rdot_b).norm();
    for (int i = 0; i < kVehicles; ++i) {
        d += (a.tether[i].q - b.tether[i].q).norm() + (a.tether[i].omega - b.tether[i].omega).norm() +
             (a.quad[i].R - b.quad[i].R).norm() + (a.quad[i].Omega - b.quad[i].Omega).norm();
    }
    return d;
}

CheckResult hat_vee_round_trip(Rng& rng, int n) {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec3 v = sampling::uniform_vec(rng, 10.0);
        const Mat3 h = geom::hat(v);
        worst = std::max({worst, inf_norm(geom::vee(h) - v),
                          (h + h.transpose()).cwiseAbs().maxCoeff(),
                          inf_norm(h * v)});
    }
    return make("algebra", "hat/vee round trip", worst, 1e-12);
}

CheckResult exp_log_round_trip(Rng& rng, int n) {
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec3 v = sampling::unit_vec(rng) * sampling::uniform(rng, 0.0, M_PI - 0.01);
        const Rotation R = geom::exp_so3(v);
        worst = std::max({worst, inf_norm(geom::log_so3(R) - v), geom::orthogonality_residual(R),
                          std::abs(R.determinant() - 1.0)});
    }
    return make("algebra", "exp/log round trip", worst, 1e-9);
}

CheckResult allocation_reconstruction(Rng& rng, int calls, const SystemParams& p) {
    const AllocMatrix A = allocation_oracle(p);
    double worst = 0.0;
    int worst_call = -1;
    for (int k = 0; k < calls; ++k) {
        const Wrench w = random_wrench(rng);
        const Rotation R_p = sampling::random_rotation(rng);
        const TensionSet mu = control::allocate_tensions(w, R_p, p);
        Vec6 target;
        target << R_p.transpose() * w.force, w.torque;
        const double err = inf_norm(A * stacked_plate_frame(mu, R_p) - target);
        if (err > worst) worst = err, worst_call = k;
    }
    return make("algebra", "allocation reconstructs the wrench", worst, 1e-10,
                "worst at call " + std::to_string(worst_call));
}

CheckResult allocation_min_norm(Rng& rng, int calls, int perturbations, const SystemParams& p) {
    const AllocMatrix A = allocation_oracle(p);
    const Eigen::MatrixXd N = Eigen::FullPivLU<AllocMatrix>(A).kernel();  // 9 x 3
    double worst = -INFINITY;  // max of |x|^2 - |x + n|^2, must stay below 0
    for (int k = 0; k < calls; ++k) {
        const Wrench w = random_wrench(rng);
        const Rotation R_p = sampling::random_rotation(rng);
        const auto x = stacked_plate_frame(control::allocate_tensions(w, R_p, p), R_p);
        for (int j = 0; j < perturbations; ++j) {
            const Eigen::VectorXd c = sampling::uniform_vec(rng, 1.0).head(N.cols());
            const Eigen::VectorXd y = x + N * c;
            worst = std::max(worst, x.squaredNorm() - y.squaredNorm());
        }
    }
    return make("algebra", "allocation is min-norm in its null space", worst, 0.0,
                std::to_string(calls) + " calls x " + std::to_string(perturbations) +
                    " perturbations");
}

CheckResult cross_model(Rng& rng, int n, const SystemParams& p) {
    double worst = 0.0;
    int worst_k = -1;
    for (int k = 0; k < n; ++k) {
        const SystemState s = sampling::random_state(rng);
        ControlInput u;
        for (int i = 0; i < kVehicles; ++i) {
            u.u[i] = sampling::uniform_vec(rng, 20.0);
            u.M[i] = sampling::uniform_vec(rng, 1.0);
        }
        const Accelerations a = model::full_dynamics(s, u, p);
        PerVehicle<Vec3> u_par;
        for (int i = 0; i < kVehicles; ++i) u_par[i] = model::along(s.tether[i].q) * u.u[i];
        const TensionSet mu = model::tensions(s, u_par, a.a_p, a.dOmega_p, p);
        const PlateAccelerations d = model::decoupled_dynamics(s, mu, p);
        const double err = std::max({inf_norm(d.a_p - a.a_p), inf_norm(d.dOmega_p - a.dOmega_p),
                                     inf_norm(d.rddot_b - a.rddot_b)});
        if (err > worst) worst = err, worst_k = k;
    }
    return make("pfl", "full and decoupled dynamics agree", worst, 1e-8,
                "worst at sample " + std::to_string(worst_k));
}

std::vector<CheckResult> pfl_consistency(Rng& rng, int n, const SystemParams& p) {
    const Mat32 E = SystemParams::E();
    double worst_u = 0.0, worst_ball = 0.0;
    int ku = -1, kb = -1;
    for (int k = 0; k < n; ++k) {
        const SystemState s = sampling::random_state(rng);
        const Vec3 U1 = sampling::uniform_vec(rng, 5.0);
        const Vec3 U2 = sampling::uniform_vec(rng, 5.0);
        const Wrench w = control::force_torque_from_U(s, U1, U2, p);
        const PlateAccelerations a = model::decoupled_dynamics(s, w, p);
        const double eu = std::max(inf_norm(a.a_p - U1), inf_norm(a.dOmega_p - U2));
        if (eu > worst_u) worst_u = eu, ku = k;

        const Vec2 N1 = model::bias_terms(s, p).N1;
        const Vec2 expected = -N1 / p.m_b - E.transpose() * s.R_p.transpose() * U1 +
                              E.transpose() * geom::hat(E * s.r_b) * U2;
        const double eb = inf_norm(a.rddot_b - expected);
        if (eb > worst_ball) worst_ball = eb, kb = k;
    }
    return {make("pfl", "linearizing wrench reproduces (U1, U2)", worst_u, 1e-8,
                 "worst at sample " + std::to_string(ku)),
            make("pfl", "ball follows the partially linearized equation", worst_ball, 1e-8,
                 "worst at sample " + std::to_string(kb))};
}

CheckResult closed_loop_ball(Rng& rng, int n, const SystemParams& p) {
    const Mat32 E = SystemParams::E();
    double worst = 0.0;
    int worst_k = -1;
    for (int k = 0; k < n; ++k) {
        const SystemState s = sampling::random_state(rng);
        const Gains g = sampling::random_gains(rng);
        const PflInputs in = control::pfl_inputs(s, g, p);
        const PlateAccelerations a =
            model::decoupled_dynamics(s, control::force_torque_from_U(s, in.U1, in.U2, p), p);
        const Vec2 expected =
            -g.k4 * s.r_b - g.k3 * s.rdot_b + E.transpose() * geom::hat(E * s.r_b) * in.U2;
        const double err = inf_norm(a.rddot_b - expected) / std::max(1.0, inf_norm(expected));
        if (err > worst) worst = err, worst_k = k;
    }
    return make("pfl", "closed-loop ball equation", worst, 1e-8,
                "relative; worst at sample " + std::to_string(worst_k));
}

CheckResult passive_energy(Rng& rng, double duration, double dt, const SystemParams& p) {
    SystemState s = sampling::random_state(rng, sampling::moderate_ranges());
    const double E0 = model::total_energy(s, p);
    const ControlInput zero = ControlInput::zero();
    double worst = 0.0;
    const auto n = static_cast<long>(std::llround(duration / dt));
    for (long k = 0; k < n; ++k) {
        s = sim::step(s, zero, p, dt);
        worst = std::max(worst, std::abs(model::total_energy(s, p) - E0) / std::abs(E0));
    }
    return make("conservation", "passive energy drift (relative)", worst, 1e-6,
                "E(0) = " + fmt(E0) + " J over " + fmt(duration) + " s");
}

CheckResult momentum_without_gravity(Rng& rng, double duration, double dt, SystemParams p) {
    p.g = 0.0;
    SystemState s = sampling::random_state(rng, sampling::moderate_ranges());
    const Vec3 P0 = model::linear_momentum(s, p);
    const ControlInput zero = ControlInput::zero();
    double worst = 0.0;
    const auto n = static_cast<long>(std::llround(duration / dt));
    for (long k = 0; k < n; ++k) {
        s = sim::step(s, zero, p, dt);
        worst = std::max(worst, (model::linear_momentum(s, p) - P0).norm() / P0.norm());
    }
    return make("conservation", "linear momentum without gravity (relative)", worst, 1e-8,
                "|P(0)| = " + fmt(P0.norm()) + " kg m/s");
}

CheckResult euler_lagrange(Rng& rng, double duration, double dt, const SystemParams& p) {
    Scenario sc;
    sc.params = p;
    sc.mode = Mode::Passive;
    sc.initial = sampling::random_state(rng, sampling::moderate_ranges());
    sc.integrator.dt = dt;
    sc.integrator.duration = duration;
    const ElReport r = verify::euler_lagrange_residual(sim::simulate(sc), p);
    return make("conservation", "Euler-Lagrange residual", r.max(), 1e-4,
                "ball " + fmt(r.ball) + ", plate translation " + fmt(r.plate_translation));
}

CheckResult integrator_order(Rng& rng, const SystemParams& p) {
    const SystemState s0 = sampling::random_state(rng, sampling::moderate_ranges());
    const double T = 1.0;
    const double dts[] = {4e-3, 2e-3, 1e-3};
    const SystemState ref = run_passive(s0, p, dts[2] / 16.0, T);
    double err[3];
    for (int k = 0; k < 3; ++k) err[k] = state_distance(run_passive(s0, p, dts[k], T), ref);
    const double r1 = err[0] / err[1];
    const double r2 = err[1] / err[2];
    // Distance from the accepted band [12, 20]; zero inside.
    auto outside = [](double r) { return std::max({0.0, 12.0 - r, r - 20.0}); };
    return make("conservation", "fourth-order convergence (band 12..20)",
                std::max(outside(r1), outside(r2)), 0.0,
                "error ratios " + fmt(r1) + ", " + fmt(r2));
}

CheckResult definiteness_oracle(Rng& rng, int gain_sets, int vectors) {
    int disagreements = 0, accepted = 0;
    std::string first;
    for (int k = 0; k < gain_sets; ++k) {
        const Gains g = sampling::random_gains(rng);
        const double C1 = sampling::uniform(rng, 0.0, 2.0);
        const double C2 = sampling::uniform(rng, 0.0, 1.0);
        const GainCertificate cert = verify::gain_condition_check(g, g.c0, g.c1, g.c2, C1, C2);
        const bool brute = brute_force_negative(rng, cert.W, vectors);
        accepted += cert.accepted;
        if (brute != cert.accepted || !cert.consistent()) {
            if (!disagreements++) first = "first disagreement at gain set " + std::to_string(k);
        }
    }
    return make("gains", "gain certificate agrees with brute force",
                static_cast<double>(disagreements), 0.0,
                first.empty() ? std::to_string(accepted) + "/" + std::to_string(gain_sets) + " accepted"
                              : first);
}

CheckResult definiteness_oracle_generic(Rng& rng, int matrices, int vectors) {
    int disagreements = 0;
    for (int k = 0; k < matrices; ++k) {
        Vec6 lambda;
        for (int j = 0; j < 6; ++j) lambda(j) = -sampling::uniform(rng, 0.5, 10.0);
        if (k % 2) lambda(k % 6) = sampling::uniform(rng, 2.0, 10.0);
        Mat6 G;
        for (int j = 0; j < 36; ++j) G(j) = sampling::uniform(rng, -1.0, 1.0);
        const Eigen::HouseholderQR<Mat6> qr(G);
        const Mat6 Q = qr.householderQ();
        const Mat6 W = Q * lambda.asDiagonal() * Q.transpose();
        const DefinitenessVerdict v = verify::negative_definite(W);
        const bool truth = (k % 2) == 0;
        const bool brute = brute_force_negative(rng, W, vectors);
        if (v.by_eigenvalues != truth || v.by_charpoly != truth || brute != truth) ++disagreements;
    }
    return make("gains", "definiteness verdicts on matrices of known sign",
                static_cast<double>(disagreements), 0.0);
}

}  // namespace plateswarm::suites
