#include "plateswarm/verify.hpp"

#include "plateswarm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plateswarm::verify {

namespace {

const Vec3 kE3 = Vec3::UnitZ();

void require_samples(const Trajectory& traj, std::size_t n, const char* who) {
    if (traj.size() < n) {
        std::ostringstream os;
        os << who << ": need at least " << n << " samples, got " << traj.size();
        throw Error(ErrorKind::InsufficientSamples, os.str());
    }
}

double lagrangian(const SystemState& s, const SystemParams& p) {
    return model::kinetic_energy(s, p) - model::potential_energy(s, p);
}

// Central-difference gradient of the Lagrangian with respect to a block of the state.
template <int N, class Access>
Eigen::Matrix<double, N, 1> partial(const SystemState& s, const SystemParams& p, double h,
                                    Access&& access) {
    Eigen::Matrix<double, N, 1> g;
    for (int j = 0; j < N; ++j) {
        SystemState plus = s;
        SystemState minus = s;
        access(plus)(j) += h;
        access(minus)(j) -= h;
        g(j) = (lagrangian(plus, p) - lagrangian(minus, p)) / (2.0 * h);
    }
    return g;
}

double power(const Sample& sm, const SystemParams& p) {
    const PerVehicle<Vec3> v = model::quad_velocities(sm.state, p);
    double P = 0.0;
    for (int i = 0; i < kVehicles; ++i) {
        P += sm.applied.u[i].dot(v[i]) + sm.applied.M[i].dot(sm.state.quad[i].Omega);
    }
    return P;
}

}  // namespace

double lyapunov_V(const SystemState& s, const Gains& g, double c1, double c2) {
    const Vec3 eta = geom::attitude_error_plate(s.R_p);
    const double psi = geom::attitude_error_function(s.R_p);
    const double z = s.o_p.dot(kE3);
    const double zd = s.v_p.dot(kE3);
    return 0.5 * (g.k4 + c1 * g.k3) * s.r_b.squaredNorm() + c1 * s.r_b.dot(s.rdot_b) +
           0.5 * s.rdot_b.squaredNorm() + (g.k2 + c2 * g.k1) * psi + c2 * eta.dot(s.Omega_p) +
           0.5 * s.Omega_p.squaredNorm() + 0.5 * g.k6 * z * z + 0.5 * zd * zd;
}

double lyapunov_V2(const Rotation& R_p, const Vec3& Omega_p, const Gains& g, double c0) {
    const Vec3 eta = geom::attitude_error_plate(R_p);
    return 0.5 * Omega_p.squaredNorm() + c0 * eta.dot(Omega_p) +
           (g.k2 + c0 * g.k1) * geom::attitude_error_function(R_p);
}

LyapunovSample lyapunov_sample(double t, const SystemState& s, const Gains& g) {
    LyapunovSample out;
    out.t = t;
    out.V = lyapunov_V(s, g, g.c1, g.c2);
    out.V2 = lyapunov_V2(s.R_p, s.Omega_p, g, g.c0);
    out.z << s.r_b.norm(), s.rdot_b.norm(), geom::attitude_error_plate(s.R_p).norm(),
        s.Omega_p.norm(), std::abs(s.o_p.dot(kE3)), std::abs(s.v_p.dot(kE3));
    return out;
}

Mat6 gain_matrix(const Gains& g, double c1, double c2, double C1, double C2) {
    Mat6 W = Mat6::Zero();
    const double a = 0.5 * (g.k2 * C2 + g.k1 * C1);
    const double b = 0.5 * g.k4 + 0.5 * C1 * C1;
    const double c = 0.5 * g.k3 + 0.5 * C2 * C2;
    W(0, 0) = -c1 * g.k4;
    W(0, 1) = a;
    W(0, 5) = b;
    W(1, 0) = a;
    W(1, 1) = -g.k3 + c1;
    W(1, 5) = c;
    W(2, 2) = -c2 * g.k2;
    W(3, 3) = -g.k1 + c2;
    W(4, 4) = 2.0 * g.k6;
    W(4, 5) = g.k5;
    W(5, 0) = b;
    W(5, 1) = c;
    W(5, 4) = g.k5;
    W(5, 5) = -g.k5;
    return W;
}

Eigen::Matrix<double, 7, 1> characteristic_polynomial(const Mat6& m) {
    constexpr int n = 6;
    Eigen::Matrix<double, 7, 1> c;
    c(n) = 1.0;
    Mat6 Mk = Mat6::Zero();
    for (int k = 1; k <= n; ++k) {
        Mk = m * Mk + c(n - k + 1) * Mat6::Identity();
        c(n - k) = -(m * Mk).trace() / k;
    }
    return c;
}

DefinitenessVerdict negative_definite(const Mat6& m) {
    const Mat6 sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat6> eig(sym, Eigen::EigenvaluesOnly);
    DefinitenessVerdict v;
    v.eigenvalues = eig.eigenvalues();
    v.by_eigenvalues = v.eigenvalues.maxCoeff() < 0.0;
    v.charpoly = characteristic_polynomial(sym);
    // All roots real (symmetric), so det(lambda I - W) has only negative roots
    // exactly when every coefficient is positive.
    v.by_charpoly = (v.charpoly.array() > 0.0).all();
    return v;
}

GainCertificate gain_condition_check(const Gains& g, double c0, double c1, double c2, double C1,
                                     double C2) {
    GainCertificate cert;
    cert.gains = g;
    cert.c0 = c0;
    cert.c1 = c1;
    cert.c2 = c2;
    cert.C1 = C1;
    cert.C2 = C2;
    cert.W = gain_matrix(g, c1, c2, C1, C2);
    const DefinitenessVerdict v = negative_definite(cert.W);
    cert.eigenvalues = v.eigenvalues;
    cert.charpoly = v.charpoly;
    cert.accepted = v.by_eigenvalues;
    cert.charpoly_accepts = v.by_charpoly;
    cert.positive_diagonal = (cert.W.diagonal().array() >= 0.0).any();
    return cert;
}

AttitudeBounds attitude_bounds_from_initial(const SystemState& s0, const Gains& g, double c0) {
    const double v2 = lyapunov_V2(s0.R_p, s0.Omega_p, g, c0);
    Eigen::Matrix2d P;
    P << g.k2 + c0 * g.k1, -c0, -c0, 1.0;
    const Eigen::Matrix2d Pinv = P.inverse();
    AttitudeBounds b;
    b.C1 = std::sqrt(std::max(0.0, 2.0 * v2 * Pinv(1, 1)));
    b.C2 = std::min(1.0, std::sqrt(std::max(0.0, 2.0 * v2 * Pinv(0, 0))));
    return b;
}

DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& value,
                               const DecayFitOptions& opt) {
    if (t.size() != value.size()) {
        throw Error(ErrorKind::InvalidConfig, "fit_exponential_decay: size mismatch");
    }
    DecayFit fit;
    if (t.empty()) return fit;

    const double t0 = t.front() + opt.skip;
    std::size_t first = 0;
    while (first + 1 < t.size() && t[first] < t0) ++first;
    std::size_t ipeak = first;
    for (std::size_t k = first; k < t.size() && t[k] <= t0 + opt.search_window; ++k) {
        if (value[k] > value[ipeak]) ipeak = k;
    }
    fit.peak = value[ipeak];
    fit.t_start = t[ipeak];
    const double floor = std::max(opt.floor_ratio * fit.peak, opt.absolute_floor);

    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    std::size_t n = 0;
    for (std::size_t k = ipeak; k < t.size(); ++k) {
        if (!(value[k] > floor) && k != ipeak) break;
        if (!(value[k] > 0.0)) break;
        const double y = std::log(value[k]);
        st += t[k];
        sy += y;
        stt += t[k] * t[k];
        sty += t[k] * y;
        syy += y * y;
        fit.t_end = t[k];
        ++n;
    }
    fit.points = n;
    if (n < 3) return fit;

    const double dn = static_cast<double>(n);
    const double var_t = stt - st * st / dn;
    const double cov = sty - st * sy / dn;
    const double var_y = syy - sy * sy / dn;
    if (!(var_t > 0.0)) return fit;
    const double slope = cov / var_t;
    fit.rate = -slope;
    fit.r_squared = var_y > 1e-300 ? std::clamp(cov * cov / (var_t * var_y), 0.0, 1.0) : 0.0;
    fit.exponential = fit.rate > opt.min_rate && fit.r_squared >= opt.min_r_squared;
    return fit;
}

BoundaryLayerReport boundary_layer_monitor(const Trajectory& traj, double transient,
                                           const DecayFitOptions& opt) {
    require_samples(traj, 3, "boundary_layer_monitor");
    std::vector<double> t;
    PerVehicle<std::vector<double>> eR, eW;
    std::vector<double> eR_max;
    for (const Sample& sm : traj.samples) {
        if (!sm.trace) {
            throw Error(ErrorKind::InsufficientSamples,
                        "boundary_layer_monitor: trajectory carries no control traces");
        }
        t.push_back(sm.t);
        double m = 0.0;
        for (int i = 0; i < kVehicles; ++i) {
            eR[i].push_back(sm.trace->e_R[i].norm());
            eW[i].push_back(sm.trace->e_Omega[i].norm());
            m = std::max(m, eR[i].back());
        }
        eR_max.push_back(m);
    }

    BoundaryLayerReport rep;
    rep.transient = transient;
    for (int i = 0; i < kVehicles; ++i) {
        rep.quad[i].e_R = fit_exponential_decay(t, eR[i], opt);
        rep.quad[i].e_Omega = fit_exponential_decay(t, eW[i], opt);
        bool mono = true;
        for (std::size_t k = 1; k < t.size(); ++k) {
            if (t[k - 1] < transient) continue;
            if (eR[i][k] > eR[i][k - 1] * (1.0 + 1e-9) + 1e-12) {
                mono = false;
                break;
            }
        }
        rep.quad[i].monotone_after_transient = mono;
    }
    rep.max_e_R = fit_exponential_decay(t, eR_max, opt);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < transient) continue;
        for (int i = 0; i < kVehicles; ++i) {
            rep.max_e_R_after_transient = std::max(rep.max_e_R_after_transient, eR[i][k]);
            rep.max_e_Omega_after_transient = std::max(rep.max_e_Omega_after_transient, eW[i][k]);
        }
    }
    return rep;
}

ElReport euler_lagrange_residual(const Trajectory& traj, const SystemParams& p) {
    require_samples(traj, 5, "euler_lagrange_residual");
    // L is quadratic in (r_b, r_b', o_p'), linear in o_p: central differences of any
    // step are exact there, so a large step only reduces roundoff.
    const double hv = 1e-3;
    const double hx = 1e-3;
    const std::size_t n = traj.size();

    std::vector<Vec2> p_ball(n);
    std::vector<Vec3> p_plate(n);
    for (std::size_t k = 0; k < n; ++k) {
        const SystemState& s = traj.samples[k].state;
        p_ball[k] = partial<2>(s, p, hv, [](SystemState& x) -> Vec2& { return x.rdot_b; });
        p_plate[k] = partial<3>(s, p, hv, [](SystemState& x) -> Vec3& { return x.v_p; });
    }

    ElReport rep;
    for (std::size_t k = 2; k + 2 < n; ++k) {
        const Sample& sm = traj.samples[k];
        // Five-point stencil on uniformly spaced samples.
        const double h = (traj.samples[k + 2].t - traj.samples[k - 2].t) / 4.0;
        const Vec2 dball =
            (p_ball[k - 2] - 8.0 * p_ball[k - 1] + 8.0 * p_ball[k + 1] - p_ball[k + 2]) / (12.0 * h);
        const Vec3 dplate = (p_plate[k - 2] - 8.0 * p_plate[k - 1] + 8.0 * p_plate[k + 1] -
                             p_plate[k + 2]) / (12.0 * h);
        const Vec2 gball = partial<2>(sm.state, p, hx, [](SystemState& x) -> Vec2& { return x.r_b; });
        const Vec3 gplate = partial<3>(sm.state, p, hx, [](SystemState& x) -> Vec3& { return x.o_p; });
        Vec3 force = Vec3::Zero();
        for (int i = 0; i < kVehicles; ++i) force += sm.applied.u[i];
        rep.ball = std::max(rep.ball, (dball - gball).cwiseAbs().maxCoeff());
        rep.plate_translation =
            std::max(rep.plate_translation, (dplate - gplate - force).cwiseAbs().maxCoeff());
    }
    return rep;
}

EnergyAudit energy_audit(const Trajectory& traj, const SystemParams& p) {
    require_samples(traj, 3, "energy_audit");
    const std::size_t n = traj.size();
    std::vector<double> E(n);
    EnergyAudit a;
    for (std::size_t k = 0; k < n; ++k) {
        E[k] = model::total_energy(traj.samples[k].state, p);
        a.energy_scale = std::max(a.energy_scale, std::abs(E[k]));
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h = traj.samples[k + 1].t - traj.samples[k - 1].t;
        const double dE = (E[k + 1] - E[k - 1]) / h;
        const double P = power(traj.samples[k], p);
        a.max_abs = std::max(a.max_abs, std::abs(dE - P));
        a.max_power = std::max(a.max_power, std::abs(P));
    }
    a.relative = a.energy_scale > 0.0 ? a.max_abs / a.energy_scale : a.max_abs;
    return a;
}

MonotonicityReport lyapunov_monotonicity(const Trajectory& traj, double transient,
                                         double rel_tol) {
    require_samples(traj, 2, "lyapunov_monotonicity");
    MonotonicityReport rep;
    rep.tolerance = rel_tol * traj.samples.front().diag.V;
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const Sample& a = traj.samples[k];
        if (a.t < transient) continue;
        const double inc = traj.samples[k + 1].diag.V - a.diag.V;
        if (inc > rep.tolerance) {
            rep.non_increasing = false;
            ++rep.violations;
        }
        if (inc > rep.worst_increase) {
            rep.worst_increase = inc;
            rep.t_worst = a.t;
        }
    }
    return rep;
}

InternalDynamicsReport internal_dynamics(const Trajectory& traj, double window) {
    require_samples(traj, 2, "internal_dynamics");
    InternalDynamicsReport rep;
    rep.window = window;
    const Sample& last = traj.back();
    const double t_from = last.t - window;
    double vx_min = last.state.v_p.x(), vx_max = vx_min;
    double vy_min = last.state.v_p.y(), vy_max = vy_min;
    const Sample* first = &last;
    for (auto it = traj.samples.rbegin(); it != traj.samples.rend(); ++it) {
        if (it->t < t_from - 1e-12) break;
        first = &*it;
        vx_min = std::min(vx_min, it->state.v_p.x());
        vx_max = std::max(vx_max, it->state.v_p.x());
        vy_min = std::min(vy_min, it->state.v_p.y());
        vy_max = std::max(vy_max, it->state.v_p.y());
    }
    rep.v_x_variation = vx_max - vx_min;
    rep.v_y_variation = vy_max - vy_min;
    rep.v_x_final = last.state.v_p.x();
    rep.v_y_final = last.state.v_p.y();
    rep.o_x_growth = std::abs(last.state.o_p.x()) - std::abs(first->state.o_p.x());
    rep.o_y_growth = std::abs(last.state.o_p.y()) - std::abs(first->state.o_p.y());
    return rep;
}

HeightConditionReport height_condition(const Trajectory& traj, const Gains& g,
                                       const SystemParams& p, double transient) {
    HeightConditionReport rep;
    for (const Sample& sm : traj.samples) {
        if (sm.t < transient) continue;
        ++rep.samples;
        const double c = kE3.dot(sm.state.R_p * kE3);
        const double bound = p.g * std::abs(1.0 - c * c) / g.k5;
        if (std::abs(sm.state.v_p.z()) <= bound) ++rep.violations;
    }
    return rep;
}

}  // namespace plateswarm::verify
