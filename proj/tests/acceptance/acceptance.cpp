// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
//
// Usage: plateswarm_acceptance [paper_sec4.json] [--seed N]

#include <plateswarm/scenario_io.hpp>
#include <plateswarm/suites.hpp>
#include <plateswarm/trajectory_io.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace plateswarm;

namespace {

// Pinned tolerances.
constexpr double kBallTol = 1e-2;          // |r_b(T)| [m]
constexpr double kEtaTol = 1e-3;           // |eta(R_p(T))|
constexpr double kHeightTol = 1e-2;        // |o_p3(T)| [m]
constexpr double kRateTol = 1e-3;          // |Omega_p(T)| [rad/s]
constexpr double kDriftVelTol = 1e-3;      // variation of o_p1', o_p2' over the last 5 s [m/s]
constexpr double kRuntimeLimit = 60.0;     // [s]
constexpr double kEnergyTol = 1e-6;        // relative
constexpr double kCrossModelTol = 1e-8;
constexpr double kPflTol = 1e-8;
constexpr double kMonotoneTol = 1e-9;      // times V(0)
constexpr double kTransient = 0.5;         // [s]
constexpr double kMinRSquared = 0.99;
constexpr double kResidualTol = 1e-9;
const double kSweep[] = {0.4, 0.2, 0.1, 0.05, 0.025};

struct Verdict {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok) { passed = passed && ok; }
};

int failures = 0;

void report(int criterion, const char* title, Verdict& v) {
    std::printf("criterion %d: %s  %s: %s\n", criterion, v.passed ? "PASS" : "FAIL", title,
                v.detail.str().c_str());
    std::fflush(stdout);
    failures += !v.passed;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

struct Run {
    Trajectory traj;
    ConvergenceMetrics metrics;
    double wall = 0.0;
    bool diverged = false;
    double diverged_at = 0.0;
};

Run run(const Scenario& sc) {
    Run r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.traj = sim::simulate(sc);
    } catch (const SimulationDiverged& e) {
        r.diverged = true;
        r.diverged_at = e.time();
        r.traj = e.partial();
    }
    r.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.metrics = io::convergence_metrics(io::to_table(r.traj));
    return r;
}

/// The terminal conditions of criterion 1, runtime aside.
bool reproduces(const Run& r, std::ostringstream* os) {
    const ConvergenceMetrics& m = r.metrics;
    if (os) {
        *os << "|r_b|=" << sci(m.r_b) << " |eta|=" << sci(m.eta) << " |o_p3|=" << sci(m.height)
            << " |Omega_p|=" << sci(m.Omega_p) << " at t=" << m.t_final
            << " s; o_p1',o_p2' vary " << sci(m.v_x_variation) << ", " << sci(m.v_y_variation)
            << " m/s and |o_p1|,|o_p2| grow " << sci(m.o_x_growth) << ", " << sci(m.o_y_growth)
            << " m over the last " << m.window << " s";
    }
    return !r.diverged && m.r_b < kBallTol && m.eta < kEtaTol && m.height < kHeightTol &&
           m.Omega_p < kRateTol && m.v_x_variation < kDriftVelTol &&
           m.v_y_variation < kDriftVelTol && m.o_x_growth > 0.0 && m.o_y_growth > 0.0;
}

double max_residual(const Trajectory& traj) {
    double worst = 0.0;
    for (const Sample& s : traj.samples) worst = std::max(worst, s.diag.residuals.max());
    return worst;
}

void append(Verdict& v, const CheckResult& r) {
    v.require(r.passed);
    v.detail << r.name << " " << sci(r.value) << " (limit " << sci(r.threshold) << ")";
    if (!r.detail.empty()) v.detail << " [" << r.detail << "]";
}

}  // namespace

int main(int argc, char** argv) {
    std::string path = PLATESWARM_SCENARIO_DIR "/paper_sec4.json";
    std::uint64_t seed = 42;
    for (int k = 1; k < argc; ++k) {
        if (!std::strcmp(argv[k], "--seed") && k + 1 < argc) {
            seed = std::strtoull(argv[++k], nullptr, 10);
        } else {
            path = argv[k];
        }
    }

    Scenario paper;
    try {
        paper = io::load_scenario(path).scenario;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    const SystemParams& p = paper.params;
    std::printf("scenario %s, seed %llu\n", path.c_str(), static_cast<unsigned long long>(seed));

    // 1. Reproduction of the demonstration run.
    Run main_run = run(paper);
    {
        Verdict v;
        v.require(reproduces(main_run, &v.detail));
        v.require(main_run.wall < kRuntimeLimit);
        v.detail << "; runtime " << sci(main_run.wall) << " s (limit " << kRuntimeLimit << " s)";
        if (main_run.diverged) v.detail << "; diverged at t=" << main_run.diverged_at;
        report(1, "demonstration run converges", v);
    }

    // 2. Passive energy conservation from a randomized state.
    Run passive;
    {
        sampling::Rng rng(seed);
        Scenario sc;
        sc.params = p;
        sc.mode = Mode::Passive;
        sc.initial = sampling::random_state(rng, sampling::moderate_ranges());
        sc.integrator.dt = 1e-3;
        sc.integrator.duration = 10.0;
        passive = run(sc);
        const Sample& first = passive.traj.samples.front();
        const double E0 = first.diag.kinetic + first.diag.potential;
        double worst = 0.0;
        for (const Sample& s : passive.traj.samples) {
            worst = std::max(worst, std::abs(s.diag.kinetic + s.diag.potential - E0) / std::abs(E0));
        }
        Verdict v;
        v.require(!passive.diverged && worst < kEnergyTol);
        v.detail << "max |E(t)-E(0)|/|E(0)| = " << sci(worst) << " over 10 s at dt=1e-3 (limit "
                 << sci(kEnergyTol) << "), E(0) = " << sci(E0) << " J";
        report(2, "passive energy conservation", v);
    }

    // 3. Coupled versus tension-decoupled accelerations.
    {
        sampling::Rng rng(seed);
        Verdict v;
        const CheckResult r = suites::cross_model(rng, 1000, p);
        append(v, r);
        v.require(r.value < kCrossModelTol);
        report(3, "cross-model oracle on 1000 states", v);
    }

    // 4. Partial feedback linearization.
    {
        sampling::Rng rng(seed);
        Verdict v;
        for (const CheckResult& r : suites::pfl_consistency(rng, 1000, p)) {
            append(v, r);
            v.require(r.value < kPflTol);
            v.detail << "; ";
        }
        const CheckResult ball = suites::closed_loop_ball(rng, 1000, p);
        append(v, ball);
        v.require(ball.value < kPflTol);
        report(4, "PFL consistency on 1000 states", v);
    }

    // 5. Lyapunov monotonicity and exponential V2 decay.
    Run attitude;
    {
        Verdict v;
        const MonotonicityReport m = main_run.traj.size() > 1
                                         ? verify::lyapunov_monotonicity(main_run.traj, kTransient, kMonotoneTol)
                                         : MonotonicityReport{false, INFINITY, 0.0, 0.0, 1};
        v.require(!main_run.diverged && m.non_increasing);
        v.detail << "V increases at " << m.violations << " samples after " << kTransient
                 << " s (worst " << sci(m.worst_increase) << ", tolerance " << sci(m.tolerance) << ")";

        Scenario att = paper;
        att.mode = Mode::AttitudeOnly;
        att.integrator.duration = std::min(att.integrator.duration, 5.0);
        attitude = run(att);
        std::vector<double> t, v2;
        for (const Sample& s : attitude.traj.samples) {
            t.push_back(s.t);
            v2.push_back(s.diag.V2);
        }
        DecayFitOptions fo;
        fo.skip = kTransient;
        fo.floor_ratio = 1e-6;
        const DecayFit fit = verify::fit_exponential_decay(t, v2, fo);
        v.require(!attitude.diverged && fit.r_squared > kMinRSquared);
        v.detail << "; attitude-only log V2 fit R^2 = " << fit.r_squared << " (limit " << kMinRSquared
                 << "), rate " << sci(fit.rate) << " 1/s over [" << sci(fit.t_start) << ", "
                 << sci(fit.t_end) << "] s";
        report(5, "Lyapunov decrease", v);
    }

    // 6. Minimum-norm tension allocation.
    {
        sampling::Rng rng(seed);
        Verdict v;
        append(v, suites::allocation_reconstruction(rng, 10000, p));
        v.detail << "; ";
        append(v, suites::allocation_min_norm(rng, 100, 100, p));
        report(6, "tension allocation", v);
    }

    // 8 runs before 7 so its trajectories join the residual audit.
    std::vector<std::pair<double, Run>> sweep;
    for (double eps : kSweep) {
        Scenario sc = paper;
        sc.gains.eps = eps;
        if (eps == paper.gains.eps) {
            sweep.emplace_back(eps, std::move(main_run));
            continue;
        }
        sweep.emplace_back(eps, run(sc));
    }

    // 7. Constraint preservation and integrator order.
    {
        Verdict v;
        double worst = std::max(max_residual(passive.traj), max_residual(attitude.traj));
        int runs = 2;
        for (const auto& [eps, r] : sweep) {
            if (r.diverged) continue;
            worst = std::max(worst, max_residual(r.traj));
            ++runs;
        }
        v.require(worst < kResidualTol);
        v.detail << "max manifold residual " << sci(worst) << " over " << runs
                 << " completed runs (limit " << sci(kResidualTol) << "); ";
        sampling::Rng rng(seed);
        append(v, suites::integrator_order(rng, p));
        report(7, "constraint preservation and fourth order", v);
    }

    {
        Verdict v;
        std::optional<double> last_rate;
        bool monotone = true, reference_ok = false;
        int converged = 0;
        for (auto& [eps, r] : sweep) {
            v.detail << "eps=" << eps << ": ";
            if (r.diverged) {
                v.detail << "diverged at t=" << r.diverged_at << " s; ";
                continue;
            }
            const bool ok = reproduces(r, nullptr);
            if (eps == 0.05) reference_ok = ok;
            if (!ok) {
                v.detail << "not converged; ";
                continue;
            }
            ++converged;
            const DecayFit fit = verify::boundary_layer_monitor(r.traj).max_e_R;
            v.detail << "e_R rate " << sci(fit.rate) << " 1/s (R^2 " << sci(fit.r_squared) << "); ";
            if (last_rate && !(fit.rate > *last_rate)) monotone = false;
            last_rate = fit.rate;
            r.traj = Trajectory{};
        }
        v.require(monotone && reference_ok && converged >= 2);
        v.detail << converged << " converged, rates " << (monotone ? "increase" : "do not increase")
                 << " as eps shrinks; eps=0.05 " << (reference_ok ? "meets" : "misses")
                 << " criterion 1";
        report(8, "boundary-layer sweep", v);
    }

    // 9. Gain certificate versus brute-force quadratic forms.
    {
        sampling::Rng rng(seed);
        Verdict v;
        append(v, suites::definiteness_oracle(rng, 100, 100000));
        v.detail << "; ";
        append(v, suites::definiteness_oracle_generic(rng, 100, 100000));
        report(9, "definiteness oracle", v);
    }

    std::printf("%d of 9 criteria failed\n", failures);
    return failures ? 1 : 0;
}
