#include "commands.hpp"

#include <plateswarm/report.hpp>
#include <plateswarm/suites.hpp>
#include <plateswarm/svg.hpp>
#include <plateswarm/trajectory_io.hpp>

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace plateswarm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
    return out;
}

LoadedScenario load(const std::string& path) {
    LoadedScenario ls = io::load_scenario(path);
    for (const std::string& note : ls.notes) std::cerr << "note: " << note << "\n";
    return ls;
}

const std::map<std::string, double Gains::*>& sweepable_gains() {
    static const std::map<std::string, double Gains::*> m{
        {"k1", &Gains::k1}, {"k2", &Gains::k2}, {"k3", &Gains::k3},   {"k4", &Gains::k4},
        {"k5", &Gains::k5}, {"k6", &Gains::k6}, {"k7", &Gains::k7},   {"k8", &Gains::k8},
        {"kR", &Gains::kR}, {"kOmega", &Gains::kOmega}, {"eps", &Gains::eps},
    };
    return m;
}

std::string value_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("PLATE_SWARM_OUT"); env && *env) return env;
    return "out";
}

bool converged(const ConvergenceMetrics& m) {
    return m.r_b < 1e-2 && m.eta < 1e-3 && m.height < 1e-2 && m.Omega_p < 1e-3;
}

RunOutcome run_and_write(const Scenario& sc, const std::string& name, const fs::path& dir,
                         bool write_trajectory) {
    fs::create_directories(dir);
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        out.trajectory = sim::simulate(sc);
    } catch (const SimulationDiverged& e) {
        out.diverged = true;
        out.diverged_at = e.time();
        out.message = e.what();
        out.trajectory = e.partial();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidConfig || e.kind() == ErrorKind::InvalidParams ||
            e.kind() == ErrorKind::InvalidState || e.kind() == ErrorKind::InvalidGains) {
            throw;
        }
        out.diverged = true;
        out.message = e.what();
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const TrajectoryTable table = io::to_table(out.trajectory);
    out.metrics = io::convergence_metrics(table);
    if (write_trajectory) {
        std::ofstream csv = open_out(dir / "trajectory.csv");
        io::write_trajectory_csv(csv, table);
        std::ofstream ctl = open_out(dir / "controls.csv");
        io::write_controls_csv(ctl, out.trajectory, sc.integrator.decimation);
    }

    RunSummary s;
    s.scenario = name;
    s.mode = sc.mode;
    s.integrator = sc.integrator;
    s.gains = sc.gains;
    s.diverged = out.diverged;
    s.diverged_at = out.diverged_at;
    s.message = out.message;
    s.wall_time = out.wall_time;
    s.metrics = out.metrics;
    if (!out.trajectory.empty()) {
        s.V_initial = out.trajectory.samples.front().diag.V;
        s.V_final = out.trajectory.back().diag.V;
        s.terminal = out.trajectory.back().state;
    }
    open_out(dir / "summary.json") << io::summary_json(s);
    return out;
}

int cmd_simulate(const SimulateFlags& f) {
    Scenario sc = load(f.scenario).scenario;
    if (f.dt) sc.integrator.dt = *f.dt;
    if (f.duration) sc.integrator.duration = *f.duration;
    if (f.mode) sc.mode = mode_from_string(*f.mode);
    sc.validate();

    const fs::path dir = output_dir(f.out);
    const RunOutcome r = run_and_write(sc, f.scenario, dir);
    const ConvergenceMetrics& m = r.metrics;
    std::printf("%s: %zu samples to t = %.6g s in %.2f s wall time\n", f.scenario.c_str(),
                m.samples, m.t_final, r.wall_time);
    std::printf("  |r_b| = %.3e m  |eta| = %.3e  |o_p3| = %.3e m  |Omega_p| = %.3e rad/s\n", m.r_b,
                m.eta, m.height, m.Omega_p);
    std::printf("  max residuals: q %.2e  omega.q %.2e  R %.2e\n", m.max_res_q, m.max_res_omega,
                m.max_res_R);
    std::printf("  wrote %s\n", dir.string().c_str());
    if (r.diverged) {
        std::fprintf(stderr, "diverged: %s\n", r.message.c_str());
        return kDiverged;
    }
    return kOk;
}

int cmd_verify(const VerifyFlags& f) {
    SuiteOptions opt;
    opt.seed = f.seed;
    if (!f.scenario.empty()) opt.scenario = load(f.scenario).scenario;

    const std::vector<CheckResult> results = suites::run(f.suite, opt);
    bool all = true;
    const CheckResult* first_failure = nullptr;
    std::printf("%-13s %-55s %-6s %12s %12s\n", "suite", "check", "result", "value", "limit");
    for (const CheckResult& r : results) {
        std::printf("%-13s %-55s %-6s %12.4g %12.4g\n", r.suite.c_str(), r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", r.value, r.threshold);
        if (!r.detail.empty()) std::printf("%13s   %s\n", "", r.detail.c_str());
        if (!r.passed && !first_failure) first_failure = &r;
        all = all && r.passed;
    }

    json doc;
    doc["suite"] = f.suite;
    doc["seed"] = f.seed;
    doc["scenario"] = f.scenario.empty() ? "built-in paper scenario" : f.scenario;
    doc["passed"] = all;
    doc["checks"] = json::array();
    for (const CheckResult& r : results) {
        doc["checks"].push_back({{"suite", r.suite},
                                 {"name", r.name},
                                 {"passed", r.passed},
                                 {"value", std::isfinite(r.value) ? json(r.value) : json("inf")},
                                 {"threshold", r.threshold},
                                 {"detail", r.detail}});
    }
    const fs::path dir = output_dir(f.out);
    fs::create_directories(dir);
    open_out(dir / "verify.json") << doc.dump(2) << "\n";

    if (!all) {
        std::fprintf(stderr, "first failure: %s / %s: value %.6g exceeds %.6g (seed %llu)%s%s\n",
                     first_failure->suite.c_str(), first_failure->name.c_str(),
                     first_failure->value, first_failure->threshold,
                     static_cast<unsigned long long>(f.seed),
                     first_failure->detail.empty() ? "" : "; ", first_failure->detail.c_str());
        return kVerifyFailed;
    }
    return kOk;
}

int cmd_plot(const PlotFlags& f) {
    std::ifstream in(f.traj);
    if (!in) throw Error(ErrorKind::InvalidConfig, f.traj + ": cannot open");
    const TrajectoryTable table = io::read_trajectory_csv(in);

    const fs::path dir = output_dir(f.out);
    fs::create_directories(dir);
    std::vector<std::string> names;
    if (f.figs == "all") {
        names = plot::figure_names();
    } else {
        names.push_back(f.figs);
    }
    for (const std::string& name : names) {
        const Figure fig = plot::figure(table, name);
        const fs::path path = dir / (name + ".svg");
        open_out(path) << plot::render_svg(fig.chart);
        std::printf("wrote %s\n", path.string().c_str());
    }
    return kOk;
}

int cmd_sweep(const SweepFlags& f) {
    const Scenario base = load(f.scenario).scenario;
    const auto& gains = sweepable_gains();
    if (f.param != "dt" && !gains.count(f.param)) {
        throw Error(ErrorKind::InvalidConfig, "sweep: unknown parameter '" + f.param + "'");
    }
    std::vector<Scenario> runs;
    for (double v : f.values) {
        Scenario sc = base;
        if (f.param == "dt") {
            sc.integrator.dt = v;
        } else {
            sc.gains.*gains.at(f.param) = v;
        }
        sc.validate();
        runs.push_back(std::move(sc));
    }

    const fs::path dir = output_dir(f.out);
    fs::create_directories(dir);

    struct Row {
        RunOutcome outcome;
        DecayFit fit;
        std::string error;
    };
    std::vector<Row> rows(runs.size());
    std::atomic<std::size_t> next{0};
    std::mutex print;
    auto worker = [&] {
        for (std::size_t k; (k = next++) < runs.size();) {
            const std::string label = f.param + "=" + value_label(f.values[k]);
            Row& row = rows[k];
            try {
                row.outcome = run_and_write(runs[k], f.scenario, dir / label, false);
                row.fit = verify::boundary_layer_monitor(row.outcome.trajectory).max_e_R;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            row.outcome.trajectory = Trajectory{};  // release memory early
            const std::lock_guard<std::mutex> lock(print);
            std::printf("%s: %s\n", label.c_str(),
                        !row.error.empty()         ? row.error.c_str()
                        : row.outcome.diverged     ? "diverged"
                        : converged(row.outcome.metrics) ? "converged"
                                                   : "finished, not converged");
        }
    };
    unsigned n = f.threads ? f.threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(runs.size()));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    std::ofstream csv = open_out(dir / "sweep.csv");
    csv << "value,converged,diverged,diverged_at,t_final,r_b,eta,height,Omega_p,v_x_variation,"
           "v_y_variation,e_R_rate,e_R_r_squared,wall_time\n";
    bool any_ok = false;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const RunOutcome& o = rows[k].outcome;
        const ConvergenceMetrics& m = o.metrics;
        const bool failed = o.diverged || !rows[k].error.empty();
        any_ok = any_ok || !failed;
        const double values[] = {f.values[k],
                                 (!failed && converged(m)) ? 1.0 : 0.0,
                                 failed ? 1.0 : 0.0,
                                 o.diverged_at.value_or(NAN),
                                 m.t_final, m.r_b, m.eta, m.height, m.Omega_p,
                                 m.v_x_variation, m.v_y_variation,
                                 rows[k].fit.rate, rows[k].fit.r_squared, o.wall_time};
        io::write_row(csv, values, std::size(values));
    }
    std::printf("wrote %s\n", (dir / "sweep.csv").string().c_str());
    return any_ok ? kOk : kDiverged;
}

}  // namespace plateswarm::cli
