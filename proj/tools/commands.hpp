#pragma once

#include <plateswarm/scenario_io.hpp>
#include <plateswarm/sim.hpp>
#include <plateswarm/trajectory_io.hpp>
#include <plateswarm/verify.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace plateswarm::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kDiverged = 2, kVerifyFailed = 3 };

/// --out if given, else $PLATE_SWARM_OUT, else ./out.
std::filesystem::path output_dir(const std::string& flag);

struct RunOutcome {
    bool diverged = false;
    std::optional<double> diverged_at;
    std::string message;
    Trajectory trajectory;
    ConvergenceMetrics metrics;
    double wall_time = 0.0;
};

/// Simulates and writes trajectory.csv, controls.csv and summary.json into `dir`.
/// A diverged run still writes everything up to the failure.
RunOutcome run_and_write(const Scenario& sc, const std::string& name,
                         const std::filesystem::path& dir, bool write_trajectory = true);

/// Criterion-style terminal check used for the sweep's converged flag.
bool converged(const ConvergenceMetrics& m);

struct SimulateFlags {
    std::string scenario;
    std::string out;
    std::optional<double> dt;
    std::optional<double> duration;
    std::optional<std::string> mode;
};

struct VerifyFlags {
    std::string suite = "all";
    std::string scenario;
    std::string out;
    std::uint64_t seed = 42;
};

struct PlotFlags {
    std::string traj;
    std::string out;
    std::string figs = "all";
};

struct SweepFlags {
    std::string scenario;
    std::string param;
    std::vector<double> values;
    std::string out;
    unsigned threads = 0;
};

int cmd_simulate(const SimulateFlags& f);
int cmd_verify(const VerifyFlags& f);
int cmd_plot(const PlotFlags& f);
int cmd_sweep(const SweepFlags& f);

}  // namespace plateswarm::cli
