#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace plateswarm;

int main(int argc, char** argv) {
    CLI::App app{"Ball-plate transport by three tethered quadrotors: simulation and checks"};
    app.require_subcommand(1);

    cli::SimulateFlags sim;
    auto* s = app.add_subcommand("simulate", "Run a scenario and write CSV and summary files");
    s->add_option("--scenario", sim.scenario, "Scenario JSON file")->required();
    s->add_option("--out", sim.out, "Output directory (default $PLATE_SWARM_OUT or ./out)");
    s->add_option("--dt", sim.dt, "Override the integrator step [s]");
    s->add_option("--duration", sim.duration, "Override the duration [s]");
    s->add_option("--mode", sim.mode, "closed-loop, passive or attitude-only")
        ->check(CLI::IsMember({"closed-loop", "passive", "attitude-only"}));

    cli::VerifyFlags ver;
    auto* v = app.add_subcommand("verify", "Run invariant suites and write verify.json");
    v->add_option("--suite", ver.suite, "algebra, conservation, pfl, lyapunov, gains or all")
        ->check(CLI::IsMember({"algebra", "conservation", "pfl", "lyapunov", "gains", "all"}));
    v->add_option("--scenario", ver.scenario, "Scenario for the trajectory-based suites");
    v->add_option("--seed", ver.seed, "Seed of the randomized checks");
    v->add_option("--out", ver.out, "Output directory");

    cli::PlotFlags plt;
    auto* p = app.add_subcommand("plot", "Draw SVG figures from trajectory.csv");
    p->add_option("--traj", plt.traj, "trajectory.csv")->required();
    p->add_option("--out", plt.out, "Output directory");
    p->add_option("--figs", plt.figs, "attitude, omega, plate-pos, plate-vel, ball-pos, ball-vel or all")
        ->check(CLI::IsMember({"attitude", "omega", "plate-pos", "plate-vel", "ball-pos", "ball-vel", "all"}));

    cli::SweepFlags swp;
    auto* w = app.add_subcommand("sweep", "Run a scenario for several values of one parameter");
    w->add_option("--scenario", swp.scenario, "Scenario JSON file")->required();
    w->add_option("--param", swp.param, "Gain name (k1..k8, kR, kOmega, eps) or dt")->required();
    w->add_option("--values", swp.values, "Values, comma separated")->required()->delimiter(',');
    w->add_option("--out", swp.out, "Output directory");
    w->add_option("--threads", swp.threads, "Worker threads (default: hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kConfigError;
    }

    try {
        if (*s) return cli::cmd_simulate(sim);
        if (*v) return cli::cmd_verify(ver);
        if (*p) return cli::cmd_plot(plt);
        if (*w) return cli::cmd_sweep(swp);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kConfigError;
    }
    return cli::kConfigError;
}
