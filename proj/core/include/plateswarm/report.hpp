#pragma once

#include "plateswarm/sim.hpp"
#include "plateswarm/trajectory_io.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace plateswarm {

struct RunSummary {
    std::string scenario;
    Mode mode = Mode::ClosedLoop;
    IntegratorConfig integrator{};
    Gains gains{};
    bool diverged = false;
    std::optional<double> diverged_at;  // [s]
    std::string message;
    double wall_time = 0.0;             // [s]
    double V_initial = 0.0;
    double V_final = 0.0;
    ConvergenceMetrics metrics{};
    SystemState terminal{};
};

namespace io {

std::string summary_json(const RunSummary& s);

/// The "metrics" object of a summary.json document.
ConvergenceMetrics metrics_from_summary_json(std::string_view text);

}  // namespace io
}  // namespace plateswarm
