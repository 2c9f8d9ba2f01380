#pragma once

#include "plateswarm/sim.hpp"

namespace plateswarm::presets {

/// The demonstration scenario: 90 deg plate roll, ball off-centre and moving,
/// bundled default gains, 30 s at dt = 1e-3. The values of paper_sec4.json.
Scenario paper_scenario();

/// Level plate at rest with vertical tethers, closed loop.
Scenario hover_scenario();

}  // namespace plateswarm::presets
