#include "plateswarm/presets.hpp"

namespace plateswarm::presets {

Scenario paper_scenario() {
    Scenario sc;
    SystemState& s = sc.initial;
    s.r_b = Vec2(1.0, 1.0);
    s.rdot_b = Vec2(0.5, 0.5);
    s.R_p << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    s.Omega_p = Vec3(1.0, 1.0, 2.0);
    // Printed with four digits; renormalized.
    const Vec3 q_side = Vec3(-0.5126, 0.0854, 0.8544).normalized();
    s.tether[0].q = Vec3::UnitZ();
    s.tether[1].q = q_side;
    s.tether[2].q = q_side;
    sc.integrator.dt = 1e-3;
    sc.integrator.duration = 30.0;
    return sc;
}

Scenario hover_scenario() {
    Scenario sc;
    sc.integrator.duration = 5.0;
    return sc;
}

}  // namespace plateswarm::presets
