#pragma once

#include "plateswarm/control.hpp"
#include "plateswarm/model.hpp"

#include <cmath>
#include <random>

namespace plateswarm::sampling {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
Vec3 uniform_vec(Rng& rng, double bound);  // each component in [-bound, bound]
Vec3 unit_vec(Rng& rng);
Rotation random_rotation(Rng& rng, double max_angle = M_PI);

struct StateRanges {
    double position = 1.0;        // o_p, r_b components
    double velocity = 1.0;        // v_p, r_b' components
    double plate_rate = 1.0;      // Omega_p components
    double tether_rate = 1.0;     // omega_i components before projection
    double quad_rate = 1.0;       // quadrotor Omega components
    double plate_angle = M_PI;    // max rotation angle of R_p from I
    double quad_angle = M_PI;
    double min_tether_z = -1.0;   // lower bound on the vertical component of q_i
};

/// Valid state drawn uniformly within the ranges.
SystemState random_state(Rng& rng, const StateRanges& r = {});

/// Gentler ranges: rates up to 1, tethers at least 30 deg above the plate plane.
StateRanges moderate_ranges();

/// Every gain drawn log-uniformly in [0.1, 100]; eps in [0.01, 1]; c's in [1e-3, 0.1].
Gains random_gains(Rng& rng);

}  // namespace plateswarm::sampling
