#pragma once

#include "plateswarm/model.hpp"

namespace plateswarm::rkmk {

// Local coordinates of a step around a base state.
// Layout: o(3) v(3) theta_p(3) Omega_p(3) r(2) rdot(2) | per tether phi(3) omega(3) |
// per quadrotor theta(3) Omega(3). Rotations move as R0 exp(theta), tethers as exp(phi) q0.
inline constexpr int kTetherBase = 16;
inline constexpr int kQuadBase = kTetherBase + 6 * kVehicles;
inline constexpr int kDim = kQuadBase + 6 * kVehicles;
using Local = Eigen::Matrix<double, kDim, 1>;

SystemState retract(const SystemState& s0, const Local& y);

/// State rates pulled back to local coordinates at y.
Local local_rates(const SystemState& s, const Local& y, const Accelerations& acc);

/// One classical RK4 step in local coordinates, without projection.
template <class Dynamics>
SystemState step(const SystemState& s0, double dt, Dynamics&& dynamics) {
    const Local zero = Local::Zero();
    const Local k1 = local_rates(s0, zero, dynamics(s0));
    const Local y2 = 0.5 * dt * k1;
    const SystemState s2 = retract(s0, y2);
    const Local k2 = local_rates(s2, y2, dynamics(s2));
    const Local y3 = 0.5 * dt * k2;
    const SystemState s3 = retract(s0, y3);
    const Local k3 = local_rates(s3, y3, dynamics(s3));
    const Local y4 = dt * k3;
    const SystemState s4 = retract(s0, y4);
    const Local k4 = local_rates(s4, y4, dynamics(s4));
    return retract(s0, (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace plateswarm::rkmk
