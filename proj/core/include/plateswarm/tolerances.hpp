#pragma once

namespace plateswarm::tol {

// Algebraic identities on SO(3), S^2 and skew matrices.
inline constexpr double kAlgebraic = 1e-9;
// exp/log/Jacobian series branch.
inline constexpr double kSmallAngle = 1e-8;
// Condition-number ceiling for the 8x8 acceleration solve and for AA^T.
inline constexpr double kMaxCondition = 1e12;
// Minimum tension / thrust magnitude for direction normalization [N].
inline constexpr double kMinTension = 1e-6;
inline constexpr double kMinThrust = 1e-6;
// b1 must be at least this far from b3 when building the desired attitude [rad].
inline constexpr double kGimbalAngle = 0.017453292519943295;  // 1 deg
// Any state component above this magnitude is treated as divergence.
inline constexpr double kDivergence = 1e9;

}  // namespace plateswarm::tol
