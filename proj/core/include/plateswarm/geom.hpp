#pragma once

#include <Eigen/Dense>

#include <utility>

namespace plateswarm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Vector4d;  // (w, x, y, z)

/// Rotation matrices and skew matrices share the 3x3 storage; the aliases document intent.
using Rotation = Mat3;
using SkewMat = Mat3;

namespace geom {

/// Skew-symmetric matrix with hat(v) * w == v.cross(w).
SkewMat hat(const Vec3& v);

/// Inverse of hat. Throws Error{NonSkewInput} when |M + M^T| exceeds the algebraic tolerance.
Vec3 vee(const Mat3& m);

/// Rodrigues formula; second-order Taylor branch below the small-angle threshold.
Rotation exp_so3(const Vec3& v);

/// Principal logarithm, rotation angle in [0, pi].
Vec3 log_so3(const Rotation& r);

/// Inverse right Jacobian of SO(3): theta_dot = jr_inv(theta) * Omega for R = R0 exp(theta).
Mat3 right_jacobian_inv(const Vec3& theta);

/// Inverse left Jacobian of SO(3): phi_dot = jl_inv(phi) * omega for q = exp(phi) q0.
Mat3 left_jacobian_inv(const Vec3& phi);

/// Rotation by `angle` about the unit `axis`.
Rotation axis_angle(const Vec3& axis, double angle);

/// Psi(R) = 1/2 tr(I - R).
double attitude_error_function(const Rotation& r);

/// eta = 1/2 (R - R^T)^vee, the gradient of Psi on SO(3).
Vec3 attitude_error_plate(const Rotation& r);

struct AttitudeErrors {
    Vec3 e_R;
    Vec3 e_Omega;
};

/// Quadrotor attitude and angular-velocity tracking errors.
AttitudeErrors quad_attitude_errors(const Rotation& r, const Vec3& omega, const Rotation& r_d,
                                    const Vec3& omega_d);

/// ||R^T R - I||_F.
double orthogonality_residual(const Rotation& r);

/// True when R^T R = I and det R = 1 within `tol`.
bool is_rotation(const Rotation& r, double tol = 1e-9);

/// Nearest rotation in the Frobenius sense (polar factor).
Rotation orthonormalize(const Rotation& r);

/// Hamilton quaternion (w, x, y, z) with w >= 0.
Quat to_quaternion(const Rotation& r);
Rotation from_quaternion(const Quat& q);

}  // namespace geom
}  // namespace plateswarm
