#include "plateswarm/geom.hpp"

#include "plateswarm/errors.hpp"
#include "plateswarm/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plateswarm::geom {

SkewMat hat(const Vec3& v) {
    SkewMat m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vee(const Mat3& m) {
    const double asym = (m + m.transpose()).norm();
    if (asym > tol::kAlgebraic * std::max(1.0, m.norm())) {
        std::ostringstream os;
        os << "vee: input is not skew-symmetric (|M + M^T| = " << asym << ")";
        throw Error(ErrorKind::NonSkewInput, os.str());
    }
    return {m(2, 1), m(0, 2), m(1, 0)};
}

Rotation exp_so3(const Vec3& v) {
    const double angle = v.norm();
    const SkewMat k = hat(v);
    if (angle < tol::kSmallAngle) {
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    const double a = std::sin(angle) / angle;
    const double b = (1.0 - std::cos(angle)) / (angle * angle);
    return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log_so3(const Rotation& r) {
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const double angle = std::acos(c);
    const Vec3 skew{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
    if (angle < tol::kSmallAngle) {
        return 0.5 * skew;
    }
    if (M_PI - angle < 1e-6) {
        // Near pi the skew part vanishes; recover the axis from the symmetric part.
        const Mat3 b = 0.5 * (r + Mat3::Identity());
        Eigen::Index col = 0;
        b.diagonal().maxCoeff(&col);
        Vec3 axis = b.col(col) / std::sqrt(std::max(b(col, col), 1e-300));
        axis.normalize();
        if (axis.dot(skew) < 0.0) {
            axis = -axis;
        }
        return angle * axis;
    }
    return (angle / (2.0 * std::sin(angle))) * skew;
}

namespace {

// Coefficient of hat(theta)^2 in both inverse Jacobians.
double jacobian_inv_coeff(double angle) {
    if (angle < 1e-4) {
        const double a2 = angle * angle;
        return 1.0 / 12.0 + a2 / 720.0;
    }
    return 1.0 / (angle * angle) - (1.0 + std::cos(angle)) / (2.0 * angle * std::sin(angle));
}

}  // namespace

Mat3 right_jacobian_inv(const Vec3& theta) {
    const SkewMat k = hat(theta);
    return Mat3::Identity() + 0.5 * k + jacobian_inv_coeff(theta.norm()) * k * k;
}

Mat3 left_jacobian_inv(const Vec3& phi) {
    const SkewMat k = hat(phi);
    return Mat3::Identity() - 0.5 * k + jacobian_inv_coeff(phi.norm()) * k * k;
}

Rotation axis_angle(const Vec3& axis, double angle) {
    return exp_so3(axis.normalized() * angle);
}

double attitude_error_function(const Rotation& r) {
    return 0.5 * (3.0 - r.trace());
}

Vec3 attitude_error_plate(const Rotation& r) {
    return vee(0.5 * (r - r.transpose()));
}

AttitudeErrors quad_attitude_errors(const Rotation& r, const Vec3& omega, const Rotation& r_d,
                                    const Vec3& omega_d) {
    const Mat3 rel = r_d.transpose() * r;
    return {vee(0.5 * (rel - rel.transpose())), omega - r.transpose() * r_d * omega_d};
}

double orthogonality_residual(const Rotation& r) {
    return (r.transpose() * r - Mat3::Identity()).norm();
}

bool is_rotation(const Rotation& r, double tol) {
    return r.allFinite() && orthogonality_residual(r) <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Rotation orthonormalize(const Rotation& r) {
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
        u.col(2) = -u.col(2);
    }
    return u * v.transpose();
}

Quat to_quaternion(const Rotation& r) {
    Eigen::Quaterniond q(r);
    q.normalize();
    if (q.w() < 0.0) {
        q.coeffs() = -q.coeffs();
    }
    return {q.w(), q.x(), q.y(), q.z()};
}

Rotation from_quaternion(const Quat& q) {
    return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).normalized().toRotationMatrix();
}

}  // namespace plateswarm::geom
