#include "plateswarm/model.hpp"

#include "plateswarm/errors.hpp"
#include "plateswarm/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace plateswarm {

using geom::hat;

namespace {

const Vec3 kE3 = Vec3::UnitZ();

bool spd(const Mat3& m) {
    if (!m.allFinite() || (m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm())) {
        return false;
    }
    return Eigen::LLT<Mat3>(m).info() == Eigen::Success;
}

std::string vec_str(const Vec3& v) {
    std::ostringstream os;
    os << "[" << v.x() << ", " << v.y() << ", " << v.z() << "]";
    return os.str();
}

// Quantities shared by every equation of the ball-plate subsystem.
struct PlateTerms {
    Vec3 Er;           // E r_b
    Vec3 Erdot;        // E r_b'
    Mat3 Omega_hat;
    Mat3 Omega_hat2;
    Mat3 Er_hat;
    Vec3 gR;           // R_p^T g e3
    // Ball acceleration in the plate frame minus the r_b'', o_p'', Omega_p'' contributions.
    Vec3 ball_bias;

    PlateTerms(const SystemState& s, const SystemParams& p) {
        Er = SystemParams::E() * s.r_b;
        Erdot = SystemParams::E() * s.rdot_b;
        Omega_hat = hat(s.Omega_p);
        Omega_hat2 = Omega_hat * Omega_hat;
        Er_hat = hat(Er);
        gR = s.R_p.transpose() * (p.g * kE3);
        ball_bias = Omega_hat2 * Er + 2.0 * Omega_hat * Erdot + gR;
    }
};

// Equations for the plate translation, ball and plate orientation, evaluated as
// residual = lhs - rhs for given (r_b'', o_p'', Omega_p'').
struct PlateResiduals {
    Vec3 translation;
    Vec2 ball;
    Vec3 orientation;
};

PlateResiduals coupled_plate_residuals(const SystemState& s, const ControlInput& u,
                                       const SystemParams& p, const PlateTerms& t,
                                       const Vec2& rddot_b, const Vec3& a_p,
                                       const Vec3& dOmega_p) {
    const Mat32 E = SystemParams::E();
    const Rotation& R = s.R_p;
    const Vec3 g3 = p.g * kE3;

    // Ball acceleration relative terms, plate frame.
    const Vec3 ball_rel = R.transpose() * a_p + t.Omega_hat2 * t.Er - t.Er_hat * dOmega_p +
                          2.0 * t.Omega_hat * t.Erdot + E * rddot_b + t.gR;

    Mat3 trans_mass = p.m_p * Mat3::Identity();
    Vec3 trans = Vec3::Zero();
    Mat3 rot_inertia = p.J_p;
    Vec3 rot = t.Omega_hat * p.J_p * s.Omega_p;
    Vec3 rhs_trans = Vec3::Zero();
    Vec3 rhs_rot = Vec3::Zero();

    for (int i = 0; i < kVehicles; ++i) {
        const auto& qp = p.quad[i];
        const Vec3& q = s.tether[i].q;
        const Mat3 P = model::along(q);
        const Mat3 x_hat = hat(qp.attachment);
        const double w2 = s.tether[i].omega.squaredNorm();
        const Vec3 arm_acc = R * t.Omega_hat2 * qp.attachment - R * x_hat * dOmega_p;

        trans_mass += qp.mass * P;
        trans += qp.mass * P * arm_acc - qp.mass * qp.cable_length * w2 * q;
        rhs_trans += P * u.u[i];

        rot_inertia -= qp.mass * x_hat * R.transpose() * P * R * x_hat;
        rot += qp.mass * x_hat * R.transpose() * P * (a_p + g3 - qp.cable_length * w2 * q);
        rhs_rot += x_hat * R.transpose() * P *
                   (u.u[i] - qp.mass * R * t.Omega_hat2 * qp.attachment);
    }

    PlateResiduals r;
    r.translation = trans_mass * (a_p + g3) + trans + p.m_b * (R * ball_rel) - rhs_trans;
    r.ball = p.m_b * E.transpose() * ball_rel;
    // The Omega_p'' term of the tether projections is already inside rot_inertia.
    r.orientation = rot_inertia * dOmega_p + rot + p.m_b * t.Er_hat * ball_rel - rhs_rot;
    return r;
}

Vec8 stack(const PlateResiduals& r) {
    Vec8 v;
    v << r.translation, r.ball, r.orientation;
    return v;
}

Vec3 tether_rate(const SystemState& s, const ControlInput& u, const SystemParams& p,
                 const PlateTerms& t, int i, const Vec3& a_p, const Vec3& dOmega_p) {
    const auto& qp = p.quad[i];
    const Vec3& q = s.tether[i].q;
    const Vec3 drive = (u.u[i] - qp.mass * p.g * kE3) / qp.mass - a_p -
                       s.R_p * t.Omega_hat2 * qp.attachment +
                       s.R_p * hat(qp.attachment) * dOmega_p;
    return hat(q) * drive / qp.cable_length;
}

Vec3 quad_rate(const SystemState& s, const ControlInput& u, const SystemParams& p, int i) {
    const Mat3& J = p.quad[i].inertia;
    const Vec3& w = s.quad[i].Omega;
    return J.ldlt().solve(u.M[i] - w.cross(J * w));
}

template <class Solver>
void check_condition(const Solver& svd, const char* what) {
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond <= tol::kMaxCondition)) {
        std::ostringstream os;
        os << what << ": condition number " << cond << " exceeds " << tol::kMaxCondition;
        throw Error(ErrorKind::SingularMassMatrix, os.str());
    }
}

}  // namespace

PerVehicle<QuadrotorParams> default_quadrotors() {
    PerVehicle<QuadrotorParams> q;
    const double bearing[kVehicles] = {90.0, 210.0, 330.0};
    for (int i = 0; i < kVehicles; ++i) {
        const double a = bearing[i] * M_PI / 180.0;
        q[i].attachment = Vec3(0.5 * std::cos(a), 0.5 * std::sin(a), 0.0);
    }
    return q;
}

Mat32 SystemParams::E() {
    Mat32 e;
    e << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    return e;
}

double SystemParams::total_mass() const {
    double m = m_p + m_b;
    for (const auto& q : quad) {
        m += q.mass;
    }
    return m;
}

void SystemParams::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); };
    if (!(m_p > 0.0) || !std::isfinite(m_p)) fail("plate mass m_p must be positive");
    if (!(m_b > 0.0) || !std::isfinite(m_b)) fail("ball mass m_b must be positive");
    if (!spd(J_p)) fail("plate inertia J_p must be symmetric positive definite");
    if (!(g >= 0.0) || !std::isfinite(g)) fail("gravity g must be finite and non-negative");
    for (int i = 0; i < kVehicles; ++i) {
        const auto& q = quad[i];
        const std::string tag = "quadrotor " + std::to_string(i + 1) + ": ";
        if (!(q.mass > 0.0) || !std::isfinite(q.mass)) fail(tag + "mass must be positive");
        if (!spd(q.inertia)) fail(tag + "inertia must be symmetric positive definite");
        if (!(q.cable_length > 0.0) || !std::isfinite(q.cable_length))
            fail(tag + "cable length must be positive");
        if (!q.attachment.allFinite()) fail(tag + "attachment point must be finite");
    }
    // A = [I I I; x1^ x2^ x3^] must have full row rank (attachment points not collinear).
    Eigen::Matrix<double, 6, 9> A;
    for (int i = 0; i < kVehicles; ++i) {
        A.block<3, 3>(0, 3 * i) = Mat3::Identity();
        A.block<3, 3>(3, 3 * i) = hat(quad[i].attachment);
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 9>> svd(A);
    const auto& sv = svd.singularValues();
    if (!(sv(5) > 0.0) || sv(0) * sv(0) / (sv(5) * sv(5)) > tol::kMaxCondition) {
        fail("attachment points " + vec_str(quad[0].attachment) + ", " +
             vec_str(quad[1].attachment) + ", " + vec_str(quad[2].attachment) +
             " violate the rank condition rank([I I I; x1^ x2^ x3^]) = 6 (collinear)");
    }
}

void SystemState::validate(double tol) const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidState, msg); };
    if (!all_finite()) fail("state has non-finite components");
    if (!geom::is_rotation(R_p, tol)) fail("R_p is not a rotation matrix");
    for (int i = 0; i < kVehicles; ++i) {
        const std::string tag = std::to_string(i + 1);
        if (std::abs(tether[i].q.norm() - 1.0) > tol) fail("q_" + tag + " is not a unit vector");
        if (std::abs(tether[i].omega.dot(tether[i].q)) > tol)
            fail("omega_" + tag + " has a component along q_" + tag);
        if (!geom::is_rotation(quad[i].R, tol)) fail("R_" + tag + " is not a rotation matrix");
    }
}

bool SystemState::all_finite() const {
    bool ok = o_p.allFinite() && v_p.allFinite() && R_p.allFinite() && Omega_p.allFinite() &&
              r_b.allFinite() && rdot_b.allFinite();
    for (int i = 0; i < kVehicles; ++i) {
        ok = ok && tether[i].q.allFinite() && tether[i].omega.allFinite() &&
             quad[i].R.allFinite() && quad[i].Omega.allFinite();
    }
    return ok;
}

double SystemState::max_abs() const {
    double m = std::max({o_p.cwiseAbs().maxCoeff(), v_p.cwiseAbs().maxCoeff(),
                         Omega_p.cwiseAbs().maxCoeff(), r_b.cwiseAbs().maxCoeff(),
                         rdot_b.cwiseAbs().maxCoeff()});
    for (int i = 0; i < kVehicles; ++i) {
        m = std::max({m, tether[i].omega.cwiseAbs().maxCoeff(),
                      quad[i].Omega.cwiseAbs().maxCoeff()});
    }
    return m;
}

ControlInput ControlInput::zero() {
    ControlInput c;
    for (int i = 0; i < kVehicles; ++i) {
        c.u[i].setZero();
        c.M[i].setZero();
    }
    return c;
}

Mat8 MassBlocks::assembled() const {
    Mat8 m;
    m.block<2, 2>(0, 0) = M11;
    m.block<2, 6>(0, 2) = M12;
    m.block<6, 2>(2, 0) = M12.transpose();
    m.block<6, 6>(2, 2) = M22;
    return m;
}

double DynamicsResiduals::max_abs() const {
    double m = std::max({plate_translation.cwiseAbs().maxCoeff(), ball.cwiseAbs().maxCoeff(),
                         plate_orientation.cwiseAbs().maxCoeff()});
    for (int i = 0; i < kVehicles; ++i) {
        m = std::max({m, tether[i].cwiseAbs().maxCoeff(), quadrotor[i].cwiseAbs().maxCoeff()});
    }
    return m;
}

namespace model {

double kinetic_energy(const SystemState& s, const SystemParams& p) {
    const Mat3 Wh = hat(s.Omega_p);
    double t = 0.5 * p.m_p * s.v_p.squaredNorm() + 0.5 * s.Omega_p.dot(p.J_p * s.Omega_p);
    for (int i = 0; i < kVehicles; ++i) {
        const auto& qp = p.quad[i];
        const Vec3 v = s.v_p + s.R_p * Wh * qp.attachment +
                       qp.cable_length * s.tether[i].omega.cross(s.tether[i].q);
        t += 0.5 * qp.mass * v.squaredNorm() +
             0.5 * s.quad[i].Omega.dot(qp.inertia * s.quad[i].Omega);
    }
    const Mat32 E = SystemParams::E();
    const Vec3 vb = s.v_p + s.R_p * Wh * E * s.r_b + s.R_p * E * s.rdot_b;
    t += 0.5 * p.m_b * vb.squaredNorm();
    return t;
}

double potential_energy(const SystemState& s, const SystemParams& p) {
    double u = p.m_p * p.g * s.o_p.z();
    for (int i = 0; i < kVehicles; ++i) {
        const auto& qp = p.quad[i];
        const Vec3 oi = s.o_p + s.R_p * qp.attachment + qp.cable_length * s.tether[i].q;
        u += qp.mass * p.g * oi.z();
    }
    const Vec3 ob = s.o_p + s.R_p * SystemParams::E() * s.r_b;
    u += p.m_b * p.g * ob.z();
    return u;
}

BodyPositions body_positions(const SystemState& s, const SystemParams& p) {
    BodyPositions b;
    b.ball = s.o_p + s.R_p * SystemParams::E() * s.r_b;
    for (int i = 0; i < kVehicles; ++i) {
        b.quad[i] = s.o_p + s.R_p * p.quad[i].attachment + p.quad[i].cable_length * s.tether[i].q;
    }
    return b;
}

PerVehicle<Vec3> quad_velocities(const SystemState& s, const SystemParams& p) {
    PerVehicle<Vec3> v;
    for (int i = 0; i < kVehicles; ++i) {
        v[i] = s.v_p + s.R_p * s.Omega_p.cross(p.quad[i].attachment) +
               p.quad[i].cable_length * s.tether[i].omega.cross(s.tether[i].q);
    }
    return v;
}

Vec3 linear_momentum(const SystemState& s, const SystemParams& p) {
    const Mat32 E = SystemParams::E();
    Vec3 m = p.m_p * s.v_p;
    m += p.m_b * (s.v_p + s.R_p * s.Omega_p.cross(E * s.r_b) + s.R_p * E * s.rdot_b);
    const auto v = quad_velocities(s, p);
    for (int i = 0; i < kVehicles; ++i) {
        m += p.quad[i].mass * v[i];
    }
    return m;
}

MassBlocks mass_blocks(const SystemState& s, const SystemParams& p) {
    const Mat32 E = SystemParams::E();
    const Mat3 Er_hat = hat(E * s.r_b);
    const Rotation& R = s.R_p;
    MassBlocks b;
    b.M11 = p.m_b * Eigen::Matrix2d::Identity();
    b.M12.block<2, 3>(0, 0) = p.m_b * E.transpose() * R.transpose();
    b.M12.block<2, 3>(0, 3) = -p.m_b * E.transpose() * Er_hat;
    b.M22.block<3, 3>(0, 0) = (p.m_p + p.m_b) * Mat3::Identity();
    b.M22.block<3, 3>(0, 3) = -p.m_b * R * Er_hat;
    b.M22.block<3, 3>(3, 0) = p.m_b * Er_hat * R.transpose();
    b.M22.block<3, 3>(3, 3) = p.J_p - p.m_b * Er_hat * Er_hat;
    return b;
}

BiasTerms bias_terms(const SystemState& s, const SystemParams& p) {
    const PlateTerms t(s, p);
    const Mat32 E = SystemParams::E();
    BiasTerms b;
    b.N1 = p.m_b * E.transpose() * t.ball_bias;
    b.N2.head<3>() = (p.m_p + p.m_b) * p.g * kE3 + p.m_b * s.R_p * t.Omega_hat2 * t.Er +
                     2.0 * p.m_b * s.R_p * t.Omega_hat * t.Erdot;
    b.N2.tail<3>() = t.Omega_hat * p.J_p * s.Omega_p + p.m_b * t.Er_hat * t.ball_bias;
    return b;
}

DynamicsResiduals full_dynamics_residuals(const SystemState& s, const ControlInput& u,
                                          const Accelerations& acc, const SystemParams& p) {
    const PlateTerms t(s, p);
    const PlateResiduals pr =
        coupled_plate_residuals(s, u, p, t, acc.rddot_b, acc.a_p, acc.dOmega_p);
    DynamicsResiduals r;
    r.plate_translation = pr.translation;
    r.ball = pr.ball;
    r.plate_orientation = pr.orientation;
    for (int i = 0; i < kVehicles; ++i) {
        const auto& qp = p.quad[i];
        const Mat3 q_hat = hat(s.tether[i].q);
        r.tether[i] = qp.mass * (q_hat * acc.a_p + qp.cable_length * acc.domega[i] +
                                 q_hat * s.R_p * t.Omega_hat2 * qp.attachment -
                                 q_hat * s.R_p * hat(qp.attachment) * acc.dOmega_p) -
                      q_hat * (u.u[i] - qp.mass * p.g * kE3);
        const Vec3& w = s.quad[i].Omega;
        r.quadrotor[i] = qp.inertia * acc.dOmega_quad[i] + w.cross(qp.inertia * w) - u.M[i];
    }
    return r;
}

Accelerations full_dynamics(const SystemState& s, const ControlInput& u, const SystemParams& p) {
    const PlateTerms t(s, p);
    const Vec8 b = -stack(coupled_plate_residuals(s, u, p, t, Vec2::Zero(), Vec3::Zero(),
                                                   Vec3::Zero()));
    Mat8 A;
    for (int c = 0; c < 8; ++c) {
        Vec8 unit = Vec8::Unit(c);
        A.col(c) = stack(coupled_plate_residuals(s, u, p, t, unit.head<2>(), unit.segment<3>(2),
                                                 unit.tail<3>())) +
                   b;
    }
    Eigen::JacobiSVD<Mat8> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    check_condition(svd, "full_dynamics");
    const Vec8 x = svd.solve(b);

    Accelerations acc;
    acc.rddot_b = x.head<2>();
    acc.a_p = x.segment<3>(2);
    acc.dOmega_p = x.tail<3>();
    for (int i = 0; i < kVehicles; ++i) {
        acc.domega[i] = tether_rate(s, u, p, t, i, acc.a_p, acc.dOmega_p);
        acc.dOmega_quad[i] = quad_rate(s, u, p, i);
    }
    return acc;
}

Wrench net_wrench(const TensionSet& mu, const Rotation& R_p, const SystemParams& p) {
    Wrench w;
    for (int i = 0; i < kVehicles; ++i) {
        w.force += mu[i];
        w.torque += p.quad[i].attachment.cross(R_p.transpose() * mu[i]);
    }
    return w;
}

PlateAccelerations decoupled_dynamics(const SystemState& s, const Wrench& w,
                                      const SystemParams& p) {
    const Mat8 M = mass_blocks(s, p).assembled();
    const BiasTerms bias = bias_terms(s, p);
    Vec8 rhs;
    rhs << -bias.N1, w.force - bias.N2.head<3>(), w.torque - bias.N2.tail<3>();
    Eigen::JacobiSVD<Mat8> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    check_condition(svd, "decoupled_dynamics");
    const Vec8 x = svd.solve(rhs);
    return {x.head<2>(), x.segment<3>(2), x.tail<3>()};
}

PlateAccelerations decoupled_dynamics(const SystemState& s, const TensionSet& mu,
                                      const SystemParams& p) {
    return decoupled_dynamics(s, net_wrench(mu, s.R_p, p), p);
}

TensionSet tensions(const SystemState& s, const PerVehicle<Vec3>& u_par, const Vec3& a_p,
                    const Vec3& dOmega_p, const SystemParams& p) {
    const Mat3 Wh2 = hat(s.Omega_p) * hat(s.Omega_p);
    TensionSet mu;
    for (int i = 0; i < kVehicles; ++i) {
        const auto& qp = p.quad[i];
        const Vec3& q = s.tether[i].q;
        const Mat3 P = along(q);
        const Vec3 off = u_par[i] - P * u_par[i];
        if (off.norm() > tol::kAlgebraic * std::max(1.0, u_par[i].norm())) {
            std::ostringstream os;
            os << "tensions: u_par is not parallel to q (off-axis norm " << off.norm() << ")";
            throw Error(ErrorKind::NonParallelInput, os.str(), i + 1);
        }
        const Vec3 quad_acc = a_p + s.R_p * Wh2 * qp.attachment -
                              s.R_p * hat(qp.attachment) * dOmega_p + p.g * kE3 -
                              qp.cable_length * s.tether[i].omega.squaredNorm() * q;
        mu[i] = u_par[i] - P * (qp.mass * quad_acc);
    }
    return mu;
}

}  // namespace model
}  // namespace plateswarm
