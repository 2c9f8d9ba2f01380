#pragma once

#include "plateswarm/geom.hpp"

#include <array>

namespace plateswarm {

inline constexpr int kVehicles = 3;

template <class T>
using PerVehicle = std::array<T, kVehicles>;

using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;

struct QuadrotorParams {
    double mass = 0.85;                        // [kg]
    Mat3 inertia = Vec3(0.0049, 0.0049, 0.0088).asDiagonal();  // [kg m^2]
    double cable_length = 1.0;                 // [m]
    Vec3 attachment = Vec3::Zero();            // plate frame [m]
};

/// Three identical quadrotors attached on a 0.5 m circle at bearings 90, 210 and 330 deg.
PerVehicle<QuadrotorParams> default_quadrotors();

struct SystemParams {
    double m_p = 0.75;                                        // [kg]
    double m_b = 0.1;                                         // [kg]
    Mat3 J_p = Vec3(0.006, 0.008, 0.012).asDiagonal();        // [kg m^2]
    PerVehicle<QuadrotorParams> quad = default_quadrotors();
    double g = 9.81;                                          // [m/s^2]

    /// Embedding of the ball coordinates into the plate frame.
    static Mat32 E();

    double total_mass() const;

    /// Throws Error{InvalidParams}; rejects degenerate geometry before any dynamics call.
    void validate() const;
};

struct TetherState {
    Vec3 q = Vec3::UnitZ();     // unit vector from attachment point to quadrotor
    Vec3 omega = Vec3::Zero();  // inertial frame [rad/s], orthogonal to q
};

struct QuadrotorState {
    Rotation R = Rotation::Identity();
    Vec3 Omega = Vec3::Zero();  // body frame [rad/s]
};

struct SystemState {
    Vec3 o_p = Vec3::Zero();
    Vec3 v_p = Vec3::Zero();
    Rotation R_p = Rotation::Identity();
    Vec3 Omega_p = Vec3::Zero();  // body frame
    Vec2 r_b = Vec2::Zero();
    Vec2 rdot_b = Vec2::Zero();
    PerVehicle<TetherState> tether{};
    PerVehicle<QuadrotorState> quad{};

    /// Throws Error{InvalidState} when a manifold constraint is violated beyond `tol`.
    void validate(double tol = 1e-9) const;
    bool all_finite() const;
    double max_abs() const;
};

struct PlateAccelerations {
    Vec2 rddot_b = Vec2::Zero();
    Vec3 a_p = Vec3::Zero();        // o_p double-dot
    Vec3 dOmega_p = Vec3::Zero();
};

struct Accelerations {
    Vec2 rddot_b = Vec2::Zero();
    Vec3 a_p = Vec3::Zero();
    Vec3 dOmega_p = Vec3::Zero();
    PerVehicle<Vec3> domega{};
    PerVehicle<Vec3> dOmega_quad{};

    PlateAccelerations plate() const { return {rddot_b, a_p, dOmega_p}; }
};

struct ControlInput {
    PerVehicle<Vec3> u{};  // spatial thrust vectors [N]
    PerVehicle<Vec3> M{};  // body moments [N m]

    static ControlInput zero();
};

using TensionSet = PerVehicle<Vec3>;

struct Wrench {
    Vec3 force = Vec3::Zero();   // inertial
    Vec3 torque = Vec3::Zero();  // plate body frame
};

struct MassBlocks {
    Eigen::Matrix2d M11;
    Eigen::Matrix<double, 2, 6> M12;
    Eigen::Matrix<double, 6, 6> M22;

    /// M_bp in the ordering (r_b, o_p, plate rotation).
    Mat8 assembled() const;
};

struct BiasTerms {
    Vec2 N1;
    Vec6 N2;
};

struct BodyPositions {
    Vec3 ball;
    PerVehicle<Vec3> quad;
};

/// Per-equation residuals of the coupled equations of motion.
struct DynamicsResiduals {
    Vec3 plate_translation;
    Vec2 ball;
    Vec3 plate_orientation;
    PerVehicle<Vec3> tether;
    PerVehicle<Vec3> quadrotor;

    double max_abs() const;
};

namespace model {

double kinetic_energy(const SystemState& s, const SystemParams& p);
double potential_energy(const SystemState& s, const SystemParams& p);
inline double total_energy(const SystemState& s, const SystemParams& p) {
    return kinetic_energy(s, p) + potential_energy(s, p);
}

BodyPositions body_positions(const SystemState& s, const SystemParams& p);

/// Inertial velocities of the three quadrotor point masses.
PerVehicle<Vec3> quad_velocities(const SystemState& s, const SystemParams& p);

/// Total linear momentum of plate, ball and quadrotors.
Vec3 linear_momentum(const SystemState& s, const SystemParams& p);

MassBlocks mass_blocks(const SystemState& s, const SystemParams& p);
BiasTerms bias_terms(const SystemState& s, const SystemParams& p);

/// Residuals of the coupled equations for a candidate set of accelerations.
DynamicsResiduals full_dynamics_residuals(const SystemState& s, const ControlInput& u,
                                          const Accelerations& acc, const SystemParams& p);

/// Accelerations of the coupled plate/ball/tether/quadrotor system.
///
/// The plate translation, ball and plate orientation equations are linear in
/// (r_b'', o_p'', Omega_p'') once the tether accelerations have been eliminated.
/// The 8x8 coefficient matrix is assembled column by column from the residuals
/// evaluated on unit accelerations, then solved; tether and quadrotor rates follow
/// explicitly. Throws Error{SingularMassMatrix}.
Accelerations full_dynamics(const SystemState& s, const ControlInput& u, const SystemParams& p);

/// Net force and plate-frame torque produced by a set of tether tensions.
Wrench net_wrench(const TensionSet& mu, const Rotation& R_p, const SystemParams& p);

/// Ball-plate accelerations driven by a wrench, quadrotors eliminated.
PlateAccelerations decoupled_dynamics(const SystemState& s, const Wrench& w, const SystemParams& p);
PlateAccelerations decoupled_dynamics(const SystemState& s, const TensionSet& mu,
                                      const SystemParams& p);

/// Tether tensions from the tether-parallel thrust and the plate accelerations.
/// Throws Error{NonParallelInput} if some u_par[i] is not along q_i.
TensionSet tensions(const SystemState& s, const PerVehicle<Vec3>& u_par, const Vec3& a_p,
                    const Vec3& dOmega_p, const SystemParams& p);

/// Projector q q^T.
inline Mat3 along(const Vec3& q) { return q * q.transpose(); }

}  // namespace model
}  // namespace plateswarm
