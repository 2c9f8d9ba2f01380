#pragma once

#include "plateswarm/geom.hpp"
#include "plateswarm/model.hpp"

#include <optional>
#include <utility>

namespace plateswarm {

/// Controller constants. c0, c1, c2 only enter the Lyapunov analysis.
struct Gains {
    double k1 = 12.0;   // plate angular-rate damping
    double k2 = 36.0;   // plate attitude stiffness
    double k3 = 4.0;    // ball velocity
    double k4 = 4.0;    // ball position
    double k5 = 4.0;    // height rate
    double k6 = 4.0;    // height
    double k7 = 900.0;  // tether direction
    double k8 = 60.0;   // tether rate
    double kR = 0.0049 * 250.0;
    double kOmega = 0.0049 * 30.0;
    double eps = 0.05;  // attitude timescale
    double c0 = 0.01;
    double c1 = 0.01;
    double c2 = 0.01;

    /// Throws Error{InvalidGains} unless every gain is positive and eps <= 1.
    void validate() const;
};

/// Where the desired tether and attitude rates come from.
enum class RateSource {
    ReducedModel,        // derivatives along the slow closed-loop flow of the model
    BackwardDifference,  // differences of successive control ticks
};

struct ControlOptions {
    RateSource rates = RateSource::ReducedModel;
    double rate_step = 1e-3;  // [s] flow step for ReducedModel central differences
};

struct PflInputs {
    Vec3 U1;  // designed o_p''
    Vec3 U2;  // designed Omega_p''
};

struct TetherMemory {
    std::optional<Vec3> q_d;
    std::optional<Vec3> omega_d;  // set only once it comes from a real difference
};

struct AttitudeMemory {
    std::optional<Rotation> R_d;
    std::optional<Vec3> Omega_d;
    Vec3 b1 = Vec3::UnitX();
};

/// Samples needed for the backward-difference desired rates.
struct ControllerMemory {
    std::optional<double> last_time;
    PerVehicle<TetherMemory> tether{};
    PerVehicle<AttitudeMemory> quad{};
};

struct ControlTrace {
    Vec3 U1 = Vec3::Zero();
    Vec3 U2 = Vec3::Zero();
    Wrench wrench{};
    TensionSet mu{};
    PerVehicle<Vec3> u_par{};
    PerVehicle<Vec3> u_perp{};
    PerVehicle<Vec3> u{};
    PerVehicle<Vec3> q_d{};
    PerVehicle<Vec3> omega_d{};
    PerVehicle<Vec3> domega_d{};
    PerVehicle<Rotation> R_d{};
    PerVehicle<Vec3> Omega_d{};
    PerVehicle<Vec3> dOmega_d{};
    PerVehicle<double> f{};
    PerVehicle<Vec3> M{};
    PerVehicle<Vec3> e_R{};
    PerVehicle<Vec3> e_Omega{};
};

struct ControlStep {
    ControlInput input;  // commanded thrust vectors u_i and moments M_i
    ControlTrace trace;
    ControllerMemory memory;
};

struct QuadrotorCommand {
    Vec3 M;
    geom::AttitudeErrors errors;
};

namespace control {

/// New inputs (U1, U2) for the partially linearized plate translation and attitude.
PflInputs pfl_inputs(const SystemState& s, const Gains& g, const SystemParams& p);

/// Linearizing feedback: plate force and torque that realize o_p'' = U1, Omega_p'' = U2.
Wrench force_torque_from_U(const SystemState& s, const Vec3& U1, const Vec3& U2,
                           const SystemParams& p);

/// Minimum-norm tensions producing the wrench. Throws Error{RankDeficientAttachment}.
TensionSet allocate_tensions(const Wrench& w, const Rotation& R_p, const SystemParams& p);

/// Tether-parallel thrust delivering the projection of mu_i onto q_i while the plate
/// follows (U1, U2).
PerVehicle<Vec3> parallel_controls(const SystemState& s, const TensionSet& mu, const Vec3& U1,
                                   const Vec3& U2, const SystemParams& p);

/// mu / |mu|. Throws Error{DegenerateTension} below the minimum tension.
Vec3 desired_tether_direction(const Vec3& mu);

/// Tether-normal thrust steering q_i to q_d[i].
PerVehicle<Vec3> perpendicular_controls(const SystemState& s, const PerVehicle<Vec3>& q_d,
                                        const PerVehicle<Vec3>& omega_d,
                                        const PerVehicle<Vec3>& domega_d, const Vec3& U1,
                                        const Vec3& U2, const Gains& g, const SystemParams& p);

/// Desired quadrotor attitude with third axis along u and first axis closest to b1.
/// Throws Error{DegenerateThrust} or Error{GimbalDegeneracy}.
Rotation quadrotor_attitude_setpoint(const Vec3& u, const Vec3& b1);

/// Moment for the quadrotor attitude tracking loop. The thrust magnitude is |u_i|.
QuadrotorCommand quadrotor_inputs(const Rotation& R, const Vec3& Omega, const Rotation& R_d,
                                  const Vec3& Omega_d, const Vec3& dOmega_d, const Mat3& J,
                                  const Gains& g);

/// Tether-direction targets and their first two time derivatives.
struct TetherTargets {
    PerVehicle<Vec3> q_d{};
    PerVehicle<Vec3> omega_d{};
    PerVehicle<Vec3> domega_d{};
};

/// q_d = mu / |mu| at s and at the states reached by flowing the partially linearized
/// ball-plate loop (o_p'' = U1, Omega_p'' = U2) for -h and +h. Central differences give
/// omega_d = q_d x q_d' and omega_d' = q_d x q_d''. A tether whose tension vanishes keeps
/// `fallback` (or its current direction) with zero rates.
TetherTargets tether_targets(const SystemState& s, const Gains& g, const SystemParams& p,
                             double h, const PerVehicle<std::optional<Vec3>>& fallback = {});

/// Commanded thrust vectors u_i = u_par + u_perp with targets from tether_targets.
PerVehicle<Vec3> desired_thrusts(const SystemState& s, const Gains& g, const SystemParams& p,
                                 double h);

/// One control tick. With RateSource::ReducedModel the desired quadrotor attitude rates
/// are central differences of R_d along the slow flow, in which every quadrotor delivers
/// its commanded thrust exactly. With RateSource::BackwardDifference all rates come from
/// `mem` and the first tick uses zero rates. Errors carry the vehicle index.
ControlStep compute_controls(const SystemState& s, const Gains& g, const ControllerMemory& mem,
                             const SystemParams& p, double dt, const ControlOptions& opt = {});

}  // namespace control
}  // namespace plateswarm
