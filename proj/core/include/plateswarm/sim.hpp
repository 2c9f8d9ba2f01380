#pragma once

#include "plateswarm/control.hpp"
#include "plateswarm/errors.hpp"
#include "plateswarm/model.hpp"
#include "plateswarm/trajectory.hpp"

#include <memory>

namespace plateswarm {

struct IntegratorConfig {
    double dt = 1e-3;         // [s]
    double duration = 30.0;   // [s]
    int decimation = 1;       // control ticks every `decimation` steps (zero-order hold)
    double projection_tol = 1e-12;

    /// Throws Error{InvalidConfig}. A zero duration is allowed and yields one sample.
    void validate() const;
    std::size_t steps() const;
};

struct Scenario {
    SystemParams params{};
    Gains gains{};
    SystemState initial{};
    IntegratorConfig integrator{};
    ControlOptions control{};
    Mode mode = Mode::ClosedLoop;

    void validate() const;
};

/// Thrust magnitudes held over a step; the thrust direction follows R_i e3 inside the step.
struct ThrustCommand {
    PerVehicle<double> f{};
    PerVehicle<Vec3> M{};

    ControlInput at(const SystemState& s) const;
};

/// Thrown by simulate; holds everything integrated up to the failure.
class SimulationDiverged : public Error {
public:
    SimulationDiverged(const Error& cause, double time, Trajectory partial);

    double time() const noexcept { return time_; }
    const Trajectory& partial() const noexcept { return *partial_; }

private:
    double time_;
    std::shared_ptr<const Trajectory> partial_;
};

namespace sim {

/// One fixed step of a Runge-Kutta-Munthe-Kaas scheme of order four.
///
/// Rotations advance as R exp(theta) and tether directions as exp(phi) q, where the
/// local coordinates are integrated by classical RK4 with the inverse SO(3) Jacobians
/// correcting the stage rates. Afterwards q_i is renormalized and the q_i component of
/// omega_i removed. Throws Error{StepDiverged}.
SystemState step(const SystemState& s, const ControlInput& u, const SystemParams& p, double dt);
SystemState step(const SystemState& s, const ThrustCommand& cmd, const SystemParams& p,
                 double dt);

/// Ideal-actuation step of the ball-plate subsystem: the plate receives the
/// linearizing wrench for (U1 = 0, U2); tethers and quadrotors are held.
SystemState attitude_only_step(const SystemState& s, const Gains& g, const SystemParams& p,
                               double dt);

/// Restore the manifold constraints on q_i, omega_i and the rotations.
SystemState project(const SystemState& s, double tol = 1e-12);

ConstraintResiduals constraint_residuals(const SystemState& s);

Diagnostics diagnostics(const SystemState& s, const SystemParams& p, const Gains& g);

/// Runs the scenario. Deterministic; throws SimulationDiverged on StepDiverged.
Trajectory simulate(const Scenario& sc);

}  // namespace sim
}  // namespace plateswarm
