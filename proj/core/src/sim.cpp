#include "plateswarm/sim.hpp"

#include "plateswarm/rkmk.hpp"
#include "plateswarm/tolerances.hpp"
#include "plateswarm/verify.hpp"

#include <cmath>
#include <sstream>

namespace plateswarm {

namespace {

template <class Dynamics>
SystemState rkmk4(const SystemState& s0, double dt, Dynamics&& dynamics) {
    SystemState out = sim::project(rkmk::step(s0, dt, dynamics));
    if (!out.all_finite() || out.max_abs() > tol::kDivergence ||
        out.o_p.cwiseAbs().maxCoeff() > tol::kDivergence) {
        throw Error(ErrorKind::StepDiverged, "step: state left the finite region");
    }
    return out;
}

}  // namespace

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::ClosedLoop: return "closed-loop";
        case Mode::Passive: return "passive";
        case Mode::AttitudeOnly: return "attitude-only";
    }
    return "unknown";
}

Mode mode_from_string(std::string_view name) {
    if (name == "closed-loop") return Mode::ClosedLoop;
    if (name == "passive") return Mode::Passive;
    if (name == "attitude-only") return Mode::AttitudeOnly;
    throw Error(ErrorKind::InvalidConfig,
                "unknown mode '" + std::string(name) +
                    "' (expected closed-loop, passive or attitude-only)");
}

double ConstraintResiduals::max() const {
    return std::max({q_norm, omega_dot_q, R_p, R_quad});
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorKind::InvalidConfig, "integrator: dt must be positive");
    }
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw Error(ErrorKind::InvalidConfig, "integrator: duration must be non-negative");
    }
    if (duration > 0.0 && duration < dt * (1.0 - 1e-9)) {
        throw Error(ErrorKind::InvalidConfig, "integrator: duration must be at least dt");
    }
    if (decimation < 1) {
        throw Error(ErrorKind::InvalidConfig, "integrator: decimation must be >= 1");
    }
    if (!(projection_tol > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "integrator: projection_tol must be positive");
    }
}

std::size_t IntegratorConfig::steps() const {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

void Scenario::validate() const {
    params.validate();
    gains.validate();
    initial.validate();
    integrator.validate();
    if (!(control.rate_step > 0.0) || !std::isfinite(control.rate_step)) {
        throw Error(ErrorKind::InvalidConfig, "control: rate_step must be positive");
    }
}

ControlInput ThrustCommand::at(const SystemState& s) const {
    ControlInput u;
    for (int i = 0; i < kVehicles; ++i) {
        u.u[i] = f[i] * s.quad[i].R.col(2);
        u.M[i] = M[i];
    }
    return u;
}

SimulationDiverged::SimulationDiverged(const Error& cause, double time, Trajectory partial)
    : Error(ErrorKind::StepDiverged,
            std::string(cause.what()) + " at t = " + std::to_string(time) + " s"),
      time_(time),
      partial_(std::make_shared<const Trajectory>(std::move(partial))) {}

namespace sim {

SystemState step(const SystemState& s, const ControlInput& u, const SystemParams& p, double dt) {
    return rkmk4(s, dt, [&](const SystemState& x) { return model::full_dynamics(x, u, p); });
}

SystemState step(const SystemState& s, const ThrustCommand& cmd, const SystemParams& p,
                 double dt) {
    return rkmk4(s, dt,
                 [&](const SystemState& x) { return model::full_dynamics(x, cmd.at(x), p); });
}

SystemState attitude_only_step(const SystemState& s, const Gains& g, const SystemParams& p,
                               double dt) {
    SystemState held = s;
    for (int i = 0; i < kVehicles; ++i) {
        held.tether[i].omega.setZero();
        held.quad[i].Omega.setZero();
    }
    return rkmk4(held, dt, [&](const SystemState& x) {
        const Vec3 U2 = control::pfl_inputs(x, g, p).U2;
        const Wrench w = control::force_torque_from_U(x, Vec3::Zero(), U2, p);
        const PlateAccelerations pa = model::decoupled_dynamics(x, w, p);
        Accelerations acc;
        acc.rddot_b = pa.rddot_b;
        acc.a_p = pa.a_p;
        acc.dOmega_p = pa.dOmega_p;
        for (int i = 0; i < kVehicles; ++i) {
            acc.domega[i].setZero();
            acc.dOmega_quad[i].setZero();
        }
        return acc;
    });
}

SystemState project(const SystemState& s, double tol) {
    SystemState out = s;
    if (geom::orthogonality_residual(out.R_p) > tol) {
        out.R_p = geom::orthonormalize(out.R_p);
    }
    for (int i = 0; i < kVehicles; ++i) {
        Vec3& q = out.tether[i].q;
        q.normalize();
        Vec3& w = out.tether[i].omega;
        w -= w.dot(q) * q;
        if (geom::orthogonality_residual(out.quad[i].R) > tol) {
            out.quad[i].R = geom::orthonormalize(out.quad[i].R);
        }
    }
    return out;
}

ConstraintResiduals constraint_residuals(const SystemState& s) {
    ConstraintResiduals r;
    r.R_p = geom::orthogonality_residual(s.R_p);
    for (int i = 0; i < kVehicles; ++i) {
        r.q_norm = std::max(r.q_norm, std::abs(s.tether[i].q.norm() - 1.0));
        r.omega_dot_q = std::max(r.omega_dot_q, std::abs(s.tether[i].omega.dot(s.tether[i].q)));
        r.R_quad = std::max(r.R_quad, geom::orthogonality_residual(s.quad[i].R));
    }
    return r;
}

Diagnostics diagnostics(const SystemState& s, const SystemParams& p, const Gains& g) {
    Diagnostics d;
    d.kinetic = model::kinetic_energy(s, p);
    d.potential = model::potential_energy(s, p);
    d.V = verify::lyapunov_V(s, g, g.c1, g.c2);
    d.V2 = verify::lyapunov_V2(s.R_p, s.Omega_p, g, g.c0);
    d.residuals = constraint_residuals(s);
    d.positions = model::body_positions(s, p);
    return d;
}

Trajectory simulate(const Scenario& sc) {
    sc.validate();
    const IntegratorConfig& cfg = sc.integrator;
    const std::size_t n = cfg.steps();

    Trajectory traj;
    traj.mode = sc.mode;
    traj.dt = cfg.dt;
    traj.samples.reserve(n + 1);

    SystemState s = sc.initial;
    ControllerMemory memory;
    ThrustCommand cmd;
    std::optional<ControlTrace> trace;

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        try {
            if (sc.mode == Mode::ClosedLoop && k % static_cast<std::size_t>(cfg.decimation) == 0) {
                ControlStep cs = control::compute_controls(s, sc.gains, memory, sc.params,
                                                           cfg.dt * cfg.decimation, sc.control);
                memory = std::move(cs.memory);
                cmd.f = cs.trace.f;
                cmd.M = cs.trace.M;
                trace = std::move(cs.trace);
            }

            Sample& sample = traj.samples.emplace_back();
            sample.t = t;
            sample.state = s;
            sample.applied = sc.mode == Mode::ClosedLoop ? cmd.at(s) : ControlInput::zero();
            sample.trace = trace;
            sample.diag = diagnostics(s, sc.params, sc.gains);

            if (k == n) break;
            if (sc.mode == Mode::AttitudeOnly) {
                s = attitude_only_step(s, sc.gains, sc.params, cfg.dt);
            } else {
                s = step(s, cmd, sc.params, cfg.dt);
            }
        } catch (const SimulationDiverged&) {
            throw;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::StepDiverged && e.kind() != ErrorKind::SingularMassMatrix) {
                throw;
            }
            throw SimulationDiverged(e, t, std::move(traj));
        }
    }
    return traj;
}

}  // namespace sim
}  // namespace plateswarm
