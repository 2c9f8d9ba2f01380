#include "plateswarm/control.hpp"

#include "plateswarm/errors.hpp"
#include "plateswarm/rkmk.hpp"
#include "plateswarm/tolerances.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

namespace plateswarm {

using geom::hat;

namespace {

const Vec3 kE3 = Vec3::UnitZ();

using AllocMatrix = Eigen::Matrix<double, 6, 9>;

AllocMatrix allocation_matrix(const SystemParams& p) {
    AllocMatrix A;
    for (int i = 0; i < kVehicles; ++i) {
        A.block<3, 3>(0, 3 * i) = Mat3::Identity();
        A.block<3, 3>(3, 3 * i) = hat(p.quad[i].attachment);
    }
    return A;
}

// Acceleration of quadrotor i's attachment point plus gravity, with the plate
// following the designed accelerations.
Vec3 designed_point_acc(const SystemState& s, const Vec3& U1, const Vec3& U2,
                        const QuadrotorParams& qp, double g) {
    const Mat3 Wh = hat(s.Omega_p);
    return U1 + s.R_p * Wh * Wh * qp.attachment - s.R_p * hat(qp.attachment) * U2 + g * kE3;
}

}  // namespace

void Gains::validate() const {
    const std::pair<const char*, double> all[] = {
        {"k1", k1}, {"k2", k2}, {"k3", k3}, {"k4", k4}, {"k5", k5},
        {"k6", k6}, {"k7", k7}, {"k8", k8}, {"kR", kR}, {"kOmega", kOmega},
        {"eps", eps}, {"c0", c0}, {"c1", c1}, {"c2", c2},
    };
    for (const auto& [name, value] : all) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw Error(ErrorKind::InvalidGains, std::string("gain ") + name + " must be positive");
        }
    }
    if (eps > 1.0) {
        throw Error(ErrorKind::InvalidGains, "gain eps must not exceed 1");
    }
}

namespace control {

PflInputs pfl_inputs(const SystemState& s, const Gains& g, const SystemParams& p) {
    const BiasTerms bias = model::bias_terms(s, p);
    const Mat32 E = SystemParams::E();
    const Eigen::Matrix2d M11 = p.m_b * Eigen::Matrix2d::Identity();
    const Vec3 e3 = kE3;
    PflInputs in;
    in.U1 = s.R_p * e3 * e3.transpose() * (-g.k5 * s.v_p - g.k6 * s.o_p) +
            (1.0 / p.m_b) * s.R_p * E * (-bias.N1 + M11 * (g.k4 * s.r_b + g.k3 * s.rdot_b));
    in.U2 = -g.k2 * geom::attitude_error_plate(s.R_p) - g.k1 * s.Omega_p;
    return in;
}

Wrench force_torque_from_U(const SystemState& s, const Vec3& U1, const Vec3& U2,
                           const SystemParams& p) {
    const MassBlocks mb = model::mass_blocks(s, p);
    const BiasTerms bias = model::bias_terms(s, p);
    const Eigen::Matrix2d M11_inv = mb.M11.inverse();
    Vec6 U;
    U << U1, U2;
    const Vec6 ft = bias.N2 - mb.M12.transpose() * M11_inv * bias.N1 +
                    (mb.M22 - mb.M12.transpose() * M11_inv * mb.M12) * U;
    return {ft.head<3>(), ft.tail<3>()};
}

TensionSet allocate_tensions(const Wrench& w, const Rotation& R_p, const SystemParams& p) {
    const AllocMatrix A = allocation_matrix(p);
    const Eigen::Matrix<double, 6, 6> AAt = A * A.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(AAt, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0);
    const double lmax = eig.eigenvalues()(5);
    if (!(lmin > 0.0) || lmax / lmin > tol::kMaxCondition) {
        std::ostringstream os;
        os << "allocate_tensions: A A^T is rank deficient (condition " << lmax / lmin << ")";
        throw Error(ErrorKind::RankDeficientAttachment, os.str());
    }
    Vec6 rhs;
    rhs << R_p.transpose() * w.force, w.torque;
    const Eigen::Matrix<double, 9, 1> stacked = A.transpose() * AAt.ldlt().solve(rhs);
    TensionSet mu;
    for (int i = 0; i < kVehicles; ++i) {
        mu[i] = R_p * stacked.segment<3>(3 * i);
    }
    return mu;
}

PerVehicle<Vec3> parallel_controls(const SystemState& s, const TensionSet& mu, const Vec3& U1,
                                   const Vec3& U2, const SystemParams& p) {
    PerVehicle<Vec3> u_par;
    for (int i = 0; i < kVehicles; ++i) {
        const auto& qp = p.quad[i];
        const Vec3& q = s.tether[i].q;
        const Vec3 acc = designed_point_acc(s, U1, U2, qp, p.g) -
                         qp.cable_length * s.tether[i].omega.squaredNorm() * q;
        u_par[i] = q * q.dot(mu[i] + qp.mass * acc);
    }
    return u_par;
}

Vec3 desired_tether_direction(const Vec3& mu) {
    const double n = mu.norm();
    if (!(n > tol::kMinTension)) {
        std::ostringstream os;
        os << "desired_tether_direction: tension magnitude " << n << " below threshold";
        throw Error(ErrorKind::DegenerateTension, os.str());
    }
    return mu / n;
}

PerVehicle<Vec3> perpendicular_controls(const SystemState& s, const PerVehicle<Vec3>& q_d,
                                        const PerVehicle<Vec3>& omega_d,
                                        const PerVehicle<Vec3>& domega_d, const Vec3& U1,
                                        const Vec3& U2, const Gains& g, const SystemParams& p) {
    PerVehicle<Vec3> u_perp;
    for (int i = 0; i < kVehicles; ++i) {
        const auto& qp = p.quad[i];
        const Vec3& q = s.tether[i].q;
        const Vec3& w = s.tether[i].omega;
        const Mat3 q_hat = hat(q);
        const Mat3 q_hat2 = q_hat * q_hat;
        const Vec3 a = designed_point_acc(s, U1, U2, qp, p.g);
        const Vec3 e_q = q_d[i].cross(q);
        const Vec3 e_w = w + q_hat2 * omega_d[i];
        const Vec3 q_dot = w.cross(q);
        const Vec3 shape = g.k7 * e_q + g.k8 * e_w + q.dot(omega_d[i]) * q_dot +
                           q_hat2 * domega_d[i];
        u_perp[i] = -qp.mass * q_hat2 * a + qp.mass * qp.cable_length * q_hat * shape;
    }
    return u_perp;
}

Rotation quadrotor_attitude_setpoint(const Vec3& u, const Vec3& b1) {
    const double n = u.norm();
    if (!(n > tol::kMinThrust)) {
        std::ostringstream os;
        os << "quadrotor_attitude_setpoint: thrust magnitude " << n << " below threshold";
        throw Error(ErrorKind::DegenerateThrust, os.str());
    }
    const Vec3 b3 = u / n;
    const Vec3 b1n = b1.normalized();
    if (std::abs(b1n.dot(b3)) >= std::cos(tol::kGimbalAngle)) {
        throw Error(ErrorKind::GimbalDegeneracy,
                    "quadrotor_attitude_setpoint: b1 within 1 deg of the thrust axis");
    }
    const Mat3 b3_hat = hat(b3);
    const Vec3 c1 = -b3_hat * b3_hat * b1n;
    const Vec3 c2 = b3_hat * b1n;
    Rotation r;
    r.col(0) = c1 / c1.norm();
    r.col(1) = c2 / c2.norm();
    r.col(2) = b3;
    return r;
}

QuadrotorCommand quadrotor_inputs(const Rotation& R, const Vec3& Omega, const Rotation& R_d,
                                  const Vec3& Omega_d, const Vec3& dOmega_d, const Mat3& J,
                                  const Gains& g) {
    const geom::AttitudeErrors e = geom::quad_attitude_errors(R, Omega, R_d, Omega_d);
    const Mat3 rel = R.transpose() * R_d;
    const Vec3 M = -(g.kR / (g.eps * g.eps)) * e.e_R - (g.kOmega / g.eps) * e.e_Omega +
                   Omega.cross(J * Omega) -
                   J * (hat(Omega) * rel * Omega_d - rel * dOmega_d);
    return {M, e};
}

namespace {

TensionSet tensions_for(const SystemState& s, const PflInputs& pfl, const SystemParams& p) {
    return allocate_tensions(force_torque_from_U(s, pfl.U1, pfl.U2, p), s.R_p, p);
}

Vec3 direction_or(const Vec3& mu, const Vec3& fallback) {
    return mu.norm() > tol::kMinTension ? Vec3(mu.normalized()) : fallback;
}

// Partially linearized ball-plate loop; tethers and quadrotors are carried along frozen.
SystemState plate_flow(const SystemState& s, double h, const Gains& g, const SystemParams& p) {
    return rkmk::step(s, h, [&](const SystemState& x) {
        const PflInputs in = pfl_inputs(x, g, p);
        Accelerations acc;
        acc.rddot_b = model::decoupled_dynamics(x, force_torque_from_U(x, in.U1, in.U2, p), p).rddot_b;
        acc.a_p = in.U1;
        acc.dOmega_p = in.U2;
        for (int i = 0; i < kVehicles; ++i) {
            acc.domega[i].setZero();
            acc.dOmega_quad[i].setZero();
        }
        return acc;
    });
}

SystemState freeze_quads(SystemState s) {
    for (int i = 0; i < kVehicles; ++i) s.quad[i].Omega.setZero();
    return s;
}

SystemState freeze_tethers(SystemState s) {
    for (int i = 0; i < kVehicles; ++i) {
        s.tether[i].omega.setZero();
        s.quad[i].Omega.setZero();
    }
    return s;
}

PerVehicle<Vec3> thrusts_with(const SystemState& s, const PflInputs& pfl, const TensionSet& mu,
                              const TetherTargets& tt, const Gains& g, const SystemParams& p) {
    const PerVehicle<Vec3> u_par = parallel_controls(s, mu, pfl.U1, pfl.U2, p);
    const PerVehicle<Vec3> u_perp =
        perpendicular_controls(s, tt.q_d, tt.omega_d, tt.domega_d, pfl.U1, pfl.U2, g, p);
    PerVehicle<Vec3> u;
    for (int i = 0; i < kVehicles; ++i) u[i] = u_par[i] + u_perp[i];
    return u;
}

// Rotation R(t) = R0 exp(xi(t)) has xi' = Omega and xi'' = Omega' at t = 0.
std::pair<Vec3, Vec3> rotation_rates(const Rotation& minus, const Rotation& mid,
                                     const Rotation& plus, double h) {
    const Vec3 xp = geom::log_so3(mid.transpose() * plus);
    const Vec3 xm = geom::log_so3(mid.transpose() * minus);
    return {(xp - xm) / (2.0 * h), (xp + xm) / (h * h)};
}

}  // namespace

TetherTargets tether_targets(const SystemState& s, const Gains& g, const SystemParams& p,
                             double h, const PerVehicle<std::optional<Vec3>>& fallback) {
    if (!(h > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "tether_targets: flow step must be positive");
    }
    const SystemState base = freeze_tethers(s);
    const TensionSet mu0 = tensions_for(s, pfl_inputs(s, g, p), p);
    const SystemState sp = plate_flow(base, h, g, p);
    const SystemState sm = plate_flow(base, -h, g, p);
    const TensionSet mup = tensions_for(sp, pfl_inputs(sp, g, p), p);
    const TensionSet mum = tensions_for(sm, pfl_inputs(sm, g, p), p);

    TetherTargets tt;
    for (int i = 0; i < kVehicles; ++i) {
        const Vec3 held = fallback[i] ? *fallback[i] : s.tether[i].q;
        const double floor = tol::kMinTension;
        if (!(mu0[i].norm() > floor && mup[i].norm() > floor && mum[i].norm() > floor)) {
            tt.q_d[i] = direction_or(mu0[i], held);
            tt.omega_d[i].setZero();
            tt.domega_d[i].setZero();
            continue;
        }
        const Vec3 q0 = mu0[i].normalized();
        const Vec3 qp = mup[i].normalized();
        const Vec3 qm = mum[i].normalized();
        tt.q_d[i] = q0;
        tt.omega_d[i] = q0.cross((qp - qm) / (2.0 * h));
        tt.domega_d[i] = q0.cross((qp - 2.0 * q0 + qm) / (h * h));
    }
    return tt;
}

PerVehicle<Vec3> desired_thrusts(const SystemState& s, const Gains& g, const SystemParams& p,
                                 double h) {
    const PflInputs pfl = pfl_inputs(s, g, p);
    return thrusts_with(s, pfl, tensions_for(s, pfl, p), tether_targets(s, g, p, h), g, p);
}

ControlStep compute_controls(const SystemState& s, const Gains& g, const ControllerMemory& mem,
                             const SystemParams& p, double dt, const ControlOptions& opt) {
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "compute_controls: dt must be positive");
    }
    const bool model_rates = opt.rates == RateSource::ReducedModel;
    const double h = opt.rate_step;
    if (model_rates && !(h > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "compute_controls: rate_step must be positive");
    }
    ControlStep out;
    ControlTrace& tr = out.trace;
    ControllerMemory& next = out.memory;
    next = mem;
    next.last_time = mem.last_time ? *mem.last_time + dt : 0.0;

    const PflInputs pfl = pfl_inputs(s, g, p);
    tr.U1 = pfl.U1;
    tr.U2 = pfl.U2;
    tr.wrench = force_torque_from_U(s, pfl.U1, pfl.U2, p);
    tr.mu = allocate_tensions(tr.wrench, s.R_p, p);
    tr.u_par = parallel_controls(s, tr.mu, pfl.U1, pfl.U2, p);

    if (model_rates) {
        PerVehicle<std::optional<Vec3>> held;
        for (int i = 0; i < kVehicles; ++i) held[i] = mem.tether[i].q_d;
        const TetherTargets tt = tether_targets(s, g, p, h, held);
        for (int i = 0; i < kVehicles; ++i) {
            next.tether[i].q_d = tt.q_d[i];
            next.tether[i].omega_d = tt.omega_d[i];
        }
        tr.q_d = tt.q_d;
        tr.omega_d = tt.omega_d;
        tr.domega_d = tt.domega_d;
    } else {
        for (int i = 0; i < kVehicles; ++i) {
            TetherMemory& tm = next.tether[i];
            Vec3 q_d;
            try {
                q_d = desired_tether_direction(tr.mu[i]);
            } catch (const Error&) {
                q_d = tm.q_d ? *tm.q_d : s.tether[i].q;
            }
            Vec3 omega_d = Vec3::Zero();
            Vec3 domega_d = Vec3::Zero();
            if (tm.q_d) {
                omega_d = q_d.cross((q_d - *tm.q_d) / dt);
                if (tm.omega_d) {
                    domega_d = (omega_d - *tm.omega_d) / dt;
                }
                tm.omega_d = omega_d;
            }
            tm.q_d = q_d;
            tr.q_d[i] = q_d;
            tr.omega_d[i] = omega_d;
            tr.domega_d[i] = domega_d;
        }
    }

    tr.u_perp = perpendicular_controls(s, tr.q_d, tr.omega_d, tr.domega_d, pfl.U1, pfl.U2, g, p);
    for (int i = 0; i < kVehicles; ++i) {
        tr.u[i] = tr.u_par[i] + tr.u_perp[i];
        tr.f[i] = tr.u[i].norm();
    }

    // Attitude setpoints; the flow neighbours only exist in ReducedModel mode.
    auto setpoint = [&](const Vec3& u, AttitudeMemory& am, const Rotation& fallback, int i) {
        try {
            try {
                return quadrotor_attitude_setpoint(u, am.b1);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::GimbalDegeneracy) throw;
                am.b1 = am.b1.isApprox(Vec3::UnitX()) ? Vec3::UnitY() : Vec3::UnitX();
                return quadrotor_attitude_setpoint(u, am.b1);
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateThrust) throw e.with_index(i + 1);
            return fallback;
        }
    };

    PerVehicle<Vec3> u_plus, u_minus;
    if (model_rates) {
        // Slow flow: quadrotors deliver the commanded thrust exactly.
        auto slow = [&](const SystemState& x) {
            ControlInput in;
            in.u = desired_thrusts(x, g, p, h);
            for (auto& m : in.M) m.setZero();
            return model::full_dynamics(x, in, p);
        };
        const SystemState base = freeze_quads(s);
        u_plus = desired_thrusts(rkmk::step(base, h, slow), g, p, h);
        u_minus = desired_thrusts(rkmk::step(base, -h, slow), g, p, h);
    }

    for (int i = 0; i < kVehicles; ++i) {
        AttitudeMemory& am = next.quad[i];
        const QuadrotorState& qs = s.quad[i];
        const Rotation R_d = setpoint(tr.u[i], am, am.R_d ? *am.R_d : qs.R, i);

        Vec3 Omega_d = Vec3::Zero();
        Vec3 dOmega_d = Vec3::Zero();
        if (model_rates) {
            const bool ok = u_plus[i].norm() > tol::kMinThrust &&
                            u_minus[i].norm() > tol::kMinThrust && tr.f[i] > tol::kMinThrust;
            if (ok) {
                AttitudeMemory probe = am;
                const Rotation Rp = setpoint(u_plus[i], probe, R_d, i);
                const Rotation Rm = setpoint(u_minus[i], probe, R_d, i);
                std::tie(Omega_d, dOmega_d) = rotation_rates(Rm, R_d, Rp, h);
            }
            am.Omega_d = Omega_d;
        } else if (am.R_d) {
            Omega_d = geom::log_so3(am.R_d->transpose() * R_d) / dt;
            if (am.Omega_d) {
                dOmega_d = (Omega_d - *am.Omega_d) / dt;
            }
            am.Omega_d = Omega_d;
        }
        am.R_d = R_d;

        const QuadrotorCommand cmd =
            quadrotor_inputs(qs.R, qs.Omega, R_d, Omega_d, dOmega_d, p.quad[i].inertia, g);
        tr.R_d[i] = R_d;
        tr.Omega_d[i] = Omega_d;
        tr.dOmega_d[i] = dOmega_d;
        tr.M[i] = cmd.M;
        tr.e_R[i] = cmd.errors.e_R;
        tr.e_Omega[i] = cmd.errors.e_Omega;
        out.input.u[i] = tr.u[i];
        out.input.M[i] = cmd.M;
    }
    return out;
}

}  // namespace control
}  // namespace plateswarm
