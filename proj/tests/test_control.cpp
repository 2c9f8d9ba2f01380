#include <plateswarm/control.hpp>
#include <plateswarm/errors.hpp>
#include <plateswarm/sampling.hpp>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <functional>

#include "oracles/oracles.hpp"

using namespace plateswarm;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidConfig;
}

Eigen::Matrix<double, 6, 9> allocation_matrix(const SystemParams& p) {
    Eigen::Matrix<double, 6, 9> A;
    for (int i = 0; i < kVehicles; ++i) {
        A.block<3, 3>(0, 3 * i).setIdentity();
        const Vec3& x = p.quad[i].attachment;
        A.block<3, 3>(3, 3 * i) << 0, -x.z(), x.y(), x.z(), 0, -x.x(), -x.y(), x.x(), 0;
    }
    return A;
}

Eigen::Matrix<double, 9, 1> stacked(const TensionSet& mu, const Rotation& R_p) {
    Eigen::Matrix<double, 9, 1> x;
    for (int i = 0; i < kVehicles; ++i) x.segment<3>(3 * i) = R_p.transpose() * mu[i];
    return x;
}

}  // namespace

TEST(Gains, DefaultsValidateAndRejectNonPositive) {
    EXPECT_NO_THROW(Gains{}.validate());
    Gains g;
    g.k5 = 0.0;
    EXPECT_EQ(kind_of([&] { g.validate(); }), ErrorKind::InvalidGains);
    g = Gains{};
    g.eps = 1.5;
    EXPECT_EQ(kind_of([&] { g.validate(); }), ErrorKind::InvalidGains);
}

TEST(PflInputs, TargetStateNeedsNothing) {
    const PflInputs u = control::pfl_inputs(SystemState{}, Gains{}, SystemParams{});
    EXPECT_LT(u.U1.norm(), 1e-15);
    EXPECT_LT(u.U2.norm(), 1e-15);
}

TEST(PflInputs, RateDampingAndBallRestoring) {
    const Gains g;
    SystemState s;
    s.Omega_p = Vec3(0, 0, 1);
    EXPECT_LT((control::pfl_inputs(s, g, SystemParams{}).U2 - Vec3(0, 0, -g.k1)).norm(), 1e-15);

    s = SystemState{};
    s.r_b = Vec2(0.1, 0);
    const PflInputs u = control::pfl_inputs(s, g, SystemParams{});
    EXPECT_LT((u.U1 - Vec3(0.1 * g.k4, 0, 0)).norm(), 1e-15);
}

TEST(ForceTorque, GravityFeedforwardAtTarget) {
    const SystemParams p;
    const Wrench w = control::force_torque_from_U(SystemState{}, Vec3::Zero(), Vec3::Zero(), p);
    EXPECT_LT((w.force - (p.m_p + p.m_b) * p.g * Vec3::UnitZ()).norm(), 1e-12);
    EXPECT_LT(w.torque.norm(), 1e-12);
}

TEST(ForceTorque, RealizesTheDesignedAccelerations) {
    const SystemParams p;
    sampling::Rng rng(31);
    for (int k = 0; k < 1000; ++k) {
        const SystemState s = sampling::random_state(rng);
        const Vec3 U1 = sampling::uniform_vec(rng, 5.0);
        const Vec3 U2 = sampling::uniform_vec(rng, 5.0);
        const PlateAccelerations a =
            model::decoupled_dynamics(s, control::force_torque_from_U(s, U1, U2, p), p);
        EXPECT_LT((a.a_p - U1).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LT((a.dOmega_p - U2).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(ForceTorque, SchurComplementIsPositiveDefinite) {
    const SystemParams p;
    sampling::Rng rng(32);
    for (int k = 0; k < 1000; ++k) {
        const MassBlocks b = model::mass_blocks(sampling::random_state(rng), p);
        const Eigen::Matrix<double, 6, 6> S = b.M22 - b.M12.transpose() * b.M11.inverse() * b.M12;
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(0.5 * (S + S.transpose()));
        EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Allocation, SymmetricLiftSplitsEvenly) {
    const TensionSet mu = control::allocate_tensions({3.0 * Vec3::UnitZ(), Vec3::Zero()},
                                                     Mat3::Identity(), SystemParams{});
    for (const Vec3& m : mu) EXPECT_LT((m - Vec3::UnitZ()).norm(), 1e-12);
}

TEST(Allocation, ReconstructsTheWrench) {
    const SystemParams p;
    const auto A = allocation_matrix(p);
    sampling::Rng rng(33);
    for (int k = 0; k < 1000; ++k) {
        const Wrench w{sampling::uniform_vec(rng, 20.0), sampling::uniform_vec(rng, 5.0)};
        const Rotation R = sampling::random_rotation(rng);
        Vec6 target;
        target << R.transpose() * w.force, w.torque;
        const Vec6 got = A * stacked(control::allocate_tensions(w, R, p), R);
        EXPECT_LT((got - target).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Allocation, NullSpacePerturbationsCostMore) {
    const SystemParams p;
    const auto A = allocation_matrix(p);
    const Eigen::MatrixXd N = Eigen::FullPivLU<Eigen::MatrixXd>(A).kernel();
    ASSERT_EQ(N.cols(), 3);
    sampling::Rng rng(34);
    for (int k = 0; k < 20; ++k) {
        const Wrench w{sampling::uniform_vec(rng, 20.0), sampling::uniform_vec(rng, 5.0)};
        const Rotation R = sampling::random_rotation(rng);
        const auto x = stacked(control::allocate_tensions(w, R, p), R);
        for (int j = 0; j < 20; ++j) {
            const Eigen::Vector3d c(sampling::uniform(rng, -1, 1), sampling::uniform(rng, -1, 1),
                                    sampling::uniform(rng, -1, 1));
            const Eigen::Matrix<double, 9, 1> y = x + N * c;
            EXPECT_LT((A * (y - x)).norm(), 1e-12);
            EXPECT_GT(y.squaredNorm(), x.squaredNorm());
        }
    }
}

TEST(Allocation, RejectsCollinearAttachments) {
    SystemParams p;
    p.quad[0].attachment = Vec3(-0.5, 0, 0);
    p.quad[1].attachment = Vec3(0, 0, 0);
    p.quad[2].attachment = Vec3(0.5, 0, 0);
    EXPECT_EQ(kind_of([&] { control::allocate_tensions({}, Mat3::Identity(), p); }),
              ErrorKind::RankDeficientAttachment);
}

TEST(ParallelControls, HoverAndSelfSupport) {
    const SystemParams p;
    TensionSet mu;
    for (Vec3& m : mu) m = oracles::hover_tension(p) * Vec3::UnitZ();
    const auto u = control::parallel_controls(SystemState{}, mu, Vec3::Zero(), Vec3::Zero(), p);
    for (int i = 0; i < kVehicles; ++i) {
        EXPECT_LT((u[i] - oracles::hover_thrust(p, i) * Vec3::UnitZ()).norm(), 1e-12);
    }
    const auto self = control::parallel_controls(SystemState{}, oracles::zeros(), Vec3::Zero(), Vec3::Zero(), p);
    for (int i = 0; i < kVehicles; ++i) {
        EXPECT_LT((self[i] - p.quad[i].mass * p.g * Vec3::UnitZ()).norm(), 1e-12);
    }
}

TEST(ParallelControls, CentripetalTerm) {
    const SystemParams p;
    SystemState s;
    s.tether[0].omega = Vec3(1, 0, 0);
    const auto u = control::parallel_controls(s, oracles::zeros(), Vec3::Zero(), Vec3::Zero(), p);
    const double m = p.quad[0].mass, l = p.quad[0].cable_length;
    EXPECT_LT((u[0] - m * (p.g - l) * Vec3::UnitZ()).norm(), 1e-12);
}

TEST(DesiredTetherDirection, NormalizesAndRejectsVanishingTension) {
    EXPECT_EQ(control::desired_tether_direction(Vec3(0, 0, 5)), Vec3(0, 0, 1));
    EXPECT_LT((control::desired_tether_direction(Vec3(3, 0, 4)) - Vec3(0.6, 0, 0.8)).norm(), 1e-15);
    EXPECT_EQ(kind_of([] { control::desired_tether_direction(Vec3(0, 0, 1e-12)); }),
              ErrorKind::DegenerateTension);
}

TEST(PerpendicularControls, AlignedTetherAtRest) {
    const SystemParams p;
    const PerVehicle<Vec3> q_d{Vec3::UnitZ(), Vec3::UnitZ(), Vec3::UnitZ()};
    const PerVehicle<Vec3> zero = oracles::zeros();
    const auto u = control::perpendicular_controls(SystemState{}, q_d, zero, zero, Vec3::Zero(),
                                                   Vec3::Zero(), Gains{}, p);
    for (const Vec3& v : u) EXPECT_LT(v.norm(), 1e-12);
}

TEST(PerpendicularControls, PureAlignmentError) {
    const SystemParams p;
    const Gains g;
    const PerVehicle<Vec3> q_d{Vec3::UnitX(), Vec3::UnitZ(), Vec3::UnitZ()};
    const PerVehicle<Vec3> zero = oracles::zeros();
    const auto u = control::perpendicular_controls(SystemState{}, q_d, zero, zero, Vec3::Zero(),
                                                   Vec3::Zero(), g, p);
    const Vec3 expected = oracles::pure_alignment_thrust(p.quad[0].mass, p.quad[0].cable_length, g.k7);
    EXPECT_LT((u[0] - expected).norm(), 1e-10);
}

TEST(PerpendicularControls, OrthogonalToTether) {
    const SystemParams p;
    sampling::Rng rng(35);
    for (int k = 0; k < 1000; ++k) {
        const SystemState s = sampling::random_state(rng);
        PerVehicle<Vec3> q_d, w_d, dw_d;
        for (int i = 0; i < kVehicles; ++i) {
            q_d[i] = sampling::unit_vec(rng);
            w_d[i] = sampling::uniform_vec(rng, 2.0);
            dw_d[i] = sampling::uniform_vec(rng, 2.0);
        }
        const auto u = control::perpendicular_controls(s, q_d, w_d, dw_d, sampling::uniform_vec(rng, 3),
                                                       sampling::uniform_vec(rng, 3), Gains{}, p);
        for (int i = 0; i < kVehicles; ++i) EXPECT_LT(std::abs(s.tether[i].q.dot(u[i])), 1e-10);
    }
}

TEST(AttitudeSetpoint, UprightAndInverted) {
    EXPECT_LT((control::quadrotor_attitude_setpoint(Vec3(0, 0, 9.81), Vec3::UnitX()) - Mat3::Identity()).norm(),
              1e-15);
    const Rotation down = control::quadrotor_attitude_setpoint(Vec3(0, 0, -9.81), Vec3::UnitX());
    EXPECT_LT((down.col(2) + Vec3::UnitZ()).norm(), 1e-15);
    EXPECT_NEAR(down.determinant(), 1.0, 1e-12);
}

TEST(AttitudeSetpoint, DegenerateInputs) {
    EXPECT_EQ(kind_of([] { control::quadrotor_attitude_setpoint(Vec3(2, 0, 0), Vec3::UnitX()); }),
              ErrorKind::GimbalDegeneracy);
    EXPECT_EQ(kind_of([] { control::quadrotor_attitude_setpoint(Vec3::Zero(), Vec3::UnitX()); }),
              ErrorKind::DegenerateThrust);
}

TEST(AttitudeSetpoint, AlwaysARotationWithThrustAxis) {
    sampling::Rng rng(36);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 u = sampling::uniform_vec(rng, 20.0);
        const Rotation R = control::quadrotor_attitude_setpoint(u, Vec3::UnitY());
        EXPECT_TRUE(geom::is_rotation(R));
        EXPECT_EQ(R.col(2), u / u.norm());
    }
}

TEST(QuadrotorInputs, ZeroWhileTracking) {
    const Rotation R = oracles::rot_x(0.3);
    const Mat3 J = Vec3(0.0049, 0.0049, 0.0088).asDiagonal();
    const QuadrotorCommand c =
        control::quadrotor_inputs(R, Vec3::Zero(), R, Vec3::Zero(), Vec3::Zero(), J, Gains{});
    EXPECT_LT(c.M.norm(), 1e-15);
}

TEST(QuadrotorInputs, YawRateDamping) {
    const Gains g;
    const Mat3 J = Vec3(0.0049, 0.0049, 0.0088).asDiagonal();
    const QuadrotorCommand c = control::quadrotor_inputs(Mat3::Identity(), Vec3(0, 0, 1), Mat3::Identity(),
                                                         Vec3::Zero(), Vec3::Zero(), J, g);
    EXPECT_LT((c.M - Vec3(0, 0, -g.kOmega / g.eps)).norm(), 1e-12);
}

TEST(QuadrotorInputs, HalvingEpsScalesTheGains) {
    const Mat3 J = Mat3::Identity() * 0.005;
    Gains g;
    g.kOmega = 1e-9;  // isolate the attitude term
    const Rotation R = oracles::rot_x(0.2);
    const auto m1 = control::quadrotor_inputs(R, Vec3::Zero(), Mat3::Identity(), Vec3::Zero(), Vec3::Zero(), J, g);
    Gains h = g;
    h.eps = g.eps / 2;
    const auto m2 = control::quadrotor_inputs(R, Vec3::Zero(), Mat3::Identity(), Vec3::Zero(), Vec3::Zero(), J, h);
    EXPECT_NEAR(m2.M.x() / m1.M.x(), 4.0, 1e-9);

    g = Gains{};
    g.kR = 1e-9;  // isolate the rate term
    const Vec3 w(0.5, 0, 0);
    const auto r1 = control::quadrotor_inputs(Mat3::Identity(), w, Mat3::Identity(), Vec3::Zero(), Vec3::Zero(), J, g);
    h = g;
    h.eps = g.eps / 2;
    const auto r2 = control::quadrotor_inputs(Mat3::Identity(), w, Mat3::Identity(), Vec3::Zero(), Vec3::Zero(), J, h);
    EXPECT_NEAR(r2.M.x() / r1.M.x(), 2.0, 1e-9);
}

TEST(ComputeControls, HoverAtTarget) {
    const SystemParams p;
    for (RateSource rates : {RateSource::ReducedModel, RateSource::BackwardDifference}) {
        ControlOptions opt;
        opt.rates = rates;
        const ControlStep c = control::compute_controls(SystemState{}, Gains{}, {}, p, 1e-3, opt);
        EXPECT_LT(c.trace.U1.norm(), 1e-12);
        EXPECT_LT(c.trace.U2.norm(), 1e-12);
        for (int i = 0; i < kVehicles; ++i) {
            EXPECT_NEAR(c.trace.f[i], oracles::hover_thrust(p, i), 1e-9);
            EXPECT_LT(c.input.M[i].norm(), 1e-9);
        }
    }
}

TEST(ComputeControls, TraceIdentities) {
    const SystemParams p;
    sampling::Rng rng(37);
    for (int k = 0; k < 200; ++k) {
        const SystemState s = sampling::random_state(rng, sampling::moderate_ranges());
        const ControlStep c = control::compute_controls(s, Gains{}, {}, p, 1e-3);
        const ControlTrace& t = c.trace;
        for (int i = 0; i < kVehicles; ++i) {
            EXPECT_EQ(t.u[i], t.u_par[i] + t.u_perp[i]);
            EXPECT_EQ(t.f[i], t.u[i].norm());
            const Vec3& q = s.tether[i].q;
            EXPECT_LT(std::abs(q.dot(t.u_perp[i])), 1e-10 * (1 + t.u_perp[i].norm()));
            EXPECT_LT((t.u_par[i] - q * q.dot(t.u_par[i])).norm(), 1e-10 * (1 + t.u_par[i].norm()));
            EXPECT_TRUE(geom::is_rotation(t.R_d[i]));
            EXPECT_LT((t.R_d[i].col(2) - t.u[i] / t.f[i]).norm(), 1e-15);
        }
    }
}

TEST(ComputeControls, ClosedLoopBallEquation) {
    const SystemParams p;
    const Gains g;
    sampling::Rng rng(38);
    for (int k = 0; k < 1000; ++k) {
        const SystemState s = sampling::random_state(rng);
        const PflInputs u = control::pfl_inputs(s, g, p);
        const PlateAccelerations a =
            model::decoupled_dynamics(s, control::force_torque_from_U(s, u.U1, u.U2, p), p);
        const Vec3 Er(s.r_b.x(), s.r_b.y(), 0.0);
        const Vec2 expected = -g.k4 * s.r_b - g.k3 * s.rdot_b +
                              SystemParams::E().transpose() * geom::hat(Er) * u.U2;
        EXPECT_LT((a.rddot_b - expected).cwiseAbs().maxCoeff(), 1e-8);
    }
}
