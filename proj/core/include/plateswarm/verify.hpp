#pragma once

#include "plateswarm/control.hpp"
#include "plateswarm/model.hpp"
#include "plateswarm/trajectory.hpp"

#include <algorithm>
#include <vector>

namespace plateswarm {

using Mat6 = Eigen::Matrix<double, 6, 6>;

struct LyapunovSample {
    double t = 0.0;
    double V = 0.0;
    double V2 = 0.0;
    Vec6 z = Vec6::Zero();  // |r_b|, |r_b'|, |eta|, |Omega_p|, |o_p3|, |o_p3'|
};

struct DefinitenessVerdict {
    Vec6 eigenvalues = Vec6::Zero();  // of the symmetric part, ascending
    Eigen::Matrix<double, 7, 1> charpoly = Eigen::Matrix<double, 7, 1>::Zero();
    bool by_eigenvalues = false;
    bool by_charpoly = false;
};

struct GainCertificate {
    Gains gains{};
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    double C1 = 0.0, C2 = 0.0;
    Mat6 W = Mat6::Zero();             // as assembled
    Vec6 eigenvalues = Vec6::Zero();   // of the symmetrized matrix, ascending
    Eigen::Matrix<double, 7, 1> charpoly = Eigen::Matrix<double, 7, 1>::Zero();  // det(lambda I - W), lambda^0 first
    bool accepted = false;             // all eigenvalues < 0
    bool charpoly_accepts = false;     // all characteristic coefficients > 0
    bool positive_diagonal = false;    // some diagonal entry >= 0 rules out definiteness outright

    bool consistent() const { return accepted == charpoly_accepts; }
};

struct AttitudeBounds {
    double C1 = 0.0;  // bound on |Omega_p|
    double C2 = 0.0;  // bound on |eta|
};

struct DecayFit {
    double rate = 0.0;      // -slope of log(value) [1/s]
    double r_squared = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    double peak = 0.0;
    std::size_t points = 0;
    bool exponential = false;  // rate > min_rate and R^2 above threshold
};

struct DecayFitOptions {
    double floor_ratio = 1e-2;    // window ends when value drops below floor_ratio * peak
    double absolute_floor = 1e-9; // or below this
    double skip = 0.0;            // transient excluded: t0 = first time + skip
    double search_window = 1.0;   // peak searched within [t0, t0 + search_window]
    double min_rate = 1e-3;
    double min_r_squared = 0.9;
};

struct QuadrotorDecay {
    DecayFit e_R;
    DecayFit e_Omega;
    bool monotone_after_transient = false;
};

struct BoundaryLayerReport {
    PerVehicle<QuadrotorDecay> quad{};
    DecayFit max_e_R;           // fit of max_i |e_R_i(t)|
    double transient = 0.0;
    double max_e_R_after_transient = 0.0;
    double max_e_Omega_after_transient = 0.0;
};

struct ElReport {
    double ball = 0.0;               // max |d/dt dL/dr_b' - dL/dr_b|
    double plate_translation = 0.0;  // max |d/dt dL/do_p' - dL/do_p - sum u_i|
    double max() const { return std::max(ball, plate_translation); }
};

struct EnergyAudit {
    double max_abs = 0.0;     // max |dE/dt - P| [W]
    double max_power = 0.0;   // max |P|
    double energy_scale = 0.0;
    double relative = 0.0;    // max_abs / max(|E|)
};

struct MonotonicityReport {
    bool non_increasing = true;
    double worst_increase = 0.0;
    double t_worst = 0.0;
    double tolerance = 0.0;
    std::size_t violations = 0;
};

struct InternalDynamicsReport {
    double window = 0.0;
    double v_x_variation = 0.0;
    double v_y_variation = 0.0;
    double v_x_final = 0.0;
    double v_y_final = 0.0;
    double o_x_growth = 0.0;  // |o_p1(T)| - |o_p1(T - window)|
    double o_y_growth = 0.0;
};

struct HeightConditionReport {
    std::size_t samples = 0;
    std::size_t violations = 0;  // samples where |o_p3'| <= g |1 - (e3^T R_p e3)^2| / k5
};

namespace verify {

double lyapunov_V(const SystemState& s, const Gains& g, double c1, double c2);
double lyapunov_V2(const Rotation& R_p, const Vec3& Omega_p, const Gains& g, double c0);
LyapunovSample lyapunov_sample(double t, const SystemState& s, const Gains& g);

/// The bounding matrix of the Lyapunov derivative with attitude bounds C1, C2.
Mat6 gain_matrix(const Gains& g, double c1, double c2, double C1, double C2);

/// Coefficients of det(lambda I - M) via Faddeev-LeVerrier, constant term first.
Eigen::Matrix<double, 7, 1> characteristic_polynomial(const Mat6& m);

/// Negative definiteness of the symmetric part, decided twice.
DefinitenessVerdict negative_definite(const Mat6& m);

GainCertificate gain_condition_check(const Gains& g, double c0, double c1, double c2, double C1,
                                     double C2);

/// Bounds on |Omega_p| and |eta| implied by V2(t) <= V2(0).
///
/// With Psi >= |eta|^2 / 2 we have V2 >= 1/2 z^T P z for z = (|eta|, |Omega_p|) and
/// P = [[k2 + c0 k1, -c0], [-c0, 1]]. The sublevel set {1/2 z^T P z <= V2(0)} is an
/// ellipse whose extent along each axis is sqrt(2 V2(0) (P^-1)_jj); C2 is further capped
/// by |eta| <= 1.
AttitudeBounds attitude_bounds_from_initial(const SystemState& s0, const Gains& g, double c0);

/// Least-squares fit of log(value) over the decay window that starts at the peak.
DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& value,
                               const DecayFitOptions& opt = {});

/// Throws Error{InsufficientSamples} unless the trajectory has traces and >= 3 samples.
BoundaryLayerReport boundary_layer_monitor(const Trajectory& traj, double transient = 0.5,
                                           const DecayFitOptions& opt = {});

/// Euler-Lagrange residual of the ball and plate-translation coordinates. The partial
/// derivatives of L = T - U are taken by central differences of the coded energies,
/// the time derivative by five-point central differences between samples (needs >= 5).
ElReport euler_lagrange_residual(const Trajectory& traj, const SystemParams& p);

/// Work-energy balance d(T + U)/dt = sum u_i . o_i' + M_i . Omega_i by central differences.
EnergyAudit energy_audit(const Trajectory& traj, const SystemParams& p);

/// V(t_k+1) <= V(t_k) + rel_tol V(0) for all samples after the transient.
MonotonicityReport lyapunov_monotonicity(const Trajectory& traj, double transient,
                                         double rel_tol = 1e-9);

InternalDynamicsReport internal_dynamics(const Trajectory& traj, double window = 5.0);

HeightConditionReport height_condition(const Trajectory& traj, const Gains& g,
                                       const SystemParams& p, double transient = 0.0);

}  // namespace verify
}  // namespace plateswarm
