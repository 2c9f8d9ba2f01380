#pragma once

#include "plateswarm/sim.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace plateswarm {

inline constexpr std::size_t kTrajectoryColumns = 76;

using TrajectoryRow = std::array<double, kTrajectoryColumns>;

/// Trajectory as written to trajectory.csv: one row per sample, rotations as
/// quaternions (w, x, y, z) with w >= 0.
struct TrajectoryTable {
    std::vector<TrajectoryRow> rows;
};

/// Terminal and convergence figures. Everything here is computed from a
/// TrajectoryTable, so trajectory.csv alone reproduces it bit for bit.
struct ConvergenceMetrics {
    std::size_t samples = 0;
    double t_final = 0.0;
    double r_b = 0.0;        // |r_b(T)|
    double eta = 0.0;        // |eta(R_p(T))|
    double height = 0.0;     // |o_p3(T)|
    double Omega_p = 0.0;    // |Omega_p(T)|
    double window = 0.0;     // tail window used below
    double v_x_variation = 0.0;
    double v_y_variation = 0.0;
    double o_x_growth = 0.0;  // |o_p1(T)| - |o_p1(T - window)|
    double o_y_growth = 0.0;
    double max_res_q = 0.0;
    double max_res_omega = 0.0;
    double max_res_R = 0.0;
};

namespace io {

/// The fixed header of trajectory.csv.
const std::string& trajectory_header();

TrajectoryTable to_table(const Trajectory& traj);

/// Writes header and rows with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const TrajectoryTable& table);

/// Throws Error{InvalidConfig} naming the offending line on a wrong header, a wrong
/// column count, a non-numeric field or an empty file.
TrajectoryTable read_trajectory_csv(std::istream& in);

/// Samples rebuilt from the table; the quadrotor thrust is f_i R_i e3.
Trajectory from_table(const TrajectoryTable& table);

ConvergenceMetrics convergence_metrics(const TrajectoryTable& table, double window = 5.0);

/// ControlTrace per control tick.
const std::string& controls_header();
void write_controls_csv(std::ostream& out, const Trajectory& traj, int decimation);

/// Plain row writer shared by the CSV files.
void write_row(std::ostream& out, const double* values, std::size_t n);

}  // namespace io
}  // namespace plateswarm
