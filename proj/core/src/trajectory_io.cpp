#include "plateswarm/trajectory_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace plateswarm::io {

namespace {

constexpr std::size_t kTetherBase = 18;
constexpr std::size_t kQuadBase = 36;
constexpr std::size_t kDiagBase = 69;

std::string join(const std::vector<std::string>& cols) {
    std::string out;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k) out += ',';
        out += cols[k];
    }
    return out;
}

void add(std::vector<std::string>& cols, const std::string& stem, const char* comps) {
    for (const char* c = comps; *c; ++c) cols.push_back(stem + *c);
}

std::string build_trajectory_header() {
    std::vector<std::string> c{"t"};
    add(c, "o_p", "xyz");
    add(c, "v_p", "xyz");
    add(c, "quat_p", "wxyz");
    add(c, "Omega_p", "xyz");
    add(c, "r_b", "12");
    add(c, "rdot_b", "12");
    for (int i = 1; i <= kVehicles; ++i) {
        add(c, "q_" + std::to_string(i), "xyz");
        add(c, "omega_" + std::to_string(i), "xyz");
    }
    for (int i = 1; i <= kVehicles; ++i) {
        const std::string n = std::to_string(i);
        add(c, "quat_" + n, "wxyz");
        add(c, "Omega_" + n, "xyz");
        c.push_back("f_" + n);
        add(c, "M_" + n, "xyz");
    }
    for (const char* name : {"E_kin", "E_pot", "V", "V2", "res_q_max", "res_omega_max", "res_R_max"}) {
        c.emplace_back(name);
    }
    return join(c);
}

std::string build_controls_header() {
    std::vector<std::string> c{"t"};
    add(c, "U1", "xyz");
    add(c, "U2", "xyz");
    add(c, "F", "xyz");
    add(c, "tau", "xyz");
    for (int i = 1; i <= kVehicles; ++i) {
        const std::string n = std::to_string(i);
        add(c, "mu_" + n, "xyz");
        add(c, "u_par_" + n, "xyz");
        add(c, "u_perp_" + n, "xyz");
        add(c, "u_" + n, "xyz");
        add(c, "q_d_" + n, "xyz");
        add(c, "omega_d_" + n, "xyz");
        for (int r = 1; r <= 3; ++r) add(c, "R_d_" + n + "_" + std::to_string(r), "123");
        add(c, "Omega_d_" + n, "xyz");
        c.push_back("f_" + n);
        add(c, "M_" + n, "xyz");
        add(c, "e_R_" + n, "xyz");
        add(c, "e_Omega_" + n, "xyz");
    }
    return join(c);
}

template <class Derived>
double* put(double* at, const Eigen::MatrixBase<Derived>& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) *at++ = v(k);
    return at;
}

double* put_quat(double* at, const Rotation& R) { return put(at, geom::to_quaternion(R)); }

Quat quat_at(const TrajectoryRow& row, std::size_t k) {
    return Quat(row[k], row[k + 1], row[k + 2], row[k + 3]);
}

Vec3 vec_at(const TrajectoryRow& row, std::size_t k) { return Vec3(row[k], row[k + 1], row[k + 2]); }

[[noreturn]] void bad_line(std::size_t line, const std::string& msg) {
    throw Error(ErrorKind::InvalidConfig, "trajectory.csv:" + std::to_string(line) + ": " + msg);
}

}  // namespace

const std::string& trajectory_header() {
    static const std::string header = build_trajectory_header();
    return header;
}

const std::string& controls_header() {
    static const std::string header = build_controls_header();
    return header;
}

void write_row(std::ostream& out, const double* values, std::size_t n) {
    char buf[32];
    for (std::size_t k = 0; k < n; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", values[k]);
        if (k) out << ',';
        out << buf;
    }
    out << '\n';
}

TrajectoryTable to_table(const Trajectory& traj) {
    TrajectoryTable table;
    table.rows.reserve(traj.size());
    for (const Sample& smp : traj.samples) {
        const SystemState& s = smp.state;
        TrajectoryRow row{};
        double* at = row.data();
        *at++ = smp.t;
        at = put(at, s.o_p);
        at = put(at, s.v_p);
        at = put_quat(at, s.R_p);
        at = put(at, s.Omega_p);
        at = put(at, s.r_b);
        at = put(at, s.rdot_b);
        for (const TetherState& t : s.tether) {
            at = put(at, t.q);
            at = put(at, t.omega);
        }
        for (int i = 0; i < kVehicles; ++i) {
            at = put_quat(at, s.quad[i].R);
            at = put(at, s.quad[i].Omega);
            *at++ = smp.trace ? smp.trace->f[i] : smp.applied.u[i].norm();
            at = put(at, smp.applied.M[i]);
        }
        const Diagnostics& d = smp.diag;
        *at++ = d.kinetic;
        *at++ = d.potential;
        *at++ = d.V;
        *at++ = d.V2;
        *at++ = d.residuals.q_norm;
        *at++ = d.residuals.omega_dot_q;
        *at++ = std::max(d.residuals.R_p, d.residuals.R_quad);
        table.rows.push_back(row);
    }
    return table;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryTable& table) {
    out << trajectory_header() << '\n';
    for (const TrajectoryRow& row : table.rows) write_row(out, row.data(), row.size());
}

TrajectoryTable read_trajectory_csv(std::istream& in) {
    TrajectoryTable table;
    std::string line;
    if (!std::getline(in, line)) bad_line(1, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != trajectory_header()) bad_line(1, "unexpected header");

    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TrajectoryRow row{};
        std::size_t col = 0;
        const char* p = line.c_str();
        for (;;) {
            if (col == kTrajectoryColumns) bad_line(lineno, "too many columns");
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(p, &end);
            if (end == p || errno == ERANGE || !std::isfinite(v)) {
                bad_line(lineno, "column " + std::to_string(col + 1) + " is not a finite number");
            }
            row[col++] = v;
            if (*end == '\0') break;
            if (*end != ',') bad_line(lineno, "column " + std::to_string(col) + " is not a number");
            p = end + 1;
        }
        if (col != kTrajectoryColumns) {
            bad_line(lineno, "expected " + std::to_string(kTrajectoryColumns) + " columns, found " +
                                 std::to_string(col));
        }
        table.rows.push_back(row);
    }
    if (table.rows.empty()) bad_line(2, "no samples");
    return table;
}

Trajectory from_table(const TrajectoryTable& table) {
    Trajectory traj;
    traj.samples.reserve(table.rows.size());
    for (const TrajectoryRow& row : table.rows) {
        Sample& smp = traj.samples.emplace_back();
        SystemState& s = smp.state;
        smp.t = row[0];
        s.o_p = vec_at(row, 1);
        s.v_p = vec_at(row, 4);
        s.R_p = geom::from_quaternion(quat_at(row, 7));
        s.Omega_p = vec_at(row, 11);
        s.r_b = Vec2(row[14], row[15]);
        s.rdot_b = Vec2(row[16], row[17]);
        for (int i = 0; i < kVehicles; ++i) {
            const std::size_t t0 = kTetherBase + 6 * static_cast<std::size_t>(i);
            s.tether[i].q = vec_at(row, t0);
            s.tether[i].omega = vec_at(row, t0 + 3);
            const std::size_t q0 = kQuadBase + 11 * static_cast<std::size_t>(i);
            s.quad[i].R = geom::from_quaternion(quat_at(row, q0));
            s.quad[i].Omega = vec_at(row, q0 + 4);
            smp.applied.u[i] = row[q0 + 7] * s.quad[i].R.col(2);
            smp.applied.M[i] = vec_at(row, q0 + 8);
        }
        Diagnostics& d = smp.diag;
        d.kinetic = row[kDiagBase];
        d.potential = row[kDiagBase + 1];
        d.V = row[kDiagBase + 2];
        d.V2 = row[kDiagBase + 3];
        d.residuals.q_norm = row[kDiagBase + 4];
        d.residuals.omega_dot_q = row[kDiagBase + 5];
        d.residuals.R_p = row[kDiagBase + 6];
    }
    if (traj.size() >= 2) traj.dt = traj.samples[1].t - traj.samples[0].t;
    return traj;
}

ConvergenceMetrics convergence_metrics(const TrajectoryTable& table, double window) {
    ConvergenceMetrics m;
    m.samples = table.rows.size();
    if (table.rows.empty()) return m;
    const TrajectoryRow& last = table.rows.back();
    m.t_final = last[0];
    m.r_b = Vec2(last[14], last[15]).norm();
    m.eta = geom::attitude_error_plate(geom::from_quaternion(quat_at(last, 7))).norm();
    m.height = std::abs(last[3]);
    m.Omega_p = vec_at(last, 11).norm();
    m.window = window;

    const double t_start = m.t_final - window;
    double vx_lo = INFINITY, vx_hi = -INFINITY, vy_lo = INFINITY, vy_hi = -INFINITY;
    const TrajectoryRow* first_in_window = nullptr;
    for (const TrajectoryRow& row : table.rows) {
        m.max_res_q = std::max(m.max_res_q, row[kDiagBase + 4]);
        m.max_res_omega = std::max(m.max_res_omega, row[kDiagBase + 5]);
        m.max_res_R = std::max(m.max_res_R, row[kDiagBase + 6]);
        if (row[0] < t_start - 1e-12) continue;
        if (!first_in_window) first_in_window = &row;
        vx_lo = std::min(vx_lo, row[4]);
        vx_hi = std::max(vx_hi, row[4]);
        vy_lo = std::min(vy_lo, row[5]);
        vy_hi = std::max(vy_hi, row[5]);
    }
    m.v_x_variation = vx_hi - vx_lo;
    m.v_y_variation = vy_hi - vy_lo;
    m.o_x_growth = std::abs(last[1]) - std::abs((*first_in_window)[1]);
    m.o_y_growth = std::abs(last[2]) - std::abs((*first_in_window)[2]);
    return m;
}

void write_controls_csv(std::ostream& out, const Trajectory& traj, int decimation) {
    out << controls_header() << '\n';
    std::vector<double> row;
    for (std::size_t k = 0; k < traj.size(); k += static_cast<std::size_t>(decimation)) {
        const Sample& smp = traj.samples[k];
        if (!smp.trace) continue;
        const ControlTrace& c = *smp.trace;
        row.assign(13 + 40 * kVehicles, 0.0);
        double* at = row.data();
        *at++ = smp.t;
        at = put(at, c.U1);
        at = put(at, c.U2);
        at = put(at, c.wrench.force);
        at = put(at, c.wrench.torque);
        for (int i = 0; i < kVehicles; ++i) {
            at = put(at, c.mu[i]);
            at = put(at, c.u_par[i]);
            at = put(at, c.u_perp[i]);
            at = put(at, c.u[i]);
            at = put(at, c.q_d[i]);
            at = put(at, c.omega_d[i]);
            at = put(at, Mat3(c.R_d[i].transpose()));  // row-major
            at = put(at, c.Omega_d[i]);
            *at++ = c.f[i];
            at = put(at, c.M[i]);
            at = put(at, c.e_R[i]);
            at = put(at, c.e_Omega[i]);
        }
        write_row(out, row.data(), row.size());
    }
}

}  // namespace plateswarm::io
