#include <plateswarm/errors.hpp>
#include <plateswarm/presets.hpp>
#include <plateswarm/report.hpp>
#include <plateswarm/scenario_io.hpp>
#include <plateswarm/suites.hpp>
#include <plateswarm/svg.hpp>
#include <plateswarm/trajectory_io.hpp>

#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

using namespace plateswarm;

namespace {

const std::string kScenarioDir = PLATESWARM_SCENARIO_DIR;

const char* const kTrajectoryHeader =
    "t,o_px,o_py,o_pz,v_px,v_py,v_pz,quat_pw,quat_px,quat_py,quat_pz,Omega_px,Omega_py,"
    "Omega_pz,r_b1,r_b2,rdot_b1,rdot_b2,q_1x,q_1y,q_1z,omega_1x,omega_1y,omega_1z,q_2x,q_2y,"
    "q_2z,omega_2x,omega_2y,omega_2z,q_3x,q_3y,q_3z,omega_3x,omega_3y,omega_3z,quat_1w,"
    "quat_1x,quat_1y,quat_1z,Omega_1x,Omega_1y,Omega_1z,f_1,M_1x,M_1y,M_1z,quat_2w,quat_2x,"
    "quat_2y,quat_2z,Omega_2x,Omega_2y,Omega_2z,f_2,M_2x,M_2y,M_2z,quat_3w,quat_3x,quat_3y,"
    "quat_3z,Omega_3x,Omega_3y,Omega_3z,f_3,M_3x,M_3y,M_3z,E_kin,E_pot,V,V2,res_q_max,"
    "res_omega_max,res_R_max";

void expect_same(const Scenario& a, const Scenario& b) {
    EXPECT_EQ(a.mode, b.mode);
    EXPECT_EQ(a.params.m_p, b.params.m_p);
    EXPECT_EQ(a.params.m_b, b.params.m_b);
    EXPECT_EQ(a.params.J_p, b.params.J_p);
    EXPECT_EQ(a.params.g, b.params.g);
    for (int i = 0; i < kVehicles; ++i) {
        EXPECT_EQ(a.params.quad[i].mass, b.params.quad[i].mass);
        EXPECT_EQ(a.params.quad[i].inertia, b.params.quad[i].inertia);
        EXPECT_EQ(a.params.quad[i].cable_length, b.params.quad[i].cable_length);
        EXPECT_EQ(a.params.quad[i].attachment, b.params.quad[i].attachment);
    }
    EXPECT_EQ(std::memcmp(&a.gains, &b.gains, sizeof(Gains)), 0);
    EXPECT_EQ(suites::state_distance(a.initial, b.initial), 0.0);
    EXPECT_EQ(a.integrator.dt, b.integrator.dt);
    EXPECT_EQ(a.integrator.duration, b.integrator.duration);
    EXPECT_EQ(a.integrator.decimation, b.integrator.decimation);
    EXPECT_EQ(a.integrator.projection_tol, b.integrator.projection_tol);
    EXPECT_EQ(a.control.rates, b.control.rates);
    EXPECT_EQ(a.control.rate_step, b.control.rate_step);
}

std::string config_error(const std::string& text) {
    try {
        io::parse_scenario(text, "test.json");
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
        return e.what();
    }
    ADD_FAILURE() << "scenario accepted";
    return {};
}

Trajectory short_run(double duration) {
    Scenario sc = presets::paper_scenario();
    sc.integrator.duration = duration;
    return sim::simulate(sc);
}

}  // namespace

TEST(ScenarioIo, BundledFilesLoad) {
    for (const char* name : {"paper_sec4.json", "hover.json", "passive.json"}) {
        EXPECT_NO_THROW(io::load_scenario(kScenarioDir + "/" + name)) << name;
    }
}

TEST(ScenarioIo, PaperFileMatchesThePreset) {
    const LoadedScenario ls = io::load_scenario(kScenarioDir + "/paper_sec4.json");
    const Scenario ref = presets::paper_scenario();
    EXPECT_EQ(ls.scenario.params.m_p, 0.75);
    EXPECT_EQ(ls.scenario.params.m_b, 0.1);
    EXPECT_EQ(ls.scenario.initial.r_b, Vec2(1, 1));
    EXPECT_EQ(ls.scenario.initial.rdot_b, Vec2(0.5, 0.5));
    EXPECT_EQ(ls.scenario.initial.Omega_p, Vec3(1, 1, 2));
    EXPECT_LT(suites::state_distance(ls.scenario.initial, ref.initial), 1e-14);
    // The printed q2(0), q3(0) are four-digit roundings and get normalized.
    EXPECT_EQ(ls.notes.size(), 2u);
}

TEST(ScenarioIo, RoundTripIsExact) {
    for (const char* name : {"paper_sec4.json", "hover.json", "passive.json"}) {
        const Scenario a = io::load_scenario(kScenarioDir + "/" + name).scenario;
        const Scenario b = io::parse_scenario(io::scenario_to_json(a)).scenario;
        expect_same(a, b);
    }
    Scenario odd = presets::paper_scenario();
    odd.gains.k3 = 0.1 + 0.2;
    odd.integrator.decimation = 4;
    odd.control.rates = RateSource::BackwardDifference;
    odd.mode = Mode::AttitudeOnly;
    expect_same(odd, io::parse_scenario(io::scenario_to_json(odd)).scenario);
}

TEST(ScenarioIo, UnknownKeyNamesItsLine) {
    const std::string msg = config_error("{\n  \"gains\": {\n    \"k1\": 3,\n    \"k9\": 1\n  }\n}\n");
    EXPECT_NE(msg.find("test.json:4:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("k9"), std::string::npos) << msg;
}

TEST(ScenarioIo, SyntaxErrorIsAConfigError) {
    const std::string msg = config_error("{\n  \"mode\": \"passive\",\n}\n");
    EXPECT_NE(msg.find("test.json"), std::string::npos) << msg;
}

TEST(ScenarioIo, CollinearAttachmentsNameTheRankCondition) {
    const std::string msg = config_error(R"({
  "params": {
    "quadrotors": [
      {"attachment": [-0.5, 0, 0]},
      {"attachment": [0, 0, 0]},
      {"attachment": [0.5, 0, 0]}
    ]
  }
})");
    EXPECT_NE(msg.find("rank"), std::string::npos) << msg;
    EXPECT_NE(msg.find("test.json:2: /params"), std::string::npos) << msg;
}

TEST(ScenarioIo, RejectsBadValues) {
    EXPECT_NE(config_error(R"({"integrator": {"dt": -1}})").find("dt"), std::string::npos);
    EXPECT_NE(config_error(R"({"mode": "hovering"})").find("mode"), std::string::npos);
    EXPECT_NE(config_error(R"({"params": {"J_p": [1, 2, 3]}})").find("J_p"), std::string::npos);
    config_error(R"({"initial_state": {"tethers": [{"q": [0, 0, 2]}, {}, {}]}})");
    config_error(R"({"integrator": {"decimation": 1.5}})");
}

TEST(ScenarioIo, LineLocator) {
    const std::string text = "{\n  \"a\": {\n    \"b\": [1,\n      2]\n  }\n}";
    EXPECT_EQ(io::line_of(text, "/a"), 2u);
    EXPECT_EQ(io::line_of(text, "/a/b"), 3u);
    EXPECT_EQ(io::line_of(text, "/a/b/1"), 4u);
    EXPECT_EQ(io::line_of(text, "/missing"), 0u);
}

TEST(TrajectoryCsv, HeaderIsFixed) {
    EXPECT_EQ(io::trajectory_header(), kTrajectoryHeader);
    std::size_t commas = 0;
    for (char c : io::trajectory_header()) commas += c == ',';
    EXPECT_EQ(commas + 1, kTrajectoryColumns);
}

TEST(TrajectoryCsv, RoundTripIsBitExact) {
    const TrajectoryTable table = io::to_table(short_run(0.05));
    std::stringstream ss;
    io::write_trajectory_csv(ss, table);
    const TrajectoryTable back = io::read_trajectory_csv(ss);
    ASSERT_EQ(back.rows.size(), table.rows.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        EXPECT_EQ(std::memcmp(back.rows[k].data(), table.rows[k].data(), sizeof(TrajectoryRow)), 0);
    }
}

TEST(TrajectoryCsv, QuaternionsHaveNonNegativeScalar) {
    const TrajectoryTable table = io::to_table(short_run(0.05));
    for (const TrajectoryRow& row : table.rows) {
        EXPECT_GE(row[7], 0.0);
        EXPECT_NEAR(std::hypot(std::hypot(row[7], row[8]), std::hypot(row[9], row[10])), 1.0, 1e-12);
    }
}

TEST(TrajectoryCsv, SummaryMetricsMatchTheCsv) {
    const Trajectory traj = short_run(0.3);
    RunSummary s;
    s.metrics = io::convergence_metrics(io::to_table(traj));
    s.terminal = traj.back().state;
    const ConvergenceMetrics from_summary = io::metrics_from_summary_json(io::summary_json(s));

    std::stringstream ss;
    io::write_trajectory_csv(ss, io::to_table(traj));
    const ConvergenceMetrics from_csv = io::convergence_metrics(io::read_trajectory_csv(ss));
    EXPECT_EQ(from_summary.samples, from_csv.samples);
    EXPECT_EQ(from_summary.t_final, from_csv.t_final);
    EXPECT_EQ(from_summary.r_b, from_csv.r_b);
    EXPECT_EQ(from_summary.eta, from_csv.eta);
    EXPECT_EQ(from_summary.height, from_csv.height);
    EXPECT_EQ(from_summary.Omega_p, from_csv.Omega_p);
    EXPECT_EQ(from_summary.v_x_variation, from_csv.v_x_variation);
    EXPECT_EQ(from_summary.v_y_variation, from_csv.v_y_variation);
    EXPECT_EQ(from_summary.o_x_growth, from_csv.o_x_growth);
    EXPECT_EQ(from_summary.o_y_growth, from_csv.o_y_growth);
    EXPECT_EQ(from_summary.max_res_q, from_csv.max_res_q);
    EXPECT_EQ(from_summary.max_res_omega, from_csv.max_res_omega);
    EXPECT_EQ(from_summary.max_res_R, from_csv.max_res_R);
}

TEST(TrajectoryCsv, MalformedInputNamesTheLine) {
    auto error_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            io::read_trajectory_csv(in);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
            return std::string(e.what());
        }
        ADD_FAILURE() << "accepted: " << text.substr(0, 40);
        return std::string();
    };
    EXPECT_NE(error_of("").find("empty"), std::string::npos);
    EXPECT_NE(error_of("a,b,c\n").find(":1:"), std::string::npos);
    EXPECT_NE(error_of(std::string(kTrajectoryHeader) + "\n").find("no samples"), std::string::npos);
    EXPECT_NE(error_of(std::string(kTrajectoryHeader) + "\n1,2,3\n").find(":2:"), std::string::npos);
    std::string row = "0";
    for (std::size_t k = 1; k < kTrajectoryColumns; ++k) row += k == 5 ? ",nan" : ",0";
    EXPECT_NE(error_of(std::string(kTrajectoryHeader) + "\n" + row + "\n").find("column 6"),
              std::string::npos);
}

TEST(ControlsCsv, OneRowPerControlTick) {
    const Trajectory traj = short_run(0.01);
    std::stringstream ss;
    io::write_controls_csv(ss, traj, 1);
    std::string line;
    std::size_t lines = 0, commas = 0;
    while (std::getline(ss, line)) {
        if (!lines) for (char c : line) commas += c == ',';
        ++lines;
    }
    EXPECT_EQ(lines, traj.size() + 1);
    EXPECT_EQ(commas + 1, 13u + 40u * kVehicles);
}

TEST(Svg, DeterministicAndComplete) {
    const TrajectoryTable table = io::to_table(short_run(0.2));
    for (const std::string& name : plot::figure_names()) {
        const Figure f = plot::figure(table, name);
        const std::string a = plot::render_svg(f.chart);
        const std::string b = plot::render_svg(plot::figure(table, name).chart);
        EXPECT_EQ(a, b) << name;
        EXPECT_EQ(a.rfind("<svg", 0), 0u) << name;
        EXPECT_NE(a.find("</svg>"), std::string::npos) << name;
        EXPECT_FALSE(f.chart.x_label.empty());
        EXPECT_FALSE(f.chart.y_label.empty());
    }
    EXPECT_EQ(plot::figure(table, "ball-pos").chart.series.size(), 2u);
    EXPECT_EQ(plot::figure(table, "attitude").chart.series.size(), 4u);
    try {
        plot::figure(table, "nope");
        FAIL() << "unknown figure accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
}
