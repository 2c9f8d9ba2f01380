#include "plateswarm/report.hpp"

#include <json.hpp>

namespace plateswarm::io {

using nlohmann::json;

namespace {

template <class Derived>
json arr(const Eigen::MatrixBase<Derived>& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

json rows(const Mat3& m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
    }
    return a;
}

}  // namespace

std::string summary_json(const RunSummary& s) {
    const ConvergenceMetrics& m = s.metrics;
    json doc;
    doc["scenario"] = s.scenario;
    doc["mode"] = std::string(to_string(s.mode));
    doc["status"] = s.diverged ? "diverged" : "ok";
    if (s.diverged_at) doc["diverged_at"] = *s.diverged_at;
    if (!s.message.empty()) doc["message"] = s.message;
    doc["integrator"] = {{"method", "rkmk4"},
                         {"dt", s.integrator.dt},
                         {"duration", s.integrator.duration},
                         {"decimation", s.integrator.decimation}};
    doc["gains"] = {{"k1", s.gains.k1}, {"k2", s.gains.k2}, {"k3", s.gains.k3},
                    {"k4", s.gains.k4}, {"k5", s.gains.k5}, {"k6", s.gains.k6},
                    {"k7", s.gains.k7}, {"k8", s.gains.k8}, {"kR", s.gains.kR},
                    {"kOmega", s.gains.kOmega}, {"eps", s.gains.eps}};
    doc["wall_time_s"] = s.wall_time;
    doc["lyapunov"] = {{"V_initial", s.V_initial}, {"V_final", s.V_final}};
    doc["metrics"] = {{"samples", m.samples},
                      {"t_final", m.t_final},
                      {"r_b_norm", m.r_b},
                      {"eta_norm", m.eta},
                      {"height_abs", m.height},
                      {"Omega_p_norm", m.Omega_p},
                      {"window", m.window},
                      {"v_x_variation", m.v_x_variation},
                      {"v_y_variation", m.v_y_variation},
                      {"o_x_growth", m.o_x_growth},
                      {"o_y_growth", m.o_y_growth},
                      {"max_residual_q", m.max_res_q},
                      {"max_residual_omega", m.max_res_omega},
                      {"max_residual_R", m.max_res_R}};
    const SystemState& t = s.terminal;
    json tethers = json::array(), quads = json::array();
    for (int i = 0; i < kVehicles; ++i) {
        tethers.push_back({{"q", arr(t.tether[i].q)}, {"omega", arr(t.tether[i].omega)}});
        quads.push_back({{"R", rows(t.quad[i].R)}, {"Omega", arr(t.quad[i].Omega)}});
    }
    doc["terminal_state"] = {{"o_p", arr(t.o_p)},         {"v_p", arr(t.v_p)},
                             {"R_p", rows(t.R_p)},        {"Omega_p", arr(t.Omega_p)},
                             {"r_b", arr(t.r_b)},         {"rdot_b", arr(t.rdot_b)},
                             {"tethers", tethers},        {"quadrotors", quads}};
    return doc.dump(2) + "\n";
}

ConvergenceMetrics metrics_from_summary_json(std::string_view text) {
    const json doc = json::parse(text.begin(), text.end());
    const json& j = doc.at("metrics");
    ConvergenceMetrics m;
    m.samples = j.at("samples").get<std::size_t>();
    m.t_final = j.at("t_final").get<double>();
    m.r_b = j.at("r_b_norm").get<double>();
    m.eta = j.at("eta_norm").get<double>();
    m.height = j.at("height_abs").get<double>();
    m.Omega_p = j.at("Omega_p_norm").get<double>();
    m.window = j.at("window").get<double>();
    m.v_x_variation = j.at("v_x_variation").get<double>();
    m.v_y_variation = j.at("v_y_variation").get<double>();
    m.o_x_growth = j.at("o_x_growth").get<double>();
    m.o_y_growth = j.at("o_y_growth").get<double>();
    m.max_res_q = j.at("max_residual_q").get<double>();
    m.max_res_omega = j.at("max_residual_omega").get<double>();
    m.max_res_R = j.at("max_residual_R").get<double>();
    return m;
}

}  // namespace plateswarm::io
