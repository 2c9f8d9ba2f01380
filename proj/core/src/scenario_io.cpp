#include "plateswarm/scenario_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace plateswarm::io {

using nlohmann::json;

namespace {

// Skips JSON whitespace; returns the new offset.
std::size_t skip_ws(std::string_view t, std::size_t i) {
    while (i < t.size() && (t[i] == ' ' || t[i] == '\t' || t[i] == '\n' || t[i] == '\r')) ++i;
    return i;
}

std::size_t skip_string(std::string_view t, std::size_t i) {
    for (++i; i < t.size(); ++i) {
        if (t[i] == '\\') {
            ++i;
        } else if (t[i] == '"') {
            return i + 1;
        }
    }
    return t.size();
}

std::size_t skip_value(std::string_view t, std::size_t i) {
    i = skip_ws(t, i);
    if (i >= t.size()) return i;
    if (t[i] == '"') return skip_string(t, i);
    if (t[i] == '{' || t[i] == '[') {
        int depth = 0;
        for (; i < t.size(); ++i) {
            const char c = t[i];
            if (c == '"') {
                i = skip_string(t, i) - 1;
            } else if (c == '{' || c == '[') {
                ++depth;
            } else if (c == '}' || c == ']') {
                if (--depth == 0) return i + 1;
            }
        }
        return i;
    }
    while (i < t.size() && t[i] != ',' && t[i] != '}' && t[i] != ']' && t[i] != ' ' &&
           t[i] != '\n' && t[i] != '\r' && t[i] != '\t') {
        ++i;
    }
    return i;
}

// Offset of the member or element `token` inside the container starting at i.
std::optional<std::size_t> descend(std::string_view t, std::size_t i, const std::string& token) {
    i = skip_ws(t, i);
    if (i >= t.size()) return std::nullopt;
    if (t[i] == '{') {
        i = skip_ws(t, i + 1);
        while (i < t.size() && t[i] == '"') {
            const std::size_t end = skip_string(t, i);
            const json key = json::parse(t.substr(i, end - i), nullptr, false);
            i = skip_ws(t, end);
            if (i < t.size() && t[i] == ':') i = skip_ws(t, i + 1);
            if (key.is_string() && key.get<std::string>() == token) return i;
            i = skip_ws(t, skip_value(t, i));
            if (i < t.size() && t[i] == ',') i = skip_ws(t, i + 1);
        }
        return std::nullopt;
    }
    if (t[i] == '[') {
        std::size_t index = 0;
        try {
            index = std::stoul(token);
        } catch (const std::exception&) {
            return std::nullopt;
        }
        i = skip_ws(t, i + 1);
        for (std::size_t k = 0; i < t.size() && t[i] != ']'; ++k) {
            if (k == index) return i;
            i = skip_ws(t, skip_value(t, i));
            if (i < t.size() && t[i] == ',') i = skip_ws(t, i + 1);
        }
    }
    return std::nullopt;
}

class Reader {
public:
    Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
        std::string where = source_;
        std::string p = pointer;
        for (;;) {
            if (const std::size_t line = line_of(text_, p); line > 0) {
                where += ":" + std::to_string(line);
                break;
            }
            if (p.empty()) break;
            p = p.substr(0, p.rfind('/'));
        }
        throw Error(ErrorKind::InvalidConfig,
                    where + ": " + (pointer.empty() ? "/" : pointer) + ": " + msg);
    }

    void expect_object(const json& j, const std::string& ptr, std::set<std::string> allowed) const {
        if (!j.is_object()) fail(ptr, "expected an object");
        for (const auto& item : j.items()) {
            if (!allowed.count(item.key())) fail(ptr + "/" + item.key(), "unknown key");
        }
    }

    double number(const json& j, const std::string& ptr) const {
        if (!j.is_number()) fail(ptr, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(ptr, "expected a finite number");
        return v;
    }

    template <class Fixed>
    Fixed vector(const json& j, const std::string& ptr) const {
        constexpr int n = Fixed::SizeAtCompileTime;
        if (!j.is_array() || static_cast<int>(j.size()) != n) {
            fail(ptr, "expected an array of " + std::to_string(n) + " numbers");
        }
        Fixed v;
        for (int k = 0; k < n; ++k) v(k) = number(j[k], ptr + "/" + std::to_string(k));
        return v;
    }

    Mat3 matrix(const json& j, const std::string& ptr) const {
        const auto flat = vector<Eigen::Matrix<double, 9, 1>>(j, ptr);
        Mat3 m;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) m(r, c) = flat(3 * r + c);
        }
        return m;
    }

    void per_vehicle(const json& j, const std::string& ptr) const {
        if (!j.is_array() || j.size() != static_cast<std::size_t>(kVehicles)) {
            fail(ptr, "expected an array of " + std::to_string(kVehicles) + " objects");
        }
    }

    template <class Fn>
    void validated(const std::string& ptr, Fn&& fn) const {
        try {
            fn();
        } catch (const Error& e) {
            fail(ptr, e.what());
        }
    }

private:
    std::string_view text_;
    std::string source_;
};

json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

json mat_json(const Mat3& m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
    }
    return a;
}

void read_params(const Reader& rd, const json& j, SystemParams& p) {
    const std::string base = "/params";
    rd.expect_object(j, base, {"m_p", "m_b", "J_p", "g", "quadrotors"});
    if (j.contains("m_p")) p.m_p = rd.number(j["m_p"], base + "/m_p");
    if (j.contains("m_b")) p.m_b = rd.number(j["m_b"], base + "/m_b");
    if (j.contains("J_p")) p.J_p = rd.matrix(j["J_p"], base + "/J_p");
    if (j.contains("g")) p.g = rd.number(j["g"], base + "/g");
    if (j.contains("quadrotors")) {
        const std::string qb = base + "/quadrotors";
        rd.per_vehicle(j["quadrotors"], qb);
        for (int i = 0; i < kVehicles; ++i) {
            const json& q = j["quadrotors"][i];
            const std::string ptr = qb + "/" + std::to_string(i);
            rd.expect_object(q, ptr, {"mass", "inertia", "cable_length", "attachment"});
            QuadrotorParams& qp = p.quad[i];
            if (q.contains("mass")) qp.mass = rd.number(q["mass"], ptr + "/mass");
            if (q.contains("inertia")) qp.inertia = rd.matrix(q["inertia"], ptr + "/inertia");
            if (q.contains("cable_length")) {
                qp.cable_length = rd.number(q["cable_length"], ptr + "/cable_length");
            }
            if (q.contains("attachment")) {
                qp.attachment = rd.vector<Vec3>(q["attachment"], ptr + "/attachment");
            }
        }
    }
}

const std::pair<const char*, double Gains::*> kGainFields[] = {
    {"k1", &Gains::k1}, {"k2", &Gains::k2}, {"k3", &Gains::k3},         {"k4", &Gains::k4},
    {"k5", &Gains::k5}, {"k6", &Gains::k6}, {"k7", &Gains::k7},         {"k8", &Gains::k8},
    {"kR", &Gains::kR}, {"kOmega", &Gains::kOmega}, {"eps", &Gains::eps}, {"c0", &Gains::c0},
    {"c1", &Gains::c1}, {"c2", &Gains::c2},
};

void read_gains(const Reader& rd, const json& j, Gains& g) {
    const std::string base = "/gains";
    std::set<std::string> names;
    for (const auto& [name, field] : kGainFields) names.insert(name);
    rd.expect_object(j, base, names);
    for (const auto& [name, field] : kGainFields) {
        if (j.contains(name)) g.*field = rd.number(j[name], base + "/" + name);
    }
}

void read_state(const Reader& rd, const json& j, SystemState& s,
                std::vector<std::string>& notes) {
    const std::string base = "/initial_state";
    rd.expect_object(j, base,
                     {"o_p", "v_p", "R_p", "Omega_p", "r_b", "rdot_b", "tethers", "quadrotors"});
    if (j.contains("o_p")) s.o_p = rd.vector<Vec3>(j["o_p"], base + "/o_p");
    if (j.contains("v_p")) s.v_p = rd.vector<Vec3>(j["v_p"], base + "/v_p");
    if (j.contains("R_p")) s.R_p = rd.matrix(j["R_p"], base + "/R_p");
    if (j.contains("Omega_p")) s.Omega_p = rd.vector<Vec3>(j["Omega_p"], base + "/Omega_p");
    if (j.contains("r_b")) s.r_b = rd.vector<Vec2>(j["r_b"], base + "/r_b");
    if (j.contains("rdot_b")) s.rdot_b = rd.vector<Vec2>(j["rdot_b"], base + "/rdot_b");
    if (j.contains("tethers")) {
        const std::string tb = base + "/tethers";
        rd.per_vehicle(j["tethers"], tb);
        for (int i = 0; i < kVehicles; ++i) {
            const json& t = j["tethers"][i];
            const std::string ptr = tb + "/" + std::to_string(i);
            rd.expect_object(t, ptr, {"q", "omega"});
            TetherState& ts = s.tether[i];
            if (t.contains("q")) {
                Vec3 q = rd.vector<Vec3>(t["q"], ptr + "/q");
                const double n = q.norm();
                if (std::abs(n - 1.0) > 1e-3) rd.fail(ptr + "/q", "tether direction is not a unit vector");
                if (n != 1.0) {
                    q /= n;
                    std::ostringstream os;
                    os.precision(17);
                    os << ptr << "/q: normalized (norm was " << n << ")";
                    notes.push_back(os.str());
                }
                ts.q = q;
            }
            if (t.contains("omega")) ts.omega = rd.vector<Vec3>(t["omega"], ptr + "/omega");
        }
    }
    if (j.contains("quadrotors")) {
        const std::string qb = base + "/quadrotors";
        rd.per_vehicle(j["quadrotors"], qb);
        for (int i = 0; i < kVehicles; ++i) {
            const json& q = j["quadrotors"][i];
            const std::string ptr = qb + "/" + std::to_string(i);
            rd.expect_object(q, ptr, {"R", "Omega"});
            if (q.contains("R")) s.quad[i].R = rd.matrix(q["R"], ptr + "/R");
            if (q.contains("Omega")) s.quad[i].Omega = rd.vector<Vec3>(q["Omega"], ptr + "/Omega");
        }
    }
}

void read_integrator(const Reader& rd, const json& j, IntegratorConfig& c) {
    const std::string base = "/integrator";
    rd.expect_object(j, base, {"dt", "duration", "decimation", "projection_tol"});
    if (j.contains("dt")) c.dt = rd.number(j["dt"], base + "/dt");
    if (j.contains("duration")) c.duration = rd.number(j["duration"], base + "/duration");
    if (j.contains("projection_tol")) {
        c.projection_tol = rd.number(j["projection_tol"], base + "/projection_tol");
    }
    if (j.contains("decimation")) {
        if (!j["decimation"].is_number_integer()) rd.fail(base + "/decimation", "expected an integer");
        c.decimation = j["decimation"].get<int>();
    }
}

void read_control(const Reader& rd, const json& j, ControlOptions& c) {
    const std::string base = "/control";
    rd.expect_object(j, base, {"rates", "rate_step"});
    if (j.contains("rates")) {
        if (!j["rates"].is_string()) rd.fail(base + "/rates", "expected a string");
        rd.validated(base + "/rates",
                     [&] { c.rates = rate_source_from_string(j["rates"].get<std::string>()); });
    }
    if (j.contains("rate_step")) c.rate_step = rd.number(j["rate_step"], base + "/rate_step");
}

}  // namespace

std::size_t line_of(std::string_view text, std::string_view pointer) {
    std::size_t pos = skip_ws(text, 0);
    std::string_view rest = pointer;
    while (!rest.empty()) {
        if (rest.front() != '/') return 0;
        rest.remove_prefix(1);
        const std::size_t cut = std::min(rest.find('/'), rest.size());
        const auto next = descend(text, pos, std::string(rest.substr(0, cut)));
        if (!next) return 0;
        pos = *next;
        rest.remove_prefix(cut);
    }
    if (pos >= text.size()) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n'));
}

std::string_view to_string(RateSource r) {
    switch (r) {
        case RateSource::ReducedModel: return "reduced-model";
        case RateSource::BackwardDifference: return "backward-difference";
    }
    return "unknown";
}

RateSource rate_source_from_string(std::string_view name) {
    if (name == "reduced-model") return RateSource::ReducedModel;
    if (name == "backward-difference") return RateSource::BackwardDifference;
    throw Error(ErrorKind::InvalidConfig, "unknown rate source '" + std::string(name) +
                                              "' (expected reduced-model or backward-difference)");
}

LoadedScenario parse_scenario(std::string_view text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t at = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(at), '\n');
        throw Error(ErrorKind::InvalidConfig, source + ":" + std::to_string(line) + ": " + e.what());
    }

    const Reader rd(text, source);
    LoadedScenario out;
    Scenario& sc = out.scenario;
    rd.expect_object(doc, "",
                     {"mode", "params", "gains", "initial_state", "integrator", "control"});
    if (doc.contains("mode")) {
        if (!doc["mode"].is_string()) rd.fail("/mode", "expected a string");
        rd.validated("/mode", [&] { sc.mode = mode_from_string(doc["mode"].get<std::string>()); });
    }
    if (doc.contains("params")) read_params(rd, doc["params"], sc.params);
    if (doc.contains("gains")) read_gains(rd, doc["gains"], sc.gains);
    if (doc.contains("initial_state")) read_state(rd, doc["initial_state"], sc.initial, out.notes);
    if (doc.contains("integrator")) read_integrator(rd, doc["integrator"], sc.integrator);
    if (doc.contains("control")) read_control(rd, doc["control"], sc.control);

    rd.validated("/params", [&] { sc.params.validate(); });
    rd.validated("/gains", [&] { sc.gains.validate(); });
    rd.validated("/initial_state", [&] { sc.initial.validate(); });
    rd.validated("/integrator", [&] { sc.integrator.validate(); });
    rd.validated("/control", [&] { sc.validate(); });
    return out;
}

LoadedScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidConfig, path + ": cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

std::string scenario_to_json(const Scenario& sc) {
    json doc;
    doc["mode"] = std::string(to_string(sc.mode));

    json& p = doc["params"];
    p["m_p"] = sc.params.m_p;
    p["m_b"] = sc.params.m_b;
    p["J_p"] = mat_json(sc.params.J_p);
    p["g"] = sc.params.g;
    p["quadrotors"] = json::array();
    for (const auto& q : sc.params.quad) {
        p["quadrotors"].push_back({{"mass", q.mass},
                                   {"inertia", mat_json(q.inertia)},
                                   {"cable_length", q.cable_length},
                                   {"attachment", vec_json(q.attachment)}});
    }

    json& g = doc["gains"];
    for (const auto& [name, field] : kGainFields) g[name] = sc.gains.*field;

    json& s = doc["initial_state"];
    s["o_p"] = vec_json(sc.initial.o_p);
    s["v_p"] = vec_json(sc.initial.v_p);
    s["R_p"] = mat_json(sc.initial.R_p);
    s["Omega_p"] = vec_json(sc.initial.Omega_p);
    s["r_b"] = vec_json(sc.initial.r_b);
    s["rdot_b"] = vec_json(sc.initial.rdot_b);
    s["tethers"] = json::array();
    s["quadrotors"] = json::array();
    for (int i = 0; i < kVehicles; ++i) {
        s["tethers"].push_back(
            {{"q", vec_json(sc.initial.tether[i].q)}, {"omega", vec_json(sc.initial.tether[i].omega)}});
        s["quadrotors"].push_back(
            {{"R", mat_json(sc.initial.quad[i].R)}, {"Omega", vec_json(sc.initial.quad[i].Omega)}});
    }

    doc["integrator"] = {{"dt", sc.integrator.dt},
                         {"duration", sc.integrator.duration},
                         {"decimation", sc.integrator.decimation},
                         {"projection_tol", sc.integrator.projection_tol}};
    doc["control"] = {{"rates", std::string(to_string(sc.control.rates))},
                      {"rate_step", sc.control.rate_step}};
    return doc.dump(2) + "\n";
}

}  // namespace plateswarm::io
