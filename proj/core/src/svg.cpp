#include "plateswarm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace plateswarm::plot {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

// Round step (1, 2 or 5 times a power of ten) giving about `n` intervals.
double nice_step(double span, int n) {
    const double raw = span / n;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

Series column(const TrajectoryTable& t, std::size_t col, std::string label) {
    Series s;
    s.label = std::move(label);
    s.x.reserve(t.rows.size());
    s.y.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        s.x.push_back(row[0]);
        s.y.push_back(row[col]);
    }
    return s;
}

}  // namespace

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names{"attitude", "omega",   "plate-pos",
                                                "plate-vel", "ball-pos", "ball-vel"};
    return names;
}

std::string render_svg(const LineChart& chart, int width, int height) {
    const double left = 80, right = 130, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const Series& s : chart.series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double xs = nice_step(x1 - x0, 6), ys = nice_step(y1 - y0, 5);
    x0 = std::floor(x0 / xs) * xs, x1 = std::ceil(x1 / xs) * xs;
    y0 = std::floor(y0 / ys) * ys, y1 = std::ceil(y1 / ys) * ys;

    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";

    for (double x = x0; x <= x1 + xs * 1e-9; x += xs) {
        o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(x))
          << "\" y2=\"" << num(top + ph) << "\" stroke=\"#e5e5e5\"/>\n";
        o << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + ph + 18)
          << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
    }
    for (double y = y0; y <= y1 + ys * 1e-9; y += ys) {
        o << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(left + pw)
          << "\" y2=\"" << num(py(y)) << "\" stroke=\"#e5e5e5\"/>\n";
        o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(y) + 4)
          << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
    }
    o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 14)
      << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << num(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(chart.y_label) << "</text>\n";

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const Series& s = chart.series[k];
        const char* color = kColors[k % std::size(kColors)];
        // Keep roughly one vertex per horizontal pixel.
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / static_cast<std::size_t>(pw));
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); i += stride) {
            o << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
        }
        if (!s.x.empty()) o << num(px(s.x.back())) << ',' << num(py(s.y.back()));
        o << "\"/>\n";
        const double ly = top + 16 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
          << num(left + pw + 32) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << num(left + pw + 38) << "\" y=\"" << num(ly) << "\">" << escape(s.label)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

Figure figure(const TrajectoryTable& t, std::string_view name) {
    Figure f;
    f.name = std::string(name);
    LineChart& c = f.chart;
    c.x_label = "t [s]";
    if (name == "attitude") {
        c.title = "Plate attitude quaternion";
        c.y_label = "quaternion [-]";
        const char* labels[] = {"w", "x", "y", "z"};
        for (int k = 0; k < 4; ++k) c.series.push_back(column(t, 7 + k, labels[k]));
    } else if (name == "omega") {
        c.title = "Plate angular velocity";
        c.y_label = "Omega_p [rad/s]";
        for (int k = 0; k < 3; ++k) c.series.push_back(column(t, 11 + k, "Omega_p" + std::string(1, "xyz"[k])));
    } else if (name == "plate-pos") {
        c.title = "Plate position";
        c.y_label = "o_p [m]";
        for (int k = 0; k < 3; ++k) c.series.push_back(column(t, 1 + k, "o_p" + std::string(1, "xyz"[k])));
    } else if (name == "plate-vel") {
        c.title = "Plate velocity";
        c.y_label = "v_p [m/s]";
        for (int k = 0; k < 3; ++k) c.series.push_back(column(t, 4 + k, "v_p" + std::string(1, "xyz"[k])));
    } else if (name == "ball-pos") {
        c.title = "Ball position on the plate";
        c.y_label = "r_b [m]";
        for (int k = 0; k < 2; ++k) c.series.push_back(column(t, 14 + k, "r_b" + std::to_string(k + 1)));
    } else if (name == "ball-vel") {
        c.title = "Ball velocity on the plate";
        c.y_label = "rdot_b [m/s]";
        for (int k = 0; k < 2; ++k) c.series.push_back(column(t, 16 + k, "rdot_b" + std::to_string(k + 1)));
    } else {
        throw Error(ErrorKind::InvalidConfig, "unknown figure '" + std::string(name) + "'");
    }
    return f;
}

}  // namespace plateswarm::plot
