#pragma once

#include "plateswarm/trajectory_io.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace plateswarm {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

struct Figure {
    std::string name;  // file stem, e.g. "ball-pos"
    LineChart chart;
};

namespace plot {

/// Figure names accepted by figures(); "all" selects every one.
const std::vector<std::string>& figure_names();

/// Self-contained SVG. Identical input gives identical bytes.
std::string render_svg(const LineChart& chart, int width = 720, int height = 420);

/// Throws Error{InvalidConfig} for an unknown name.
Figure figure(const TrajectoryTable& table, std::string_view name);

}  // namespace plot
}  // namespace plateswarm
