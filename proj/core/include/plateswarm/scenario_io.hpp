#pragma once

#include "plateswarm/sim.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace plateswarm {

struct LoadedScenario {
    Scenario scenario;
    std::vector<std::string> notes;  // adjustments made while loading
};

namespace io {

/// Parse a scenario document. Missing keys keep their defaults, unknown keys are
/// rejected. Errors are Error{InvalidConfig} prefixed with "<source>:<line>:".
///
/// Tether directions within 1e-3 of unit length are normalized (the printed paper
/// values carry four digits) and reported in `notes`.
LoadedScenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");
LoadedScenario load_scenario(const std::string& path);

/// Complete document; parse_scenario(to_json(sc)) reproduces sc exactly.
std::string scenario_to_json(const Scenario& sc);

std::string_view to_string(RateSource r);
RateSource rate_source_from_string(std::string_view name);

/// 1-based line of the value addressed by a JSON pointer, or 0 if it is absent.
std::size_t line_of(std::string_view text, std::string_view pointer);

}  // namespace io
}  // namespace plateswarm
