#pragma once

#include "plateswarm/control.hpp"
#include "plateswarm/model.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace plateswarm {

enum class Mode { ClosedLoop, Passive, AttitudeOnly };

std::string_view to_string(Mode mode);
/// Throws Error{InvalidConfig} for unknown names.
Mode mode_from_string(std::string_view name);

struct ConstraintResiduals {
    double q_norm = 0.0;       // max_i | |q_i| - 1 |
    double omega_dot_q = 0.0;  // max_i |omega_i . q_i|
    double R_p = 0.0;          // |R_p^T R_p - I|_F
    double R_quad = 0.0;       // max_i |R_i^T R_i - I|_F

    double max() const;
};

struct Diagnostics {
    double kinetic = 0.0;
    double potential = 0.0;
    double V = 0.0;
    double V2 = 0.0;
    ConstraintResiduals residuals{};
    BodyPositions positions{};
};

struct Sample {
    double t = 0.0;
    SystemState state{};
    ControlInput applied{};              // u_i = f_i R_i e3 and M_i acting at t
    std::optional<ControlTrace> trace;   // closed-loop runs only
    Diagnostics diag{};
};

struct Trajectory {
    Mode mode = Mode::Passive;
    double dt = 0.0;
    std::vector<Sample> samples;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    const Sample& back() const { return samples.back(); }
};

}  // namespace plateswarm
