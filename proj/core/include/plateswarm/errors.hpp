#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace plateswarm {

enum class ErrorKind {
    NonSkewInput,
    SingularMassMatrix,
    NonParallelInput,
    RankDeficientAttachment,
    DegenerateTension,
    DegenerateThrust,
    GimbalDegeneracy,
    StepDiverged,
    InsufficientSamples,
    InvalidParams,
    InvalidState,
    InvalidGains,
    InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind plus an optional tether/quadrotor index.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<int> index = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<int> index() const noexcept { return index_; }

    /// Same error with the vehicle index attached (1-based, as printed to users).
    Error with_index(int index) const;

private:
    ErrorKind kind_;
    std::optional<int> index_;
};

}  // namespace plateswarm
