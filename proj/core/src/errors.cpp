#include "plateswarm/errors.hpp"

namespace plateswarm {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonSkewInput: return "NonSkewInput";
        case ErrorKind::SingularMassMatrix: return "SingularMassMatrix";
        case ErrorKind::NonParallelInput: return "NonParallelInput";
        case ErrorKind::RankDeficientAttachment: return "RankDeficientAttachment";
        case ErrorKind::DegenerateTension: return "DegenerateTension";
        case ErrorKind::DegenerateThrust: return "DegenerateThrust";
        case ErrorKind::GimbalDegeneracy: return "GimbalDegeneracy";
        case ErrorKind::StepDiverged: return "StepDiverged";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::InvalidGains: return "InvalidGains";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, std::optional<int> index)
    : std::runtime_error(what), kind_(kind), index_(index) {}

Error Error::with_index(int index) const {
    return Error(kind_, std::string(what()) + " [vehicle " + std::to_string(index) + "]", index);
}

}  // namespace plateswarm
