#include "mgt/error.hpp"

namespace mgt {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonDissipative: return "NonDissipative";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::InvalidFrequency: return "InvalidFrequency";
        case ErrorCode::GridError: return "GridError";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::StepFailure: return "StepFailure";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NonPositiveMargin: return "NonPositiveMargin";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::ToleranceFailure: return "ToleranceFailure";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace mgt
