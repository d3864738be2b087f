#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mgt {

enum class ErrorCode {
    NonDissipative,
    NonFinite,
    InvalidFrequency,
    GridError,
    IllConditioned,
    StepFailure,
    EmptyInput,
    NonPositiveMargin,
    QuadratureFailure,
    DegenerateFit,
    ToleranceFailure,
    InvalidArgument,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mgt
