#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selinf {

enum class ErrorCode {
    InvalidArgument,
    ZeroVarianceColumn,
    SingularDesign,
    DidNotConverge,
    TooManySignPatterns,
    CollinearCandidate,
    NoFeasibleEntry,
    DegenerateDenominator,
    InfeasibleAtObservation,
    NoFeasibleComponent,
    SelectorFailure,
    DegenerateMass,
    BracketFailure,
    OutsideRegion,
    ModelNotNested,
    MissingNextKnot,
    ParseError,
    NonNumericCell,
    MissingResponse,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can render it as a structured JSON error.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace selinf
