#include "selinf/errors.hpp"

namespace selinf {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroVarianceColumn: return "ZeroVarianceColumn";
        case ErrorCode::SingularDesign: return "SingularDesign";
        case ErrorCode::DidNotConverge: return "DidNotConverge";
        case ErrorCode::TooManySignPatterns: return "TooManySignPatterns";
        case ErrorCode::CollinearCandidate: return "CollinearCandidate";
        case ErrorCode::NoFeasibleEntry: return "NoFeasibleEntry";
        case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorCode::InfeasibleAtObservation: return "InfeasibleAtObservation";
        case ErrorCode::NoFeasibleComponent: return "NoFeasibleComponent";
        case ErrorCode::SelectorFailure: return "SelectorFailure";
        case ErrorCode::DegenerateMass: return "DegenerateMass";
        case ErrorCode::BracketFailure: return "BracketFailure";
        case ErrorCode::OutsideRegion: return "OutsideRegion";
        case ErrorCode::ModelNotNested: return "ModelNotNested";
        case ErrorCode::MissingNextKnot: return "MissingNextKnot";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::MissingResponse: return "MissingResponse";
    }
    return "Unknown";
}

}  // namespace selinf
