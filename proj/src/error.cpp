#include "bene/error.hpp"

namespace bene {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::LeadTimeTooShort: return "LeadTimeTooShort";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::ZeroCount: return "ZeroCount";
    case ErrorCode::MalformedSlo: return "MalformedSlo";
    case ErrorCode::MalformedRequest: return "MalformedRequest";
    case ErrorCode::HorizonBeforeStart: return "HorizonBeforeStart";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::WindowOutsideHorizon: return "WindowOutsideHorizon";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::OverCommit: return "OverCommit";
    case ErrorCode::UnknownAllocation: return "UnknownAllocation";
    case ErrorCode::UnknownMachine: return "UnknownMachine";
    case ErrorCode::UtilizationOutOfRange: return "UtilizationOutOfRange";
    case ErrorCode::NonTerminalState: return "NonTerminalState";
    case ErrorCode::NonMonotonicTick: return "NonMonotonicTick";
    case ErrorCode::InsufficientVictims: return "InsufficientVictims";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Overflow: return "Overflow";
    }
    return "Unknown";
}

} // namespace bene
