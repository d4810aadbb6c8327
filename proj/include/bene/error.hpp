#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bene {

enum class ErrorCode {
    LeadTimeTooShort,
    EmptyWindow,
    ZeroCount,
    MalformedSlo,
    MalformedRequest,
    HorizonBeforeStart,
    HorizonExceeded,
    WindowOutsideHorizon,
    Infeasible,
    OverCommit,
    UnknownAllocation,
    UnknownMachine,
    UtilizationOutOfRange,
    NonTerminalState,
    NonMonotonicTick,
    InsufficientVictims,
    StorageFailure,
    InvalidConfig,
    ParseError,
    Overflow,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every module. The code is part of the public contract
/// (wire responses and CLI exit messages carry it verbatim).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail)
        , code_(code)
        , detail_(detail) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace bene
