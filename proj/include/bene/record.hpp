#pragma once

#include "bene/codec.hpp"
#include "bene/types.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace bene {

enum class RejectionCode { Infeasible, LeadTimeTooShort, HorizonExceeded };

std::string_view to_string(RejectionCode c);
RejectionCode parse_rejection_code(std::string_view s);

struct RejectionReason {
    RejectionCode code = RejectionCode::Infeasible;
    std::string detail;
    friend bool operator==(const RejectionReason&, const RejectionReason&) = default;
};

enum class Outcome { Admitted, Rejected, Completed, Credited, Preempted, Failed };

std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view s);

/// One append-only entry of a request's history. A request accumulates
/// several entries (admitted, then completed, ...); none is ever rewritten.
struct RequestRecord {
    Request request;
    Outcome outcome = Outcome::Admitted;
    std::optional<RejectionReason> rejection;
    std::string allocation_id;
    Money quoted;
    Money charged;
    /// Unit at which this outcome happened.
    TimeUnit at = 0;

    friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

KvRecord to_record(const RequestRecord& r);
RequestRecord request_record_from(const KvRecord& rec);

} // namespace bene
