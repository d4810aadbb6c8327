#include "bene/record.hpp"

#include "bene/error.hpp"

namespace bene {

std::string_view to_string(RejectionCode c) {
    switch (c) {
    case RejectionCode::Infeasible: return "Infeasible";
    case RejectionCode::LeadTimeTooShort: return "LeadTimeTooShort";
    case RejectionCode::HorizonExceeded: return "HorizonExceeded";
    }
    return "Infeasible";
}

RejectionCode parse_rejection_code(std::string_view s) {
    for (auto c : {RejectionCode::Infeasible, RejectionCode::LeadTimeTooShort, RejectionCode::HorizonExceeded})
        if (to_string(c) == s) return c;
    throw Error(ErrorCode::ParseError, "unknown rejection code '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::Admitted: return "admitted";
    case Outcome::Rejected: return "rejected";
    case Outcome::Completed: return "completed";
    case Outcome::Credited: return "credited";
    case Outcome::Preempted: return "preempted";
    case Outcome::Failed: return "failed";
    }
    return "admitted";
}

Outcome parse_outcome(std::string_view s) {
    for (auto o : {Outcome::Admitted, Outcome::Rejected, Outcome::Completed, Outcome::Credited, Outcome::Preempted,
                   Outcome::Failed})
        if (to_string(o) == s) return o;
    throw Error(ErrorCode::ParseError, "unknown outcome '" + std::string(s) + "'");
}

KvRecord to_record(const RequestRecord& r) {
    KvRecord rec = to_record(r.request);
    KvRecord out("request_record");
    for (const auto& [k, v] : rec.fields())
        if (k != "record") out.add(k, v);
    out.add("outcome", to_string(r.outcome));
    if (r.rejection) {
        out.add("reason", to_string(r.rejection->code));
        out.add("detail", r.rejection->detail);
    }
    out.add("allocation", r.allocation_id)
        .add("quoted", r.quoted.micros)
        .add("charged", r.charged.micros)
        .add("at", r.at);
    return out;
}

RequestRecord request_record_from(const KvRecord& rec) {
    if (rec.type() != "request_record") throw Error(ErrorCode::ParseError, "not a request_record");
    RequestRecord r;
    r.request = request_from_record(rec);
    r.outcome = parse_outcome(rec.get("outcome"));
    if (rec.has("reason")) r.rejection = RejectionReason{parse_rejection_code(rec.get("reason")), rec.get("detail")};
    r.allocation_id = rec.get("allocation");
    r.quoted = Money{rec.get_int("quoted")};
    r.charged = Money{rec.get_int("charged")};
    r.at = rec.get_int("at");
    return r;
}

} // namespace bene
