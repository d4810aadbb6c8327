#include "bene/request.hpp"

#include "bene/error.hpp"

namespace bene {

Request validate_request(const Request& r, TimeUnit now) {
    if (r.id.empty() || r.enterprise.empty())
        throw Error(ErrorCode::MalformedRequest, "request needs an id and an enterprise");
    if (r.count < 1) throw Error(ErrorCode::ZeroCount, "request " + r.id + " asks for no containers");
    if (r.window.duration() < 1) throw Error(ErrorCode::EmptyWindow, "request " + r.id);
    if (r.slo.max_latency_ms <= 0 || r.slo.min_throughput_rps <= 0)
        throw Error(ErrorCode::MalformedSlo, "request " + r.id + " has a non-positive SLO field");
    if (r.kind == RequestKind::RealTime && r.recurrence != Recurrence::None)
        throw Error(ErrorCode::MalformedRequest, "real-time request " + r.id + " cannot recur");
    if (r.kind == RequestKind::Reserved && r.window.start() < now + kReservationLeadUnits) {
        throw Error(ErrorCode::LeadTimeTooShort,
                    "reservation " + r.id + " starts at " + std::to_string(r.window.start()) +
                        ", earliest allowed is " + std::to_string(now + kReservationLeadUnits));
    }
    return r;
}

std::vector<Request> expand_recurrence(const Request& r, TimeUnit horizon_end) {
    if (r.recurrence == Recurrence::None) return {r};
    if (horizon_end <= r.window.start())
        throw Error(ErrorCode::HorizonBeforeStart,
                    "horizon " + std::to_string(horizon_end) + " ends before " + r.id + " starts");
    std::vector<Request> children;
    for (TimeUnit day = 0;; ++day) {
        const TimeWindow w = r.window.shifted(day * kUnitsPerDay);
        if (w.end() > horizon_end) break;
        Request child = r;
        child.id = r.id + "#" + std::to_string(day);
        child.parent_id = r.id;
        child.recurrence = Recurrence::None;
        child.window = w;
        children.push_back(std::move(child));
    }
    return children;
}

} // namespace bene
