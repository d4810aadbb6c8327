#include "bene/types.hpp"

#include "bene/error.hpp"

#include <algorithm>
#include <limits>

namespace bene {

TimeWindow::TimeWindow(TimeUnit start, TimeUnit end) : start_(start), end_(end) {
    if (start < 0 || start >= end) {
        throw Error(ErrorCode::EmptyWindow,
                    "window [" + std::to_string(start) + "," + std::to_string(end) + ")");
    }
}

std::optional<TimeWindow> TimeWindow::intersect(const TimeWindow& w) const {
    const TimeUnit s = std::max(start_, w.start_);
    const TimeUnit e = std::min(end_, w.end_);
    if (s >= e) return std::nullopt;
    return TimeWindow{s, e};
}

std::int64_t ResourceVector::copies_within(const ResourceVector& capacity) const noexcept {
    std::int64_t k = std::numeric_limits<std::int64_t>::max();
    if (cpu_millicores > 0) k = std::min(k, std::max<std::int64_t>(0, capacity.cpu_millicores) / cpu_millicores);
    if (mem_mb > 0) k = std::min(k, std::max<std::int64_t>(0, capacity.mem_mb) / mem_mb);
    return k;
}

ResourceVector componentwise_max(const ResourceVector& a, const ResourceVector& b) {
    return {std::max(a.cpu_millicores, b.cpu_millicores), std::max(a.mem_mb, b.mem_mb)};
}

ResourceVector footprint(ContainerType t) {
    constexpr ResourceVector small{1000, 2048};
    return small * type_factor(t);
}

std::int64_t type_factor(ContainerType t) {
    switch (t) {
    case ContainerType::Small: return 1;
    case ContainerType::Medium: return 2;
    case ContainerType::Large: return 4;
    }
    return 1;
}

std::string_view to_string(ContainerType t) {
    switch (t) {
    case ContainerType::Small: return "small";
    case ContainerType::Medium: return "medium";
    case ContainerType::Large: return "large";
    }
    return "small";
}

ContainerType parse_container_type(std::string_view s) {
    if (s == "small") return ContainerType::Small;
    if (s == "medium") return ContainerType::Medium;
    if (s == "large") return ContainerType::Large;
    throw Error(ErrorCode::ParseError, "unknown container type '" + std::string(s) + "'");
}

std::string_view to_string(RequestKind k) { return k == RequestKind::Reserved ? "reserved" : "realtime"; }

RequestKind parse_request_kind(std::string_view s) {
    if (s == "reserved") return RequestKind::Reserved;
    if (s == "realtime") return RequestKind::RealTime;
    throw Error(ErrorCode::ParseError, "unknown request kind '" + std::string(s) + "'");
}

std::string_view to_string(Recurrence r) { return r == Recurrence::None ? "none" : "daily"; }

Recurrence parse_recurrence(std::string_view s) {
    if (s == "none") return Recurrence::None;
    if (s == "daily") return Recurrence::Daily;
    throw Error(ErrorCode::ParseError, "unknown recurrence '" + std::string(s) + "'");
}

std::string_view to_string(AllocationState s) {
    switch (s) {
    case AllocationState::Planned: return "planned";
    case AllocationState::Provisioning: return "provisioning";
    case AllocationState::Running: return "running";
    case AllocationState::Stopped: return "stopped";
    case AllocationState::Preempted: return "preempted";
    case AllocationState::Failed: return "failed";
    }
    return "planned";
}

AllocationState parse_allocation_state(std::string_view s) {
    for (auto st : {AllocationState::Planned, AllocationState::Provisioning, AllocationState::Running,
                    AllocationState::Stopped, AllocationState::Preempted, AllocationState::Failed}) {
        if (to_string(st) == s) return st;
    }
    throw Error(ErrorCode::ParseError, "unknown allocation state '" + std::string(s) + "'");
}

bool is_terminal(AllocationState s) {
    return s == AllocationState::Stopped || s == AllocationState::Preempted || s == AllocationState::Failed;
}

std::int64_t Allocation::placed_count() const {
    std::int64_t n = 0;
    for (const auto& p : placements) n += p.count;
    return n;
}

std::int64_t Allocation::count_on(std::string_view machine_id) const {
    std::int64_t n = 0;
    for (const auto& p : placements)
        if (p.machine_id == machine_id) n += p.count;
    return n;
}

} // namespace bene
