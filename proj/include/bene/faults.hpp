#pragma once

#include "bene/codec.hpp"
#include "bene/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bene {

enum class FaultKind { MachineCrash, SlotHang };

std::string_view to_string(FaultKind k);
FaultKind parse_fault_kind(std::string_view s);

struct FaultEvent {
    TimeUnit at = 0;
    std::string machine_id;
    FaultKind kind = FaultKind::MachineCrash;
    /// Whether the single restart attempt succeeds.
    bool restartable = false;
    friend bool operator==(const FaultEvent&, const FaultEvent&) = default;
};

struct FaultPlan {
    std::uint64_t seed = 0;
    /// Sorted by (at, machine_id).
    std::vector<FaultEvent> events;

    /// Deterministic plan of `count` faults spread over `window`.
    static FaultPlan synthesize(std::uint64_t seed, const std::vector<std::string>& machine_ids,
                                const TimeWindow& window, std::size_t count, double restartable_fraction);

    void sort();
    friend bool operator==(const FaultPlan&, const FaultPlan&) = default;
};

KvRecord to_record(const FaultEvent& e);
FaultEvent fault_from_record(const KvRecord& rec);

std::string encode_fault_plan(const FaultPlan& plan);
/// Picks the `fault` records out of any record list (trace or scenario files).
FaultPlan fault_plan_from_records(const std::vector<KvRecord>& records);

} // namespace bene
