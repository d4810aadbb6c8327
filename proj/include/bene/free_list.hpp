#pragma once

#include "bene/ratio.hpp"
#include "bene/types.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bene {

struct MachineSpec {
    std::string machine_id;
    ResourceVector capacity;
    friend bool operator==(const MachineSpec&, const MachineSpec&) = default;
};

/// Containers of one allocation pinned to one machine for a window.
struct CommittedSegment {
    std::string machine_id;
    ContainerType ctype = ContainerType::Small;
    std::int64_t count = 0;
    TimeWindow window{0, 1};
    friend bool operator==(const CommittedSegment&, const CommittedSegment&) = default;
};

/// How many containers of the requested type a machine can host for every
/// unit of the window, and its tightest residual over that window.
struct MachineOption {
    std::string machine_id;
    std::int64_t max_count = 0;
    ResourceVector min_remaining;
};

struct PlacementOptions {
    std::vector<MachineOption> machines; // ascending machine_id, max_count > 0
    std::int64_t total = 0;
};

inline constexpr TimeUnit kDefaultHorizonUnits = kUnitsPerWeek;

/// Per-unit, per-machine remaining capacity with an allocation ledger.
///
/// Only units that carry commitments are stored. Every mutation is
/// all-or-nothing, and remaining + committed == effective capacity holds at
/// every (unit, machine). A machine's effective capacity is zero while it is
/// in an outage.
class FreeList {
public:
    using Ledger = std::map<std::string, std::vector<CommittedSegment>, std::less<>>;

    FreeList(std::vector<MachineSpec> machines, TimeWindow horizon);

    [[nodiscard]] const TimeWindow& horizon() const noexcept { return horizon_; }
    /// Sorted by machine_id.
    [[nodiscard]] const std::vector<MachineSpec>& machines() const noexcept { return machines_; }
    [[nodiscard]] bool has_machine(std::string_view machine_id) const;
    [[nodiscard]] const MachineSpec& machine(std::string_view machine_id) const;

    [[nodiscard]] ResourceVector capacity(TimeUnit t, std::string_view machine_id) const;
    [[nodiscard]] ResourceVector committed(TimeUnit t, std::string_view machine_id) const;
    [[nodiscard]] ResourceVector remaining(TimeUnit t, std::string_view machine_id) const;
    [[nodiscard]] ResourceVector min_remaining(std::string_view machine_id, const TimeWindow& w) const;
    [[nodiscard]] bool is_down(TimeUnit t, std::string_view machine_id) const;

    /// nullopt when no split of `count` across machines fits every unit.
    /// Throws WindowOutsideHorizon.
    [[nodiscard]] std::optional<PlacementOptions>
    feasible_placements(ContainerType ctype, std::int64_t count, const TimeWindow& w) const;

    /// Adds segments for `allocation_id` (a known id is extended). Throws
    /// OverCommit without modifying anything if any residual would go
    /// negative, WindowOutsideHorizon if the window leaves the horizon.
    void commit(std::string_view allocation_id, const std::vector<Placement>& placements,
                const TimeWindow& w);
    void commit(const Allocation& a) { commit(a.id, a.placements, a.window); }

    /// Returns capacity for every unit >= from; earlier units stay occupied.
    /// A fully returned allocation leaves the ledger.
    void release(std::string_view allocation_id, TimeUnit from);
    /// Same as release but only for the allocation's segments on one machine.
    void release_on(std::string_view allocation_id, std::string_view machine_id, TimeUnit from);

    [[nodiscard]] bool contains(std::string_view allocation_id) const;
    [[nodiscard]] const Ledger& ledger() const noexcept { return ledger_; }

    /// Committed cpu over effective cpu at t (1 when nothing is online).
    [[nodiscard]] Ratio utilization(TimeUnit t) const;

    /// Takes the machine offline for [from, until) (until = nullopt: forever).
    /// Its commitments overlapping the outage must already be released.
    void set_outage(std::string_view machine_id, TimeUnit from, std::optional<TimeUnit> until);

    /// Moves the horizon start forward keeping its length; drops past rows.
    void slide_to(TimeUnit start);

    /// One row per (unit, machine): "<unit> <machine> <cpu> <mem>".
    [[nodiscard]] std::string dump(const TimeWindow& range) const;

    friend bool operator==(const FreeList& a, const FreeList& b);

private:
    std::size_t index_of(std::string_view machine_id) const;
    void check_in_horizon(const TimeWindow& w) const;
    void uncommit(const CommittedSegment& seg, std::size_t machine, TimeUnit from, TimeUnit to);

    std::vector<MachineSpec> machines_;
    TimeWindow horizon_;
    std::map<TimeUnit, std::vector<ResourceVector>> used_;
    Ledger ledger_;
    std::vector<std::vector<TimeWindow>> outages_;
};

} // namespace bene
