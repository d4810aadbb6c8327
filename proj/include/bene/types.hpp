#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bene {

// ---------------------------------------------------------------------------
// Time lattice
// ---------------------------------------------------------------------------

/// Index of a 15-minute slot counted from the configured epoch.
using TimeUnit = std::int64_t;

inline constexpr int kMinutesPerUnit = 15;
inline constexpr TimeUnit kUnitsPerDay = 96;
inline constexpr TimeUnit kUnitsPerWeek = 7 * kUnitsPerDay;
/// Reservations must be submitted at least this many units before they start.
inline constexpr TimeUnit kReservationLeadUnits = 1;

/// Half-open interval [start, end) on the lattice. Never empty.
class TimeWindow {
public:
    /// Throws Error(EmptyWindow) unless start < end and start >= 0.
    TimeWindow(TimeUnit start, TimeUnit end);

    [[nodiscard]] TimeUnit start() const noexcept { return start_; }
    [[nodiscard]] TimeUnit end() const noexcept { return end_; }
    [[nodiscard]] TimeUnit duration() const noexcept { return end_ - start_; }

    [[nodiscard]] bool contains(TimeUnit t) const noexcept { return start_ <= t && t < end_; }
    [[nodiscard]] bool contains(const TimeWindow& w) const noexcept {
        return start_ <= w.start_ && w.end_ <= end_;
    }
    [[nodiscard]] bool overlaps(const TimeWindow& w) const noexcept {
        return start_ < w.end_ && w.start_ < end_;
    }
    [[nodiscard]] TimeWindow shifted(TimeUnit by) const { return {start_ + by, end_ + by}; }
    /// Intersection, or nullopt when the windows do not overlap.
    [[nodiscard]] std::optional<TimeWindow> intersect(const TimeWindow& w) const;

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
    friend auto operator<=>(const TimeWindow&, const TimeWindow&) = default;

private:
    TimeUnit start_;
    TimeUnit end_;
};

// ---------------------------------------------------------------------------
// Resources
// ---------------------------------------------------------------------------

struct ResourceVector {
    std::int64_t cpu_millicores = 0;
    std::int64_t mem_mb = 0;

    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

    ResourceVector& operator+=(const ResourceVector& o) {
        cpu_millicores += o.cpu_millicores;
        mem_mb += o.mem_mb;
        return *this;
    }
    ResourceVector& operator-=(const ResourceVector& o) {
        cpu_millicores -= o.cpu_millicores;
        mem_mb -= o.mem_mb;
        return *this;
    }
    friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
    friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) { return a -= b; }
    friend ResourceVector operator*(ResourceVector a, std::int64_t k) {
        a.cpu_millicores *= k;
        a.mem_mb *= k;
        return a;
    }

    /// Componentwise a <= b.
    [[nodiscard]] bool fits_within(const ResourceVector& b) const noexcept {
        return cpu_millicores <= b.cpu_millicores && mem_mb <= b.mem_mb;
    }
    [[nodiscard]] bool non_negative() const noexcept { return cpu_millicores >= 0 && mem_mb >= 0; }
    /// Largest k with this * k <= capacity (this must be strictly positive).
    [[nodiscard]] std::int64_t copies_within(const ResourceVector& capacity) const noexcept;
};

ResourceVector componentwise_max(const ResourceVector& a, const ResourceVector& b);

// ---------------------------------------------------------------------------
// Container catalog
// ---------------------------------------------------------------------------

enum class ContainerType { Small, Medium, Large };

/// Footprint scales with the pricing factor: small = 1000 mc / 2048 MB.
ResourceVector footprint(ContainerType t);
/// Multiplier used by the charge formula: small 1, medium 2, large 4.
std::int64_t type_factor(ContainerType t);

std::string_view to_string(ContainerType t);
ContainerType parse_container_type(std::string_view s);

// ---------------------------------------------------------------------------
// Requests
// ---------------------------------------------------------------------------

struct Slo {
    std::int64_t max_latency_ms = 1;
    std::int64_t min_throughput_rps = 1;
    friend bool operator==(const Slo&, const Slo&) = default;
};

enum class RequestKind { Reserved, RealTime };
enum class Recurrence { None, Daily };

std::string_view to_string(RequestKind k);
RequestKind parse_request_kind(std::string_view s);
std::string_view to_string(Recurrence r);
Recurrence parse_recurrence(std::string_view s);

struct Request {
    std::string id;
    std::string enterprise;
    RequestKind kind = RequestKind::Reserved;
    std::int64_t count = 1;
    ContainerType ctype = ContainerType::Small;
    TimeWindow window{0, 1};
    Slo slo;
    Recurrence recurrence = Recurrence::None;
    TimeUnit submitted_at = 0;
    /// Id of the recurring request this one was expanded from, empty otherwise.
    std::string parent_id;

    friend bool operator==(const Request&, const Request&) = default;
};

// ---------------------------------------------------------------------------
// Money
// ---------------------------------------------------------------------------

/// Integer count of 1e-6 currency units. All pricing is exact.
struct Money {
    std::int64_t micros = 0;

    friend bool operator==(const Money&, const Money&) = default;
    friend auto operator<=>(const Money&, const Money&) = default;
    Money& operator+=(Money o) {
        micros += o.micros;
        return *this;
    }
    Money& operator-=(Money o) {
        micros -= o.micros;
        return *this;
    }
    friend Money operator+(Money a, Money b) { return a += b; }
    friend Money operator-(Money a, Money b) { return a -= b; }
};

// ---------------------------------------------------------------------------
// Allocations
// ---------------------------------------------------------------------------

struct Placement {
    std::string machine_id;
    ContainerType ctype = ContainerType::Small;
    std::int64_t count = 0;
    friend bool operator==(const Placement&, const Placement&) = default;
};

enum class AllocationState { Planned, Provisioning, Running, Stopped, Preempted, Failed };

std::string_view to_string(AllocationState s);
AllocationState parse_allocation_state(std::string_view s);
bool is_terminal(AllocationState s);

/// Containers of an allocation that stopped being served at `at`
/// (unrecoverable failure). Drives prorated settlement.
struct ServiceLoss {
    TimeUnit at = 0;
    std::int64_t containers = 0;
    friend bool operator==(const ServiceLoss&, const ServiceLoss&) = default;
};

struct Allocation {
    std::string id;
    std::string request_id;
    std::string enterprise;
    RequestKind kind = RequestKind::Reserved;
    std::int64_t count = 0;
    ContainerType ctype = ContainerType::Small;
    std::vector<Placement> placements;
    TimeWindow window{0, 1};
    bool preemptible = false;
    Money quote;
    AllocationState state = AllocationState::Planned;
    /// Unit at which the allocation reached a terminal state.
    std::optional<TimeUnit> ended_at;
    std::vector<ServiceLoss> losses;

    [[nodiscard]] std::int64_t placed_count() const;
    [[nodiscard]] std::int64_t count_on(std::string_view machine_id) const;
    [[nodiscard]] bool uses_machine(std::string_view machine_id) const { return count_on(machine_id) > 0; }

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

} // namespace bene
