#pragma once

#include "bene/free_list.hpp"
#include "bene/pricing.hpp"
#include "bene/record.hpp"
#include "bene/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bene {

struct Admitted {
    Allocation allocation;
    Money quote;
    /// Set for real-time admissions: the slots may be taken back.
    bool preemption_warning = false;
};

struct Rejected {
    RejectionReason reason;
};

using AdmissionResult = std::variant<Admitted, Rejected>;

inline bool is_admitted(const AdmissionResult& r) { return std::holds_alternative<Admitted>(r); }

struct Preemption {
    std::string allocation_id;
    TimeUnit at = 0;
    std::string reason;
};

/// Output of one scheduler tick.
struct SchedulePlan {
    TimeUnit tick = 0;
    /// Allocations that enter provisioning now (start at tick + 1, or now
    /// for real-time work admitted during this unit).
    std::vector<Allocation> to_start;
    /// Allocations whose window ends at this tick.
    std::vector<std::string> to_stop;
    std::vector<Preemption> preemptions;

    [[nodiscard]] bool empty() const { return to_start.empty() && to_stop.empty() && preemptions.empty(); }
};

struct Migration {
    std::string allocation_id;
    std::string from_machine;
    std::int64_t containers = 0;
    std::vector<Placement> to;
    TimeWindow window{0, 1};
    std::vector<std::string> victims;
};

/// Guaranteed service that could not be delivered; the customer is told and
/// the charge is reduced by `value`.
struct CreditEvent {
    std::string allocation_id;
    std::string request_id;
    std::string enterprise;
    std::string machine_id;
    std::int64_t containers = 0;
    TimeWindow lost{0, 1};
    Money value;
};

struct RecoveryPlan {
    std::string machine_id;
    TimeUnit at = 0;
    std::vector<std::string> failed_realtime;
    std::vector<Migration> migrations;
    std::vector<Preemption> preemptions;
    std::vector<CreditEvent> credits;
    std::vector<Invoice> invoices;
};

struct SchedulerConfig {
    PriceBook prices;
    TimeUnit horizon_units = kDefaultHorizonUnits;
    /// How long a crashed machine stays out of the free list; nullopt means
    /// for the rest of the run.
    std::optional<TimeUnit> outage_units;
};

/// Chooses where `count` containers go for the whole window:
/// (1) fewest machines, (2) least residual slack first (best fit),
/// (3) lowest machine_id. Machines in `excluded` are never used.
/// Throws Infeasible when no split fits.
std::vector<Placement> pack_placement(const FreeList& fl, ContainerType ctype, std::int64_t count,
                                      const TimeWindow& window, std::span<const std::string> excluded = {});

/// What a real-time allocation has cost its owner up to `now`.
Money accumulated_charge(const Allocation& a, TimeUnit now);

/// Youngest first (latest window start), then smallest accumulated charge,
/// then allocation id. Non-preemptible allocations are dropped.
std::vector<Allocation> order_victims(std::vector<Allocation> candidates, TimeUnit now);

/// Minimal prefix of order_victims(candidates) for which `sufficient` holds.
/// Throws InsufficientVictims when even the full list does not suffice.
std::vector<Allocation> select_victims(std::vector<Allocation> candidates, TimeUnit now,
                                       const std::function<bool(std::span<const Allocation>)>& sufficient);

/// Aggregate form: the released footprint must cover `demand`.
std::vector<Allocation> select_victims(std::vector<Allocation> candidates, const ResourceVector& demand,
                                       TimeUnit now);

/// Single-writer owner of the free list and every allocation.
class Scheduler {
public:
    Scheduler(std::vector<MachineSpec> machines, SchedulerConfig config, TimeUnit start = 0);

    AdmissionResult admit_reserved(const Request& req, TimeUnit now);
    AdmissionResult admit_realtime(const Request& req, TimeUnit now);
    /// Dispatches on the request kind.
    AdmissionResult admit(const Request& req, TimeUnit now);

    /// Throws NonMonotonicTick unless now is later than the previous tick.
    SchedulePlan tick(TimeUnit now);

    /// Machine-level failure: real-time work on it fails, reserved work is
    /// moved (preempting real-time work if needed) or credited.
    RecoveryPlan replan_on_failure(std::string_view machine_id, TimeUnit now);

    /// Failure of one allocation's slot on a machine that stays online.
    RecoveryPlan replan_allocation(std::string_view allocation_id, std::string_view machine_id, TimeUnit now);

    void mark_running(std::string_view allocation_id, TimeUnit now);
    /// Normal end of an allocation; returns its settlement.
    Invoice complete(std::string_view allocation_id, TimeUnit now);

    [[nodiscard]] const Allocation& allocation(std::string_view id) const;
    [[nodiscard]] const Allocation* find(std::string_view id) const;
    [[nodiscard]] const std::map<std::string, Allocation, std::less<>>& allocations() const { return allocs_; }
    [[nodiscard]] std::vector<Allocation> live_realtime(TimeUnit now) const;

    [[nodiscard]] const FreeList& free_list() const { return fl_; }
    [[nodiscard]] const SchedulerConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<Invoice>& invoices() const { return invoices_; }
    [[nodiscard]] const std::vector<CreditEvent>& credits() const { return credits_; }
    [[nodiscard]] std::optional<TimeUnit> last_tick() const { return last_tick_; }

    /// Request records produced since the last call, in emission order.
    std::vector<RequestRecord> take_records();

private:
    Allocation& mutable_allocation(std::string_view id);
    AdmissionResult reject(const Request& req, RejectionCode code, std::string detail, TimeUnit now);
    AdmissionResult place(const Request& req, TimeUnit now, Money quote);
    std::string next_allocation_id();
    void record(const Allocation& a, Outcome outcome, TimeUnit at, Money charged);
    Invoice finish(Allocation& a, AllocationState state, TimeUnit at);
    void recover_containers(Allocation& a, const std::string& machine_id, std::int64_t containers, TimeUnit now,
                            std::span<const std::string> excluded, RecoveryPlan& plan);
    std::optional<Request> request_of(const Allocation& a) const;

    SchedulerConfig config_;
    FreeList fl_;
    std::map<std::string, Allocation, std::less<>> allocs_;
    std::map<std::string, Request, std::less<>> requests_;
    std::vector<Invoice> invoices_;
    std::vector<CreditEvent> credits_;
    std::vector<RequestRecord> outbox_;
    std::optional<TimeUnit> last_tick_;
    std::uint64_t next_id_ = 1;
};

/// Canonical plan-log lines (one per event).
std::vector<std::string> plan_log_lines(const SchedulePlan& plan);
std::vector<std::string> plan_log_lines(const RecoveryPlan& plan);

} // namespace bene
