#pragma once

#include "bene/faults.hpp"
#include "bene/scheduler.hpp"
#include "bene/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bene {

enum class ContainerState { Provisioning, Running, Stopping, Stopped, Failed };

std::string_view to_string(ContainerState s);

/// Provisioning -> {Running, Stopping, Failed}; Running -> {Stopping, Failed};
/// Stopping -> Stopped; Failed -> {Running, Provisioning} (restart) or
/// stays Failed. Stopped is final.
bool legal_transition(ContainerState from, ContainerState to);

/// The containers of one allocation on one machine.
struct ContainerInstance {
    std::string allocation_id;
    std::string machine_id;
    std::int64_t count = 0;
    ContainerState state = ContainerState::Provisioning;
    TimeUnit since = 0;
};

/// One line of the lifecycle log.
struct DeployEvent {
    TimeUnit at = 0;
    std::string kind;
    std::string allocation_id;
    std::string machine_id;
    std::string detail;

    [[nodiscard]] std::string encode() const;
};

struct DetectedFailure {
    FaultEvent event;
    TimeUnit detected_at = 0;
};

enum class RecoveryKind { RestartedInPlace, Replanned, NoOp };

std::string_view to_string(RecoveryKind k);

struct RecoveryOutcome {
    DetectedFailure failure;
    RecoveryKind kind = RecoveryKind::NoOp;
    /// Allocations whose containers were restarted on the same machine.
    std::vector<std::string> restarted;
    std::optional<RecoveryPlan> plan;
};

/// Simulated execution substrate. Holds container state only; capacity and
/// money stay with the scheduler.
class Deployer {
public:
    explicit Deployer(FaultPlan faults = {});

    /// Stops finished work (settling it), provisions newly planned work and
    /// moves provisioned containers to Running once their window opens.
    /// Throws UnknownAllocation before touching anything.
    std::vector<DeployEvent> apply_plan(const SchedulePlan& plan, Scheduler& scheduler, TimeUnit now);

    /// Every fault with time <= now not reported yet, in (time, machine) order.
    std::vector<DetectedFailure> ping_sweep(TimeUnit now);

    /// One restart attempt in place; if it fails the scheduler replans.
    RecoveryOutcome handle_failure(const DetectedFailure& failure, Scheduler& scheduler);

    [[nodiscard]] const std::vector<ContainerInstance>& containers() const { return containers_; }
    [[nodiscard]] std::vector<const ContainerInstance*> containers_of(std::string_view allocation_id) const;
    [[nodiscard]] const FaultPlan& faults() const { return faults_; }
    [[nodiscard]] const std::vector<DeployEvent>& log() const { return log_; }
    [[nodiscard]] std::vector<std::string> log_lines() const;

private:
    void transition(ContainerInstance& c, ContainerState to, TimeUnit at, std::string_view detail = {});
    void emit(TimeUnit at, std::string_view kind, std::string_view allocation, std::string_view machine,
              std::string detail = {});
    void provision(const Allocation& a, const std::vector<Placement>& placements, TimeUnit now);
    void shut_down(std::string_view allocation_id, TimeUnit now, std::string_view detail);
    void apply_recovery(const RecoveryPlan& plan, Scheduler& scheduler);
    bool is_live(const ContainerInstance& c) const;

    FaultPlan faults_;
    std::size_t next_fault_ = 0;
    std::vector<ContainerInstance> containers_;
    std::vector<DeployEvent> log_;
    std::size_t emitted_ = 0;
};

} // namespace bene
