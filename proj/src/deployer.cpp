#include "bene/deployer.hpp"

#include "bene/codec.hpp"
#include "bene/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace bene {

std::string_view to_string(ContainerState s) {
    switch (s) {
    case ContainerState::Provisioning: return "provisioning";
    case ContainerState::Running: return "running";
    case ContainerState::Stopping: return "stopping";
    case ContainerState::Stopped: return "stopped";
    case ContainerState::Failed: return "failed";
    }
    return "provisioning";
}

bool legal_transition(ContainerState from, ContainerState to) {
    using S = ContainerState;
    switch (from) {
    case S::Provisioning: return to == S::Running || to == S::Stopping || to == S::Failed;
    case S::Running: return to == S::Stopping || to == S::Failed;
    case S::Stopping: return to == S::Stopped;
    case S::Stopped: return false;
    case S::Failed: return to == S::Running || to == S::Provisioning || to == S::Failed;
    }
    return false;
}

std::string_view to_string(RecoveryKind k) {
    switch (k) {
    case RecoveryKind::RestartedInPlace: return "restarted-in-place";
    case RecoveryKind::Replanned: return "replanned";
    case RecoveryKind::NoOp: return "no-op";
    }
    return "no-op";
}

std::string DeployEvent::encode() const {
    KvRecord rec("event");
    rec.add("tick", at).add("kind", kind).add("allocation", allocation_id).add("machine", machine_id);
    if (!detail.empty()) rec.add("detail", detail);
    return rec.encode();
}

Deployer::Deployer(FaultPlan faults) : faults_(std::move(faults)) { faults_.sort(); }

bool Deployer::is_live(const ContainerInstance& c) const {
    return c.state == ContainerState::Provisioning || c.state == ContainerState::Running;
}

void Deployer::emit(TimeUnit at, std::string_view kind, std::string_view allocation, std::string_view machine,
                    std::string detail) {
    log_.push_back(DeployEvent{at, std::string(kind), std::string(allocation), std::string(machine), std::move(detail)});
}

void Deployer::transition(ContainerInstance& c, ContainerState to, TimeUnit at, std::string_view detail) {
    if (!legal_transition(c.state, to)) {
        throw std::logic_error("illegal container transition " + std::string(to_string(c.state)) + " -> " +
                               std::string(to_string(to)) + " for " + c.allocation_id);
    }
    c.state = to;
    c.since = at;
    emit(at, to_string(to), c.allocation_id, c.machine_id, std::string(detail));
}

std::vector<const ContainerInstance*> Deployer::containers_of(std::string_view allocation_id) const {
    std::vector<const ContainerInstance*> out;
    for (const auto& c : containers_)
        if (c.allocation_id == allocation_id) out.push_back(&c);
    return out;
}

std::vector<std::string> Deployer::log_lines() const {
    std::vector<std::string> out;
    out.reserve(log_.size());
    for (const auto& e : log_) out.push_back(e.encode());
    return out;
}

void Deployer::provision(const Allocation& a, const std::vector<Placement>& placements, TimeUnit now) {
    for (const auto& p : placements) {
        containers_.push_back(ContainerInstance{a.id, p.machine_id, p.count, ContainerState::Provisioning, now});
        emit(now, "provisioning", a.id, p.machine_id, "containers=" + std::to_string(p.count));
        if (a.window.start() <= now) transition(containers_.back(), ContainerState::Running, now);
    }
}

void Deployer::shut_down(std::string_view allocation_id, TimeUnit now, std::string_view detail) {
    for (auto& c : containers_) {
        if (c.allocation_id != allocation_id || !is_live(c)) continue;
        transition(c, ContainerState::Stopping, now, detail);
        transition(c, ContainerState::Stopped, now);
    }
}

std::vector<DeployEvent> Deployer::apply_plan(const SchedulePlan& plan, Scheduler& scheduler, TimeUnit now) {
    for (const auto& id : plan.to_stop) (void)scheduler.allocation(id);
    for (const auto& p : plan.preemptions) (void)scheduler.allocation(p.allocation_id);
    for (const auto& a : plan.to_start) (void)scheduler.allocation(a.id);

    const std::size_t first = log_.size();
    for (const auto& id : plan.to_stop) {
        shut_down(id, now, "window end");
        const Invoice inv = scheduler.complete(id, now);
        emit(now, "settled", id, "",
             "charged=" + std::to_string(inv.charged.micros) + " credits=" + std::to_string(inv.credits.micros));
    }
    for (const auto& p : plan.preemptions) shut_down(p.allocation_id, now, "preempted");
    for (const auto& a : plan.to_start) provision(scheduler.allocation(a.id), a.placements, now);

    for (auto& c : containers_) {
        if (c.state != ContainerState::Provisioning) continue;
        const Allocation& a = scheduler.allocation(c.allocation_id);
        if (a.window.start() <= now) transition(c, ContainerState::Running, now);
    }
    for (const auto& c : containers_)
        if (c.state == ContainerState::Running) scheduler.mark_running(c.allocation_id, now);

    return {log_.begin() + static_cast<std::ptrdiff_t>(first), log_.end()};
}

std::vector<DetectedFailure> Deployer::ping_sweep(TimeUnit now) {
    std::vector<DetectedFailure> out;
    while (next_fault_ < faults_.events.size() && faults_.events[next_fault_].at <= now) {
        out.push_back(DetectedFailure{faults_.events[next_fault_], now});
        ++next_fault_;
    }
    return out;
}

void Deployer::apply_recovery(const RecoveryPlan& plan, Scheduler& scheduler) {
    const TimeUnit now = plan.at;
    for (const auto& id : plan.failed_realtime) {
        emit(now, "realtime-failed", id, plan.machine_id);
        shut_down(id, now, "allocation failed");
    }
    for (const auto& p : plan.preemptions) {
        emit(now, "preempted", p.allocation_id, "", p.reason);
        shut_down(p.allocation_id, now, "preempted");
    }
    for (const auto& m : plan.migrations) {
        std::string to;
        for (const auto& p : m.to) to += (to.empty() ? "" : ",") + p.machine_id + ":" + std::to_string(p.count);
        emit(now, "migrated", m.allocation_id, m.from_machine, "to=" + to);
        const Allocation& a = scheduler.allocation(m.allocation_id);
        if (a.state == AllocationState::Running || a.state == AllocationState::Provisioning) provision(a, m.to, now);
    }
    for (const auto& c : plan.credits) {
        emit(now, "credited", c.allocation_id, c.machine_id,
             "containers=" + std::to_string(c.containers) + " value=" + std::to_string(c.value.micros));
    }
    for (const auto& inv : plan.invoices) {
        if (is_terminal(scheduler.allocation(inv.allocation_id).state)) shut_down(inv.allocation_id, now, "settled");
        emit(now, "settled", inv.allocation_id, "",
             "charged=" + std::to_string(inv.charged.micros) + " credits=" + std::to_string(inv.credits.micros));
    }
}

RecoveryOutcome Deployer::handle_failure(const DetectedFailure& failure, Scheduler& scheduler) {
    const TimeUnit now = failure.detected_at;
    const FaultEvent& ev = failure.event;
    RecoveryOutcome out;
    out.failure = failure;
    emit(now, "fault", "", ev.machine_id,
         std::string(to_string(ev.kind)) + (ev.restartable ? " restartable" : " permanent"));

    std::vector<std::size_t> hit;
    for (std::size_t i = 0; i < containers_.size(); ++i)
        if (containers_[i].machine_id == ev.machine_id && is_live(containers_[i])) hit.push_back(i);
    if (ev.kind == FaultKind::SlotHang && hit.size() > 1) {
        auto first = *std::min_element(hit.begin(), hit.end(), [&](std::size_t a, std::size_t b) {
            return containers_[a].allocation_id < containers_[b].allocation_id;
        });
        hit = {first};
    }
    for (std::size_t i : hit) transition(containers_[i], ContainerState::Failed, now, to_string(ev.kind));

    if (ev.restartable) {
        for (std::size_t i : hit) {
            auto& c = containers_[i];
            const Allocation& a = scheduler.allocation(c.allocation_id);
            transition(c, a.window.start() <= now ? ContainerState::Running : ContainerState::Provisioning, now,
                       "restart");
            out.restarted.push_back(c.allocation_id);
        }
        out.kind = RecoveryKind::RestartedInPlace;
        return out;
    }

    if (ev.kind == FaultKind::MachineCrash) {
        out.plan = scheduler.replan_on_failure(ev.machine_id, now);
    } else if (!hit.empty()) {
        out.plan = scheduler.replan_allocation(containers_[hit.front()].allocation_id, ev.machine_id, now);
    } else {
        out.kind = RecoveryKind::NoOp;
        return out;
    }
    apply_recovery(*out.plan, scheduler);
    out.kind = RecoveryKind::Replanned;
    return out;
}

} // namespace bene
