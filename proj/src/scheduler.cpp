#include "bene/scheduler.hpp"

#include "bene/codec.hpp"
#include "bene/error.hpp"
#include "bene/request.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace bene {

namespace {

bool is_excluded(std::span<const std::string> excluded, std::string_view machine_id) {
    return std::find(excluded.begin(), excluded.end(), machine_id) != excluded.end();
}

/// Machines that can host at least one container for all of `w`, minus exclusions.
std::vector<MachineOption> usable_machines(const FreeList& fl, ContainerType ctype, const TimeWindow& w,
                                           std::span<const std::string> excluded) {
    std::vector<MachineOption> out;
    auto opts = fl.feasible_placements(ctype, 0, w);
    for (auto& m : opts->machines)
        if (!is_excluded(excluded, m.machine_id)) out.push_back(std::move(m));
    return out;
}

std::int64_t total_capacity(const std::vector<MachineOption>& ms) {
    std::int64_t n = 0;
    for (const auto& m : ms) n += m.max_count;
    return n;
}

void add_placements(std::vector<Placement>& into, const std::vector<Placement>& extra) {
    for (const auto& p : extra) {
        auto it = std::find_if(into.begin(), into.end(),
                               [&](const Placement& q) { return q.machine_id == p.machine_id && q.ctype == p.ctype; });
        if (it == into.end())
            into.push_back(p);
        else
            it->count += p.count;
    }
    std::sort(into.begin(), into.end(),
              [](const Placement& a, const Placement& b) { return a.machine_id < b.machine_id; });
}

void drop_machine(std::vector<Placement>& ps, std::string_view machine_id) {
    ps.erase(std::remove_if(ps.begin(), ps.end(), [&](const Placement& p) { return p.machine_id == machine_id; }),
             ps.end());
}

std::string machines_of(const std::vector<Placement>& ps) {
    std::string out;
    for (const auto& p : ps) {
        if (!out.empty()) out.push_back(',');
        out += p.machine_id;
    }
    return out;
}

Money unit_value(const Allocation& a) { return Money{a.quote.micros / (a.count * a.window.duration())}; }

} // namespace

// ---------------------------------------------------------------------------
// Placement and victim selection
// ---------------------------------------------------------------------------

std::vector<Placement> pack_placement(const FreeList& fl, ContainerType ctype, std::int64_t count,
                                      const TimeWindow& window, std::span<const std::string> excluded) {
    std::vector<MachineOption> options = usable_machines(fl, ctype, window, excluded);
    if (count <= 0 || total_capacity(options) < count)
        throw Error(ErrorCode::Infeasible, std::to_string(count) + " x " + std::string(to_string(ctype)));

    // Fewest machines: the largest hosts decide how many are needed.
    std::vector<std::int64_t> caps;
    for (const auto& m : options) caps.push_back(m.max_count);
    std::sort(caps.rbegin(), caps.rend());
    std::size_t picks = 0;
    for (std::int64_t covered = 0; covered < count; ++picks) covered += caps[picks];

    // Best fit: tightest machine first, ties by id.
    std::sort(options.begin(), options.end(), [](const MachineOption& a, const MachineOption& b) {
        if (a.min_remaining.cpu_millicores != b.min_remaining.cpu_millicores)
            return a.min_remaining.cpu_millicores < b.min_remaining.cpu_millicores;
        if (a.min_remaining.mem_mb != b.min_remaining.mem_mb) return a.min_remaining.mem_mb < b.min_remaining.mem_mb;
        return a.machine_id < b.machine_id;
    });

    std::vector<Placement> out;
    std::vector<bool> taken(options.size(), false);
    std::int64_t need = count;
    while (need > 0) {
        bool progressed = false;
        for (std::size_t i = 0; i < options.size() && !progressed; ++i) {
            if (taken[i]) continue;
            // Can the rest still be covered by the remaining picks?
            std::vector<std::int64_t> others;
            for (std::size_t j = 0; j < options.size(); ++j)
                if (!taken[j] && j != i) others.push_back(options[j].max_count);
            std::sort(others.rbegin(), others.rend());
            std::int64_t reach = options[i].max_count;
            for (std::size_t k = 0; k + 1 < picks && k < others.size(); ++k) reach += others[k];
            if (reach < need) continue;
            const std::int64_t here = std::min(options[i].max_count, need);
            out.push_back(Placement{options[i].machine_id, ctype, here});
            taken[i] = true;
            need -= here;
            --picks;
            progressed = true;
        }
        if (!progressed) throw Error(ErrorCode::Infeasible, "packing failed");
    }
    std::sort(out.begin(), out.end(), [](const Placement& a, const Placement& b) { return a.machine_id < b.machine_id; });
    return out;
}

Money accumulated_charge(const Allocation& a, TimeUnit now) {
    const TimeUnit served = std::clamp(now, a.window.start(), a.window.end()) - a.window.start();
    return Money{unit_value(a).micros * a.count * served};
}

std::vector<Allocation> order_victims(std::vector<Allocation> candidates, TimeUnit now) {
    candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                    [](const Allocation& a) { return !a.preemptible; }),
                     candidates.end());
    std::sort(candidates.begin(), candidates.end(), [now](const Allocation& a, const Allocation& b) {
        if (a.window.start() != b.window.start()) return a.window.start() > b.window.start();
        const Money ca = accumulated_charge(a, now);
        const Money cb = accumulated_charge(b, now);
        if (ca != cb) return ca < cb;
        return a.id < b.id;
    });
    return candidates;
}

std::vector<Allocation> select_victims(std::vector<Allocation> candidates, TimeUnit now,
                                       const std::function<bool(std::span<const Allocation>)>& sufficient) {
    const std::vector<Allocation> ordered = order_victims(std::move(candidates), now);
    for (std::size_t n = 1; n <= ordered.size(); ++n) {
        std::span<const Allocation> prefix(ordered.data(), n);
        if (sufficient(prefix)) return {ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(n)};
    }
    throw Error(ErrorCode::InsufficientVictims,
                "preempting all " + std::to_string(ordered.size()) + " real-time allocations is not enough");
}

std::vector<Allocation> select_victims(std::vector<Allocation> candidates, const ResourceVector& demand,
                                       TimeUnit now) {
    return select_victims(std::move(candidates), now, [&](std::span<const Allocation> prefix) {
        ResourceVector released;
        for (const auto& v : prefix)
            for (const auto& p : v.placements) released += footprint(p.ctype) * p.count;
        return demand.fits_within(released);
    });
}

// ---------------------------------------------------------------------------
// Scheduler
// ---------------------------------------------------------------------------

Scheduler::Scheduler(std::vector<MachineSpec> machines, SchedulerConfig config, TimeUnit start)
    : config_(std::move(config)), fl_(std::move(machines), TimeWindow{start, start + config_.horizon_units}) {
    validate(config_.prices);
}

std::string Scheduler::next_allocation_id() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "A%06llu", static_cast<unsigned long long>(next_id_++));
    return buf;
}

const Allocation* Scheduler::find(std::string_view id) const {
    auto it = allocs_.find(id);
    return it == allocs_.end() ? nullptr : &it->second;
}

const Allocation& Scheduler::allocation(std::string_view id) const {
    if (const Allocation* a = find(id)) return *a;
    throw Error(ErrorCode::UnknownAllocation, std::string(id));
}

Allocation& Scheduler::mutable_allocation(std::string_view id) {
    auto it = allocs_.find(id);
    if (it == allocs_.end()) throw Error(ErrorCode::UnknownAllocation, std::string(id));
    return it->second;
}

std::optional<Request> Scheduler::request_of(const Allocation& a) const {
    auto it = requests_.find(a.request_id);
    if (it == requests_.end()) return std::nullopt;
    return it->second;
}

void Scheduler::record(const Allocation& a, Outcome outcome, TimeUnit at, Money charged) {
    RequestRecord r;
    r.request = request_of(a).value();
    r.outcome = outcome;
    r.allocation_id = a.id;
    r.quoted = a.quote;
    r.charged = charged;
    r.at = at;
    outbox_.push_back(std::move(r));
}

std::vector<RequestRecord> Scheduler::take_records() {
    std::vector<RequestRecord> out;
    out.swap(outbox_);
    return out;
}

AdmissionResult Scheduler::reject(const Request& req, RejectionCode code, std::string detail, TimeUnit now) {
    RequestRecord r;
    r.request = req;
    r.outcome = Outcome::Rejected;
    r.rejection = RejectionReason{code, detail};
    r.at = now;
    outbox_.push_back(std::move(r));
    return Rejected{RejectionReason{code, std::move(detail)}};
}

AdmissionResult Scheduler::place(const Request& req, TimeUnit now, Money quote) {
    Allocation a;
    a.id = next_allocation_id();
    a.request_id = req.id;
    a.enterprise = req.enterprise;
    a.kind = req.kind;
    a.count = req.count;
    a.ctype = req.ctype;
    a.placements = pack_placement(fl_, req.ctype, req.count, req.window);
    a.window = req.window;
    a.preemptible = req.kind == RequestKind::RealTime;
    a.quote = quote;
    fl_.commit(a);
    requests_[req.id] = req;
    allocs_.emplace(a.id, a);
    record(a, Outcome::Admitted, now, Money{});
    return Admitted{a, quote, a.preemptible};
}

AdmissionResult Scheduler::admit_reserved(const Request& req, TimeUnit now) {
    if (req.kind != RequestKind::Reserved)
        throw Error(ErrorCode::MalformedRequest, req.id + " is not a reservation");
    try {
        validate_request(req, now);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::LeadTimeTooShort) return reject(req, RejectionCode::LeadTimeTooShort, e.detail(), now);
        throw;
    }
    if (!fl_.horizon().contains(req.window))
        return reject(req, RejectionCode::HorizonExceeded,
                      "window ends at " + std::to_string(req.window.end()) + ", horizon ends at " +
                          std::to_string(fl_.horizon().end()),
                      now);
    if (!fl_.feasible_placements(req.ctype, req.count, req.window))
        return reject(req, RejectionCode::Infeasible, "not enough free capacity for the whole window", now);
    return place(req, now, quote_reserved(config_.prices, req.count, req.ctype, req.window));
}

AdmissionResult Scheduler::admit_realtime(const Request& req, TimeUnit now) {
    if (req.kind != RequestKind::RealTime)
        throw Error(ErrorCode::MalformedRequest, req.id + " is not a real-time request");
    validate_request(req, now);
    if (req.window.start() != now)
        throw Error(ErrorCode::MalformedRequest, "real-time request " + req.id + " must start now");
    if (!fl_.horizon().contains(req.window))
        return reject(req, RejectionCode::HorizonExceeded,
                      "window ends at " + std::to_string(req.window.end()) + ", horizon ends at " +
                          std::to_string(fl_.horizon().end()),
                      now);
    if (!fl_.feasible_placements(req.ctype, req.count, req.window))
        return reject(req, RejectionCode::Infeasible, "no free capacity for real-time work", now);
    const Ratio util = fl_.utilization(now);
    return place(req, now, quote_realtime(config_.prices, req.count, req.ctype, req.window, util));
}

AdmissionResult Scheduler::admit(const Request& req, TimeUnit now) {
    return req.kind == RequestKind::Reserved ? admit_reserved(req, now) : admit_realtime(req, now);
}

SchedulePlan Scheduler::tick(TimeUnit now) {
    if (last_tick_ && now <= *last_tick_)
        throw Error(ErrorCode::NonMonotonicTick,
                    "tick " + std::to_string(now) + " after " + std::to_string(*last_tick_));
    last_tick_ = now;
    fl_.slide_to(now);
    SchedulePlan plan;
    plan.tick = now;
    for (auto& [id, a] : allocs_) {
        if (is_terminal(a.state)) continue;
        if (a.window.end() <= now) {
            plan.to_stop.push_back(id);
            continue;
        }
        if (a.state == AllocationState::Planned && a.window.start() <= now + 1) {
            a.state = AllocationState::Provisioning;
            plan.to_start.push_back(a);
        }
    }
    return plan;
}

void Scheduler::mark_running(std::string_view allocation_id, TimeUnit) {
    Allocation& a = mutable_allocation(allocation_id);
    if (a.state == AllocationState::Provisioning) a.state = AllocationState::Running;
}

Invoice Scheduler::finish(Allocation& a, AllocationState state, TimeUnit at) {
    a.state = state;
    a.ended_at = at;
    if (fl_.contains(a.id)) fl_.release(a.id, std::max(at, fl_.horizon().start()));
    Invoice inv = settle(a);
    invoices_.push_back(inv);
    const Outcome outcome = state == AllocationState::Stopped     ? Outcome::Completed
                            : state == AllocationState::Preempted ? Outcome::Preempted
                                                                  : Outcome::Failed;
    record(a, outcome, at, inv.charged);
    return inv;
}

Invoice Scheduler::complete(std::string_view allocation_id, TimeUnit now) {
    Allocation& a = mutable_allocation(allocation_id);
    if (is_terminal(a.state)) throw Error(ErrorCode::NonTerminalState, a.id + " already settled");
    return finish(a, AllocationState::Stopped, std::min(now, a.window.end()));
}

std::vector<Allocation> Scheduler::live_realtime(TimeUnit now) const {
    std::vector<Allocation> out;
    for (const auto& [id, a] : allocs_)
        if (a.preemptible && !is_terminal(a.state) && a.window.end() > now) out.push_back(a);
    return out;
}

void Scheduler::recover_containers(Allocation& a, const std::string& machine_id, std::int64_t containers,
                                   TimeUnit now, std::span<const std::string> excluded, RecoveryPlan& plan) {
    const TimeWindow w{std::max(now, a.window.start()), a.window.end()};
    drop_machine(a.placements, machine_id);

    auto fits = [&](const FreeList& fl) {
        return total_capacity(usable_machines(fl, a.ctype, w, excluded)) >= containers;
    };

    Migration mig{a.id, machine_id, containers, {}, w, {}};
    bool placeable = fits(fl_);
    if (!placeable) {
        try {
            auto victims = select_victims(live_realtime(now), now, [&](std::span<const Allocation> prefix) {
                FreeList trial = fl_;
                for (const auto& v : prefix)
                    if (trial.contains(v.id)) trial.release(v.id, now);
                return fits(trial);
            });
            for (const auto& v : victims) {
                Allocation& victim = mutable_allocation(v.id);
                plan.invoices.push_back(finish(victim, AllocationState::Preempted, now));
                plan.preemptions.push_back(Preemption{v.id, now, "capacity for " + a.id});
                mig.victims.push_back(v.id);
            }
            placeable = true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientVictims) throw;
        }
    }

    if (placeable) {
        mig.to = pack_placement(fl_, a.ctype, containers, w, excluded);
        fl_.commit(a.id, mig.to, w);
        add_placements(a.placements, mig.to);
        plan.migrations.push_back(std::move(mig));
        return;
    }

    const Money value{unit_value(a).micros * containers * w.duration()};
    CreditEvent credit{a.id, a.request_id, a.enterprise, machine_id, containers, w, value};
    a.losses.push_back(ServiceLoss{w.start(), containers});
    credits_.push_back(credit);
    plan.credits.push_back(credit);
    record(a, Outcome::Credited, now, Money{});
    if (a.placed_count() == 0) plan.invoices.push_back(finish(a, AllocationState::Failed, w.start()));
}

RecoveryPlan Scheduler::replan_on_failure(std::string_view machine_id, TimeUnit now) {
    if (!fl_.has_machine(machine_id)) throw Error(ErrorCode::UnknownMachine, std::string(machine_id));
    const std::string machine(machine_id);
    RecoveryPlan plan;
    plan.machine_id = machine;
    plan.at = now;
    const std::optional<TimeUnit> until =
        config_.outage_units ? std::optional<TimeUnit>(now + *config_.outage_units) : std::nullopt;
    auto hit_by_outage = [&](const Allocation& a) {
        return !is_terminal(a.state) && a.uses_machine(machine) && a.window.end() > now &&
               (!until || a.window.start() < *until);
    };

    for (auto& [id, a] : allocs_) {
        if (!a.preemptible || !hit_by_outage(a)) continue;
        plan.invoices.push_back(finish(a, AllocationState::Failed, std::max(now, a.window.start())));
        plan.failed_realtime.push_back(id);
    }

    std::vector<Allocation*> reserved;
    for (auto& [id, a] : allocs_)
        if (!a.preemptible && hit_by_outage(a)) reserved.push_back(&a);
    std::sort(reserved.begin(), reserved.end(), [](const Allocation* x, const Allocation* y) {
        if (x->window.start() != y->window.start()) return x->window.start() < y->window.start();
        return x->id < y->id;
    });

    std::vector<std::int64_t> displaced;
    for (Allocation* a : reserved) {
        displaced.push_back(a->count_on(machine));
        if (fl_.contains(a->id)) fl_.release_on(a->id, machine, std::max(now, a->window.start()));
    }
    fl_.set_outage(machine, std::max(now, fl_.horizon().start()), until);

    for (std::size_t i = 0; i < reserved.size(); ++i)
        recover_containers(*reserved[i], machine, displaced[i], now, {}, plan);
    return plan;
}

RecoveryPlan Scheduler::replan_allocation(std::string_view allocation_id, std::string_view machine_id,
                                          TimeUnit now) {
    if (!fl_.has_machine(machine_id)) throw Error(ErrorCode::UnknownMachine, std::string(machine_id));
    Allocation& a = mutable_allocation(allocation_id);
    const std::string machine(machine_id);
    RecoveryPlan plan;
    plan.machine_id = machine;
    plan.at = now;
    if (is_terminal(a.state) || !a.uses_machine(machine) || a.window.end() <= now) return plan;
    if (a.preemptible) {
        plan.invoices.push_back(finish(a, AllocationState::Failed, std::max(now, a.window.start())));
        plan.failed_realtime.push_back(a.id);
        return plan;
    }
    const std::int64_t displaced = a.count_on(machine);
    if (fl_.contains(a.id)) fl_.release_on(a.id, machine, std::max(now, a.window.start()));
    const std::string excluded[] = {machine};
    recover_containers(a, machine, displaced, now, excluded, plan);
    return plan;
}

// ---------------------------------------------------------------------------
// Plan log
// ---------------------------------------------------------------------------

std::vector<std::string> plan_log_lines(const SchedulePlan& plan) {
    std::vector<std::string> out;
    for (const auto& a : plan.to_start) {
        out.push_back(KvRecord("plan")
                          .add("tick", plan.tick)
                          .add("event", "start")
                          .add("allocation", a.id)
                          .add("machines", machines_of(a.placements))
                          .encode());
    }
    for (const auto& id : plan.to_stop)
        out.push_back(KvRecord("plan").add("tick", plan.tick).add("event", "stop").add("allocation", id).encode());
    for (const auto& p : plan.preemptions) {
        out.push_back(KvRecord("plan")
                          .add("tick", plan.tick)
                          .add("event", "preempt")
                          .add("allocation", p.allocation_id)
                          .add("reason", p.reason)
                          .encode());
    }
    return out;
}

std::vector<std::string> plan_log_lines(const RecoveryPlan& plan) {
    std::vector<std::string> out;
    auto base = [&](std::string_view event, std::string_view id) {
        KvRecord r("plan");
        r.add("tick", plan.at).add("event", event).add("allocation", id);
        return r;
    };
    for (const auto& id : plan.failed_realtime) out.push_back(base("realtime-failed", id).add("machines", plan.machine_id).encode());
    for (const auto& p : plan.preemptions) out.push_back(base("preempt", p.allocation_id).add("reason", p.reason).encode());
    for (const auto& m : plan.migrations) {
        out.push_back(base("migrate", m.allocation_id)
                          .add("from", m.from_machine)
                          .add("machines", machines_of(m.to))
                          .add("containers", m.containers)
                          .encode());
    }
    for (const auto& c : plan.credits) {
        out.push_back(base("credit", c.allocation_id)
                          .add("machines", c.machine_id)
                          .add("containers", c.containers)
                          .add("value", c.value.micros)
                          .encode());
    }
    return out;
}

} // namespace bene
