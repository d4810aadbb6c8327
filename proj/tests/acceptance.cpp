// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance <path-to-bene> [--only N] [--write-golden]

#include "bene/deployer.hpp"
#include "bene/engine.hpp"
#include "bene/error.hpp"
#include "bene/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

using namespace bene;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string g_bene;
bool g_write_golden = false;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bene_accept_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ScenarioConfig stock(const std::string& name) {
    return read_scenario_file(std::string(BENE_SOURCE_DIR "/configs/") + name + ".scenario");
}

// ---------------------------------------------------------------------------
// 1. Pricing exactness

Verdict pricing_exactness() {
    std::mt19937_64 gen(2024);
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::int64_t rate = 1 + static_cast<std::int64_t>(gen() % 10'000'000);
        const std::int64_t count = 1 + static_cast<std::int64_t>(gen() % 64);
        const auto type = static_cast<ContainerType>(gen() % 3);
        const TimeUnit start = static_cast<TimeUnit>(gen() % 500);
        const TimeUnit duration = 1 + static_cast<TimeUnit>(gen() % 672);
        const PriceBook book{Money{rate}, Ratio(1, 4)};
        const Money q = quote_reserved(book, count, type, TimeWindow(start, start + duration));
        // Rate per small-container unit x containers x size multiple x units.
        const std::int64_t size_multiple = type == ContainerType::Small ? 1 : type == ContainerType::Medium ? 2 : 4;
        const std::int64_t hand = rate * count * size_multiple * duration;
        if (q.micros != hand) ++mismatches;
    }
    return {mismatches == 0, std::to_string(1000 - mismatches) + "/1000 quotes bit-exact"};
}

// ---------------------------------------------------------------------------
// 2. No double booking

struct CapacityAudit {
    std::int64_t checks = 0;
    std::string violation;

    // Compares the free list against an independent sum over live
    // allocations and against the machine capacities.
    void check(const Scheduler& s, TimeUnit now, const std::string& op) {
        if (!violation.empty()) return;
        ++checks;
        const FreeList& fl = s.free_list();
        const TimeWindow h = fl.horizon();
        const TimeUnit from = std::max(now, h.start());
        const auto& ms = fl.machines();
        std::map<std::string, std::size_t> idx;
        for (std::size_t i = 0; i < ms.size(); ++i) idx[ms[i].machine_id] = i;
        const std::size_t span = static_cast<std::size_t>(h.end() - from);
        std::vector<ResourceVector> live(ms.size() * span);
        for (const auto& [id, a] : s.allocations()) {
            if (is_terminal(a.state)) continue;
            for (const auto& p : a.placements) {
                for (TimeUnit t = std::max(from, a.window.start()); t < std::min(h.end(), a.window.end()); ++t)
                    live[idx.at(p.machine_id) * span + static_cast<std::size_t>(t - from)] +=
                        footprint(p.ctype) * p.count;
            }
        }
        for (std::size_t m = 0; m < ms.size(); ++m) {
            for (TimeUnit t = from; t < h.end(); ++t) {
                const ResourceVector cap = fl.capacity(t, ms[m].machine_id);
                const ResourceVector used = fl.committed(t, ms[m].machine_id);
                const ResourceVector rem = fl.remaining(t, ms[m].machine_id);
                const ResourceVector sum = live[m * span + static_cast<std::size_t>(t - from)];
                const bool fits = sum.cpu_millicores <= cap.cpu_millicores && sum.mem_mb <= cap.mem_mb &&
                                  cap.cpu_millicores <= ms[m].capacity.cpu_millicores &&
                                  cap.mem_mb <= ms[m].capacity.mem_mb;
                if (!fits || used != sum || used + rem != cap || rem.cpu_millicores < 0 || rem.mem_mb < 0) {
                    violation = "after " + op + " at now=" + std::to_string(now) + ": unit " + std::to_string(t) +
                                " " + ms[m].machine_id + " live cpu " + std::to_string(sum.cpu_millicores) +
                                " committed " + std::to_string(used.cpu_millicores) + " capacity " +
                                std::to_string(cap.cpu_millicores);
                    return;
                }
            }
        }
    }
};

Verdict no_double_booking() {
    CapacityAudit audit;
    std::int64_t ops_total = 0;
    std::int64_t admitted = 0;
    std::int64_t faults_handled = 0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::mt19937_64 gen(seed);
        const auto machines = uniform_machines(4, {4000, 8192});
        std::vector<std::string> ids;
        for (const auto& m : machines) ids.push_back(m.machine_id);
        SchedulerConfig cfg;
        cfg.horizon_units = 192;
        cfg.outage_units = 12;
        Scheduler s(machines, cfg);
        Deployer d(FaultPlan::synthesize(seed, ids, TimeWindow(1, 4000), 90, 0.4));
        TimeUnit now = 0;
        d.apply_plan(s.tick(0), s, 0);
        for (int op = 0; op < 10'000 && audit.violation.empty(); ++op, ++ops_total) {
            const auto roll = gen() % 100;
            if (roll < 70) {
                const bool rt = roll >= 45;
                Request r;
                r.id = "q" + std::to_string(seed) + "-" + std::to_string(op);
                r.enterprise = "e" + std::to_string(gen() % 3);
                r.kind = rt ? RequestKind::RealTime : RequestKind::Reserved;
                r.count = 1 + static_cast<std::int64_t>(gen() % 4);
                r.ctype = static_cast<ContainerType>(gen() % 3);
                const TimeUnit start = rt ? now : now + 1 + static_cast<TimeUnit>(gen() % 96);
                r.window = TimeWindow(start, start + 1 + static_cast<TimeUnit>(gen() % 24));
                r.submitted_at = now;
                if (is_admitted(s.admit(r, now))) ++admitted;
                audit.check(s, now, "admit " + r.id);
            } else {
                ++now;
                d.apply_plan(s.tick(now), s, now);
                audit.check(s, now, "tick");
                for (const auto& f : d.ping_sweep(now)) {
                    d.handle_failure(f, s);
                    ++faults_handled;
                    audit.check(s, now, "fault on " + f.event.machine_id);
                }
            }
        }
    }
    if (!audit.violation.empty()) return {false, audit.violation};
    return {ops_total == 30'000, std::to_string(ops_total) + " ops, " + std::to_string(audit.checks) +
                                     " audits, " + std::to_string(admitted) + " admissions, " +
                                     std::to_string(faults_handled) + " faults, 0 violations"};
}

// ---------------------------------------------------------------------------
// 3 and 4. Small-instance family with exhaustive oracles

constexpr TimeUnit kSmallHorizon = 8;
const ResourceVector kSmallMachine{2000, 4096};

struct SmallInstance {
    std::vector<MachineSpec> machines;
    std::vector<Request> requests; // ordered by submitted_at
    FaultPlan faults;
};

std::vector<SmallInstance> small_family() {
    std::vector<SmallInstance> out;
    std::mt19937_64 gen(99);
    for (int machines = 1; machines <= 3; ++machines) {
        for (int set = 0; set < 1000; ++set) {
            SmallInstance base;
            base.machines = uniform_machines(machines, kSmallMachine);
            const int n = 1 + static_cast<int>(gen() % 8);
            for (int i = 0; i < n; ++i) {
                Request r;
                r.id = "r" + std::to_string(i);
                r.enterprise = "e" + std::to_string(i % 3);
                r.kind = gen() % 5 < 3 ? RequestKind::Reserved : RequestKind::RealTime;
                r.ctype = gen() % 4 == 0 ? ContainerType::Medium : ContainerType::Small;
                r.count = 1 + static_cast<std::int64_t>(gen() % 2);
                const TimeUnit sub = static_cast<TimeUnit>(gen() % 6);
                const TimeUnit start =
                    r.kind == RequestKind::RealTime ? sub : sub + 1 + static_cast<TimeUnit>(gen() % (7 - sub));
                r.window = TimeWindow(start, start + 1 + static_cast<TimeUnit>(gen() % (kSmallHorizon - start)));
                r.submitted_at = sub;
                base.requests.push_back(r);
            }
            std::stable_sort(base.requests.begin(), base.requests.end(),
                             [](const Request& a, const Request& b) { return a.submitted_at < b.submitted_at; });

            out.push_back(base);
            // Every single crash, plus a few crash pairs.
            for (const auto& m : base.machines) {
                for (TimeUnit t = 1; t < kSmallHorizon; ++t) {
                    SmallInstance one = base;
                    one.faults.events = {{t, m.machine_id, FaultKind::MachineCrash, false}};
                    out.push_back(one);
                }
            }
            if (machines >= 2) {
                for (int k = 0; k < 4; ++k) {
                    SmallInstance two = base;
                    const auto& a = base.machines[gen() % base.machines.size()].machine_id;
                    const auto& b = base.machines[gen() % base.machines.size()].machine_id;
                    const TimeUnit ta = 1 + static_cast<TimeUnit>(gen() % 7);
                    const TimeUnit tb = 1 + static_cast<TimeUnit>(gen() % 7);
                    two.faults.events = {{ta, a, gen() % 2 ? FaultKind::MachineCrash : FaultKind::SlotHang, false},
                                         {tb, b, FaultKind::MachineCrash, false}};
                    if (ta == tb && a == b) two.faults.events.pop_back();
                    two.faults.sort();
                    out.push_back(two);
                }
            }
        }
    }
    return out;
}

// Exhaustive: can `count` containers of `ctype` be pinned to machines so
// every unit of every machine stays within `avail[m][t]`?
bool can_pin(const std::vector<std::vector<ResourceVector>>& avail, ContainerType ctype, std::int64_t count,
             std::size_t m = 0) {
    if (count == 0) return true;
    if (m == avail.size()) return false;
    for (std::int64_t k = count; k >= 0; --k) {
        bool ok = true;
        for (const auto& cell : avail[m]) {
            const ResourceVector need = footprint(ctype) * k;
            if (need.cpu_millicores > cell.cpu_millicores || need.mem_mb > cell.mem_mb) {
                ok = false;
                break;
            }
        }
        if (ok && can_pin(avail, ctype, count - k, m + 1)) return true;
    }
    return false;
}

struct Item {
    ContainerType ctype;
    std::int64_t count;
    TimeWindow window;
};

// Exhaustive joint feasibility: every item pinned to some split over
// machines for its whole window. cap[m][t - base].
bool jointly_feasible(std::vector<std::vector<ResourceVector>>& cap, TimeUnit base, const std::vector<Item>& items,
                      std::size_t i = 0) {
    if (i == items.size()) return true;
    const Item& it = items[i];
    const std::size_t M = cap.size();
    std::vector<std::int64_t> split(M, 0);
    std::function<bool(std::size_t, std::int64_t)> place = [&](std::size_t m, std::int64_t left) -> bool {
        if (m + 1 == M) {
            split[m] = left;
        } else {
            for (std::int64_t k = left; k >= 0; --k) {
                split[m] = k;
                if (place(m + 1, left - k)) return true;
            }
            return false;
        }
        for (std::size_t q = 0; q < M; ++q) {
            for (TimeUnit t = it.window.start(); t < it.window.end(); ++t) {
                const ResourceVector& c = cap[q][static_cast<std::size_t>(t - base)];
                const ResourceVector need = footprint(it.ctype) * split[q];
                if (need.cpu_millicores > c.cpu_millicores || need.mem_mb > c.mem_mb) return false;
            }
        }
        for (std::size_t q = 0; q < M; ++q)
            for (TimeUnit t = it.window.start(); t < it.window.end(); ++t)
                cap[q][static_cast<std::size_t>(t - base)] -= footprint(it.ctype) * split[q];
        const bool ok = jointly_feasible(cap, base, items, i + 1);
        for (std::size_t q = 0; q < M; ++q)
            for (TimeUnit t = it.window.start(); t < it.window.end(); ++t)
                cap[q][static_cast<std::size_t>(t - base)] += footprint(it.ctype) * split[q];
        return ok;
    };
    return place(0, it.count);
}

struct SmallStats {
    std::int64_t instances = 0;
    std::int64_t fault_runs = 0;
    std::int64_t interrupted = 0;
    std::int64_t migrations = 0;
    std::int64_t victim_migrations = 0;
    std::int64_t credits = 0;
    std::int64_t admissions_checked = 0;
    std::vector<std::string> inviolability;
    std::vector<std::string> soundness;
};

std::string tag(const SmallInstance& in) {
    std::string s = std::to_string(in.machines.size()) + "m/" + std::to_string(in.requests.size()) + "r";
    for (const auto& f : in.faults.events)
        s += " " + std::string(to_string(f.kind)) + "@" + f.machine_id + ":" + std::to_string(f.at);
    return s;
}

// Check a recovery plan against the exhaustive oracle: each credited
// allocation's lost containers must not fit on the survivors even with
// every preemptible allocation evicted.
void audit_recovery(const Scheduler& s, const RecoveryPlan& plan, const std::string& failed_machine,
                    const std::vector<std::string>& at_risk, const SmallInstance& in, SmallStats& st) {
    const FreeList& fl = s.free_list();
    auto key = [&](const std::string& id) {
        const Allocation& a = s.allocation(id);
        return std::pair(a.window.start(), a.id);
    };
    std::set<std::string> addressed;
    for (const auto& m : plan.migrations) {
        addressed.insert(m.allocation_id);
        ++st.migrations;
        if (!m.victims.empty()) ++st.victim_migrations;
    }
    for (const auto& c : plan.credits) {
        addressed.insert(c.allocation_id);
        ++st.credits;
        const Allocation& a = s.allocation(c.allocation_id);
        std::vector<std::vector<ResourceVector>> avail;
        for (const auto& m : fl.machines()) {
            std::vector<ResourceVector> row;
            for (TimeUnit t = c.lost.start(); t < c.lost.end(); ++t) {
                ResourceVector free = m.machine_id == failed_machine ? ResourceVector{} : fl.capacity(t, m.machine_id);
                for (const auto& [id, b] : s.allocations()) {
                    if (is_terminal(b.state) || b.preemptible || !b.window.contains(t)) continue;
                    for (const auto& p : b.placements)
                        if (p.machine_id == m.machine_id) free -= footprint(p.ctype) * p.count;
                }
                // Work moved after this allocation in the same recovery did
                // not hold that capacity yet.
                for (const auto& mig : plan.migrations) {
                    if (key(mig.allocation_id) <= key(c.allocation_id) || !mig.window.contains(t)) continue;
                    for (const auto& p : mig.to)
                        if (p.machine_id == m.machine_id) free += footprint(p.ctype) * p.count;
                }
                row.push_back(free);
            }
            avail.push_back(row);
        }
        ContainerType ctype = ContainerType::Small;
        for (const auto& r : in.requests)
            if (r.id == a.request_id) ctype = r.ctype;
        if (can_pin(avail, ctype, c.containers))
            st.inviolability.push_back(tag(in) + ": " + c.allocation_id + " credited though " +
                                       std::to_string(c.containers) + " containers fit on survivors");
        const std::int64_t value = s.config().prices.base_rate.micros * type_factor(ctype) * c.containers *
                                   c.lost.duration();
        if (c.value.micros != value)
            st.inviolability.push_back(tag(in) + ": credit " + std::to_string(c.value.micros) + " expected " +
                                       std::to_string(value));
    }
    for (const auto& id : at_risk) {
        ++st.interrupted;
        if (!addressed.count(id))
            st.inviolability.push_back(tag(in) + ": reservation " + id + " on failed machine neither moved nor credited");
    }
}

void run_small(const SmallInstance& in, SmallStats& st) {
    SchedulerConfig cfg;
    cfg.horizon_units = kSmallHorizon;
    Scheduler s(in.machines, cfg);
    Deployer d(in.faults);
    std::size_t next = 0;
    for (TimeUnit t = 0; t <= kSmallHorizon; ++t) {
        for (; next < in.requests.size() && in.requests[next].submitted_at == t; ++next) {
            if (!is_admitted(s.admit(in.requests[next], t))) continue;
            ++st.admissions_checked;
            // Criterion 4: the admitted set at this moment must be jointly
            // feasible, whatever placements the scheduler picked.
            const TimeWindow h = s.free_list().horizon();
            const TimeUnit base = std::max(t, h.start());
            std::vector<Item> items;
            for (const auto& [id, a] : s.allocations()) {
                if (is_terminal(a.state) || a.window.end() <= base) continue;
                std::int64_t live = 0;
                for (const auto& p : a.placements) live += p.count;
                items.push_back({a.placements.front().ctype, live,
                                 TimeWindow(std::max(base, a.window.start()), a.window.end())});
            }
            std::vector<std::vector<ResourceVector>> cap;
            for (const auto& m : s.free_list().machines()) {
                std::vector<ResourceVector> row;
                for (TimeUnit u = base; u < h.end(); ++u) row.push_back(s.free_list().capacity(u, m.machine_id));
                cap.push_back(row);
            }
            if (!jointly_feasible(cap, base, items))
                st.soundness.push_back(tag(in) + ": admitted set infeasible after " + in.requests[next].id);
        }
        d.apply_plan(s.tick(t), s, t);
        for (const auto& f : d.ping_sweep(t)) {
            std::vector<std::string> at_risk;
            if (f.event.kind == FaultKind::MachineCrash) {
                for (const auto& [id, a] : s.allocations()) {
                    if (is_terminal(a.state) || a.preemptible || a.window.end() <= t) continue;
                    for (const auto& p : a.placements)
                        if (p.machine_id == f.event.machine_id) {
                            at_risk.push_back(id);
                            break;
                        }
                }
            }
            const RecoveryOutcome out = d.handle_failure(f, s);
            if (out.plan) audit_recovery(s, *out.plan, f.event.machine_id, at_risk, in, st);
        }
    }
    // Reservations are never preempted, and the final invoice credits match
    // the credit events exactly.
    std::map<std::string, std::int64_t> credited;
    for (const auto& c : s.credits()) credited[c.allocation_id] += c.value.micros;
    for (const auto& inv : s.invoices()) {
        if (inv.kind != RequestKind::Reserved) continue;
        if (inv.outcome == AllocationState::Preempted)
            st.inviolability.push_back(tag(in) + ": reservation " + inv.allocation_id + " preempted");
        if (inv.credits.micros != credited[inv.allocation_id])
            st.inviolability.push_back(tag(in) + ": invoice credits " + std::to_string(inv.credits.micros) +
                                       " vs credit events " + std::to_string(credited[inv.allocation_id]));
    }
    for (const auto& [id, a] : s.allocations())
        if (!is_terminal(a.state))
            st.inviolability.push_back(tag(in) + ": " + id + " not settled by the end of the horizon");
}

// Greedy-vs-optimal on the reservation-only, fault-free version of each
// instance: the optimum is the largest jointly feasible subset.
std::pair<std::int64_t, std::int64_t> greedy_vs_optimal(const SmallInstance& in) {
    std::vector<Request> reqs;
    for (const auto& r : in.requests)
        if (r.kind == RequestKind::Reserved) reqs.push_back(r);
    SchedulerConfig cfg;
    cfg.horizon_units = kSmallHorizon;
    Scheduler s(in.machines, cfg);
    std::int64_t greedy = 0;
    std::size_t next = 0;
    for (TimeUnit t = 0; t < kSmallHorizon; ++t) {
        for (; next < reqs.size() && reqs[next].submitted_at == t; ++next)
            if (is_admitted(s.admit(reqs[next], t))) ++greedy;
        s.tick(t);
    }
    std::int64_t best = 0;
    const std::size_t n = reqs.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto size = static_cast<std::int64_t>(__builtin_popcount(mask));
        if (size <= best) continue;
        std::vector<Item> items;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) items.push_back({reqs[i].ctype, reqs[i].count, reqs[i].window});
        std::vector<std::vector<ResourceVector>> cap(in.machines.size(),
                                                     std::vector<ResourceVector>(kSmallHorizon, kSmallMachine));
        if (jointly_feasible(cap, 0, items)) best = size;
    }
    return {greedy, best};
}

SmallStats& small_stats() {
    static SmallStats st = [] {
        SmallStats s;
        for (const auto& in : small_family()) {
            ++s.instances;
            if (!in.faults.events.empty()) ++s.fault_runs;
            run_small(in, s);
        }
        return s;
    }();
    return st;
}

Verdict reservation_inviolability() {
    // The oracle must be able to say yes as well as no.
    const ResourceVector half{1000, 2048};
    if (!can_pin({{kSmallMachine}, {kSmallMachine}}, ContainerType::Medium, 2) ||
        can_pin({{kSmallMachine}, {kSmallMachine}}, ContainerType::Medium, 3) ||
        !can_pin({{half, kSmallMachine}, {kSmallMachine, half}}, ContainerType::Small, 2) ||
        can_pin({{half, kSmallMachine}, {kSmallMachine, half}}, ContainerType::Small, 3))
        return {false, "oracle self-check failed"};
    const SmallStats& st = small_stats();
    std::string detail = std::to_string(st.instances) + " instances (" + std::to_string(st.fault_runs) +
                         " with faults), " + std::to_string(st.interrupted) + " reservations hit, " +
                         std::to_string(st.migrations) + " migrations (" + std::to_string(st.victim_migrations) +
                         " with preemption), " + std::to_string(st.credits) + " credits, " +
                         std::to_string(st.inviolability.size()) + " violations";
    if (!st.inviolability.empty()) detail += "; first: " + st.inviolability.front();
    const bool covered = st.migrations > 0 && st.victim_migrations > 0 && st.credits > 0;
    if (!covered) detail += "; family does not exercise every recovery path";
    return {st.inviolability.empty() && covered, detail};
}

Verdict admission_soundness() {
    const SmallStats& st = small_stats();
    std::int64_t greedy = 0;
    std::int64_t optimal = 0;
    double worst = 1.0;
    std::set<std::string> seen;
    for (const auto& in : small_family()) {
        if (!in.faults.events.empty()) continue;
        const auto [g, o] = greedy_vs_optimal(in);
        greedy += g;
        optimal += o;
        if (o > 0) worst = std::min(worst, static_cast<double>(g) / static_cast<double>(o));
    }
    char ratio[160];
    std::snprintf(ratio, sizeof ratio, "greedy/optimal admitted reservations %lld/%lld = %.3f, worst instance %.3f",
                  static_cast<long long>(greedy), static_cast<long long>(optimal),
                  optimal ? static_cast<double>(greedy) / static_cast<double>(optimal) : 1.0, worst);
    std::string detail = std::to_string(st.admissions_checked) + " admitted sets checked, " +
                         std::to_string(st.soundness.size()) + " unsound; " + ratio;
    if (!st.soundness.empty()) detail += "; first: " + st.soundness.front();
    return {st.soundness.empty() && st.admissions_checked > 0, detail};
}

// ---------------------------------------------------------------------------
// 5 and 7. Multiplexing

struct MultiplexRun {
    std::uint64_t seed;
    SimulationResult result;
    PeakReport peaks;
};

std::vector<MultiplexRun>& multiplex_runs() {
    static std::vector<MultiplexRun> runs = [] {
        std::vector<MultiplexRun> out;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ScenarioConfig c = stock("multiplex4");
            c.seed = seed;
            const auto trace = generate(c);
            SimulationResult r = run_simulation(c, trace, c.faults);
            std::vector<RequestRecord> recs;
            for (const auto& line : r.records) recs.push_back(request_record_from(KvRecord::parse(line)));
            PeakReport peaks = peak_analysis(std::span<const RequestRecord>(recs), TimeWindow(0, c.duration_units()));
            out.push_back({seed, std::move(r), std::move(peaks)});
        }
        return out;
    }();
    return runs;
}

Verdict multiplexing_claim() {
    const ScenarioConfig c = stock("multiplex4");
    const MachineSpec machine = c.machines.front();
    bool ok = true;
    std::string detail;
    for (const auto& run : multiplex_runs()) {
        const std::int64_t shared = recommend(run.peaks, machine, Ratio::whole(1));
        std::int64_t standalone = 0;
        for (const auto& [e, peak] : run.peaks.enterprise_peaks) standalone += recommend(peak, machine, Ratio::whole(1));
        const double gain = run.result.metrics.multiplexing_gain;
        const bool pass = gain >= 2.0 && shared * 10 <= standalone * 6;
        ok = ok && pass;
        char buf[128];
        std::snprintf(buf, sizeof buf, "%sseed %llu gain %.2f machines %lld/%lld", detail.empty() ? "" : "; ",
                      static_cast<unsigned long long>(run.seed), gain, static_cast<long long>(shared),
                      static_cast<long long>(standalone));
        detail += buf;
    }
    return {ok, detail};
}

Verdict pricing_ordering() {
    const ScenarioConfig c = stock("multiplex4");
    std::int64_t observed = 0;
    std::int64_t ticks = 0;
    std::int64_t at_full = 0;
    std::string bad;
    for (const auto& run : multiplex_runs()) {
        for (const auto& q : run.result.metrics.quotes) {
            ++observed;
            const bool full = q.utilization == Ratio::whole(1);
            if (q.realtime > q.reserved || (q.realtime == q.reserved) != full)
                bad = q.request_id + " at " + std::to_string(q.at);
        }
        // Every tick's utilization priced for a spread of shapes.
        for (const auto& u : run.result.metrics.utilization) {
            ++ticks;
            if (u == Ratio::whole(1)) ++at_full;
            for (auto type : {ContainerType::Small, ContainerType::Medium, ContainerType::Large}) {
                for (std::int64_t n : {1, 3}) {
                    const TimeWindow w(0, 8);
                    const Money rt = quote_realtime(c.prices, n, type, w, u);
                    const Money res = quote_reserved(c.prices, n, type, w);
                    if (rt > res || (rt == res) != (u == Ratio::whole(1))) bad = "tick utilization " + u.to_string();
                }
            }
        }
    }
    // The ordering must also hold at saturation, which these runs may not reach.
    const Money sat = quote_realtime(c.prices, 2, ContainerType::Small, TimeWindow(0, 4), Ratio::whole(1));
    if (sat != quote_reserved(c.prices, 2, ContainerType::Small, TimeWindow(0, 4))) bad = "saturated quote differs";
    std::string detail = std::to_string(observed) + " real-time admissions and " + std::to_string(ticks) +
                         " ticks priced (" + std::to_string(at_full) + " at utilization 1)";
    if (!bad.empty()) detail += "; violation: " + bad;
    return {bad.empty() && observed > 0, detail};
}

// ---------------------------------------------------------------------------
// 6. Planner closure

Verdict planner_closure() {
    bool ok = true;
    std::string detail;
    std::int64_t total_rejections = 0;
    for (const char* name : {"university", "traffic", "nightlife", "multiplex4"}) {
        std::string row = std::string(name) + ":";
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ScenarioConfig c = stock(name);
            c.seed = seed;
            const auto trace = generate(c);
            const PeakReport peaks = peak_analysis(trace, TimeWindow(0, c.duration_units()));
            const MachineSpec machine = c.machines.front();
            const std::int64_t n = recommend(peaks, machine, Ratio::whole(1));
            c.machines = uniform_machines(std::max<std::int64_t>(n, 1), machine.capacity);
            const SimulationResult r = run_simulation(c, trace, {});
            const std::int64_t rej = r.metrics.capacity_rejections;
            total_rejections += rej;
            if (rej != 0) ok = false;
            row += " " + std::to_string(n) + "m/" + std::to_string(rej);
        }
        detail += (detail.empty() ? "" : "; ") + row;
    }
    return {ok, "machines/capacity rejections per seed 1..5: " + detail + " (total " +
                    std::to_string(total_rejections) + ")"};
}

// ---------------------------------------------------------------------------
// 8. Determinism

int run_cli(const std::vector<std::string>& args) {
    std::string cmd = "'" + g_bene + "'";
    for (const auto& a : args) cmd += " '" + a + "'";
    cmd += " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

Verdict determinism() {
    if (g_bene.empty()) return {false, "no bene binary given"};
    const fs::path dir = scratch("determinism");
    const ScenarioConfig c = stock("university");
    std::vector<std::string> ids;
    for (const auto& m : c.machines) ids.push_back(m.machine_id);
    const FaultPlan faults = FaultPlan::synthesize(7, ids, TimeWindow(50, 600), 6, 0.5);
    {
        std::ofstream f(dir / "faults.log");
        f << encode_fault_plan(faults);
    }
    const std::string config = std::string(BENE_SOURCE_DIR "/configs/university.scenario");
    if (run_cli({"generate", "--config", config, "--out", (dir / "trace.log").string()}) != 0)
        return {false, "bene generate failed"};
    for (const char* out : {"a", "b"}) {
        if (run_cli({"simulate", "--config", config, "--trace", (dir / "trace.log").string(), "--faults",
                     (dir / "faults.log").string(), "--out-dir", (dir / out).string()}) != 0)
            return {false, std::string("bene simulate run ") + out + " failed"};
    }
    const SimulationResult in_process = run_simulation(c, read_trace_file((dir / "trace.log").string()), faults);
    const fs::path mine = dir / "in-process";
    write_outputs(in_process, mine);

    std::string detail;
    bool ok = true;
    std::size_t bytes = 0;
    for (const char* file : {"events.log", "plans.log", "invoices.log", "records.log", "report.txt", "report.kv"}) {
        const std::string a = slurp(dir / "a" / file);
        const std::string b = slurp(dir / "b" / file);
        const std::string m = slurp(mine / file);
        bytes += a.size();
        if (a.empty() || a != b || a != m) {
            ok = false;
            detail += std::string(detail.empty() ? "" : ", ") + file + " differs";
        }
    }
    if (ok) detail = "6 output files byte-identical across two CLI runs and an in-process run (" +
                     std::to_string(bytes) + " bytes, " + std::to_string(in_process.invoices.size()) + " invoices)";
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// 9. Failure pipeline golden log

Verdict failure_pipeline() {
    ScenarioConfig c;
    c.name = "failure-pipeline";
    c.seed = 1;
    c.duration_days = 1;
    c.machines = {{"m1", {4000, 8192}}, {"m2", {4000, 8192}}};
    EnterpriseProfile p;
    p.enterprise = "acme";
    c.profiles = {p};
    auto req = [](std::string id, RequestKind kind, TimeUnit start, TimeUnit end, TimeUnit sub) {
        Request r;
        r.id = std::move(id);
        r.enterprise = "acme";
        r.kind = kind;
        r.count = 2;
        r.window = TimeWindow(start, end);
        r.submitted_at = sub;
        return r;
    };
    const std::vector<Request> trace{req("r1", RequestKind::Reserved, 2, 12, 0),
                                     req("r2", RequestKind::Reserved, 3, 10, 0),
                                     req("rt1", RequestKind::RealTime, 1, 8, 1)};
    FaultPlan faults;
    faults.seed = 1;
    faults.events = {{4, "m1", FaultKind::SlotHang, true}, {6, "m1", FaultKind::MachineCrash, false}};

    Engine engine(c, faults);
    for (TimeUnit t = 0; t <= 12; ++t) {
        for (const auto& r : trace)
            if (r.submitted_at == t) engine.submit(r, t);
        engine.step(t);
    }
    const auto& rec = engine.recoveries();
    std::string order;
    bool ok = rec.size() == 2;
    if (ok) {
        ok = rec[0].kind == RecoveryKind::RestartedInPlace && !rec[0].plan && rec[1].kind == RecoveryKind::Replanned &&
             rec[1].plan && !rec[1].plan->migrations.empty();
        order = std::string(to_string(rec[0].kind)) + " then " + std::string(to_string(rec[1].kind));
        if (rec[1].plan) {
            std::int64_t with_victims = 0;
            for (const auto& m : rec[1].plan->migrations) with_victims += !m.victims.empty();
            order += " (" + std::to_string(rec[1].plan->migrations.size()) + " migrations, " +
                     std::to_string(with_victims) + " preemption-backed)";
        }
    }

    std::string log;
    for (const auto& line : engine.deployer().log_lines()) log += line + "\n";
    const fs::path golden = fs::path(BENE_SOURCE_DIR) / "tests" / "golden" / "failure_pipeline.events";
    if (g_write_golden) {
        fs::create_directories(golden.parent_path());
        std::ofstream(golden, std::ios::binary) << log;
    }
    if (!fs::exists(golden)) return {false, "missing golden file " + golden.string()};
    const bool same = slurp(golden) == log;
    return {ok && same, order + "; event log " + (same ? "matches" : "differs from") + " golden (" +
                            std::to_string(engine.deployer().log().size()) + " lines)"};
}

// ---------------------------------------------------------------------------
// 10. Serve-mode smoke

Verdict serve_smoke() {
    ScenarioConfig c;
    c.name = "serve-smoke";
    c.seed = 1;
    c.duration_days = 1;
    c.machines = uniform_machines(2, {4000, 8192});
    EnterpriseProfile p;
    p.enterprise = "acme";
    c.profiles = {p};

    ServiceOptions o;
    o.scenario = c;
    o.unit = std::chrono::milliseconds(100);
    Service svc(o);
    const int port = svc.start();
    httplib::Client cli("127.0.0.1", port);
    auto first = [](const std::string& body) { return KvRecord::parse(body.substr(0, body.find('\n'))); };

    std::vector<Request> trace;
    std::string detail;
    bool ok = true;
    auto fail = [&](const std::string& why) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + why;
    };

    // Reservation that starts at the current unit: no lead time.
    {
        const TimeUnit now = svc.now();
        auto res = cli.Post("/requests",
                            "record=request id=late enterprise=acme kind=reserved count=1 start=" +
                                std::to_string(now) + " units=2",
                            "text/plain");
        if (!res) return {false, "no response from service"};
        const KvRecord r = first(res->body);
        if (r.get("status") != "rejected" || r.get("reason") != "LeadTimeTooShort")
            fail("expected a lead-time rejection, got: " + res->body);
        else
            detail += "lead-time rejection seen";
    }
    // Reservation with lead time, then real-time work.
    TimeUnit last_end = 0;
    {
        const TimeUnit now = svc.now();
        auto res = cli.Post("/requests",
                            "record=request id=res1 enterprise=acme kind=reserved count=3 start=" +
                                std::to_string(now + 4) + " units=4",
                            "text/plain");
        if (!res) return {false, "no response from service"};
        const KvRecord r = first(res->body);
        if (r.get("status") != "admitted") {
            fail("reservation not admitted: " + res->body);
        } else {
            Request q;
            q.id = "res1";
            q.enterprise = "acme";
            q.kind = RequestKind::Reserved;
            q.count = 3;
            q.window = TimeWindow(now + 4, now + 8);
            q.submitted_at = r.get_int("now");
            trace.push_back(q);
            last_end = std::max(last_end, q.window.end());
            if (r.get_int("preemption_warning") != 0) fail("reservation carried a preemption warning");
        }
    }
    {
        auto res = cli.Post("/requests", "record=request id=rt1 enterprise=acme kind=realtime count=2 units=3",
                            "text/plain");
        if (!res) return {false, "no response from service"};
        const KvRecord r = first(res->body);
        if (r.get("status") != "admitted" || r.get_int("preemption_warning") != 1) {
            fail("real-time admission without warning: " + res->body);
        } else {
            const TimeUnit at = r.get_int("now");
            Request q;
            q.id = "rt1";
            q.enterprise = "acme";
            q.kind = RequestKind::RealTime;
            q.count = 2;
            q.window = TimeWindow(at, at + 3);
            q.submitted_at = at;
            trace.push_back(q);
            last_end = std::max(last_end, q.window.end());
            detail += ", preemption warning on real-time admission";
        }
    }

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(20);
    while (svc.now() <= last_end + 1 && std::chrono::steady_clock::now() < deadline)
        std::this_thread::sleep_for(std::chrono::milliseconds(50));

    std::map<std::string, std::string> served;
    for (const auto& r : trace) {
        auto res = cli.Get("/invoices/" + r.id);
        if (!res || res->status != 200) {
            fail("no invoice for " + r.id);
            continue;
        }
        served[r.id] = res->body.substr(0, res->body.find('\n'));
    }
    svc.stop();

    std::sort(trace.begin(), trace.end(),
              [](const Request& a, const Request& b) { return a.submitted_at < b.submitted_at; });
    const SimulationResult sim = run_simulation(c, trace, {});
    std::size_t matched = 0;
    for (const auto& line : sim.invoices) {
        const Invoice inv = decode_invoice(line);
        auto it = served.find(inv.request_id);
        if (it == served.end()) continue;
        if (it->second == line)
            ++matched;
        else
            fail("invoice for " + inv.request_id + " differs: served " + it->second + " simulated " + line);
    }
    if (matched != trace.size() || trace.size() != 2) fail("matched " + std::to_string(matched) + " invoices");
    if (ok) detail += ", " + std::to_string(matched) + " served invoices equal the simulator's settlement";
    return {ok, detail};
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (a == "--write-golden")
            g_write_golden = true;
        else
            g_bene = a;
    }

    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "pricing exactness", 1, pricing_exactness},
        {2, "no double booking", 30, no_double_booking},
        {3, "reservation inviolability", 120, reservation_inviolability},
        {4, "admission soundness", 120, admission_soundness},
        {5, "multiplexing", 60, multiplexing_claim},
        {6, "planner closure", 120, planner_closure},
        {7, "dynamic pricing ordering", 60, pricing_ordering},
        {8, "determinism", 60, determinism},
        {9, "failure pipeline", 10, failure_pipeline},
        {10, "serve smoke", 30, serve_smoke},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            out.pass = false;
            out.detail += "; over time budget";
        }
        if (!out.pass) ++failed;
        std::printf("criterion %d: %s  %s [%.2fs] %s\n", c.id, out.pass ? "PASS" : "FAIL", c.name, secs,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    fs::remove_all(fs::temp_directory_path() / ("bene_accept_" + std::to_string(::getpid())));
    return failed == 0 ? 0 : 1;
}
