#include "bene/engine.hpp"

#include "bene/error.hpp"
#include "bene/request.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bene {

namespace {

SchedulerConfig scheduler_config(const ScenarioConfig& c) {
    SchedulerConfig s;
    s.prices = c.prices;
    s.horizon_units = c.horizon_units;
    s.outage_units = c.outage_units;
    return s;
}

} // namespace

Engine::Engine(const ScenarioConfig& config, FaultPlan faults, RequestStore store)
    : config_(config),
      scheduler_(config.machines, scheduler_config(config), 0),
      deployer_(std::move(faults)),
      store_(std::move(store)) {}

std::vector<Submission> Engine::submit(const Request& request, TimeUnit now) {
    std::vector<Request> expanded;
    try {
        expanded = expand_recurrence(request, scheduler_.free_list().horizon().end());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::HorizonBeforeStart) throw;
        RequestRecord r;
        r.request = request;
        r.outcome = Outcome::Rejected;
        r.rejection = RejectionReason{RejectionCode::HorizonExceeded, e.detail()};
        r.at = now;
        store_.append(r);
        return {Submission{request, Rejected{*r.rejection}}};
    }

    std::vector<Submission> out;
    for (const auto& child : expanded) {
        const Ratio util = scheduler_.free_list().utilization(std::max(now, scheduler_.free_list().horizon().start()));
        AdmissionResult res = scheduler_.admit(child, now);
        if (const auto* a = std::get_if<Admitted>(&res); a && child.kind == RequestKind::RealTime) {
            quotes_.push_back(QuoteObservation{now, child.id, util, a->quote,
                                               quote_reserved(config_.prices, child.count, child.ctype, child.window)});
        }
        out.push_back(Submission{child, std::move(res)});
    }
    flush_records();
    return out;
}

void Engine::step(TimeUnit now) {
    try {
        const SchedulePlan plan = scheduler_.tick(now);
        for (auto& line : plan_log_lines(plan)) plan_log_.push_back(std::move(line));
        deployer_.apply_plan(plan, scheduler_, now);
        for (const auto& failure : deployer_.ping_sweep(now)) {
            RecoveryOutcome outcome = deployer_.handle_failure(failure, scheduler_);
            if (outcome.plan)
                for (auto& line : plan_log_lines(*outcome.plan)) plan_log_.push_back(std::move(line));
            recoveries_.push_back(std::move(outcome));
        }
        flush_records();
        utilization_[now] = scheduler_.free_list().utilization(now);
    } catch (const Error& e) {
        throw Error(e.code(), "tick " + std::to_string(now) + ": " + e.detail());
    }
}

std::vector<std::string> Engine::invoice_log() const {
    std::vector<std::string> out;
    for (const auto& inv : scheduler_.invoices()) out.push_back(encode_invoice(inv));
    return out;
}

void Engine::flush_records() {
    for (const auto& r : scheduler_.take_records()) store_.append(r);
}

SimulationResult run_simulation(const ScenarioConfig& scenario, const std::vector<Request>& trace,
                                const FaultPlan& faults) {
    Engine engine(scenario, faults);
    std::vector<Request> arrivals = trace;
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const Request& a, const Request& b) { return a.submitted_at < b.submitted_at; });

    TimeUnit last = scenario.duration_units();
    for (const auto& r : arrivals) last = std::max(last, r.window.end());
    for (const auto& f : faults.events) last = std::max(last, f.at);

    SimulationMetrics m;
    m.analyzed = TimeWindow(0, scenario.duration_units());
    m.last_unit = last;

    std::size_t next = 0;
    for (TimeUnit t = 0; t <= last; ++t) {
        while (next < arrivals.size() && arrivals[next].submitted_at <= t) {
            const Request& r = arrivals[next++];
            KindCounts& counts = r.kind == RequestKind::Reserved ? m.reserved : m.realtime;
            for (const auto& [req, res] : engine.submit(r, t)) {
                ++counts.submitted;
                if (is_admitted(res)) {
                    ++counts.admitted;
                } else {
                    ++counts.rejected;
                    ++m.rejections_by_reason[std::string(to_string(std::get<Rejected>(res).reason.code))];
                }
            }
        }
        engine.step(t);
    }

    for (const auto& [t, u] : engine.utilization()) m.utilization.push_back(u);
    for (const auto& inv : engine.scheduler().invoices()) {
        (inv.kind == RequestKind::Reserved ? m.revenue_reserved : m.revenue_realtime) += inv.charged;
        m.credits += inv.credits;
    }
    m.credit_events = static_cast<std::int64_t>(engine.scheduler().credits().size());
    for (const auto& rec : engine.store().all()) {
        if (rec.outcome == Outcome::Preempted) ++m.preemptions;
        if (rec.outcome == Outcome::Rejected && rec.rejection && rec.rejection->code == RejectionCode::Infeasible &&
            rec.request.window.overlaps(m.analyzed))
            ++m.capacity_rejections;
    }
    for (const auto& rec : engine.recoveries()) {
        m.restarts += static_cast<std::int64_t>(rec.restarted.size());
        if (rec.plan) {
            m.migrations += static_cast<std::int64_t>(rec.plan->migrations.size());
            m.failed_realtime += static_cast<std::int64_t>(rec.plan->failed_realtime.size());
        }
    }
    m.multiplexing_gain = peak_analysis(std::span<const RequestRecord>(engine.store().all()), m.analyzed)
                              .multiplexing_gain();
    m.quotes = engine.quotes();

    SimulationResult result;
    result.metrics = std::move(m);
    result.events = engine.deployer().log_lines();
    result.plans = engine.plan_log();
    result.invoices = engine.invoice_log();
    for (const auto& rec : engine.store().all()) result.records.push_back(to_record(rec).encode());
    return result;
}

std::string report_text(const SimulationMetrics& m) {
    std::ostringstream out;
    out << "simulation report, analyzed units [" << m.analyzed.start() << ", " << m.analyzed.end() << "), ran to unit "
        << m.last_unit << "\n\n";
    out << "requests        submitted  admitted  rejected\n";
    auto row = [&](const char* name, const KindCounts& k) {
        char line[96];
        std::snprintf(line, sizeof line, "  %-12s %10lld %9lld %9lld\n", name, static_cast<long long>(k.submitted),
                      static_cast<long long>(k.admitted), static_cast<long long>(k.rejected));
        out << line;
    };
    row("reserved", m.reserved);
    row("realtime", m.realtime);
    for (const auto& [reason, n] : m.rejections_by_reason) out << "  rejected " << reason << ": " << n << '\n';
    out << "  capacity rejections in window: " << m.capacity_rejections << "\n\n";

    auto money = [](Money v) { return format_double(static_cast<double>(v.micros) / 1e6); };
    out << "revenue\n";
    out << "  reserved: " << money(m.revenue_reserved) << '\n';
    out << "  realtime: " << money(m.revenue_realtime) << '\n';
    out << "  total:    " << money(m.revenue()) << '\n';
    out << "  credits:  " << money(m.credits) << " (" << m.credit_events << " credit events)\n\n";

    out << "failures\n";
    out << "  restarts in place: " << m.restarts << '\n';
    out << "  migrations: " << m.migrations << '\n';
    out << "  preemptions: " << m.preemptions << '\n';
    out << "  failed realtime allocations: " << m.failed_realtime << "\n\n";

    out << "multiplexing gain: " << format_double(m.multiplexing_gain) << "\n\n";

    out << "utilization by hour (mean of four units)\n";
    for (std::size_t h = 0; h * 4 < m.utilization.size(); ++h) {
        double sum = 0;
        std::size_t n = 0;
        for (std::size_t i = h * 4; i < std::min(m.utilization.size(), h * 4 + 4); ++i, ++n)
            sum += m.utilization[i].to_double();
        const double mean = sum / static_cast<double>(n);
        char line[64];
        std::snprintf(line, sizeof line, "  %5zu %5.3f ", h * 4, mean);
        out << line << std::string(static_cast<std::size_t>(mean * 40 + 0.5), '#') << '\n';
    }
    return out.str();
}

std::string report_records(const SimulationMetrics& m) {
    std::string out = KvRecord("report")
                          .add("from", m.analyzed.start())
                          .add("to", m.analyzed.end())
                          .add("last_unit", m.last_unit)
                          .add("reserved_submitted", m.reserved.submitted)
                          .add("reserved_admitted", m.reserved.admitted)
                          .add("reserved_rejected", m.reserved.rejected)
                          .add("realtime_submitted", m.realtime.submitted)
                          .add("realtime_admitted", m.realtime.admitted)
                          .add("realtime_rejected", m.realtime.rejected)
                          .add("capacity_rejections", m.capacity_rejections)
                          .add("revenue_reserved", m.revenue_reserved.micros)
                          .add("revenue_realtime", m.revenue_realtime.micros)
                          .add("revenue", m.revenue().micros)
                          .add("credits", m.credits.micros)
                          .add("credit_events", m.credit_events)
                          .add("preemptions", m.preemptions)
                          .add("migrations", m.migrations)
                          .add("restarts", m.restarts)
                          .add("failed_realtime", m.failed_realtime)
                          .add("multiplexing_gain", m.multiplexing_gain)
                          .encode() +
                      "\n";
    for (const auto& [reason, n] : m.rejections_by_reason)
        out += KvRecord("rejections").add("reason", reason).add("count", n).encode() + "\n";
    for (std::size_t t = 0; t < m.utilization.size(); ++t) {
        out += KvRecord("utilization")
                   .add("unit", static_cast<std::int64_t>(t))
                   .add("value", m.utilization[t].to_string())
                   .encode() +
               "\n";
    }
    return out;
}

void write_outputs(const SimulationResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        out << body;
        if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + (dir / name).string());
    };
    auto lines = [](const std::vector<std::string>& xs) {
        std::string s;
        for (const auto& x : xs) s += x + "\n";
        return s;
    };
    write("events.log", lines(result.events));
    write("plans.log", lines(result.plans));
    write("invoices.log", lines(result.invoices));
    write("records.log", lines(result.records));
    write("report.txt", report_text(result.metrics));
    write("report.kv", report_records(result.metrics));
}

} // namespace bene
