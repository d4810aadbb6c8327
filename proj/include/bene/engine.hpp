#pragma once

#include "bene/deployer.hpp"
#include "bene/planner.hpp"
#include "bene/scheduler.hpp"
#include "bene/workload.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bene {

/// A real-time quote next to the reserved quote for the same shape, both
/// priced at the moment of admission.
struct QuoteObservation {
    TimeUnit at = 0;
    std::string request_id;
    Ratio utilization;
    Money realtime;
    Money reserved;
};

/// One admission decision for a submitted (or expanded daily) request.
struct Submission {
    Request request;
    AdmissionResult result;
};

/// Scheduler, deployer and request store driven one unit at a time. Both
/// the simulator and the live service use it; only the clock differs.
class Engine {
public:
    Engine(const ScenarioConfig& config, FaultPlan faults, RequestStore store = {});

    /// Admits a request (or each daily copy of a recurring one) at `now`.
    /// Rejections are results; malformed requests throw.
    std::vector<Submission> submit(const Request& request, TimeUnit now);

    /// tick, apply the plan, detect and handle failures, persist records.
    void step(TimeUnit now);

    [[nodiscard]] const Scheduler& scheduler() const { return scheduler_; }
    [[nodiscard]] const Deployer& deployer() const { return deployer_; }
    [[nodiscard]] const RequestStore& store() const { return store_; }
    [[nodiscard]] const ScenarioConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<std::string>& plan_log() const { return plan_log_; }
    [[nodiscard]] std::vector<std::string> invoice_log() const;
    [[nodiscard]] const std::vector<RecoveryOutcome>& recoveries() const { return recoveries_; }
    /// Utilization after each step, keyed by unit.
    [[nodiscard]] const std::map<TimeUnit, Ratio>& utilization() const { return utilization_; }
    [[nodiscard]] const std::vector<QuoteObservation>& quotes() const { return quotes_; }

private:
    void flush_records();

    ScenarioConfig config_;
    Scheduler scheduler_;
    Deployer deployer_;
    RequestStore store_;
    std::vector<std::string> plan_log_;
    std::vector<RecoveryOutcome> recoveries_;
    std::map<TimeUnit, Ratio> utilization_;
    std::vector<QuoteObservation> quotes_;
};

struct KindCounts {
    std::int64_t submitted = 0;
    std::int64_t admitted = 0;
    std::int64_t rejected = 0;
};

struct SimulationMetrics {
    /// [0, duration) of the scenario; the run continues until all work ends.
    TimeWindow analyzed{0, 1};
    TimeUnit last_unit = 0;
    std::vector<Ratio> utilization;
    KindCounts reserved;
    KindCounts realtime;
    std::map<std::string, std::int64_t> rejections_by_reason;
    /// Rejections for lack of capacity among requests whose window
    /// intersects the analyzed window.
    std::int64_t capacity_rejections = 0;
    Money revenue_reserved;
    Money revenue_realtime;
    /// Sum of quoted - charged over all invoices.
    Money credits;
    std::int64_t credit_events = 0;
    std::int64_t preemptions = 0;
    std::int64_t migrations = 0;
    std::int64_t failed_realtime = 0;
    std::int64_t restarts = 0;
    double multiplexing_gain = 1.0;
    std::vector<QuoteObservation> quotes;

    [[nodiscard]] Money revenue() const { return revenue_reserved + revenue_realtime; }
};

struct SimulationResult {
    SimulationMetrics metrics;
    std::vector<std::string> events;
    std::vector<std::string> plans;
    std::vector<std::string> invoices;
    std::vector<std::string> records;
};

SimulationResult run_simulation(const ScenarioConfig& scenario, const std::vector<Request>& trace,
                                const FaultPlan& faults);

std::string report_text(const SimulationMetrics& m);
std::string report_records(const SimulationMetrics& m);

/// Writes events.log, plans.log, invoices.log, records.log, report.txt and
/// report.kv under `dir`.
void write_outputs(const SimulationResult& result, const std::filesystem::path& dir);

} // namespace bene
