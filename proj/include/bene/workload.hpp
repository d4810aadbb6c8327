#pragma once

#include "bene/codec.hpp"
#include "bene/faults.hpp"
#include "bene/free_list.hpp"
#include "bene/pricing.hpp"
#include "bene/types.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bene {

struct EnterpriseProfile {
    std::string enterprise;
    TimeUnit peak_unit_of_day = 48;
    /// Standard deviation of the daily bump, in units.
    TimeUnit peak_width_units = 8;
    double base_rate_per_unit = 0.5;
    double peak_multiplier = 1.0;
    double reserved_fraction = 0.5;
    /// Relative weights of small, medium, large.
    std::array<double, 3> container_mix{1.0, 0.0, 0.0};
    std::array<double, 7> weekly_modulation{1, 1, 1, 1, 1, 1, 1};
    /// Each request asks for a uniform count in [1, max_containers].
    std::int64_t max_containers = 1;
    /// Days on which the profile is active, [first_day, last_day). Used to
    /// overlay one-off events such as a game day.
    std::int64_t first_day = 0;
    std::int64_t last_day = std::numeric_limits<std::int64_t>::max();
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::vector<EnterpriseProfile> profiles;
    std::int64_t duration_days = 7;
    std::optional<std::uint64_t> seed;
    std::vector<MachineSpec> machines;
    PriceBook prices;
    double mean_window_units = 8.0;
    TimeUnit max_window_units = kUnitsPerDay;
    TimeUnit horizon_units = kDefaultHorizonUnits;
    std::optional<TimeUnit> outage_units;
    Slo slo;
    FaultPlan faults;

    [[nodiscard]] TimeUnit duration_units() const { return duration_days * kUnitsPerDay; }
};

/// Throws InvalidConfig naming the first violated constraint.
void validate(const EnterpriseProfile& p);
void validate(const ScenarioConfig& c);

/// 1 at the peak unit of day, falling off as a Gaussian of the circular
/// distance (in units) from it.
double bump(const EnterpriseProfile& p, TimeUnit t);
/// Expected arrivals in unit t.
double arrival_rate(const EnterpriseProfile& p, TimeUnit t);

/// Request stream for the scenario ordered by (submitted_at, id). Each
/// arrival at unit t is demand starting at t; reservations were submitted
/// `lead` units earlier with lead uniform in [1, 96] (capped at t).
std::vector<Request> generate(const ScenarioConfig& c);

std::string encode_trace(const ScenarioConfig& c, const std::vector<Request>& trace);
std::vector<Request> decode_trace(const std::vector<KvRecord>& records);
std::vector<Request> read_trace_file(const std::string& path);

/// Flat key-value scenario file: one `scenario` record, `machine` records,
/// `profile` records and optional `fault` records.
ScenarioConfig scenario_from_records(const std::vector<KvRecord>& records);
ScenarioConfig read_scenario_file(const std::string& path);
std::string encode_scenario(const ScenarioConfig& c);

/// n identical machines named m01, m02, ...
std::vector<MachineSpec> uniform_machines(std::int64_t n, const ResourceVector& capacity);

} // namespace bene
