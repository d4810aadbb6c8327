#include "bene/workload.hpp"

#include "bene/error.hpp"
#include "bene/request.hpp"
#include "bene/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

namespace bene {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

template <std::size_t N>
std::string join(const std::array<double, N>& xs) {
    std::string out;
    for (std::size_t i = 0; i < N; ++i) out += (i ? "," : "") + format_double(xs[i]);
    return out;
}

template <std::size_t N>
std::array<double, N> split(const std::string& s, std::string_view key) {
    std::array<double, N> out{};
    std::size_t i = 0;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = s.find(',', pos);
        if (i == N) throw Error(ErrorCode::InvalidConfig, std::string(key) + " needs " + std::to_string(N) + " values");
        out[i++] = parse_double(std::string_view(s).substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (i != N) throw Error(ErrorCode::InvalidConfig, std::string(key) + " needs " + std::to_string(N) + " values");
    return out;
}

ContainerType pick_type(const EnterpriseProfile& p, Rng& rng) {
    const double total = p.container_mix[0] + p.container_mix[1] + p.container_mix[2];
    double x = rng.uniform() * total;
    if (x < p.container_mix[0]) return ContainerType::Small;
    x -= p.container_mix[0];
    if (x < p.container_mix[1]) return ContainerType::Medium;
    return p.container_mix[2] > 0 ? ContainerType::Large : ContainerType::Medium;
}

} // namespace

void validate(const EnterpriseProfile& p) {
    const std::string who = "profile " + p.enterprise + ": ";
    require(!p.enterprise.empty(), "profile without enterprise id");
    require(p.peak_unit_of_day >= 0 && p.peak_unit_of_day < kUnitsPerDay, who + "peak_unit_of_day outside 0..95");
    require(p.peak_width_units > 0, who + "peak_width_units must be positive");
    require(p.base_rate_per_unit >= 0, who + "negative base rate");
    require(p.peak_multiplier >= 1.0, who + "peak_multiplier below 1");
    require(p.reserved_fraction >= 0 && p.reserved_fraction <= 1, who + "reserved_fraction outside [0, 1]");
    double mix = 0;
    for (double w : p.container_mix) {
        require(w >= 0, who + "negative container mix weight");
        mix += w;
    }
    require(mix > 0, who + "container mix is all zero");
    for (double m : p.weekly_modulation) require(m >= 0, who + "negative weekly multiplier");
    require(p.max_containers >= 1, who + "max_containers below 1");
    require(p.first_day >= 0 && p.first_day < p.last_day, who + "empty active day range");
}

void validate(const ScenarioConfig& c) {
    require(!c.profiles.empty(), "scenario has no profiles");
    require(c.seed.has_value(), "scenario has no seed");
    require(c.duration_days > 0, "duration_days must be positive");
    require(!c.machines.empty(), "scenario has no machines");
    require(c.mean_window_units >= 1.0, "mean_window below 1 unit");
    require(c.max_window_units >= 1, "max_window below 1 unit");
    require(c.horizon_units >= c.max_window_units + kUnitsPerDay, "horizon shorter than lead plus window");
    require(c.slo.max_latency_ms > 0 && c.slo.min_throughput_rps > 0, "slo values must be positive");
    validate(c.prices);
    for (const auto& p : c.profiles) validate(p);
}

double bump(const EnterpriseProfile& p, TimeUnit t) {
    const TimeUnit unit = ((t % kUnitsPerDay) + kUnitsPerDay) % kUnitsPerDay;
    const TimeUnit raw = unit > p.peak_unit_of_day ? unit - p.peak_unit_of_day : p.peak_unit_of_day - unit;
    const auto d = static_cast<double>(std::min(raw, kUnitsPerDay - raw));
    const auto w = static_cast<double>(p.peak_width_units);
    return std::exp(-(d * d) / (2.0 * w * w));
}

double arrival_rate(const EnterpriseProfile& p, TimeUnit t) {
    const std::int64_t day = t / kUnitsPerDay;
    if (day < p.first_day || day >= p.last_day) return 0.0;
    const double weekly = p.weekly_modulation[static_cast<std::size_t>(day % 7)];
    return p.base_rate_per_unit * weekly * (1.0 + (p.peak_multiplier - 1.0) * bump(p, t));
}

std::vector<Request> generate(const ScenarioConfig& c) {
    validate(c);
    std::vector<Request> out;
    for (std::size_t idx = 0; idx < c.profiles.size(); ++idx) {
        const EnterpriseProfile& p = c.profiles[idx];
        Rng rng(*c.seed ^ static_cast<std::uint64_t>(idx));
        std::int64_t seq = 0;
        for (TimeUnit t = 0; t < c.duration_units(); ++t) {
            const std::int64_t arrivals = rng.poisson(arrival_rate(p, t));
            for (std::int64_t k = 0; k < arrivals; ++k) {
                const bool reserved_coin = rng.bernoulli(p.reserved_fraction);
                const TimeUnit lead = std::min<TimeUnit>(rng.uniform_int(1, kUnitsPerDay), t);
                const TimeUnit length = std::min<TimeUnit>(rng.geometric(c.mean_window_units), c.max_window_units);
                const ContainerType ctype = pick_type(p, rng);
                const std::int64_t count = rng.uniform_int(1, p.max_containers);

                Request r;
                char id[96];
                std::snprintf(id, sizeof id, "%s-p%zu-%06lld", p.enterprise.c_str(), idx,
                              static_cast<long long>(seq++));
                r.id = id;
                r.enterprise = p.enterprise;
                r.kind = reserved_coin && lead >= kReservationLeadUnits ? RequestKind::Reserved : RequestKind::RealTime;
                r.count = count;
                r.ctype = ctype;
                r.window = TimeWindow(t, t + length);
                r.slo = c.slo;
                r.submitted_at = r.kind == RequestKind::Reserved ? t - lead : t;
                out.push_back(validate_request(r, r.submitted_at));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Request& a, const Request& b) {
        return std::tie(a.submitted_at, a.id) < std::tie(b.submitted_at, b.id);
    });
    return out;
}

std::string encode_trace(const ScenarioConfig& c, const std::vector<Request>& trace) {
    std::string out = KvRecord("trace")
                          .add("scenario", c.name)
                          .add("seed", static_cast<std::int64_t>(c.seed.value_or(0)))
                          .add("requests", static_cast<std::int64_t>(trace.size()))
                          .encode() +
                      "\n";
    for (const auto& r : trace) out += to_record(r).encode() + "\n";
    return out;
}

std::vector<Request> decode_trace(const std::vector<KvRecord>& records) {
    std::vector<Request> out;
    for (const auto& rec : records)
        if (rec.type() == "request") out.push_back(request_from_record(rec));
    return out;
}

std::vector<Request> read_trace_file(const std::string& path) { return decode_trace(read_records_file(path)); }

ScenarioConfig scenario_from_records(const std::vector<KvRecord>& records) {
    ScenarioConfig c;
    bool header = false;
    for (const auto& rec : records) {
        const std::string type = rec.type();
        if (type == "scenario") {
            header = true;
            c.name = rec.find("name").value_or(c.name);
            if (rec.has("seed")) c.seed = static_cast<std::uint64_t>(rec.get_int("seed"));
            c.duration_days = rec.get_int("duration_days", c.duration_days);
            c.prices.base_rate = Money{rec.get_int("base_rate", c.prices.base_rate.micros)};
            if (auto f = rec.find("realtime_floor")) c.prices.realtime_floor = Ratio::parse(*f);
            c.mean_window_units = rec.get_double("mean_window", c.mean_window_units);
            c.max_window_units = rec.get_int("max_window", c.max_window_units);
            c.horizon_units = rec.get_int("horizon", c.horizon_units);
            if (rec.has("outage_units")) c.outage_units = rec.get_int("outage_units");
            c.slo.max_latency_ms = rec.get_int("max_latency_ms", c.slo.max_latency_ms);
            c.slo.min_throughput_rps = rec.get_int("min_throughput_rps", c.slo.min_throughput_rps);
        } else if (type == "machine") {
            c.machines.push_back(MachineSpec{rec.get("id"), {rec.get_int("cpu"), rec.get_int("mem")}});
        } else if (type == "machine_pool") {
            const auto pool = uniform_machines(rec.get_int("count"), {rec.get_int("cpu"), rec.get_int("mem")});
            c.machines.insert(c.machines.end(), pool.begin(), pool.end());
        } else if (type == "profile") {
            EnterpriseProfile p;
            p.enterprise = rec.get("enterprise");
            p.peak_unit_of_day = rec.get_int("peak_unit", p.peak_unit_of_day);
            p.peak_width_units = rec.get_int("peak_width", p.peak_width_units);
            p.base_rate_per_unit = rec.get_double("base_rate", p.base_rate_per_unit);
            p.peak_multiplier = rec.get_double("peak_multiplier", p.peak_multiplier);
            p.reserved_fraction = rec.get_double("reserved_fraction", p.reserved_fraction);
            if (auto m = rec.find("mix")) p.container_mix = split<3>(*m, "mix");
            if (auto w = rec.find("weekly")) p.weekly_modulation = split<7>(*w, "weekly");
            p.max_containers = rec.get_int("max_containers", p.max_containers);
            p.first_day = rec.get_int("first_day", p.first_day);
            p.last_day = rec.get_int("last_day", p.last_day);
            c.profiles.push_back(std::move(p));
        }
    }
    if (!header) throw Error(ErrorCode::InvalidConfig, "missing scenario record");
    c.faults = fault_plan_from_records(records);
    validate(c);
    return c;
}

ScenarioConfig read_scenario_file(const std::string& path) { return scenario_from_records(read_records_file(path)); }

std::string encode_scenario(const ScenarioConfig& c) {
    KvRecord head("scenario");
    head.add("name", c.name);
    if (c.seed) head.add("seed", static_cast<std::int64_t>(*c.seed));
    head.add("duration_days", c.duration_days)
        .add("base_rate", c.prices.base_rate.micros)
        .add("realtime_floor", c.prices.realtime_floor.to_string())
        .add("mean_window", c.mean_window_units)
        .add("max_window", c.max_window_units)
        .add("horizon", c.horizon_units);
    if (c.outage_units) head.add("outage_units", *c.outage_units);
    head.add("max_latency_ms", c.slo.max_latency_ms).add("min_throughput_rps", c.slo.min_throughput_rps);

    std::string out = head.encode() + "\n";
    for (const auto& m : c.machines) {
        out += KvRecord("machine")
                   .add("id", m.machine_id)
                   .add("cpu", m.capacity.cpu_millicores)
                   .add("mem", m.capacity.mem_mb)
                   .encode() +
               "\n";
    }
    for (const auto& p : c.profiles) {
        KvRecord rec("profile");
        rec.add("enterprise", p.enterprise)
            .add("peak_unit", p.peak_unit_of_day)
            .add("peak_width", p.peak_width_units)
            .add("base_rate", p.base_rate_per_unit)
            .add("peak_multiplier", p.peak_multiplier)
            .add("reserved_fraction", p.reserved_fraction)
            .add("mix", join(p.container_mix))
            .add("weekly", join(p.weekly_modulation))
            .add("max_containers", p.max_containers);
        if (p.first_day != 0) rec.add("first_day", p.first_day);
        if (p.last_day != std::numeric_limits<std::int64_t>::max()) rec.add("last_day", p.last_day);
        out += rec.encode() + "\n";
    }
    for (const auto& e : c.faults.events) out += to_record(e).encode() + "\n";
    return out;
}

std::vector<MachineSpec> uniform_machines(std::int64_t n, const ResourceVector& capacity) {
    std::vector<MachineSpec> out;
    for (std::int64_t i = 1; i <= n; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "m%02lld", static_cast<long long>(i));
        out.push_back(MachineSpec{id, capacity});
    }
    return out;
}

} // namespace bene
