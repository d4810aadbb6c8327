// bene: generate traces, simulate an MDC, serve the admission API, plan
// capacity and price single requests.

#include "bene/engine.hpp"
#include "bene/error.hpp"
#include "bene/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

namespace {

using namespace bene;

volatile std::sig_atomic_t g_stop = 0;

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + path);
}

ScenarioConfig load_scenario(const std::string& path, std::optional<std::uint64_t> seed) {
    ScenarioConfig c = read_scenario_file(path);
    if (seed) c.seed = seed;
    return c;
}

FaultPlan load_faults(const ScenarioConfig& c, const std::string& path) {
    if (path.empty()) return c.faults;
    return fault_plan_from_records(read_records_file(path));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bene micro data center scheduler"};
    app.require_subcommand(1);

    std::string config;
    std::string trace;
    std::string faults;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* opt = cmd->add_option("--config,--scenario", config, "scenario file")->envname("BENE_CONFIG");
        if (need_config) opt->required();
        cmd->add_option("--seed", seed, "override the scenario seed")->envname("BENE_SEED");
    };

    auto* gen = app.add_subcommand("generate", "write a synthetic request trace");
    add_common(gen, true);
    std::string gen_out = "trace.log";
    gen->add_option("--out", gen_out, "trace file")->envname("BENE_OUT");

    auto* sim = app.add_subcommand("simulate", "replay a trace through the tick loop");
    add_common(sim, true);
    sim->add_option("--trace", trace, "trace file (generated from the scenario when absent)")->envname("BENE_TRACE");
    sim->add_option("--faults", faults, "fault plan file (defaults to the scenario's faults)")->envname("BENE_FAULTS");
    sim->add_option("--out-dir", out_dir, "output directory")->envname("BENE_OUT_DIR");

    auto* srv = app.add_subcommand("serve", "run the admission service");
    add_common(srv, true);
    srv->add_option("--faults", faults, "fault plan file")->envname("BENE_FAULTS");
    double time_scale_ms = 15 * 60 * 1000;
    srv->add_option("--time-scale", time_scale_ms, "milliseconds per 15-minute unit")->envname("BENE_TIME_SCALE");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string store;
    srv->add_option("--host", host)->envname("BENE_HOST");
    srv->add_option("--port", port)->envname("BENE_PORT");
    srv->add_option("--store", store, "append-only request store file")->envname("BENE_STORE");

    auto* plan = app.add_subcommand("plan-capacity", "peak analysis and machine recommendation");
    add_common(plan, true);
    std::string records;
    TimeUnit from = 0;
    std::optional<TimeUnit> to;
    std::string theta = "0.05";
    std::string headroom = "1";
    bool plan_kv = false;
    plan->add_option("--records", records, "request store file (simulated from --trace when absent)")
        ->envname("BENE_RECORDS");
    plan->add_option("--trace", trace, "trace file")->envname("BENE_TRACE");
    plan->add_option("--from", from, "first unit");
    plan->add_option("--to", to, "end unit (exclusive), defaults to the scenario length");
    plan->add_option("--theta", theta, "trigger threshold");
    plan->add_option("--headroom", headroom, "capacity multiplier >= 1");
    plan->add_flag("--kv", plan_kv, "machine-readable output");

    auto* quote = app.add_subcommand("quote", "price one request offline");
    add_common(quote, false);
    std::string kind = "reserved";
    std::int64_t count = 1;
    std::string ctype = "small";
    TimeUnit units = 1;
    std::string utilization = "0";
    quote->add_option("--kind", kind)->check(CLI::IsMember({"reserved", "realtime"}));
    quote->add_option("--count", count);
    quote->add_option("--type", ctype)->check(CLI::IsMember({"small", "medium", "large"}));
    quote->add_option("--units", units, "duration in 15-minute units");
    quote->add_option("--utilization", utilization, "MDC utilization for real-time quotes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const ScenarioConfig c = load_scenario(config, seed);
            const auto requests = generate(c);
            write_file(gen_out, encode_trace(c, requests));
            std::cout << "wrote " << requests.size() << " requests to " << gen_out << '\n';
        } else if (*sim) {
            const ScenarioConfig c = load_scenario(config, seed);
            const auto requests = trace.empty() ? generate(c) : read_trace_file(trace);
            const SimulationResult result = run_simulation(c, requests, load_faults(c, faults));
            write_outputs(result, out_dir);
            std::cout << report_text(result.metrics);
        } else if (*srv) {
            ServiceOptions options;
            options.scenario = load_scenario(config, seed);
            options.faults = load_faults(options.scenario, faults);
            options.unit = std::chrono::milliseconds(static_cast<std::int64_t>(time_scale_ms));
            options.host = host;
            options.port = port;
            if (!store.empty()) options.store_path = store;
            Service service(std::move(options));
            const int bound = service.start();
            std::cout << "listening on " << host << ':' << bound << std::endl;
            std::signal(SIGINT, [](int) { g_stop = 1; });
            std::signal(SIGTERM, [](int) { g_stop = 1; });
            while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            service.stop();
        } else if (*plan) {
            const ScenarioConfig c = load_scenario(config, seed);
            std::vector<RequestRecord> recs;
            if (!records.empty()) {
                if (!std::filesystem::exists(records))
                    throw Error(ErrorCode::StorageFailure, "no request store at " + records);
                RequestStore s{std::filesystem::path(records)};
                recs = s.all();
            } else {
                const auto requests = trace.empty() ? generate(c) : read_trace_file(trace);
                for (const auto& line : run_simulation(c, requests, c.faults).records)
                    recs.push_back(request_record_from(KvRecord::parse(line)));
            }
            const TimeWindow w(from, to.value_or(c.duration_units()));
            const CapacityReport report =
                build_capacity_report(recs, w, c.machines.front(), Ratio::parse(headroom), Ratio::parse(theta));
            std::cout << (plan_kv ? render_records(report) : render_text(report));
        } else if (*quote) {
            PriceBook book;
            if (!config.empty()) book = load_scenario(config, seed).prices;
            const TimeWindow w(0, units);
            const ContainerType t = parse_container_type(ctype);
            const Money m = kind == "reserved" ? quote_reserved(book, count, t, w)
                                               : quote_realtime(book, count, t, w, Ratio::parse(utilization));
            std::cout << KvRecord("quote")
                             .add("kind", kind)
                             .add("count", count)
                             .add("ctype", ctype)
                             .add("units", units)
                             .add("quote", m.micros)
                             .encode()
                      << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.detail() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
