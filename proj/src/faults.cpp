#include "bene/faults.hpp"

#include "bene/error.hpp"
#include "bene/rng.hpp"

#include <algorithm>

namespace bene {

std::string_view to_string(FaultKind k) { return k == FaultKind::MachineCrash ? "crash" : "hang"; }

FaultKind parse_fault_kind(std::string_view s) {
    if (s == "crash") return FaultKind::MachineCrash;
    if (s == "hang") return FaultKind::SlotHang;
    throw Error(ErrorCode::ParseError, "unknown fault kind '" + std::string(s) + "'");
}

void FaultPlan::sort() {
    std::stable_sort(events.begin(), events.end(), [](const FaultEvent& a, const FaultEvent& b) {
        if (a.at != b.at) return a.at < b.at;
        return a.machine_id < b.machine_id;
    });
}

FaultPlan FaultPlan::synthesize(std::uint64_t seed, const std::vector<std::string>& machine_ids,
                                const TimeWindow& window, std::size_t count, double restartable_fraction) {
    if (machine_ids.empty()) throw Error(ErrorCode::InvalidConfig, "fault plan needs machines");
    Rng rng(seed);
    FaultPlan plan;
    plan.seed = seed;
    for (std::size_t i = 0; i < count; ++i) {
        FaultEvent e;
        e.at = rng.uniform_int(window.start(), window.end() - 1);
        e.machine_id = machine_ids[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(machine_ids.size()) - 1))];
        e.kind = rng.bernoulli(0.5) ? FaultKind::MachineCrash : FaultKind::SlotHang;
        e.restartable = rng.bernoulli(restartable_fraction);
        plan.events.push_back(std::move(e));
    }
    plan.sort();
    return plan;
}

KvRecord to_record(const FaultEvent& e) {
    KvRecord rec("fault");
    rec.add("at", e.at)
        .add("machine", e.machine_id)
        .add("kind", to_string(e.kind))
        .add("restartable", std::int64_t{e.restartable ? 1 : 0});
    return rec;
}

FaultEvent fault_from_record(const KvRecord& rec) {
    return FaultEvent{rec.get_int("at"), rec.get("machine"), parse_fault_kind(rec.get("kind")),
                      rec.get_int("restartable") != 0};
}

std::string encode_fault_plan(const FaultPlan& plan) {
    std::string out = KvRecord("fault_plan").add("seed", static_cast<std::int64_t>(plan.seed)).encode() + "\n";
    for (const auto& e : plan.events) out += to_record(e).encode() + "\n";
    return out;
}

FaultPlan fault_plan_from_records(const std::vector<KvRecord>& records) {
    FaultPlan plan;
    for (const auto& rec : records) {
        const std::string type = rec.type();
        if (type == "fault_plan") plan.seed = static_cast<std::uint64_t>(rec.get_int("seed"));
        if (type == "fault") plan.events.push_back(fault_from_record(rec));
    }
    plan.sort();
    return plan;
}

} // namespace bene
