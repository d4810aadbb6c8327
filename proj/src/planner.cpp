#include "bene/planner.hpp"

#include "bene/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace bene {

RequestStore::RequestStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(*path_)) {
        for (const auto& rec : read_records_file(path_->string()))
            if (rec.type() == "request_record") records_.push_back(request_record_from(rec));
        return;
    }
    std::ofstream create(*path_);
    if (!create) throw Error(ErrorCode::StorageFailure, "cannot create " + path_->string());
}

void RequestStore::append(const RequestRecord& record) {
    if (path_) {
        std::ofstream out(*path_, std::ios::app);
        out << to_record(record).encode() << '\n';
        out.flush();
        if (!out) throw Error(ErrorCode::StorageFailure, "append to " + path_->string() + " failed");
    }
    records_.push_back(record);
}

std::vector<RequestRecord> RequestStore::load(const TimeWindow& window) const {
    std::vector<RequestRecord> out;
    for (const auto& r : records_)
        if (r.request.window.overlaps(window)) out.push_back(r);
    return out;
}

ResourceVector PeakReport::sum_of_peaks() const {
    ResourceVector sum;
    for (const auto& [e, p] : enterprise_peaks) sum += p;
    return sum;
}

double PeakReport::multiplexing_gain() const {
    if (cumulative_peak.cpu_millicores == 0) return 1.0;
    return static_cast<double>(sum_of_peaks().cpu_millicores) / static_cast<double>(cumulative_peak.cpu_millicores);
}

PeakReport peak_analysis(std::span<const Request> requests, const TimeWindow& lattice) {
    PeakReport report;
    report.lattice = lattice;
    const auto n = static_cast<std::size_t>(lattice.duration());
    std::map<std::string, std::vector<ResourceVector>> curves;
    report.cumulative_curve.assign(n, ResourceVector{});
    for (const auto& r : requests) {
        auto& curve = curves[r.enterprise];
        if (curve.empty()) curve.assign(n, ResourceVector{});
        const auto overlap = r.window.intersect(lattice);
        if (!overlap) continue;
        const ResourceVector demand = footprint(r.ctype) * r.count;
        for (TimeUnit t = overlap->start(); t < overlap->end(); ++t) {
            const auto i = static_cast<std::size_t>(t - lattice.start());
            curve[i] += demand;
            report.cumulative_curve[i] += demand;
        }
    }
    for (const auto& [enterprise, curve] : curves) {
        ResourceVector peak;
        for (const auto& v : curve) peak = componentwise_max(peak, v);
        report.enterprise_peaks[enterprise] = peak;
    }
    for (const auto& v : report.cumulative_curve) report.cumulative_peak = componentwise_max(report.cumulative_peak, v);
    return report;
}

PeakReport peak_analysis(std::span<const RequestRecord> records, const TimeWindow& lattice) {
    std::set<std::string> seen;
    std::vector<Request> requests;
    for (const auto& r : records)
        if (seen.insert(r.request.id).second) requests.push_back(r.request);
    return peak_analysis(std::span<const Request>(requests), lattice);
}

std::string_view to_string(Trigger t) { return t == Trigger::Quiet ? "quiet" : "triggered"; }

ServiceQuality service_quality(std::span<const RequestRecord> records, const TimeWindow& window) {
    std::map<std::string, std::pair<bool, bool>> by_request; // (rejected, credited)
    for (const auto& r : records) {
        if (!r.request.window.overlaps(window)) continue;
        auto& flags = by_request[r.request.id];
        if (r.outcome == Outcome::Rejected) flags.first = true;
        if (r.outcome == Outcome::Credited) flags.second = true;
    }
    ServiceQuality q;
    q.requests = static_cast<std::int64_t>(by_request.size());
    for (const auto& [id, flags] : by_request) {
        if (flags.first) ++q.rejected;
        if (flags.second) ++q.credited;
    }
    return q;
}

Trigger trigger_check(std::span<const RequestRecord> records, const TimeWindow& window, const Ratio& theta) {
    const ServiceQuality q = service_quality(records, window);
    if (q.requests == 0) return Trigger::Quiet;
    return Ratio(q.rejected + q.credited, q.requests) > theta ? Trigger::Triggered : Trigger::Quiet;
}

std::int64_t recommend(const ResourceVector& cumulative_peak, const MachineSpec& machine, const Ratio& headroom) {
    if (headroom < Ratio::whole(1)) throw Error(ErrorCode::InvalidConfig, "headroom below 1");
    auto bound = [&](std::int64_t demand, std::int64_t capacity) -> std::int64_t {
        const __int128 num = static_cast<__int128>(demand) * headroom.num();
        const __int128 den = static_cast<__int128>(capacity) * headroom.den();
        return static_cast<std::int64_t>((num + den - 1) / den);
    };
    return std::max(bound(cumulative_peak.cpu_millicores, machine.capacity.cpu_millicores),
                    bound(cumulative_peak.mem_mb, machine.capacity.mem_mb));
}

CapacityReport build_capacity_report(std::span<const RequestRecord> records, const TimeWindow& window,
                                     const MachineSpec& machine, const Ratio& headroom, const Ratio& theta) {
    CapacityReport r;
    r.window = window;
    const PeakReport peaks = peak_analysis(records, window);
    r.enterprise_peaks = peaks.enterprise_peaks;
    r.cumulative_peak = peaks.cumulative_peak;
    r.multiplexing_gain = peaks.multiplexing_gain();
    const ServiceQuality q = service_quality(records, window);
    if (q.requests > 0) {
        r.rejection_rate = Ratio(q.rejected, q.requests);
        r.slo_miss_rate = Ratio(q.credited, q.requests);
    }
    r.trigger = trigger_check(records, window, theta);
    r.theta = theta;
    r.headroom = headroom;
    r.machine = machine;
    r.recommended_machines = recommend(peaks, machine, headroom);
    return r;
}

std::string render_text(const CapacityReport& r) {
    std::ostringstream out;
    out << "capacity report for units [" << r.window.start() << ", " << r.window.end() << ")\n";
    for (const auto& [e, p] : r.enterprise_peaks)
        out << "  peak " << e << ": " << p.cpu_millicores << " mc, " << p.mem_mb << " MB\n";
    out << "  cumulative peak: " << r.cumulative_peak.cpu_millicores << " mc, " << r.cumulative_peak.mem_mb << " MB\n";
    out << "  multiplexing gain: " << format_double(r.multiplexing_gain) << '\n';
    out << "  rejection rate: " << format_double(r.rejection_rate.to_double()) << '\n';
    out << "  slo miss rate: " << format_double(r.slo_miss_rate.to_double()) << '\n';
    out << "  trigger (theta " << r.theta.to_string() << "): " << to_string(r.trigger) << '\n';
    out << "  recommended machines (" << r.machine.capacity.cpu_millicores << " mc / " << r.machine.capacity.mem_mb
        << " MB each, headroom " << r.headroom.to_string() << "): " << r.recommended_machines << '\n';
    return out.str();
}

std::string render_records(const CapacityReport& r) {
    std::string out = KvRecord("capacity_report")
                          .add("from", r.window.start())
                          .add("to", r.window.end())
                          .add("cumulative_cpu", r.cumulative_peak.cpu_millicores)
                          .add("cumulative_mem", r.cumulative_peak.mem_mb)
                          .add("multiplexing_gain", r.multiplexing_gain)
                          .add("rejection_rate", r.rejection_rate.to_string())
                          .add("slo_miss_rate", r.slo_miss_rate.to_string())
                          .add("trigger", to_string(r.trigger))
                          .add("theta", r.theta.to_string())
                          .add("headroom", r.headroom.to_string())
                          .add("machine_cpu", r.machine.capacity.cpu_millicores)
                          .add("machine_mem", r.machine.capacity.mem_mb)
                          .add("recommended_machines", r.recommended_machines)
                          .encode() +
                      "\n";
    for (const auto& [e, p] : r.enterprise_peaks) {
        out += KvRecord("enterprise_peak")
                   .add("enterprise", e)
                   .add("cpu", p.cpu_millicores)
                   .add("mem", p.mem_mb)
                   .encode() +
               "\n";
    }
    return out;
}

} // namespace bene
