#pragma once

#include "bene/codec.hpp"
#include "bene/free_list.hpp"
#include "bene/ratio.hpp"
#include "bene/record.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bene {

/// Append-only request database. With a path every append is written to
/// the file (one canonical line per record) before it becomes visible;
/// without one it lives in memory.
class RequestStore {
public:
    RequestStore() = default;
    /// Opens (and replays) an existing file, or creates it.
    explicit RequestStore(std::filesystem::path path);

    void append(const RequestRecord& record);
    /// Records whose request window intersects `window`, in append order.
    [[nodiscard]] std::vector<RequestRecord> load(const TimeWindow& window) const;
    [[nodiscard]] const std::vector<RequestRecord>& all() const { return records_; }
    [[nodiscard]] std::size_t size() const { return records_.size(); }

private:
    std::optional<std::filesystem::path> path_;
    std::vector<RequestRecord> records_;
};

struct PeakReport {
    TimeWindow lattice{0, 1};
    /// Componentwise maximum of each enterprise's demand curve.
    std::map<std::string, ResourceVector> enterprise_peaks;
    /// Componentwise maximum of the summed curve.
    ResourceVector cumulative_peak;
    std::vector<ResourceVector> cumulative_curve;

    [[nodiscard]] ResourceVector sum_of_peaks() const;
    /// Sum of individual cpu peaks over the cumulative cpu peak (1 when idle).
    [[nodiscard]] double multiplexing_gain() const;
};

/// Demand counts every requested container (admitted or not) once per
/// request, over the units of its window that fall in `lattice`.
PeakReport peak_analysis(std::span<const Request> requests, const TimeWindow& lattice);
PeakReport peak_analysis(std::span<const RequestRecord> records, const TimeWindow& lattice);

enum class Trigger { Quiet, Triggered };

std::string_view to_string(Trigger t);

struct ServiceQuality {
    std::int64_t requests = 0;
    std::int64_t rejected = 0;
    std::int64_t credited = 0;
};

ServiceQuality service_quality(std::span<const RequestRecord> records, const TimeWindow& window);

/// Triggered iff (rejected + credited) / requests > theta over the window.
Trigger trigger_check(std::span<const RequestRecord> records, const TimeWindow& window, const Ratio& theta);

/// ceil(peak x headroom / machine capacity), taking the larger of the cpu
/// and memory bounds. Headroom must be >= 1.
std::int64_t recommend(const ResourceVector& cumulative_peak, const MachineSpec& machine, const Ratio& headroom);
inline std::int64_t recommend(const PeakReport& report, const MachineSpec& machine, const Ratio& headroom) {
    return recommend(report.cumulative_peak, machine, headroom);
}

struct CapacityReport {
    TimeWindow window{0, 1};
    std::map<std::string, ResourceVector> enterprise_peaks;
    ResourceVector cumulative_peak;
    double multiplexing_gain = 1.0;
    Ratio rejection_rate;
    Ratio slo_miss_rate;
    Trigger trigger = Trigger::Quiet;
    Ratio theta;
    Ratio headroom;
    MachineSpec machine;
    std::int64_t recommended_machines = 0;
};

CapacityReport build_capacity_report(std::span<const RequestRecord> records, const TimeWindow& window,
                                     const MachineSpec& machine, const Ratio& headroom, const Ratio& theta);

std::string render_text(const CapacityReport& r);
/// Machine-readable form: one `capacity_report` line plus one
/// `enterprise_peak` line per enterprise.
std::string render_records(const CapacityReport& r);

} // namespace bene
