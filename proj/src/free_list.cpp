#include "bene/free_list.hpp"

#include "bene/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace bene {

namespace {

constexpr TimeUnit kForever = std::numeric_limits<TimeUnit>::max();

std::string window_text(const TimeWindow& w) {
    return "[" + std::to_string(w.start()) + "," + std::to_string(w.end()) + ")";
}

} // namespace

FreeList::FreeList(std::vector<MachineSpec> machines, TimeWindow horizon)
    : machines_(std::move(machines)), horizon_(horizon) {
    std::sort(machines_.begin(), machines_.end(),
              [](const MachineSpec& a, const MachineSpec& b) { return a.machine_id < b.machine_id; });
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        const auto& m = machines_[i];
        if (m.machine_id.empty()) throw Error(ErrorCode::InvalidConfig, "machine without id");
        if (m.capacity.cpu_millicores <= 0 || m.capacity.mem_mb <= 0)
            throw Error(ErrorCode::InvalidConfig, "machine " + m.machine_id + " needs positive capacity");
        if (i > 0 && machines_[i - 1].machine_id == m.machine_id)
            throw Error(ErrorCode::InvalidConfig, "duplicate machine " + m.machine_id);
    }
    outages_.resize(machines_.size());
}

std::size_t FreeList::index_of(std::string_view machine_id) const {
    auto it = std::lower_bound(machines_.begin(), machines_.end(), machine_id,
                               [](const MachineSpec& m, std::string_view id) { return m.machine_id < id; });
    if (it == machines_.end() || it->machine_id != machine_id)
        throw Error(ErrorCode::UnknownMachine, std::string(machine_id));
    return static_cast<std::size_t>(it - machines_.begin());
}

bool FreeList::has_machine(std::string_view machine_id) const {
    auto it = std::lower_bound(machines_.begin(), machines_.end(), machine_id,
                               [](const MachineSpec& m, std::string_view id) { return m.machine_id < id; });
    return it != machines_.end() && it->machine_id == machine_id;
}

const MachineSpec& FreeList::machine(std::string_view machine_id) const { return machines_[index_of(machine_id)]; }

void FreeList::check_in_horizon(const TimeWindow& w) const {
    if (!horizon_.contains(w))
        throw Error(ErrorCode::WindowOutsideHorizon, window_text(w) + " outside horizon " + window_text(horizon_));
}

bool FreeList::is_down(TimeUnit t, std::string_view machine_id) const {
    for (const auto& o : outages_[index_of(machine_id)])
        if (o.contains(t)) return true;
    return false;
}

ResourceVector FreeList::capacity(TimeUnit t, std::string_view machine_id) const {
    const std::size_t i = index_of(machine_id);
    for (const auto& o : outages_[i])
        if (o.contains(t)) return {};
    return machines_[i].capacity;
}

ResourceVector FreeList::committed(TimeUnit t, std::string_view machine_id) const {
    check_in_horizon(TimeWindow{t, t + 1});
    const std::size_t i = index_of(machine_id);
    auto it = used_.find(t);
    return it == used_.end() ? ResourceVector{} : it->second[i];
}

ResourceVector FreeList::remaining(TimeUnit t, std::string_view machine_id) const {
    return capacity(t, machine_id) - committed(t, machine_id);
}

ResourceVector FreeList::min_remaining(std::string_view machine_id, const TimeWindow& w) const {
    check_in_horizon(w);
    const std::size_t i = index_of(machine_id);
    ResourceVector best{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::max()};
    auto row = used_.lower_bound(w.start());
    for (TimeUnit t = w.start(); t < w.end(); ++t) {
        while (row != used_.end() && row->first < t) ++row;
        ResourceVector rem = capacity(t, machine_id);
        if (row != used_.end() && row->first == t) rem -= row->second[i];
        best.cpu_millicores = std::min(best.cpu_millicores, rem.cpu_millicores);
        best.mem_mb = std::min(best.mem_mb, rem.mem_mb);
    }
    return best;
}

std::optional<PlacementOptions>
FreeList::feasible_placements(ContainerType ctype, std::int64_t count, const TimeWindow& w) const {
    check_in_horizon(w);
    PlacementOptions opts;
    const ResourceVector fp = footprint(ctype);
    for (const auto& m : machines_) {
        const ResourceVector rem = min_remaining(m.machine_id, w);
        const std::int64_t k = fp.copies_within(rem);
        if (k <= 0) continue;
        opts.machines.push_back(MachineOption{m.machine_id, k, rem});
        opts.total += k;
    }
    if (opts.total < count) return std::nullopt;
    return opts;
}

void FreeList::commit(std::string_view allocation_id, const std::vector<Placement>& placements,
                      const TimeWindow& w) {
    check_in_horizon(w);
    std::vector<ResourceVector> need(machines_.size());
    for (const auto& p : placements) {
        if (p.count < 0) throw Error(ErrorCode::OverCommit, "negative placement count");
        need[index_of(p.machine_id)] += footprint(p.ctype) * p.count;
    }
    for (TimeUnit t = w.start(); t < w.end(); ++t) {
        auto row = used_.find(t);
        for (std::size_t i = 0; i < machines_.size(); ++i) {
            if (need[i] == ResourceVector{}) continue;
            ResourceVector after = (row == used_.end() ? ResourceVector{} : row->second[i]) + need[i];
            if (!after.fits_within(capacity(t, machines_[i].machine_id))) {
                throw Error(ErrorCode::OverCommit, std::string(allocation_id) + " on " + machines_[i].machine_id +
                                                       " at unit " + std::to_string(t));
            }
        }
    }
    const bool any = std::any_of(need.begin(), need.end(), [](const ResourceVector& v) { return v != ResourceVector{}; });
    for (TimeUnit t = w.start(); any && t < w.end(); ++t) {
        auto& row = used_[t];
        if (row.empty()) row.resize(machines_.size());
        for (std::size_t i = 0; i < machines_.size(); ++i) row[i] += need[i];
    }
    auto& segs = ledger_[std::string(allocation_id)];
    for (const auto& p : placements) {
        if (p.count == 0) continue;
        segs.push_back(CommittedSegment{p.machine_id, p.ctype, p.count, w});
    }
    if (segs.empty()) ledger_.erase(std::string(allocation_id));
}

void FreeList::uncommit(const CommittedSegment& seg, std::size_t machine, TimeUnit from, TimeUnit to) {
    const ResourceVector amount = footprint(seg.ctype) * seg.count;
    for (TimeUnit t = std::max(from, horizon_.start()); t < to; ++t) {
        auto row = used_.find(t);
        if (row == used_.end()) continue;
        row->second[machine] -= amount;
        if (std::all_of(row->second.begin(), row->second.end(),
                        [](const ResourceVector& v) { return v == ResourceVector{}; })) {
            used_.erase(row);
        }
    }
}

void FreeList::release(std::string_view allocation_id, TimeUnit from) {
    auto it = ledger_.find(allocation_id);
    if (it == ledger_.end()) throw Error(ErrorCode::UnknownAllocation, std::string(allocation_id));
    std::vector<CommittedSegment> kept;
    for (const auto& seg : it->second) {
        const TimeUnit cut = std::max(from, seg.window.start());
        if (cut < seg.window.end()) uncommit(seg, index_of(seg.machine_id), cut, seg.window.end());
        if (cut > seg.window.start()) {
            CommittedSegment past = seg;
            past.window = TimeWindow{seg.window.start(), std::min(cut, seg.window.end())};
            kept.push_back(std::move(past));
        }
    }
    if (kept.empty())
        ledger_.erase(it);
    else
        it->second = std::move(kept);
}

void FreeList::release_on(std::string_view allocation_id, std::string_view machine_id, TimeUnit from) {
    auto it = ledger_.find(allocation_id);
    if (it == ledger_.end()) throw Error(ErrorCode::UnknownAllocation, std::string(allocation_id));
    const std::size_t mi = index_of(machine_id);
    std::vector<CommittedSegment> kept;
    for (const auto& seg : it->second) {
        if (seg.machine_id != machine_id) {
            kept.push_back(seg);
            continue;
        }
        const TimeUnit cut = std::max(from, seg.window.start());
        if (cut < seg.window.end()) uncommit(seg, mi, cut, seg.window.end());
        if (cut > seg.window.start()) {
            CommittedSegment past = seg;
            past.window = TimeWindow{seg.window.start(), std::min(cut, seg.window.end())};
            kept.push_back(std::move(past));
        }
    }
    if (kept.empty())
        ledger_.erase(it);
    else
        it->second = std::move(kept);
}

bool FreeList::contains(std::string_view allocation_id) const { return ledger_.find(allocation_id) != ledger_.end(); }

Ratio FreeList::utilization(TimeUnit t) const {
    check_in_horizon(TimeWindow{t, t + 1});
    std::int64_t used = 0;
    std::int64_t total = 0;
    auto row = used_.find(t);
    for (std::size_t i = 0; i < machines_.size(); ++i) {
        total += capacity(t, machines_[i].machine_id).cpu_millicores;
        if (row != used_.end()) used += row->second[i].cpu_millicores;
    }
    if (total == 0) return Ratio::whole(1);
    return Ratio(used, total);
}

void FreeList::set_outage(std::string_view machine_id, TimeUnit from, std::optional<TimeUnit> until) {
    const std::size_t mi = index_of(machine_id);
    const TimeWindow outage{from, until.value_or(kForever)};
    for (auto row = used_.lower_bound(from); row != used_.end() && row->first < outage.end(); ++row) {
        if (!(row->second[mi] == ResourceVector{}))
            throw Error(ErrorCode::OverCommit, std::string(machine_id) + " still hosts work at unit " +
                                                   std::to_string(row->first));
    }
    outages_[mi].push_back(outage);
}

void FreeList::slide_to(TimeUnit start) {
    if (start <= horizon_.start()) return;
    horizon_ = TimeWindow{start, start + horizon_.duration()};
    used_.erase(used_.begin(), used_.lower_bound(start));
    for (auto it = ledger_.begin(); it != ledger_.end();) {
        auto& segs = it->second;
        segs.erase(std::remove_if(segs.begin(), segs.end(),
                                  [&](const CommittedSegment& s) { return s.window.end() < start; }),
                   segs.end());
        it = segs.empty() ? ledger_.erase(it) : std::next(it);
    }
}

std::string FreeList::dump(const TimeWindow& range) const {
    std::ostringstream out;
    for (TimeUnit t = range.start(); t < range.end(); ++t) {
        for (const auto& m : machines_) {
            const ResourceVector rem = remaining(t, m.machine_id);
            out << t << ' ' << m.machine_id << ' ' << rem.cpu_millicores << ' ' << rem.mem_mb << '\n';
        }
    }
    return out.str();
}

bool operator==(const FreeList& a, const FreeList& b) {
    return a.machines_ == b.machines_ && a.horizon_ == b.horizon_ && a.used_ == b.used_ && a.ledger_ == b.ledger_ &&
           a.outages_ == b.outages_;
}

} // namespace bene
