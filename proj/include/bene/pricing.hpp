#pragma once

#include "bene/ratio.hpp"
#include "bene/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bene {

struct PriceBook {
    /// Price of one small container for one time unit.
    Money base_rate{1'000'000};
    /// Real-time rate as a fraction of base_rate on an idle MDC; in (0, 1].
    Ratio realtime_floor{1, 4};
};

/// Throws InvalidConfig unless base_rate > 0 and 0 < realtime_floor <= 1.
void validate(const PriceBook& book);

/// base_rate x count x type factor x duration, exact.
Money quote_reserved(const PriceBook& book, std::int64_t count, ContainerType ctype,
                     const TimeWindow& window);

/// Per container-unit rate for real-time work:
/// floor(base_rate x (floor + (1 - floor) x utilization)).
Money realtime_rate(const PriceBook& book, const Ratio& utilization);

Money quote_realtime(const PriceBook& book, std::int64_t count, ContainerType ctype,
                     const TimeWindow& window, const Ratio& utilization_at_start);

struct InvoiceLine {
    TimeWindow slice{0, 1};
    std::int64_t containers = 0;
    /// Value of one container for one unit in this slice.
    Money unit_value;
    [[nodiscard]] Money amount() const;
    friend bool operator==(const InvoiceLine&, const InvoiceLine&) = default;
};

struct Invoice {
    std::string request_id;
    std::string allocation_id;
    std::string enterprise;
    RequestKind kind = RequestKind::Reserved;
    AllocationState outcome = AllocationState::Stopped;
    Money quoted;
    Money charged;
    /// quoted - charged: value of units that were not served.
    Money credits;
    std::vector<InvoiceLine> lines;
    friend bool operator==(const Invoice&, const Invoice&) = default;
};

/// Settles an allocation in a terminal state. Served container-units are
/// billed at the quoted per container-unit value; everything else becomes
/// a credit. Throws NonTerminalState.
Invoice settle(const Allocation& a);

std::string encode_invoice(const Invoice& inv);
Invoice decode_invoice(const std::string& line);

} // namespace bene
