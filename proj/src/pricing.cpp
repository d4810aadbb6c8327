#include "bene/pricing.hpp"

#include "bene/codec.hpp"
#include "bene/error.hpp"

#include <algorithm>
#include <limits>

namespace bene {

namespace {

std::int64_t checked(__int128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw Error(ErrorCode::Overflow, what);
    return static_cast<std::int64_t>(v);
}

Money shape_product(Money rate, std::int64_t count, ContainerType ctype, const TimeWindow& window) {
    const __int128 v = static_cast<__int128>(rate.micros) * count * type_factor(ctype) * window.duration();
    return Money{checked(v, "quote exceeds 64-bit micros")};
}

} // namespace

void validate(const PriceBook& book) {
    if (book.base_rate.micros <= 0) throw Error(ErrorCode::InvalidConfig, "base rate must be positive");
    if (book.realtime_floor <= Ratio::whole(0) || book.realtime_floor > Ratio::whole(1))
        throw Error(ErrorCode::InvalidConfig, "real-time floor must lie in (0, 1]");
}

Money quote_reserved(const PriceBook& book, std::int64_t count, ContainerType ctype, const TimeWindow& window) {
    return shape_product(book.base_rate, count, ctype, window);
}

Money realtime_rate(const PriceBook& book, const Ratio& utilization) {
    if (utilization < Ratio::whole(0) || utilization > Ratio::whole(1))
        throw Error(ErrorCode::UtilizationOutOfRange, utilization.to_string());
    // base * (f + (1 - f) * u) with f = fn/fd and u = un/ud
    const __int128 fn = book.realtime_floor.num();
    const __int128 fd = book.realtime_floor.den();
    const __int128 un = utilization.num();
    const __int128 ud = utilization.den();
    const __int128 num = static_cast<__int128>(book.base_rate.micros) * (fn * ud + (fd - fn) * un);
    const __int128 den = fd * ud;
    return Money{checked(num / den, "real-time rate")};
}

Money quote_realtime(const PriceBook& book, std::int64_t count, ContainerType ctype, const TimeWindow& window,
                     const Ratio& utilization_at_start) {
    return shape_product(realtime_rate(book, utilization_at_start), count, ctype, window);
}

Money InvoiceLine::amount() const {
    const __int128 v = static_cast<__int128>(unit_value.micros) * containers * slice.duration();
    return Money{checked(v, "invoice line")};
}

Invoice settle(const Allocation& a) {
    if (!is_terminal(a.state) || !a.ended_at)
        throw Error(ErrorCode::NonTerminalState, a.id + " is " + std::string(to_string(a.state)));
    Invoice inv;
    inv.request_id = a.request_id;
    inv.allocation_id = a.id;
    inv.enterprise = a.enterprise;
    inv.kind = a.kind;
    inv.outcome = a.state;
    inv.quoted = a.quote;

    const std::int64_t container_units = a.count * a.window.duration();
    const Money unit_value{a.quote.micros / container_units};
    const TimeUnit served_until = std::clamp(*a.ended_at, a.window.start(), a.window.end());

    std::vector<TimeUnit> cuts{a.window.start(), served_until};
    for (const auto& loss : a.losses) cuts.push_back(std::clamp(loss.at, a.window.start(), served_until));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        std::int64_t containers = a.count;
        for (const auto& loss : a.losses)
            if (std::clamp(loss.at, a.window.start(), served_until) <= cuts[i]) containers -= loss.containers;
        if (containers <= 0) continue;
        InvoiceLine line{TimeWindow{cuts[i], cuts[i + 1]}, containers, unit_value};
        inv.charged += line.amount();
        inv.lines.push_back(line);
    }
    inv.credits = inv.quoted - inv.charged;
    return inv;
}

std::string encode_invoice(const Invoice& inv) {
    std::string lines;
    for (const auto& l : inv.lines) {
        if (!lines.empty()) lines.push_back(',');
        lines += std::to_string(l.slice.start()) + ":" + std::to_string(l.slice.end()) + ":" +
                 std::to_string(l.containers) + ":" + std::to_string(l.unit_value.micros);
    }
    KvRecord rec("invoice");
    rec.add("request", inv.request_id)
        .add("allocation", inv.allocation_id)
        .add("enterprise", inv.enterprise)
        .add("kind", to_string(inv.kind))
        .add("outcome", to_string(inv.outcome))
        .add("quoted", inv.quoted.micros)
        .add("charged", inv.charged.micros)
        .add("credits", inv.credits.micros)
        .add("lines", lines);
    return rec.encode();
}

Invoice decode_invoice(const std::string& line) {
    const KvRecord rec = KvRecord::parse(line);
    if (rec.type() != "invoice") throw Error(ErrorCode::ParseError, "not an invoice record");
    Invoice inv;
    inv.request_id = rec.get("request");
    inv.allocation_id = rec.get("allocation");
    inv.enterprise = rec.get("enterprise");
    inv.kind = parse_request_kind(rec.get("kind"));
    inv.outcome = parse_allocation_state(rec.get("outcome"));
    inv.quoted = Money{rec.get_int("quoted")};
    inv.charged = Money{rec.get_int("charged")};
    inv.credits = Money{rec.get_int("credits")};
    const std::string lines = rec.get("lines");
    std::size_t pos = 0;
    while (pos < lines.size()) {
        auto next = lines.find(',', pos);
        if (next == std::string::npos) next = lines.size();
        const std::string item = lines.substr(pos, next - pos);
        std::int64_t f[4];
        std::size_t p = 0;
        for (int i = 0; i < 4; ++i) {
            auto colon = item.find(':', p);
            if (colon == std::string::npos) colon = item.size();
            f[i] = parse_int(std::string_view(item).substr(p, colon - p));
            p = colon + 1;
        }
        inv.lines.push_back(InvoiceLine{TimeWindow{f[0], f[1]}, f[2], Money{f[3]}});
        pos = next + 1;
    }
    return inv;
}

} // namespace bene
