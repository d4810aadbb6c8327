#include "bene/codec.hpp"

#include "bene/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace bene {

namespace {

bool needs_escape(char c) { return c == '%' || c == ' ' || c == '=' || c == '\t' || c == '\n' || c == '\r'; }

std::string escape(std::string_view v) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(v.size());
    for (char c : v) {
        if (needs_escape(c)) {
            const auto u = static_cast<unsigned char>(c);
            out.push_back('%');
            out.push_back(kHex[u >> 4]);
            out.push_back(kHex[u & 0xF]);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::string unescape(std::string_view v) {
    std::string out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != '%') {
            out.push_back(v[i]);
            continue;
        }
        if (i + 2 >= v.size()) throw Error(ErrorCode::ParseError, "truncated escape");
        const int hi = hex_value(v[i + 1]);
        const int lo = hex_value(v[i + 2]);
        if (hi < 0 || lo < 0) throw Error(ErrorCode::ParseError, "bad escape in '" + std::string(v) + "'");
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    while (true) {
        const auto pos = s.find(sep, begin);
        parts.push_back(s.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
        if (pos == std::string_view::npos) break;
        begin = pos + 1;
    }
    return parts;
}

} // namespace

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::ParseError, "expected integer, got '" + std::string(s) + "'");
    return v;
}

double parse_double(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::ParseError, "expected number, got '" + std::string(s) + "'");
    return v;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

KvRecord& KvRecord::add(std::string_view key, std::string_view value) {
    fields_.emplace_back(std::string(key), std::string(value));
    return *this;
}

KvRecord& KvRecord::add(std::string_view key, std::int64_t value) { return add(key, std::to_string(value)); }

KvRecord& KvRecord::add(std::string_view key, double value) { return add(key, format_double(value)); }

bool KvRecord::has(std::string_view key) const { return find(key).has_value(); }

std::optional<std::string> KvRecord::find(std::string_view key) const {
    for (const auto& [k, v] : fields_)
        if (k == key) return v;
    return std::nullopt;
}

std::string KvRecord::get(std::string_view key) const {
    auto v = find(key);
    if (!v) throw Error(ErrorCode::ParseError, "missing field '" + std::string(key) + "'");
    return *v;
}

std::int64_t KvRecord::get_int(std::string_view key) const { return parse_int(get(key)); }

std::int64_t KvRecord::get_int(std::string_view key, std::int64_t fallback) const {
    auto v = find(key);
    return v ? parse_int(*v) : fallback;
}

double KvRecord::get_double(std::string_view key) const { return parse_double(get(key)); }

double KvRecord::get_double(std::string_view key, double fallback) const {
    auto v = find(key);
    return v ? parse_double(*v) : fallback;
}

std::string KvRecord::encode() const {
    std::string out;
    for (const auto& [k, v] : fields_) {
        if (!out.empty()) out.push_back(' ');
        out += escape(k);
        out.push_back('=');
        out += escape(v);
    }
    return out;
}

KvRecord KvRecord::parse(std::string_view line) {
    KvRecord rec;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    for (std::string_view token : split(line, ' ')) {
        if (token.empty()) continue;
        const auto eq = token.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::ParseError, "token without '=': '" + std::string(token) + "'");
        rec.fields_.emplace_back(unescape(token.substr(0, eq)), unescape(token.substr(eq + 1)));
    }
    return rec;
}

std::vector<KvRecord> read_records(std::istream& in) {
    std::vector<KvRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(KvRecord::parse(line));
    }
    return out;
}

std::vector<KvRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::StorageFailure, "cannot open " + path);
    return read_records(in);
}

KvRecord to_record(const Request& r) {
    KvRecord rec("request");
    rec.add("id", r.id)
        .add("enterprise", r.enterprise)
        .add("kind", to_string(r.kind))
        .add("count", r.count)
        .add("ctype", to_string(r.ctype))
        .add("start", r.window.start())
        .add("end", r.window.end())
        .add("max_latency_ms", r.slo.max_latency_ms)
        .add("min_throughput_rps", r.slo.min_throughput_rps)
        .add("recurrence", to_string(r.recurrence))
        .add("submitted_at", r.submitted_at);
    if (!r.parent_id.empty()) rec.add("parent", r.parent_id);
    return rec;
}

Request request_from_record(const KvRecord& rec) {
    Request r;
    r.id = rec.get("id");
    r.enterprise = rec.get("enterprise");
    r.kind = parse_request_kind(rec.get("kind"));
    r.count = rec.get_int("count");
    r.ctype = parse_container_type(rec.get("ctype"));
    r.window = TimeWindow(rec.get_int("start"), rec.get_int("end"));
    r.slo = Slo{rec.get_int("max_latency_ms"), rec.get_int("min_throughput_rps")};
    r.recurrence = parse_recurrence(rec.find("recurrence").value_or("none"));
    r.submitted_at = rec.get_int("submitted_at", 0);
    r.parent_id = rec.find("parent").value_or("");
    return r;
}

std::string encode_placements(const std::vector<Placement>& ps) {
    std::string out;
    for (const auto& p : ps) {
        if (!out.empty()) out.push_back(',');
        out += p.machine_id;
        out.push_back(':');
        out += to_string(p.ctype);
        out.push_back(':');
        out += std::to_string(p.count);
    }
    return out;
}

std::vector<Placement> decode_placements(std::string_view s) {
    std::vector<Placement> out;
    if (s.empty()) return out;
    for (std::string_view item : split(s, ',')) {
        auto parts = split(item, ':');
        if (parts.size() != 3) throw Error(ErrorCode::ParseError, "bad placement '" + std::string(item) + "'");
        out.push_back(Placement{std::string(parts[0]), parse_container_type(parts[1]), parse_int(parts[2])});
    }
    return out;
}

KvRecord to_record(const Allocation& a) {
    KvRecord rec("allocation");
    rec.add("id", a.id)
        .add("request", a.request_id)
        .add("enterprise", a.enterprise)
        .add("kind", to_string(a.kind))
        .add("count", a.count)
        .add("ctype", to_string(a.ctype))
        .add("placements", encode_placements(a.placements))
        .add("start", a.window.start())
        .add("end", a.window.end())
        .add("preemptible", std::int64_t{a.preemptible ? 1 : 0})
        .add("quote", a.quote.micros)
        .add("state", to_string(a.state));
    if (a.ended_at) rec.add("ended_at", *a.ended_at);
    if (!a.losses.empty()) {
        std::string losses;
        for (const auto& l : a.losses) {
            if (!losses.empty()) losses.push_back(',');
            losses += std::to_string(l.at) + ":" + std::to_string(l.containers);
        }
        rec.add("losses", losses);
    }
    return rec;
}

Allocation allocation_from_record(const KvRecord& rec) {
    Allocation a;
    a.id = rec.get("id");
    a.request_id = rec.get("request");
    a.enterprise = rec.get("enterprise");
    a.kind = parse_request_kind(rec.get("kind"));
    a.count = rec.get_int("count");
    a.ctype = parse_container_type(rec.get("ctype"));
    a.placements = decode_placements(rec.get("placements"));
    a.window = TimeWindow(rec.get_int("start"), rec.get_int("end"));
    a.preemptible = rec.get_int("preemptible") != 0;
    a.quote = Money{rec.get_int("quote")};
    a.state = parse_allocation_state(rec.get("state"));
    if (rec.has("ended_at")) a.ended_at = rec.get_int("ended_at");
    if (auto losses = rec.find("losses")) {
        for (std::string_view item : split(*losses, ',')) {
            auto parts = split(item, ':');
            if (parts.size() != 2) throw Error(ErrorCode::ParseError, "bad loss '" + std::string(item) + "'");
            a.losses.push_back(ServiceLoss{parse_int(parts[0]), parse_int(parts[1])});
        }
    }
    return a;
}

} // namespace bene
