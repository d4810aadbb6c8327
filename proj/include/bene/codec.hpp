#pragma once

// Canonical line encoding shared by traces, stores, logs and the wire
// protocol: one record per line, space separated `key=value` pairs in a
// fixed field order, first pair always `record=<type>`. Values are
// percent-escaped for '%', ' ', '=', '\t', '\r' and '\n'.

#include "bene/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bene {

class KvRecord {
public:
    KvRecord() = default;
    explicit KvRecord(std::string_view type) { add("record", type); }

    KvRecord& add(std::string_view key, std::string_view value);
    KvRecord& add(std::string_view key, std::int64_t value);
    KvRecord& add(std::string_view key, double value);

    [[nodiscard]] std::string type() const { return get("record"); }
    [[nodiscard]] bool has(std::string_view key) const;
    [[nodiscard]] std::optional<std::string> find(std::string_view key) const;
    /// Throws Error(ParseError) when the key is missing.
    [[nodiscard]] std::string get(std::string_view key) const;
    [[nodiscard]] std::int64_t get_int(std::string_view key) const;
    [[nodiscard]] std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    [[nodiscard]] double get_double(std::string_view key) const;
    [[nodiscard]] double get_double(std::string_view key, double fallback) const;

    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& fields() const { return fields_; }

    [[nodiscard]] std::string encode() const;
    static KvRecord parse(std::string_view line);

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

/// Reads every non-blank, non-'#' line of a stream as a record.
std::vector<KvRecord> read_records(std::istream& in);
std::vector<KvRecord> read_records_file(const std::string& path);

std::int64_t parse_int(std::string_view s);
double parse_double(std::string_view s);
/// Shortest round-trip representation.
std::string format_double(double v);

// Domain codecs -------------------------------------------------------------

KvRecord to_record(const Request& r);
Request request_from_record(const KvRecord& rec);

std::string encode_placements(const std::vector<Placement>& ps);
std::vector<Placement> decode_placements(std::string_view s);

KvRecord to_record(const Allocation& a);
Allocation allocation_from_record(const KvRecord& rec);

} // namespace bene
