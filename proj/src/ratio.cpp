#include "bene/ratio.hpp"

#include "bene/error.hpp"

#include <charconv>
#include <numeric>

namespace bene {

Ratio::Ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g ? num / g : 0;
    den_ = g ? den / g : 1;
}

namespace {

std::int64_t parse_digits(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw Error(ErrorCode::ParseError, "bad number '" + std::string(whole) + "'");
    return v;
}

} // namespace

Ratio Ratio::parse(std::string_view text) {
    if (text.empty()) throw Error(ErrorCode::ParseError, "empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Ratio(parse_digits(text.substr(0, slash), text), parse_digits(text.substr(slash + 1), text));
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return Ratio(parse_digits(text, text), 1);
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (frac_part.size() > 12) throw Error(ErrorCode::ParseError, "too many decimals in '" + std::string(text) + "'");
    const bool negative = !int_part.empty() && int_part.front() == '-';
    if (negative) int_part.remove_prefix(1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
    const std::int64_t ip = int_part.empty() ? 0 : parse_digits(int_part, text);
    const std::int64_t fp = frac_part.empty() ? 0 : parse_digits(frac_part, text);
    const std::int64_t num = ip * den + fp;
    return Ratio(negative ? -num : num, den);
}

std::string Ratio::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

} // namespace bene
