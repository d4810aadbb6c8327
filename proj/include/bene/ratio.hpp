#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bene {

/// Exact non-negative rational, always stored reduced with a positive
/// denominator. Used for utilization, discount floors, thresholds and
/// headroom so that every money and capacity decision is reproducible.
class Ratio {
public:
    constexpr Ratio() = default;
    Ratio(std::int64_t num, std::int64_t den);

    static Ratio whole(std::int64_t n) { return Ratio(n, 1); }

    /// Accepts "3", "0.25", "1.10" or "1/4".
    static Ratio parse(std::string_view text);

    [[nodiscard]] std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] std::int64_t den() const noexcept { return den_; }
    [[nodiscard]] double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Ratio& a, const Ratio& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) noexcept {
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace bene
