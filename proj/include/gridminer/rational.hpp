#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gridminer {

/// Exact non-overflowing (for desk-scale inputs) fraction, always kept in
/// lowest terms with a positive denominator. Comparisons go through 128-bit
/// cross-multiplication so ties between supports or gini values are exact.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    /// Accepts "3/4", "0.25", "1", "2.5e-1". Throws ParseError otherwise.
    static Rational parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// "n/d", or "n" when the denominator is 1.
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace gridminer
