#include "gridminer/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "gridminer/errors.hpp"

namespace gridminer {

namespace {

__int128 wide_gcd(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = wide_gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kMax || num < -kMax || den > kMax) throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational Rational::parse(std::string_view text) {
    auto fail = [&] { return ParseError("", "not a number: '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::int64_t n = 0, d = 0;
        auto lhs = text.substr(0, slash), rhs = text.substr(slash + 1);
        auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), n);
        auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), d);
        if (r1.ec != std::errc{} || r1.ptr != lhs.data() + lhs.size() || r2.ec != std::errc{} ||
            r2.ptr != rhs.data() + rhs.size() || d == 0)
            throw fail();
        return Rational(n, d);
    }

    // decimal with optional exponent, accumulated exactly
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
    __int128 mantissa = 0;
    int scale = 0;
    int digits = 0;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            if (++digits > 18) throw fail();
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) ++scale;
        } else {
            break;
        }
    }
    if (digits == 0) throw fail();
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw fail();
        int exponent = 0;
        auto rest = text.substr(i + 1);
        if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
        auto r = std::from_chars(rest.data(), rest.data() + rest.size(), exponent);
        if (r.ec != std::errc{} || r.ptr != rest.data() + rest.size()) throw fail();
        scale -= exponent;
    }
    __int128 den = 1;
    while (scale > 0) {
        den *= 10;
        --scale;
        if (den > kMax) throw fail();
    }
    while (scale < 0) {
        mantissa *= 10;
        ++scale;
        if (mantissa > kMax) throw fail();
    }
    return from_wide(negative ? -mantissa : mantissa, den);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
}

}  // namespace gridminer
