#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace qet {

/// Exact rational with 64-bit numerator/denominator, always reduced and with
/// a positive denominator. Intermediate products use 128-bit arithmetic and
/// overflow of the reduced result throws.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_{value}, den_{1} {}  // NOLINT
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const __int128 n = static_cast<__int128>(a.num_) * b.den_ +
                           static_cast<__int128>(b.num_) * a.den_;
        const __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational{-b.num_, b.den_}; }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from_wide(static_cast<__int128>(a.num_) * b.den_,
                         static_cast<__int128>(a.den_) * b.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        os << r.num_;
        if (r.den_ != 1) os << '/' << r.den_;
        return os;
    }

private:
    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const __int128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("Rational: overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    void assign(std::int64_t num, std::int64_t den) {
        *this = from_wide(num, den);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace qet
