#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "nullhom/errors.hpp"

namespace nullhom {

// Exact rational on 64-bit numerator/denominator, normalized with den > 0.
// Intermediate products run in 128 bits; results that do not fit back into
// 64 bits throw OverflowError rather than silently wrapping.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const { return Rational(-num_, den_, already_normalized{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return from_i128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw OverflowError("rational division by zero");
        return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 lhs = i128(a.num_) * b.den_;
        __int128 rhs = i128(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    // floor(*this / d) as an integer, d > 0.
    long long floor_div(const Rational& d) const {
        __int128 n = i128(num_) * d.den_;
        __int128 m = i128(den_) * d.num_;
        __int128 q = n / m;
        if ((n % m) != 0 && ((n < 0) != (m < 0))) --q;
        return narrow(q);
    }

    // Representative of *this modulo d in [0, d); d > 0.
    Rational mod(const Rational& d) const { return *this - d * Rational(floor_div(d)); }

    // gcd of |a| and |b|: gcd(p/q, r/s) = gcd(p*s, r*q) / (q*s).
    static Rational gcd(const Rational& a, const Rational& b) {
        Rational x = a.abs(), y = b.abs();
        if (x.is_zero()) return y;
        if (y.is_zero()) return x;
        __int128 p = i128(x.num_) * y.den_;
        __int128 r = i128(y.num_) * x.den_;
        __int128 g = gcd_i128(p, r);
        return from_i128(g, i128(x.den_) * y.den_);
    }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    struct already_normalized {};
    Rational(long long n, long long d, already_normalized) : num_(n), den_(d) {}

    static __int128 i128(long long v) { return static_cast<__int128>(v); }
    static constexpr __int128 kMax = static_cast<__int128>(INT64_MAX);
    static constexpr __int128 kMin = static_cast<__int128>(INT64_MIN);

    static long long narrow(__int128 v) {
        if (v > kMax || v < kMin) throw OverflowError("rational arithmetic overflow");
        return static_cast<long long>(v);
    }

    static __int128 gcd_i128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational from_i128(__int128 n, __int128 d) {
        if (d == 0) throw OverflowError("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd_i128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        return Rational(narrow(n), narrow(d), already_normalized{});
    }

    void normalize() { *this = from_i128(i128(num_), i128(den_)); }

    long long num_;
    long long den_;
};

}  // namespace nullhom
