#pragma once

// Scalar used throughout the library: an exact GMP rational by default, a
// double once any irrational quantity (generic angle, logarithm, square root)
// has entered the computation. Mixed arithmetic degrades to double.

#include <gmpxx.h>

#include <cmath>
#include <cstdio>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "symlab/error.hpp"

namespace symlab {

enum class arithmetic_mode { exact, approximate };

class Number {
public:
    Number() : value_(mpq_class(0)) {}
    Number(int v) : value_(mpq_class(v)) {}
    Number(long v) : value_(mpq_class(v)) {}
    Number(long long v) : value_(mpq_class(static_cast<long>(v))) {}
    Number(unsigned v) : value_(mpq_class(v)) {}
    Number(unsigned long v) : value_(mpq_class(v)) {}
    Number(const mpq_class& q) : value_(q) { std::get<mpq_class>(value_).canonicalize(); }
    Number(mpq_class&& q) : value_(std::move(q)) { std::get<mpq_class>(value_).canonicalize(); }
    Number(const mpz_class& z) : value_(mpq_class(z)) {}

    /// A floating value. Implicit construction from double is deliberately
    /// absent so that exactness is never lost by accident.
    static Number approx(double v) {
        Number n;
        n.value_ = v;
        return n;
    }

    static Number ratio(long num, long den) {
        if (den == 0) throw error("zero denominator");
        return Number(mpq_class(num, den));
    }

    bool is_exact() const { return std::holds_alternative<mpq_class>(value_); }
    arithmetic_mode mode() const { return is_exact() ? arithmetic_mode::exact : arithmetic_mode::approximate; }

    const mpq_class& rational() const {
        if (!is_exact()) throw error("rational() requested from a floating Number");
        return std::get<mpq_class>(value_);
    }

    double to_double() const {
        if (is_exact()) return std::get<mpq_class>(value_).get_d();
        return std::get<double>(value_);
    }

    /// Force floating representation.
    Number to_approx() const { return approx(to_double()); }

    int sign() const {
        if (is_exact()) return sgn(std::get<mpq_class>(value_));
        const double d = std::get<double>(value_);
        return (d > 0) - (d < 0);
    }

    bool is_zero() const { return sign() == 0; }

    bool is_integer() const {
        if (is_exact()) return std::get<mpq_class>(value_).get_den() == 1;
        const double d = std::get<double>(value_);
        return std::isfinite(d) && std::floor(d) == d;
    }

    Number operator-() const {
        if (is_exact()) return Number(mpq_class(-std::get<mpq_class>(value_)));
        return approx(-std::get<double>(value_));
    }

    friend Number operator+(const Number& a, const Number& b) {
        if (a.is_exact() && b.is_exact()) return Number(mpq_class(a.q() + b.q()));
        return approx(a.to_double() + b.to_double());
    }
    friend Number operator-(const Number& a, const Number& b) {
        if (a.is_exact() && b.is_exact()) return Number(mpq_class(a.q() - b.q()));
        return approx(a.to_double() - b.to_double());
    }
    friend Number operator*(const Number& a, const Number& b) {
        if (a.is_exact() && b.is_exact()) return Number(mpq_class(a.q() * b.q()));
        // 0 * anything stays an exact zero; keeps empty-set measures exact
        if (a.is_exact() && a.is_zero()) return a;
        if (b.is_exact() && b.is_zero()) return b;
        return approx(a.to_double() * b.to_double());
    }
    friend Number operator/(const Number& a, const Number& b) {
        if (b.is_zero()) throw error("division by zero");
        if (a.is_exact() && b.is_exact()) return Number(mpq_class(a.q() / b.q()));
        return approx(a.to_double() / b.to_double());
    }

    Number& operator+=(const Number& o) { return *this = *this + o; }
    Number& operator-=(const Number& o) { return *this = *this - o; }
    Number& operator*=(const Number& o) { return *this = *this * o; }
    Number& operator/=(const Number& o) { return *this = *this / o; }

    friend bool operator==(const Number& a, const Number& b) {
        if (a.is_exact() && b.is_exact()) return a.q() == b.q();
        return a.to_double() == b.to_double();
    }
    friend std::partial_ordering operator<=>(const Number& a, const Number& b) {
        if (a.is_exact() && b.is_exact()) {
            const int c = cmp(a.q(), b.q());
            return c < 0 ? std::partial_ordering::less
                 : c > 0 ? std::partial_ordering::greater
                         : std::partial_ordering::equivalent;
        }
        return a.to_double() <=> b.to_double();
    }

    /// "p/q" (or "p") for exact values, shortest round-trip decimal otherwise.
    std::string str() const;

    friend std::ostream& operator<<(std::ostream& os, const Number& n) { return os << n.str(); }

private:
    const mpq_class& q() const { return std::get<mpq_class>(value_); }

    std::variant<mpq_class, double> value_;
};

inline Number abs(const Number& x) { return x.sign() < 0 ? -x : x; }

inline Number min(const Number& a, const Number& b) { return b < a ? b : a; }
inline Number max(const Number& a, const Number& b) { return a < b ? b : a; }

inline Number floor(const Number& x) {
    if (x.is_exact()) {
        mpz_class z;
        mpz_fdiv_q(z.get_mpz_t(), x.rational().get_num_mpz_t(), x.rational().get_den_mpz_t());
        return Number(z);
    }
    return Number::approx(std::floor(x.to_double()));
}

/// x mod m into [0, m) for m > 0.
inline Number mod(const Number& x, const Number& m) {
    return x - floor(x / m) * m;
}

inline Number pow_int(Number base, long exponent) {
    if (exponent < 0) return Number(1) / pow_int(std::move(base), -exponent);
    Number result(1);
    while (exponent > 0) {
        if (exponent & 1) result *= base;
        base *= base;
        exponent >>= 1;
    }
    return result;
}

inline std::string Number::str() const {
    if (is_exact()) return q().get_str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(value_));
    return buf;
}

/// Parses "p/q", an integer, or a plain decimal ("0.25") as an exact rational;
/// anything with an exponent, "inf" or "nan" parses as a floating value.
inline Number parse_number(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw config_error("empty number");
    const bool floating = s.find_first_of("eEnN") != std::string::npos;
    if (floating) {
        try {
            std::size_t used = 0;
            const double d = std::stod(s, &used);
            if (used != s.size()) throw config_error("malformed number: " + s);
            return Number::approx(d);
        } catch (const std::logic_error&) {
            throw config_error("malformed number: " + s);
        }
    }
    std::string digits = s;
    long scale = 0;
    if (const auto dot = s.find('.'); dot != std::string::npos) {
        if (s.find('/') != std::string::npos) throw config_error("malformed number: " + s);
        digits = s.substr(0, dot) + s.substr(dot + 1);
        scale = static_cast<long>(s.size() - dot - 1);
        if (digits.empty() || digits == "-" || digits == "+") throw config_error("malformed number: " + s);
    }
    if (!digits.empty() && digits[0] == '+') digits.erase(0, 1);
    mpq_class q;
    if (q.set_str(digits, 10) != 0) throw config_error("malformed number: " + s);
    if (q.get_den() == 0) throw config_error("zero denominator: " + s);
    q.canonicalize();
    if (scale > 0) {
        mpz_class ten_pow;
        mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale));
        q /= ten_pow;
    }
    return Number(std::move(q));
}

} // namespace symlab
