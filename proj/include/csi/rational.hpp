#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "csi/error.hpp"

namespace csi {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Always kept in lowest terms with a positive
/// denominator; every metric in this library is computed and compared
/// through this type, never through floating point.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long long n) : v_(n) {} // NOLINT: implicit by design for literals
    Rational(long long num, long long den) : Rational(BigInt(num), BigInt(den)) {}
    Rational(const BigInt& num, const BigInt& den) {
        if (den == 0)
            throw Error("rational with zero denominator");
        v_ = boost::multiprecision::cpp_rational(num, den);
    }

    BigInt numerator() const { return boost::multiprecision::numerator(v_); }
    BigInt denominator() const { return boost::multiprecision::denominator(v_); }

    /// Renders as "p/q" in lowest terms, denominator always present ("4/1").
    std::string str() const {
        return numerator().str() + "/" + denominator().str();
    }

    /// Accepts "p/q" or a bare integer "p"; q must be positive.
    static std::optional<Rational> parse(std::string_view text) {
        auto digits = [](std::string_view s) {
            if (s.empty())
                return false;
            for (char c : s)
                if (c < '0' || c > '9')
                    return false;
            return true;
        };
        std::string_view num = text;
        std::string_view den = "1";
        if (auto pos = text.find('/'); pos != std::string_view::npos) {
            num = text.substr(0, pos);
            den = text.substr(pos + 1);
        }
        bool neg = !num.empty() && num.front() == '-';
        if (neg)
            num.remove_prefix(1);
        if (!digits(num) || !digits(den))
            return std::nullopt;
        BigInt n{std::string(num)};
        BigInt d{std::string(den)};
        if (d == 0)
            return std::nullopt;
        if (neg)
            n = -n;
        return Rational(n, d);
    }

    Rational operator-() const { return Rational(-v_); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.v_ == 0)
            throw Error("rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

private:
    explicit Rational(boost::multiprecision::cpp_rational v) : v_(std::move(v)) {}

    boost::multiprecision::cpp_rational v_;
};

} // namespace csi
