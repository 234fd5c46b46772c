#pragma once

// =============================================================================
// Exact rational arithmetic over arbitrary-size integers.
//
// Extrapolation weights are derived exactly and only converted to a floating
// type at the moment a scheme is instantiated at a working precision; this
// keeps the coefficient pipeline free of rounding by construction.
// =============================================================================

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

#include "mpe/errors.hpp"
#include "mpe/real.hpp"

namespace mpe {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational in lowest terms with positive denominator.
class Rational {
public:
    Rational() : num_(0), den_(1) {}

    Rational(long long value) : num_(value), den_(1) {} // NOLINT(google-explicit-constructor)

    Rational(BigInt numerator, BigInt denominator)
        : num_(std::move(numerator)), den_(std::move(denominator)) {
        normalize();
    }

    [[nodiscard]] const BigInt& numerator() const noexcept { return num_; }
    [[nodiscard]] const BigInt& denominator() const noexcept { return den_; }

    [[nodiscard]] bool is_zero() const noexcept { return num_ == 0; }
    [[nodiscard]] int sign() const noexcept { return num_ == 0 ? 0 : (num_ > 0 ? 1 : -1); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) {
            throw SingularityError("rational division by zero");
        }
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }

    Rational operator-() const { return Rational(-num_, den_, NormalizedTag{}); }

    Rational& operator+=(const Rational& other) { return *this = *this + other; }
    Rational& operator-=(const Rational& other) { return *this = *this - other; }
    Rational& operator*=(const Rational& other) { return *this = *this * other; }
    Rational& operator/=(const Rational& other) { return *this = *this / other; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) noexcept { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }

    /// Canonical "numerator/denominator" rendering, e.g. "-16/15" or "1/1".
    [[nodiscard]] std::string to_string() const {
        return num_.str() + "/" + den_.str();
    }

private:
    struct NormalizedTag {};

    Rational(BigInt numerator, BigInt denominator, NormalizedTag)
        : num_(std::move(numerator)), den_(std::move(denominator)) {}

    void normalize() {
        if (den_ == 0) {
            throw SingularityError("rational with zero denominator");
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        BigInt g = gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) {
            den_ = 1;
        }
    }

    BigInt num_;
    BigInt den_;
};

/// Converts an exact rational to the working scalar. The division is carried
/// out in the extended type first: its exponent range comfortably covers the
/// astronomically large numerators/denominators produced at high order, so the
/// result is correct to the target's last digit even when the parts themselves
/// would overflow a double.
template <typename T>
[[nodiscard]] inline T rational_to_real(const Rational& r) {
    const ExtendedReal wide =
        ExtendedReal(r.numerator()) / ExtendedReal(r.denominator());
    if (!boost::multiprecision::isfinite(wide)) {
        throw OverflowError("rational magnitude exceeds extended exponent range");
    }
    const T value = static_cast<T>(wide);
    using std::isfinite;
    if (!isfinite(value)) {
        throw OverflowError("rational magnitude exceeds target exponent range");
    }
    return value;
}

} // namespace mpe
