#pragma once

// =============================================================================
// Precision policy.
//
// Every algorithm in the library is templated on the working scalar type.
// Two instantiations are supported end to end:
//
//   * double            -- native IEEE binary64 (~16 significant digits)
//   * ExtendedReal      -- software binary float with 33 significant digits
//                          (113-bit significand, wide exponent range)
//
// The wide exponent range of ExtendedReal also makes it the safe intermediate
// for converting exact rationals with very large numerators/denominators to
// any floating type.
// =============================================================================

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "mpe/errors.hpp"

namespace mpe {

/// Extended-precision scalar: 113-bit significand, ~33 decimal digits.
using ExtendedReal = boost::multiprecision::cpp_bin_float_quad;

/// Run-wide choice of working scalar.
enum class Precision {
    Double,
    Extended,
};

/// Maps a Precision tag to the concrete scalar type.
template <Precision P>
struct RealSelector;

template <>
struct RealSelector<Precision::Double> {
    using type = double;
};

template <>
struct RealSelector<Precision::Extended> {
    using type = ExtendedReal;
};

template <Precision P>
using RealOf = typename RealSelector<P>::type;

namespace detail {

static_assert(std::numeric_limits<ExtendedReal>::digits10 >= 32,
              "extended scalar must carry at least 32 decimal digits");
static_assert(std::numeric_limits<double>::is_iec559,
              "double must be IEEE binary64");

} // namespace detail

/// Machine epsilon of the scalar type.
template <typename T>
[[nodiscard]] inline T real_epsilon() {
    return std::numeric_limits<T>::epsilon();
}

/// Human-readable precision tag, used in CSV metadata.
template <typename T>
[[nodiscard]] inline std::string precision_name() {
    if constexpr (std::is_same_v<T, double>) {
        return "double";
    } else {
        return "extended";
    }
}

[[nodiscard]] inline std::string precision_name(Precision p) {
    return p == Precision::Double ? "double" : "extended";
}

/// Significant digits to emit so that values round-trip (17 for double,
/// 36 for the extended type).
template <typename T>
[[nodiscard]] inline constexpr int output_digits() {
    return std::is_same_v<T, double> ? 17 : 36;
}

/// Deterministic scientific-notation formatting (classic locale).
template <typename T>
[[nodiscard]] inline std::string format_real(const T& value) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::scientific << std::setprecision(output_digits<T>() - 1) << value;
    return os.str();
}

/// Absolute tolerance corresponding to `ulps` units in the last place at a
/// given magnitude scale (never smaller than `ulps` ulp of 1).
template <typename T>
[[nodiscard]] inline T ulp_tolerance(const T& scale, int ulps) {
    using std::abs;
    T mag = abs(scale);
    if (mag < T(1)) {
        mag = T(1);
    }
    return T(ulps) * real_epsilon<T>() * mag;
}

/// True when |a - b| is within `ulps` units in the last place of the larger
/// operand (or of 1 when both are subunit).
template <typename T>
[[nodiscard]] inline bool within_ulps(const T& a, const T& b, int ulps) {
    using std::abs;
    const T scale = abs(a) > abs(b) ? a : b;
    return abs(a - b) <= ulp_tolerance(scale, ulps);
}

/// Narrowing conversion helper for diagnostics (log-log fits, reports).
template <typename T>
[[nodiscard]] inline double to_double(const T& value) {
    if constexpr (std::is_same_v<T, double>) {
        return value;
    } else {
        return static_cast<double>(value);
    }
}

// =============================================================================
// Compensated accumulation
// =============================================================================

/// Neumaier-compensated running sum. Branch combinations of a multi-product
/// expansion cancel heavily at high order; plain summation would waste several
/// digits of the working precision there.
template <typename T>
class CompensatedSum {
public:
    void add(const T& x) {
        using std::abs;
        const T t = sum_ + x;
        if (abs(sum_) >= abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    [[nodiscard]] T value() const { return sum_ + carry_; }

private:
    T sum_{};
    T carry_{};
};

} // namespace mpe
