#pragma once

// =============================================================================
// Extrapolation node sequences and their exact weights.
//
// A multi-product expansion over nodes {k_1, ..., k_n} combines powers of a
// second-order kernel with weights that annihilate the kernel's even error
// powers.  The weights solve the Vandermonde system in k^-2
//
//     sum_i c_i             = 1
//     sum_i c_i k_i^(-2j)   = 0        for j = 1 .. n-1
//
// whose solution has the closed form
//
//     c_i = prod_{j != i}  k_i^2 / (k_i^2 - k_j^2).
//
// Both routes are implemented in exact rational arithmetic; the direct linear
// solve exists as an independent cross-check of the closed form.
// =============================================================================

#include <cstddef>
#include <string>
#include <vector>

#include "mpe/errors.hpp"
#include "mpe/rational.hpp"

namespace mpe {

/// Parity of a scheme family: even schemes extrapolate kernel powers over the
/// natural node sequence, odd schemes extrapolate the odd-width basis family.
enum class Parity {
    Even,
    Odd,
};

[[nodiscard]] inline std::string parity_name(Parity p) {
    return p == Parity::Even ? "even" : "odd";
}

/// Extrapolation nodes with their exact weights, index-aligned.
struct WeightSet {
    std::vector<int> ks;
    std::vector<Rational> cs;

    [[nodiscard]] std::size_t size() const noexcept { return ks.size(); }
};

namespace detail {

inline void validate_nodes(const std::vector<int>& ks) {
    if (ks.empty()) {
        throw ArgumentError("node list must not be empty");
    }
    for (int k : ks) {
        if (k < 1) {
            throw ArgumentError("extrapolation nodes must be positive integers");
        }
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        for (std::size_t j = i + 1; j < ks.size(); ++j) {
            if (ks[i] == ks[j]) {
                throw DegenerateNodeError("extrapolation nodes must be distinct");
            }
        }
    }
}

[[nodiscard]] inline BigInt int_pow(BigInt base, unsigned exp) {
    BigInt r = 1;
    while (exp > 0) {
        if (exp & 1U) {
            r *= base;
        }
        base *= base;
        exp >>= 1U;
    }
    return r;
}

} // namespace detail

/// Closed-form weights c_i = prod_{j != i} k_i^2 / (k_i^2 - k_j^2).
[[nodiscard]] inline WeightSet closed_form_weights(const std::vector<int>& ks) {
    detail::validate_nodes(ks);
    WeightSet w;
    w.ks = ks;
    w.cs.reserve(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        Rational c(1);
        const BigInt ki2 = BigInt(ks[i]) * ks[i];
        for (std::size_t j = 0; j < ks.size(); ++j) {
            if (j == i) {
                continue;
            }
            const BigInt kj2 = BigInt(ks[j]) * ks[j];
            c *= Rational(ki2, ki2 - kj2);
        }
        w.cs.push_back(c);
    }
    return w;
}

/// Independent derivation of the same weights: exact Gaussian elimination on
/// the Vandermonde system in the variables x_i = k_i^-2 with right-hand side
/// (1, 0, ..., 0).
[[nodiscard]] inline WeightSet vandermonde_weights(const std::vector<int>& ks) {
    detail::validate_nodes(ks);
    const std::size_t n = ks.size();

    // Row j holds k_i^(-2j); augmented column holds the right-hand side.
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            a[j][i] = Rational(1, detail::int_pow(BigInt(ks[i]), 2 * static_cast<unsigned>(j)));
        }
        a[j][n] = Rational(j == 0 ? 1 : 0);
    }

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].is_zero()) {
            ++pivot;
        }
        if (pivot == n) {
            throw DegenerateNodeError("singular extrapolation system");
        }
        std::swap(a[col], a[pivot]);
        const Rational inv_pivot = Rational(1) / a[col][col];
        for (std::size_t j = col; j <= n; ++j) {
            a[col][j] *= inv_pivot;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col].is_zero()) {
                continue;
            }
            const Rational factor = a[row][col];
            for (std::size_t j = col; j <= n; ++j) {
                a[row][j] -= factor * a[col][j];
            }
        }
    }

    WeightSet w;
    w.ks = ks;
    w.cs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        w.cs.push_back(a[i][n]);
    }
    return w;
}

/// Natural node sequence {1, 2, ..., n} of an order-2n even scheme.
[[nodiscard]] inline std::vector<int> even_sequence(int n) {
    if (n < 1) {
        throw ArgumentError("even scheme requires n >= 1");
    }
    std::vector<int> ks(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ks[static_cast<std::size_t>(i)] = i + 1;
    }
    return ks;
}

/// Odd node sequence {1, 3, ..., 2n-1} of an order-(2n-1) odd scheme.
[[nodiscard]] inline std::vector<int> odd_sequence(int n) {
    if (n < 1) {
        throw ArgumentError("odd scheme requires n >= 1");
    }
    std::vector<int> ks(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ks[static_cast<std::size_t>(i)] = 2 * i + 1;
    }
    return ks;
}

/// Node sequence {m, n-1, n-2, ..., 1} of a final-position correction that
/// lifts an m-substep second-order trajectory to order 2n at the endpoint.
[[nodiscard]] inline std::vector<int> final_correction_sequence(int m, int n) {
    if (n < 1) {
        throw ArgumentError("final correction requires n >= 1");
    }
    if (m <= n - 1) {
        throw DegenerateNodeError(
            "final correction requires m > n-1 to keep nodes distinct");
    }
    std::vector<int> ks;
    ks.reserve(static_cast<std::size_t>(n));
    ks.push_back(m);
    for (int k = n - 1; k >= 1; --k) {
        ks.push_back(k);
    }
    return ks;
}

/// Nominal order of accuracy of a family member with n nodes.
[[nodiscard]] inline int scheme_order(Parity parity, int n) {
    return parity == Parity::Even ? 2 * n : 2 * n - 1;
}

} // namespace mpe
