#pragma once

// =============================================================================
// Multi-product schemes.
//
// A scheme is a weighted sum of kernel branches sharing one entry state:
//
//   even family   sum_i c_i K^{k_i}(h/k_i)   over nodes {1, ..., n}
//   odd family    sum_i c_i U_{(k_i+1)/2}(h) over nodes {1, 3, ..., 2n-1}
//
// with the exact weights of weights.hpp.  Weights are converted to the working
// scalar once per plan; branch results are combined with compensated
// summation because the weights alternate in sign and grow with order.
// =============================================================================

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mpe/kernels.hpp"
#include "mpe/rational.hpp"
#include "mpe/weights.hpp"

namespace mpe {

/// How a scheme is deployed over an interval.
enum class SchemeMode {
    PerStep,         ///< every step of the trajectory is one full scheme step
    FinalCorrection, ///< plain kernel trajectory; weights applied once at the end
};

/// A fully specified multi-product scheme.
struct MpeScheme {
    Parity parity = Parity::Even;
    KernelKind kernel = KernelKind::StrangAB;
    WeightSet weights;
    int order = 0;                          ///< nominal order of accuracy
    SchemeMode mode = SchemeMode::PerStep;
    int correction_m = 0;                   ///< substep count in FinalCorrection mode
    std::string label;                      ///< stable identifier for CSV metadata
};

namespace detail {

inline void require_power_kernel(KernelKind kernel) {
    if (kernel != KernelKind::StrangAB && kernel != KernelKind::StrangBA &&
        kernel != KernelKind::FrozenMidpoint) {
        throw ArgumentError(
            "power-extrapolated schemes require a symmetric second-order kernel "
            "(ab, ba, or midpoint)");
    }
}

} // namespace detail

/// Even scheme of order 2n over the natural node sequence {1, ..., n}.
[[nodiscard]] inline MpeScheme build_even(int n, KernelKind kernel = KernelKind::StrangAB) {
    detail::require_power_kernel(kernel);
    MpeScheme s;
    s.parity = Parity::Even;
    s.kernel = kernel;
    s.weights = closed_form_weights(even_sequence(n));
    s.order = scheme_order(Parity::Even, n);
    s.label = "even-" + std::to_string(s.order);
    return s;
}

/// Odd scheme of order 2n-1 over the odd-width basis family.
[[nodiscard]] inline MpeScheme build_odd(int n) {
    MpeScheme s;
    s.parity = Parity::Odd;
    s.kernel = KernelKind::OddBasis;
    s.weights = closed_form_weights(odd_sequence(n));
    s.order = scheme_order(Parity::Odd, n);
    s.label = "odd-" + std::to_string(s.order);
    return s;
}

/// Custom node set over kernel powers (even-type error structure).  The
/// nominal order follows the node count.
[[nodiscard]] inline MpeScheme build_custom(const std::vector<int>& ks,
                                            KernelKind kernel = KernelKind::StrangAB) {
    detail::require_power_kernel(kernel);
    MpeScheme s;
    s.parity = Parity::Even;
    s.kernel = kernel;
    s.weights = closed_form_weights(ks);
    s.order = scheme_order(Parity::Even, static_cast<int>(ks.size()));
    s.label = "custom-" + std::to_string(ks.size()) + "-node";
    return s;
}

/// Final-position correction: an m-substep kernel trajectory whose endpoint is
/// lifted to order 2n by the node set {m, n-1, ..., 1}.
[[nodiscard]] inline MpeScheme build_final_correction(int m, int n,
                                                      KernelKind kernel = KernelKind::StrangAB) {
    detail::require_power_kernel(kernel);
    MpeScheme s;
    s.parity = Parity::Even;
    s.kernel = kernel;
    s.weights = closed_form_weights(final_correction_sequence(m, n));
    s.order = scheme_order(Parity::Even, n);
    s.mode = SchemeMode::FinalCorrection;
    s.correction_m = m;
    s.label = "corrected-" + std::to_string(s.order) + "-m" + std::to_string(m);
    return s;
}

// =============================================================================
// Realized plans
// =============================================================================

/// Scheme with weights converted to the working scalar and branches sorted by
/// ascending node, ready for repeated stepping.
template <typename T>
struct SchemePlan {
    Parity parity = Parity::Even;
    KernelKind kernel = KernelKind::StrangAB;
    SchemeMode mode = SchemeMode::PerStep;
    int correction_m = 0;
    int order = 0;
    std::string label;
    std::vector<int> ks;   ///< ascending
    std::vector<T> cs;     ///< aligned with ks
};

template <typename T>
[[nodiscard]] SchemePlan<T> make_plan(const MpeScheme& scheme) {
    if (scheme.weights.ks.size() != scheme.weights.cs.size() || scheme.weights.ks.empty()) {
        throw ArgumentError("scheme has no nodes");
    }
    if (scheme.parity == Parity::Odd) {
        for (int k : scheme.weights.ks) {
            if (k % 2 == 0) {
                throw ArgumentError("odd-family nodes must be odd integers");
            }
        }
        if (scheme.kernel != KernelKind::OddBasis) {
            throw ArgumentError("odd-family schemes use the odd basis kernel");
        }
    } else {
        detail::require_power_kernel(scheme.kernel);
    }

    std::vector<std::size_t> idx(scheme.weights.ks.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return scheme.weights.ks[a] < scheme.weights.ks[b];
    });

    SchemePlan<T> plan;
    plan.parity = scheme.parity;
    plan.kernel = scheme.kernel;
    plan.mode = scheme.mode;
    plan.correction_m = scheme.correction_m;
    plan.order = scheme.order;
    plan.label = scheme.label;
    plan.ks.reserve(idx.size());
    plan.cs.reserve(idx.size());
    for (std::size_t i : idx) {
        plan.ks.push_back(scheme.weights.ks[i]);
        plan.cs.push_back(rational_to_real<T>(scheme.weights.cs[i]));
    }
    return plan;
}

namespace detail {

/// Evaluates one branch of a plan from a shared entry state.
template <typename T>
[[nodiscard]] ClockedState<T> scheme_branch(const SchemePlan<T>& plan,
                                            const SplitSystem<T>& sys,
                                            const ClockedState<T>& in, const T& h,
                                            std::size_t branch) {
    const int k = plan.ks[branch];
    if (plan.parity == Parity::Odd) {
        return u_basis_step(sys, in, h, (k + 1) / 2);
    }
    return compose_k(sys, plan.kernel, in, h, k);
}

/// Weighted compensated combination of branch states.
template <typename T>
[[nodiscard]] StateVector<T> combine_branches(const SchemePlan<T>& plan,
                                              const std::vector<StateVector<T>>& branches,
                                              std::size_t dim) {
    StateVector<T> out(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        CompensatedSum<T> acc;
        for (std::size_t b = 0; b < branches.size(); ++b) {
            acc.add(plan.cs[b] * branches[b][c]);
        }
        out[c] = acc.value();
    }
    return out;
}

} // namespace detail

/// One scheme application covering width h: all branches start from `in`, and
/// their endpoint states are combined with the exact extrapolation weights.
template <typename T>
[[nodiscard]] ClockedState<T> mpe_step(const SchemePlan<T>& plan, const SplitSystem<T>& sys,
                                       const ClockedState<T>& in, const T& h) {
    std::vector<StateVector<T>> branches;
    branches.reserve(plan.ks.size());
    for (std::size_t b = 0; b < plan.ks.size(); ++b) {
        branches.push_back(detail::scheme_branch(plan, sys, in, h, b).state);
    }
    ClockedState<T> out;
    out.state = detail::combine_branches(plan, branches, in.state.size());
    out.t = in.t + h;
    return out;
}

template <typename T>
[[nodiscard]] ClockedState<T> mpe_step(const MpeScheme& scheme, const SplitSystem<T>& sys,
                                       const ClockedState<T>& in, const T& h) {
    return mpe_step(make_plan<T>(scheme), sys, in, h);
}

/// Integrates from `start` to clock t1 and returns the whole trajectory
/// (including the entry state).
///
/// Per-step mode applies the scheme `steps` times at width (t1 - t0)/steps.
/// Final-correction mode ignores `steps`: it runs the scheme's m-substep
/// kernel trajectory and applies the correction weights once at the endpoint,
/// reusing the m-composed branch from the trajectory itself, so intermediate
/// states are plain second-order kernel states.
template <typename T>
[[nodiscard]] std::vector<ClockedState<T>> integrate(const SchemePlan<T>& plan,
                                                     const SplitSystem<T>& sys,
                                                     const ClockedState<T>& start,
                                                     const T& t1, int steps) {
    const T width = t1 - start.t;
    std::vector<ClockedState<T>> trajectory;

    if (plan.mode == SchemeMode::FinalCorrection) {
        const int m = plan.correction_m;
        trajectory.reserve(static_cast<std::size_t>(m) + 1);
        trajectory.push_back(start);
        const T sub = width / T(m);
        for (int i = 0; i < m; ++i) {
            trajectory.push_back(kernel_step(sys, plan.kernel, trajectory.back(), sub));
        }
        // Correction: reuse the m-fold branch; evaluate the remaining ones.
        std::vector<StateVector<T>> branches;
        branches.reserve(plan.ks.size());
        for (std::size_t b = 0; b < plan.ks.size(); ++b) {
            if (plan.ks[b] == m) {
                branches.push_back(trajectory.back().state);
            } else {
                branches.push_back(detail::scheme_branch(plan, sys, start, width, b).state);
            }
        }
        trajectory.back().state = detail::combine_branches(plan, branches, start.state.size());
        return trajectory;
    }

    if (steps < 1) {
        throw ArgumentError("per-step integration requires at least one step");
    }
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    trajectory.push_back(start);
    const T h = width / T(steps);
    for (int i = 0; i < steps; ++i) {
        trajectory.push_back(mpe_step(plan, sys, trajectory.back(), h));
    }
    return trajectory;
}

template <typename T>
[[nodiscard]] std::vector<ClockedState<T>> integrate(const MpeScheme& scheme,
                                                     const SplitSystem<T>& sys,
                                                     const ClockedState<T>& start,
                                                     const T& t1, int steps) {
    return integrate(make_plan<T>(scheme), sys, start, t1, steps);
}

} // namespace mpe
