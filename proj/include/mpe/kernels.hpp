#pragma once

// =============================================================================
// Kernel applications.
//
// All products are applied right to left: in  e^{hA} e^{hB}  the B-stage acts
// on the state first.  Clock bookkeeping follows the forward-time rule of
// system.hpp: A-stages advance the clock by their width, B-stages act at the
// clock they are handed.  Each kernel application advances the clock of the
// returned state by exactly one addition of h, and stage clocks inside one
// application are formed directly from the entry clock (no accumulation), so
// composed kernels see bit-exact stage times.
// =============================================================================

#include "mpe/system.hpp"

namespace mpe {

/// First-order product  e^{hA} e^{hB(t)}.
template <typename T>
[[nodiscard]] ClockedState<T> t1_step(const SplitSystem<T>& sys,
                                      const ClockedState<T>& in, const T& h) {
    detail::require_split_flows(sys);
    if (h == T(0)) {
        return in;
    }
    ClockedState<T> out;
    out.state = sys.flow_b(in.state, in.t, h);
    out.state = sys.flow_a(out.state, in.t, h);
    out.t = in.t + h;
    return out;
}

/// Orientation of the symmetric second-order kernel: the name gives the stage
/// that acts on the state first.
enum class StrangOrientation {
    AB, ///< half A, full B frozen at the interval midpoint, half A
    BA, ///< half B at t, full A, half B at t+h
};

/// Symmetric second-order kernel.
///
/// AB realizes  e^{(h/2)A} e^{hB(t+h/2)} e^{(h/2)A}  -- for a kinetic/potential
/// split this is the midpoint-frozen kick flanked by half drifts.  BA realizes
/// e^{(h/2)B(t)} e^{hA} e^{(h/2)B(t+h)} applied B-first -- the classic
/// kick-drift-kick (velocity Verlet) map.
template <typename T>
[[nodiscard]] ClockedState<T> strang_step(const SplitSystem<T>& sys,
                                          const ClockedState<T>& in, const T& h,
                                          StrangOrientation orientation = StrangOrientation::AB) {
    detail::require_split_flows(sys);
    if (h == T(0)) {
        return in;
    }
    const T half = h / T(2);
    ClockedState<T> out;
    if (orientation == StrangOrientation::AB) {
        const T mid = in.t + half;
        out.state = sys.flow_a(in.state, in.t, half);
        out.state = sys.flow_b(out.state, mid, h);
        out.state = sys.flow_a(out.state, mid, half);
    } else {
        const T end = in.t + h;
        out.state = sys.flow_b(in.state, in.t, half);
        out.state = sys.flow_a(out.state, in.t, h);
        out.state = sys.flow_b(out.state, end, half);
    }
    out.t = in.t + h;
    return out;
}

/// Second-order kernel  e^{h (A+B)(t+h/2)}:  the whole generator frozen at the
/// interval midpoint, for systems that expose their full exponential.
template <typename T>
[[nodiscard]] ClockedState<T> frozen_midpoint_step(const SplitSystem<T>& sys,
                                                   const ClockedState<T>& in, const T& h) {
    detail::require_full_exp(sys);
    if (h == T(0)) {
        return in;
    }
    ClockedState<T> out;
    out.state = sys.full_exp(in.state, in.t + h / T(2), h);
    out.t = in.t + h;
    return out;
}

/// n-th member of the odd-width basis family, applied once at full width h.
/// With x = 2n-1 the product is (right to left)
///
///   e^{(h/x)A} (e^{(2h/x)B} e^{(2h/x)A})^{n-1} e^{(h/x)B}
///
/// so the B-stages act at clocks t, t + 2h/x, t + 4h/x, ..., and the total
/// A-width is h.  n = 1 reduces to the first-order product.
template <typename T>
[[nodiscard]] ClockedState<T> u_basis_step(const SplitSystem<T>& sys,
                                           const ClockedState<T>& in, const T& h, int n) {
    detail::require_split_flows(sys);
    if (n < 1) {
        throw ArgumentError("odd basis index must be at least 1");
    }
    if (h == T(0)) {
        return in;
    }
    const T x = T(2 * n - 1);
    const T narrow = h / x;          // width h/x
    const T wide = T(2) * h / x;     // width 2h/x

    ClockedState<T> out;
    out.state = sys.flow_b(in.state, in.t, narrow);
    for (int j = 1; j < n; ++j) {
        const T clock = in.t + T(2 * j) * h / x;
        out.state = sys.flow_a(out.state, in.t, wide);
        out.state = sys.flow_b(out.state, clock, wide);
    }
    out.state = sys.flow_a(out.state, in.t, narrow);
    out.t = in.t + h;
    return out;
}

/// Applies one kernel of the given kind.  `basis_n` selects the member for
/// the odd-width basis family and is ignored otherwise.
template <typename T>
[[nodiscard]] ClockedState<T> kernel_step(const SplitSystem<T>& sys, KernelKind kind,
                                          const ClockedState<T>& in, const T& h,
                                          int basis_n = 1) {
    switch (kind) {
        case KernelKind::T1:
            return t1_step(sys, in, h);
        case KernelKind::StrangAB:
            return strang_step(sys, in, h, StrangOrientation::AB);
        case KernelKind::StrangBA:
            return strang_step(sys, in, h, StrangOrientation::BA);
        case KernelKind::FrozenMidpoint:
            return frozen_midpoint_step(sys, in, h);
        case KernelKind::OddBasis:
            return u_basis_step(sys, in, h, basis_n);
    }
    throw ArgumentError("unknown kernel kind");
}

/// k-fold composition covering total width h: the kernel is applied k times at
/// width h/k, each application picking up the clock where the previous one
/// left it.
template <typename T>
[[nodiscard]] ClockedState<T> compose_k(const SplitSystem<T>& sys, KernelKind kind,
                                        const ClockedState<T>& in, const T& h, int k) {
    if (kind == KernelKind::OddBasis) {
        throw ArgumentError("odd basis members are applied once at full width, not composed");
    }
    if (k < 1) {
        throw ArgumentError("composition count must be at least 1");
    }
    const T sub = h / T(k);
    ClockedState<T> out = in;
    for (int i = 0; i < k; ++i) {
        out = kernel_step(sys, kind, out, sub);
    }
    return out;
}

} // namespace mpe
