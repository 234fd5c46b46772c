#pragma once

// =============================================================================
// Split systems and clocked states.
//
// A SplitSystem exposes the exactly-solvable flows of the two pieces of a
// splitting  d/dt y = (A + B(t)) y  (or its nonlinear Hamiltonian analogue).
// Time dependence is handled by threading an explicit clock through every
// composition: stages of type A advance the clock by their width, stages of
// type B act frozen at the current clock value.  This realizes the
// forward-time-derivative bookkeeping that turns a non-autonomous problem
// into an autonomous one on the extended state (state, t).
// =============================================================================

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mpe/errors.hpp"

namespace mpe {

template <typename T>
using StateVector = std::vector<T>;

/// State vector together with the physical clock it belongs to.
template <typename T>
struct ClockedState {
    StateVector<T> state;
    T t{};
};

/// Exactly-solvable flows of a two-piece splitting.
///
/// `flow_a` and `flow_b` map (state, clock, width) to the new state.  By
/// convention the A-stage is the clock-advancing stage (drift); the B-stage is
/// evaluated frozen at the clock it is given (kick).  `full_exp`, when
/// available, is the exact flow of the *whole* generator frozen at a given
/// time, used by the frozen-midpoint kernel.
template <typename T>
struct SplitSystem {
    using Flow = std::function<StateVector<T>(const StateVector<T>&, const T& t, const T& h)>;

    std::size_t dim = 0;
    Flow flow_a;
    Flow flow_b;
    Flow full_exp;               ///< optional: exact flow of A+B frozen at t
    bool time_dependent = false;
};

/// Second-order kernels (and the first-order product) that schemes compose.
enum class KernelKind {
    T1,             ///< e^{hA} e^{hB(t)}            -- first order
    StrangAB,       ///< A(h/2) B(h at t+h/2) A(h/2) -- midpoint-frozen kick
    StrangBA,       ///< B(h/2 at t) A(h) B(h/2 at t+h)
    FrozenMidpoint, ///< e^{h (A+B)(t+h/2)} via full_exp
    OddBasis,       ///< odd-width product family U_n
};

[[nodiscard]] inline std::string kernel_name(KernelKind k) {
    switch (k) {
        case KernelKind::T1: return "t1";
        case KernelKind::StrangAB: return "ab";
        case KernelKind::StrangBA: return "ba";
        case KernelKind::FrozenMidpoint: return "midpoint";
        case KernelKind::OddBasis: return "odd";
    }
    throw ArgumentError("unknown kernel kind");
}

[[nodiscard]] inline KernelKind parse_kernel(const std::string& name) {
    if (name == "t1") return KernelKind::T1;
    if (name == "ab") return KernelKind::StrangAB;
    if (name == "ba") return KernelKind::StrangBA;
    if (name == "midpoint") return KernelKind::FrozenMidpoint;
    if (name == "odd") return KernelKind::OddBasis;
    throw ArgumentError("unknown kernel name: " + name);
}

namespace detail {

template <typename T>
inline void require_split_flows(const SplitSystem<T>& sys) {
    if (!sys.flow_a || !sys.flow_b) {
        throw CapabilityError("system does not provide split flows");
    }
}

template <typename T>
inline void require_full_exp(const SplitSystem<T>& sys) {
    if (!sys.full_exp) {
        throw CapabilityError("system does not provide a full frozen-time flow");
    }
}

} // namespace detail

} // namespace mpe
