#pragma once

// =============================================================================
// Explicit integrators for  q'' = a(q, t)  and force-evaluation accounting.
//
// The order-3/5/7 integrators here are the closed algebraic forms of the
// weighted odd-width basis combinations of scheme.hpp; scheme and closed form
// agree to round-off on any force, which the test suite exercises.  Forces
// are counted through ForceField so that evaluation budgets are measured, not
// asserted by hand.
// =============================================================================

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mpe/scheme.hpp"
#include "mpe/system.hpp"

namespace mpe {

/// Positions and velocities with their clock.
template <typename T>
struct PhaseState {
    StateVector<T> q;
    StateVector<T> v;
    T t{};
};

/// Acceleration field with an evaluation counter and optional value reuse.
///
/// With sharing enabled, an evaluation is served from memory when its
/// arguments bit-match either the most recent evaluation (consecutive kick
/// stages of composed kernels, last-step force of a stored trajectory) or the
/// pinned entry (the shared branch-entry force of a multi-product step; pin
/// via begin_shared_step()).  Copies of a ForceField share one counter.
template <typename T>
class ForceField {
public:
    using Fn = std::function<StateVector<T>(const StateVector<T>&, const T&)>;

    explicit ForceField(Fn a) : impl_(std::make_shared<Impl>(std::move(a))) {}

    [[nodiscard]] StateVector<T> eval(const StateVector<T>& q, const T& t) const {
        Impl& impl = *impl_;
        if (impl.share) {
            if (impl.pinned && impl.pinned->matches(q, t)) {
                return impl.pinned->a;
            }
            if (impl.last && impl.last->matches(q, t)) {
                return impl.last->a;
            }
        }
        StateVector<T> a = impl.fn(q, t);
        impl.count.fetch_add(1, std::memory_order_relaxed);
        if (impl.share) {
            if (!impl.pinned) {
                impl.pinned = Entry{q, t, a};
            }
            impl.last = Entry{q, t, a};
        }
        return a;
    }

    [[nodiscard]] std::int64_t evaluations() const noexcept {
        return impl_->count.load(std::memory_order_relaxed);
    }

    void reset_evaluations() noexcept {
        impl_->count.store(0, std::memory_order_relaxed);
    }

    /// Enables or disables value reuse.  Reuse bookkeeping is not
    /// synchronized; leave it off for concurrent sweeps.
    void set_sharing(bool on) {
        impl_->share = on;
        impl_->pinned.reset();
        impl_->last.reset();
    }

    [[nodiscard]] bool sharing() const noexcept { return impl_->share; }

    /// Forgets pinned/recent entries; the next evaluation becomes the pinned
    /// shared-entry force of the upcoming step.
    void begin_shared_step() {
        impl_->pinned.reset();
        impl_->last.reset();
    }

private:
    struct Entry {
        StateVector<T> q;
        T t;
        StateVector<T> a;

        [[nodiscard]] bool matches(const StateVector<T>& oq, const T& ot) const {
            return ot == t && oq == q;
        }
    };

    struct Impl {
        explicit Impl(Fn f) : fn(std::move(f)) {}
        Fn fn;
        std::atomic<std::int64_t> count{0};
        bool share = false;
        std::optional<Entry> pinned;
        std::optional<Entry> last;
    };

    std::shared_ptr<Impl> impl_;
};

/// Wraps a force field as a split system on the flat state [q..., v...]:
/// the drift stage advances positions with the clock, the kick stage applies
/// the force frozen at the clock it is given.
template <typename T>
[[nodiscard]] SplitSystem<T> hamiltonian_system(ForceField<T> force, std::size_t dof,
                                                bool time_dependent = false) {
    SplitSystem<T> sys;
    sys.dim = 2 * dof;
    sys.time_dependent = time_dependent;
    sys.flow_a = [dof](const StateVector<T>& s, const T& /*t*/, const T& h) {
        StateVector<T> out = s;
        for (std::size_t i = 0; i < dof; ++i) {
            out[i] += h * s[dof + i];
        }
        return out;
    };
    sys.flow_b = [force, dof](const StateVector<T>& s, const T& t, const T& h) {
        StateVector<T> q(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(dof));
        const StateVector<T> a = force.eval(q, t);
        StateVector<T> out = s;
        for (std::size_t i = 0; i < dof; ++i) {
            out[dof + i] += h * a[i];
        }
        return out;
    };
    return sys;
}

template <typename T>
[[nodiscard]] PhaseState<T> split_state_to_phase(const ClockedState<T>& cs, std::size_t dof) {
    PhaseState<T> p;
    p.q.assign(cs.state.begin(), cs.state.begin() + static_cast<std::ptrdiff_t>(dof));
    p.v.assign(cs.state.begin() + static_cast<std::ptrdiff_t>(dof), cs.state.end());
    p.t = cs.t;
    return p;
}

template <typename T>
[[nodiscard]] ClockedState<T> phase_to_split_state(const PhaseState<T>& p) {
    ClockedState<T> cs;
    cs.state = p.q;
    cs.state.insert(cs.state.end(), p.v.begin(), p.v.end());
    cs.t = p.t;
    return cs;
}

namespace detail {

/// y + alpha * x, elementwise.
template <typename T>
[[nodiscard]] StateVector<T> axpy(const StateVector<T>& y, const T& alpha,
                                  const StateVector<T>& x) {
    StateVector<T> r = y;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] += alpha * x[i];
    }
    return r;
}

template <typename T>
inline void check_phase(const PhaseState<T>& s) {
    if (s.q.size() != s.v.size() || s.q.empty()) {
        throw DimensionError("phase state needs matching non-empty q and v");
    }
}

} // namespace detail

// =============================================================================
// Explicit single-step maps
// =============================================================================

/// Velocity Verlet / leap-frog (order 2, kick-drift-kick).  Identical to the
/// BA-oriented symmetric kernel on the same system.
template <typename T>
[[nodiscard]] PhaseState<T> verlet_step(const ForceField<T>& force, const PhaseState<T>& in,
                                        const T& h) {
    detail::check_phase(in);
    const StateVector<T> a0 = force.eval(in.q, in.t);
    PhaseState<T> out;
    out.q = detail::axpy(detail::axpy(in.q, h, in.v), h * h / T(2), a0);
    const StateVector<T> a1 = force.eval(out.q, in.t + h);
    out.v = detail::axpy(detail::axpy(in.v, h / T(2), a0), h / T(2), a1);
    out.t = in.t + h;
    return out;
}

/// Second-order Runge-Kutta map arising from averaging the two one-sided
/// first-order products (order 2, not symplectic).
template <typename T>
[[nodiscard]] PhaseState<T> rk2_step(const ForceField<T>& force, const PhaseState<T>& in,
                                     const T& h) {
    detail::check_phase(in);
    const StateVector<T> a0 = force.eval(in.q, in.t);
    const StateVector<T> q_euler = detail::axpy(in.q, h, in.v);
    const StateVector<T> a1 = force.eval(q_euler, in.t + h);
    PhaseState<T> out;
    out.q = detail::axpy(detail::axpy(in.q, h, in.v), h * h / T(2), a0);
    out.v = detail::axpy(detail::axpy(in.v, h / T(2), a0), h / T(2), a1);
    out.t = in.t + h;
    return out;
}

/// Kutta's third-order method for second-order equations, in the consolidated
/// three-force form.
template <typename T>
[[nodiscard]] PhaseState<T> kutta3_step(const ForceField<T>& force, const PhaseState<T>& in,
                                        const T& h) {
    detail::check_phase(in);
    const StateVector<T> a0 = force.eval(in.q, in.t);
    const StateVector<T> am = force.eval(detail::axpy(in.q, h / T(2), in.v), in.t + h / T(2));
    const StateVector<T> qf = detail::axpy(detail::axpy(in.q, h, in.v), h * h, a0);
    const StateVector<T> af = force.eval(qf, in.t + h);
    PhaseState<T> out;
    out.q = detail::axpy(detail::axpy(detail::axpy(in.q, h, in.v), h * h / T(6), a0),
                         h * h / T(3), am);
    out.v = detail::axpy(
        detail::axpy(detail::axpy(in.v, h / T(6), a0), T(4) * h / T(6), am), h / T(6), af);
    out.t = in.t + h;
    return out;
}

/// Nystrom's third-order algorithm: two forces, order 3.
template <typename T>
[[nodiscard]] PhaseState<T> nystrom3_step(const ForceField<T>& force, const PhaseState<T>& in,
                                          const T& h) {
    detail::check_phase(in);
    const StateVector<T> a0 = force.eval(in.q, in.t);
    const StateVector<T> q23 =
        detail::axpy(detail::axpy(in.q, T(2) * h / T(3), in.v), T(2) * h * h / T(9), a0);
    const StateVector<T> a23 = force.eval(q23, in.t + T(2) * h / T(3));
    PhaseState<T> out;
    out.q = detail::axpy(detail::axpy(detail::axpy(in.q, h, in.v), h * h / T(4), a0),
                         h * h / T(4), a23);
    out.v = detail::axpy(detail::axpy(in.v, h / T(4), a0), T(3) * h / T(4), a23);
    out.t = in.t + h;
    return out;
}

/// Third-order two-force algorithm that never evaluates the force at the
/// starting position.
template <typename T>
[[nodiscard]] PhaseState<T> ba3_step(const ForceField<T>& force, const PhaseState<T>& in,
                                     const T& h) {
    detail::check_phase(in);
    const StateVector<T> a13 =
        force.eval(detail::axpy(in.q, h / T(3), in.v), in.t + h / T(3));
    const StateVector<T> qf =
        detail::axpy(detail::axpy(in.q, h, in.v), T(2) * h * h / T(3), a13);
    const StateVector<T> af = force.eval(qf, in.t + h);
    PhaseState<T> out;
    out.q = detail::axpy(detail::axpy(in.q, h, in.v), h * h / T(2), a13);
    out.v = detail::axpy(detail::axpy(in.v, T(3) * h / T(4), a13), h / T(4), af);
    out.t = in.t + h;
    return out;
}

/// Nystrom's fifth-order algorithm: four forces.
template <typename T>
[[nodiscard]] PhaseState<T> nystrom5_step(const ForceField<T>& force, const PhaseState<T>& in,
                                          const T& h) {
    detail::check_phase(in);
    const T h2 = h * h;
    const StateVector<T> a0 = force.eval(in.q, in.t);
    const StateVector<T> q25 =
        detail::axpy(detail::axpy(in.q, T(2) * h / T(5), in.v), T(2) * h2 / T(25), a0);
    const StateVector<T> a25 = force.eval(q25, in.t + T(2) * h / T(5));
    const StateVector<T> q23 =
        detail::axpy(detail::axpy(in.q, T(2) * h / T(3), in.v), T(2) * h2 / T(9), a0);
    const StateVector<T> a23 = force.eval(q23, in.t + T(2) * h / T(3));
    const StateVector<T> q45 = detail::axpy(
        detail::axpy(detail::axpy(in.q, T(4) * h / T(5), in.v), T(4) * h2 / T(25), a0),
        T(4) * h2 / T(25), a25);
    const StateVector<T> a45 = force.eval(q45, in.t + T(4) * h / T(5));

    PhaseState<T> out;
    out.q = in.q;
    out.v = in.v;
    for (std::size_t i = 0; i < in.q.size(); ++i) {
        out.q[i] += h * in.v[i] +
                    h2 / T(192) *
                        (T(23) * a0[i] + T(75) * a25[i] - T(27) * a23[i] + T(25) * a45[i]);
        out.v[i] += h / T(192) *
                    (T(23) * a0[i] + T(125) * a25[i] - T(81) * a23[i] + T(125) * a45[i]);
    }
    out.t = in.t + h;
    return out;
}

/// Seventh-order algorithm: seven forces.
template <typename T>
[[nodiscard]] PhaseState<T> nystrom7_step(const ForceField<T>& force, const PhaseState<T>& in,
                                          const T& h) {
    detail::check_phase(in);
    const T h2 = h * h;
    const StateVector<T> a0 = force.eval(in.q, in.t);

    const StateVector<T> q25 =
        detail::axpy(detail::axpy(in.q, T(2) * h / T(5), in.v), T(2) * h2 / T(25), a0);
    const StateVector<T> a25 = force.eval(q25, in.t + T(2) * h / T(5));
    const StateVector<T> q45 = detail::axpy(
        detail::axpy(detail::axpy(in.q, T(4) * h / T(5), in.v), T(4) * h2 / T(25), a0),
        T(4) * h2 / T(25), a25);
    const StateVector<T> a45 = force.eval(q45, in.t + T(4) * h / T(5));

    const StateVector<T> q23 =
        detail::axpy(detail::axpy(in.q, T(2) * h / T(3), in.v), T(2) * h2 / T(9), a0);
    const StateVector<T> a23 = force.eval(q23, in.t + T(2) * h / T(3));

    const StateVector<T> q27 =
        detail::axpy(detail::axpy(in.q, T(2) * h / T(7), in.v), T(2) * h2 / T(49), a0);
    const StateVector<T> a27 = force.eval(q27, in.t + T(2) * h / T(7));
    const StateVector<T> q47 = detail::axpy(
        detail::axpy(detail::axpy(in.q, T(4) * h / T(7), in.v), T(4) * h2 / T(49), a0),
        T(4) * h2 / T(49), a27);
    const StateVector<T> a47 = force.eval(q47, in.t + T(4) * h / T(7));
    StateVector<T> q67 = detail::axpy(in.q, T(6) * h / T(7), in.v);
    for (std::size_t i = 0; i < q67.size(); ++i) {
        q67[i] += T(2) * h2 / T(49) * (T(3) * a0[i] + T(4) * a27[i] + T(2) * a47[i]);
    }
    const StateVector<T> a67 = force.eval(q67, in.t + T(6) * h / T(7));

    PhaseState<T> out;
    out.q = in.q;
    out.v = in.v;
    for (std::size_t i = 0; i < in.q.size(); ++i) {
        out.q[i] += h * in.v[i] +
                    h2 / T(23040) *
                        (T(1682) * a0[i] + T(729) * a23[i] -
                         T(3125) * (T(3) * a25[i] + a45[i]) +
                         T(2401) * (T(5) * a27[i] + T(3) * a47[i] + a67[i]));
        out.v[i] += h / T(23040) *
                    (T(1682) * a0[i] + T(2187) * a23[i] -
                     T(15625) * (a25[i] + a45[i]) +
                     T(16807) * (a27[i] + a47[i] + a67[i]));
    }
    out.t = in.t + h;
    return out;
}

/// Named explicit methods exposed on the command line.
enum class ExplicitMethod {
    Verlet,
    Rk2,
    Kutta3,
    Nystrom3,
    Ba3,
    Nystrom5,
    Nystrom7,
};

[[nodiscard]] inline std::string explicit_method_name(ExplicitMethod m) {
    switch (m) {
        case ExplicitMethod::Verlet: return "verlet";
        case ExplicitMethod::Rk2: return "rk2";
        case ExplicitMethod::Kutta3: return "kutta3";
        case ExplicitMethod::Nystrom3: return "nystrom3";
        case ExplicitMethod::Ba3: return "ba3";
        case ExplicitMethod::Nystrom5: return "nystrom5";
        case ExplicitMethod::Nystrom7: return "nystrom7";
    }
    throw ArgumentError("unknown explicit method");
}

[[nodiscard]] inline ExplicitMethod parse_explicit_method(const std::string& name) {
    if (name == "verlet") return ExplicitMethod::Verlet;
    if (name == "rk2") return ExplicitMethod::Rk2;
    if (name == "kutta3") return ExplicitMethod::Kutta3;
    if (name == "nystrom3") return ExplicitMethod::Nystrom3;
    if (name == "ba3") return ExplicitMethod::Ba3;
    if (name == "nystrom5") return ExplicitMethod::Nystrom5;
    if (name == "nystrom7") return ExplicitMethod::Nystrom7;
    throw ArgumentError("unknown explicit method: " + name);
}

template <typename T>
[[nodiscard]] PhaseState<T> explicit_step(ExplicitMethod method, const ForceField<T>& force,
                                          const PhaseState<T>& in, const T& h) {
    switch (method) {
        case ExplicitMethod::Verlet: return verlet_step(force, in, h);
        case ExplicitMethod::Rk2: return rk2_step(force, in, h);
        case ExplicitMethod::Kutta3: return kutta3_step(force, in, h);
        case ExplicitMethod::Nystrom3: return nystrom3_step(force, in, h);
        case ExplicitMethod::Ba3: return ba3_step(force, in, h);
        case ExplicitMethod::Nystrom5: return nystrom5_step(force, in, h);
        case ExplicitMethod::Nystrom7: return nystrom7_step(force, in, h);
    }
    throw ArgumentError("unknown explicit method");
}

/// Measured per-step force consumption of an explicit method.
template <typename T>
[[nodiscard]] std::int64_t force_budget(ExplicitMethod method, const ForceField<T>& force,
                                        const PhaseState<T>& in, const T& h) {
    const std::int64_t before = force.evaluations();
    (void)explicit_step(method, force, in, h);
    return force.evaluations() - before;
}

/// Measured force consumption of one multi-product scheme step.
struct StepBudget {
    std::int64_t kernel_applications = 0; ///< second-order kernel (or basis stage) count
    std::int64_t forces_raw = 0;          ///< without any value reuse
    std::int64_t forces_shared = 0;       ///< with duplicate-argument reuse
};

/// Runs one scheme step twice over the given force-backed system -- once
/// without and once with value reuse -- and reports both force counts.
template <typename T>
[[nodiscard]] StepBudget force_budget(const MpeScheme& scheme, ForceField<T>& force,
                                      const SplitSystem<T>& sys, const ClockedState<T>& in,
                                      const T& h) {
    const auto plan = make_plan<T>(scheme);
    StepBudget budget;
    for (int k : plan.ks) {
        budget.kernel_applications += scheme.parity == Parity::Odd ? (k + 1) / 2 : k;
    }

    const bool was_sharing = force.sharing();
    force.set_sharing(false);
    force.reset_evaluations();
    (void)mpe_step(plan, sys, in, h);
    budget.forces_raw = force.evaluations();

    force.set_sharing(true);
    force.begin_shared_step();
    force.reset_evaluations();
    (void)mpe_step(plan, sys, in, h);
    budget.forces_shared = force.evaluations();

    force.set_sharing(was_sharing);
    return budget;
}

} // namespace mpe
