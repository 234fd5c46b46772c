#pragma once

// =============================================================================
// Built-in verification problems with known exact solutions.
//
//   matrix2x2    Y' = A(t) Y,  A(t) = [[2, t], [0, -1]],  Y(0) = 1.
//                The upper-right entry of the exact propagator is
//                f(t) = (1/9) e^{-t} (e^{3t} - 1 - 3t), an entire function.
//                Closed forms of the order-2..10 single-application results
//                and truncated Magnus series for the same entry are provided
//                as analytic references.
//
//   hydrogen     u'' = f(t) u with f(t) = 1 - 2/t: the radial ground-state
//                equation of the Coulomb problem, exact solution q = t e^{-t}.
//                The coefficient is singular at t = 0; runs either start a
//                small offset after the origin (default) or use the exact
//                limiting action of the first kick on (q, v) = (0, v).
//
//   oscillator   u'' = f(t) u with f(t) = t^2 - 3, exact q = t e^{-t^2/2}:
//                a radial harmonic-oscillator state, smooth at the origin.
// =============================================================================

#include <functional>
#include <optional>
#include <string>

#include "mpe/matrix.hpp"
#include "mpe/nystrom.hpp"
#include "mpe/scheme.hpp"

namespace mpe {

enum class ProblemKind {
    Matrix2x2,
    Hydrogen,
    Oscillator,
};

[[nodiscard]] inline std::string problem_name(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Matrix2x2: return "matrix2x2";
        case ProblemKind::Hydrogen: return "hydrogen";
        case ProblemKind::Oscillator: return "oscillator";
    }
    throw ArgumentError("unknown problem kind");
}

[[nodiscard]] inline ProblemKind parse_problem(const std::string& name) {
    if (name == "matrix2x2") return ProblemKind::Matrix2x2;
    if (name == "hydrogen") return ProblemKind::Hydrogen;
    if (name == "oscillator") return ProblemKind::Oscillator;
    throw ArgumentError("unknown problem name: " + name);
}

/// A ready-to-integrate system with its exact solution and optional extra
/// structure (linear-coefficient matrices, force field).
template <typename T>
struct Problem {
    std::string name;
    std::size_t dim = 0;
    SplitSystem<T> system;
    std::function<StateVector<T>(const T&)> exact;
    T t_start{};

    // Linear problems: state' = A(t) state with A(t) = T + V(t).
    bool linear = false;
    std::function<Matrix<T>(const T&)> a_matrix;
    Matrix<T> t_matrix;
    std::function<Matrix<T>(const T&)> v_matrix;

    // Hamiltonian problems: q'' = a(q, t) on `dof` degrees of freedom.
    std::size_t dof = 0;
    std::optional<ForceField<T>> force;

    [[nodiscard]] ClockedState<T> initial_state() const {
        return ClockedState<T>{exact(t_start), t_start};
    }
};

// =============================================================================
// 2x2 non-singular matrix problem
// =============================================================================

/// Exact upper-right propagator entry of the 2x2 problem.
template <typename T>
[[nodiscard]] T matrix2x2_f_exact(const T& t) {
    using std::exp;
    return exp(-t) * (exp(T(3) * t) - T(1) - T(3) * t) / T(9);
}

/// Closed form of the upper-right entry produced by one application of the
/// even scheme of the given order (2, 4, 6, 8, or 10) over width t.
template <typename T>
[[nodiscard]] T matrix2x2_f_closed_form(const T& t, int order) {
    using std::exp;
    const T e3 = exp(T(3) * t);
    switch (order) {
        case 2:
            return t * exp(-t) * (e3 - T(1)) / T(6);
        case 4:
            return t * exp(-t) * ((e3 - T(5)) / T(18) + T(2) * exp(T(3) * t / T(2)) / T(9));
        case 6:
            return t * exp(-t) *
                   ((T(11) * e3 - T(109)) / T(360) +
                    T(9) / T(40) * (exp(T(2) * t) + exp(t)) -
                    T(8) / T(45) * exp(T(3) * t / T(2)));
        case 8:
            return t * exp(-t) *
                   ((T(151) * e3 - T(2369)) / T(7560) +
                    T(256) / T(945) * (exp(T(9) * t / T(4)) + exp(T(3) * t / T(4))) -
                    T(81) / T(280) * (exp(T(2) * t) + exp(t)) +
                    T(104) / T(315) * exp(T(3) * t / T(2)));
        case 10:
            return t * exp(-t) *
                   ((T(15619) * e3 - T(347261)) / T(1088640) +
                    T(78125) / T(217728) *
                        (exp(T(12) * t / T(5)) + exp(T(9) * t / T(5)) +
                         exp(T(6) * t / T(5)) + exp(T(3) * t / T(5))) -
                    T(4096) / T(8505) * (exp(T(9) * t / T(4)) + exp(T(3) * t / T(4))) +
                    T(729) / T(4480) * (exp(T(2) * t) + exp(t)) -
                    T(4192) / T(8505) * exp(T(3) * t / T(2)));
        default:
            throw ArgumentError("closed forms exist for orders 2, 4, 6, 8, 10");
    }
}

/// Truncated Magnus series for the same entry at orders 2, 4, 6, 8, 10.
/// The underlying series converges only for |t| < 2*pi/3; past that radius
/// higher truncations diverge pointwise from the (entire) exact solution.
template <typename T>
[[nodiscard]] T magnus_f_series(const T& t, int order) {
    using std::exp;
    if (order != 2 && order != 4 && order != 6 && order != 8 && order != 10) {
        throw ArgumentError("magnus series truncations exist for orders 2, 4, 6, 8, 10");
    }
    T bracket = T(1) / T(6);
    if (order >= 4) {
        bracket -= t / T(12);
    }
    if (order >= 6) {
        bracket += t * t * t / T(80);
    }
    if (order >= 8) {
        bracket -= T(3) * t * t * t * t * t / T(1120);
    }
    if (order >= 10) {
        const T t7 = t * t * t * t * t * t * t;
        bracket += T(27) * t7 / T(44800);
    }
    return t * exp(-t) * (exp(T(3) * t) - T(1)) * bracket;
}

/// Split realization of the 2x2 matrix problem.
enum class Matrix2x2Split {
    /// A-stage advances only the clock; the B-stage is the full coefficient
    /// exponential frozen at the handed clock.  This realizes frozen-time
    /// kernels (the midpoint kernel and the frozen odd-width basis).
    Frozen,
    /// Constant diagonal part as drift, nilpotent time-dependent part as kick
    /// (both stage exponentials are exact in closed form).
    SplitTV,
};

/// State layout: row-major flattening [y00, y01, y10, y11] of Y.
template <typename T>
[[nodiscard]] Problem<T> matrix2x2_problem(Matrix2x2Split split = Matrix2x2Split::Frozen) {
    using std::exp;
    Problem<T> p;
    p.name = "matrix2x2";
    p.dim = 4;
    p.t_start = T(0);
    p.linear = true;
    p.a_matrix = [](const T& t) {
        return Matrix<T>{{T(2), t}, {T(0), T(-1)}};
    };
    p.t_matrix = Matrix<T>{{T(2), T(0)}, {T(0), T(-1)}};
    p.v_matrix = [](const T& t) {
        return Matrix<T>{{T(0), t}, {T(0), T(0)}};
    };
    p.exact = [](const T& t) {
        return StateVector<T>{exp(T(2) * t), matrix2x2_f_exact(t), T(0), exp(-t)};
    };

    const auto a_matrix = p.a_matrix;
    const auto frozen_flow = [a_matrix](const StateVector<T>& s, const T& t, const T& h) {
        const Matrix<T> e = expm(a_matrix(t), h);
        StateVector<T> out(4);
        out[0] = e(0, 0) * s[0] + e(0, 1) * s[2];
        out[1] = e(0, 0) * s[1] + e(0, 1) * s[3];
        out[2] = e(1, 0) * s[0] + e(1, 1) * s[2];
        out[3] = e(1, 0) * s[1] + e(1, 1) * s[3];
        return out;
    };
    p.system.dim = 4;
    p.system.time_dependent = true;
    p.system.full_exp = frozen_flow;

    if (split == Matrix2x2Split::Frozen) {
        p.system.flow_a = [](const StateVector<T>& s, const T&, const T&) { return s; };
        p.system.flow_b = frozen_flow;
    } else {
        p.system.flow_a = [](const StateVector<T>& s, const T&, const T& h) {
            StateVector<T> out = s;
            const T up = exp(T(2) * h);
            const T dn = exp(-h);
            out[0] *= up;
            out[1] *= up;
            out[2] *= dn;
            out[3] *= dn;
            return out;
        };
        p.system.flow_b = [](const StateVector<T>& s, const T& t, const T& h) {
            // exp(h V(t)) = 1 + h V(t) exactly (V is nilpotent).
            StateVector<T> out = s;
            out[0] += h * t * s[2];
            out[1] += h * t * s[3];
            return out;
        };
    }
    return p;
}

// =============================================================================
// Radial Schroedinger-type problems  q'' = f(t) q
// =============================================================================

namespace detail {

/// Assembles a Problem for q'' = f(t) q with the drift/kick split, closed-form
/// exact solution, and the linear-coefficient matrices.
template <typename T>
[[nodiscard]] Problem<T> radial_problem(std::string name, std::function<T(const T&)> f,
                                        std::function<StateVector<T>(const T&)> exact,
                                        const T& t_start) {
    Problem<T> p;
    p.name = std::move(name);
    p.dim = 2;
    p.dof = 1;
    p.t_start = t_start;
    p.exact = std::move(exact);
    p.linear = true;
    p.t_matrix = Matrix<T>{{T(0), T(1)}, {T(0), T(0)}};
    p.v_matrix = [f](const T& t) {
        return Matrix<T>{{T(0), T(0)}, {f(t), T(0)}};
    };
    p.a_matrix = [f](const T& t) {
        return Matrix<T>{{T(0), T(1)}, {f(t), T(0)}};
    };
    p.force = ForceField<T>([f](const StateVector<T>& q, const T& t) {
        return StateVector<T>{f(t) * q[0]};
    });
    p.system = hamiltonian_system(*p.force, 1, /*time_dependent=*/true);
    const auto a_matrix = p.a_matrix;
    p.system.full_exp = [a_matrix](const StateVector<T>& s, const T& t, const T& h) {
        return expm(a_matrix(t), h).apply(s);
    };
    return p;
}

} // namespace detail

/// Behaviour of the hydrogen problem at its coefficient singularity t = 0.
template <typename T>
struct HydrogenOptions {
    /// Default start clock; keeps every stage strictly past the origin.
    T t_start_offset = T(1) / T(1000000);
    /// When true, a kick handed the exact origin applies the limiting action
    /// (q, v) -> (q, (1 - 2h) v), valid on states with q = 0; when false such
    /// a kick raises SingularityError.
    bool regularized_origin = false;
};

/// Radial hydrogen ground state: f(t) = 1 - 2/t, exact q = t e^{-t}.
template <typename T>
[[nodiscard]] Problem<T> hydrogen_problem(const HydrogenOptions<T>& options = {}) {
    using std::exp;
    auto f = [](const T& t) -> T {
        if (t == T(0)) {
            throw SingularityError("hydrogen coefficient 1 - 2/t evaluated at t = 0");
        }
        return T(1) - T(2) / t;
    };
    auto exact = [](const T& t) {
        return StateVector<T>{t * exp(-t), (T(1) - t) * exp(-t)};
    };
    Problem<T> p = detail::radial_problem<T>("hydrogen", f, exact, options.t_start_offset);

    if (options.regularized_origin) {
        const auto plain_kick = p.system.flow_b;
        p.system.flow_b = [plain_kick](const StateVector<T>& s, const T& t, const T& h) {
            if (t == T(0)) {
                if (s[0] != T(0)) {
                    throw SingularityError(
                        "origin kick limit requires q = 0 at the singular time");
                }
                StateVector<T> out = s;
                out[1] *= T(1) - T(2) * h;
                return out;
            }
            return plain_kick(s, t, h);
        };
    }
    return p;
}

/// Radial harmonic-oscillator state: f(t) = t^2 - 3, exact q = t e^{-t^2/2}.
template <typename T>
[[nodiscard]] Problem<T> radial_oscillator_problem() {
    using std::exp;
    return detail::radial_problem<T>(
        "oscillator", [](const T& t) { return t * t - T(3); },
        [](const T& t) {
            const T g = exp(-t * t / T(2));
            return StateVector<T>{t * g, (T(1) - t * t) * g};
        },
        T(0));
}

/// Factory used by the command line and the sweep harness.
template <typename T>
[[nodiscard]] Problem<T> make_problem(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Matrix2x2: return matrix2x2_problem<T>();
        case ProblemKind::Hydrogen: return hydrogen_problem<T>();
        case ProblemKind::Oscillator: return radial_oscillator_problem<T>();
    }
    throw ArgumentError("unknown problem kind");
}

// =============================================================================
// Magnus baseline steppers (linear problems)
// =============================================================================

namespace detail {

/// Applies a dim x dim propagator to a state holding either one dim-sized
/// vector or a row-major flattened dim x dim matrix of stacked columns.
template <typename T>
[[nodiscard]] StateVector<T> apply_propagator(const Matrix<T>& e, const StateVector<T>& s) {
    const std::size_t dim = e.rows();
    if (s.size() == dim) {
        return e.apply(s);
    }
    if (e.cols() == dim && s.size() == dim * dim) {
        StateVector<T> out(dim * dim, T(0));
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                T acc(0);
                for (std::size_t k = 0; k < dim; ++k) {
                    acc += e(i, k) * s[k * dim + j];
                }
                out[i * dim + j] = acc;
            }
        }
        return out;
    }
    throw DimensionError("state length does not match the coefficient matrix");
}

} // namespace detail

/// Second-order Magnus step: the full coefficient exponential frozen at the
/// interval midpoint.
template <typename T>
[[nodiscard]] ClockedState<T> magnus2_step(const Problem<T>& problem, const ClockedState<T>& in,
                                           const T& h) {
    if (!problem.linear || !problem.a_matrix) {
        throw CapabilityError("magnus steps require a linear problem");
    }
    ClockedState<T> out;
    out.state = detail::apply_propagator(expm(problem.a_matrix(in.t + h / T(2)), h), in.state);
    out.t = in.t + h;
    return out;
}

/// Fourth-order Magnus step in commutator-free split form: with
/// V_i = V(t + c_i h) and c_1,2 = 1/2 -+ sqrt(3)/6, c_3 = sqrt(3)/12,
/// applies (right to left)
///
///   e^{+c3 h (V2-V1)}  e^{h (T + (V1+V2)/2)}  e^{-c3 h (V2-V1)}.
template <typename T>
[[nodiscard]] ClockedState<T> magnus4_step(const Problem<T>& problem, const ClockedState<T>& in,
                                           const T& h) {
    using std::sqrt;
    if (!problem.linear || !problem.v_matrix || problem.t_matrix.rows() == 0) {
        throw CapabilityError("magnus steps require a linear problem with a T + V(t) split");
    }
    const T root3 = sqrt(T(3));
    const T c1 = T(1) / T(2) - root3 / T(6);
    const T c2 = T(1) / T(2) + root3 / T(6);
    const T c3 = root3 / T(12);

    const Matrix<T> v1 = problem.v_matrix(in.t + c1 * h);
    const Matrix<T> v2 = problem.v_matrix(in.t + c2 * h);
    const Matrix<T> diff = v2 - v1;
    const Matrix<T> mid = problem.t_matrix + (v1 + v2) * (T(1) / T(2));

    ClockedState<T> out;
    out.state = detail::apply_propagator(expm(diff, -c3 * h), in.state);
    out.state = detail::apply_propagator(expm(mid, h), out.state);
    out.state = detail::apply_propagator(expm(diff, c3 * h), out.state);
    out.t = in.t + h;
    return out;
}

} // namespace mpe
