#pragma once

// =============================================================================
// Verification harness: order fits, uniform-convergence sweeps, round-off
// comparison across precisions, and the canned CSV studies.
//
// Sweeps follow the single-application convention: each grid point t is
// reached by one scheme application of width t - t_start from the exact
// initial state, so a column directly displays a scheme's uniform convergence
// rather than accumulated stepping error.
// =============================================================================

#include <cmath>
#include <functional>
#include <future>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mpe/problems.hpp"
#include "mpe/version.hpp"

namespace mpe {

/// Builds the standard scheme of a given nominal order: even orders use the
/// natural node sequence over the chosen kernel, odd orders the odd-width
/// basis family.
[[nodiscard]] inline MpeScheme scheme_for_order(int order,
                                                KernelKind even_kernel = KernelKind::StrangAB) {
    if (order < 1) {
        throw ArgumentError("scheme order must be positive");
    }
    if (order % 2 == 0) {
        return build_even(order / 2, even_kernel);
    }
    return build_odd((order + 1) / 2);
}

/// Uniformly spaced grid including both endpoints.
template <typename T>
[[nodiscard]] std::vector<T> linspace(const T& lo, const T& hi, int n) {
    if (n < 2) {
        throw ArgumentError("grid needs at least two points");
    }
    std::vector<T> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * T(i) / T(n - 1);
    }
    return g;
}

/// Max-abs deviation between a computed state and the exact state at its clock.
template <typename T>
[[nodiscard]] T error_norm(const Problem<T>& problem, const ClockedState<T>& cs) {
    using std::abs;
    const StateVector<T> ref = problem.exact(cs.t);
    T m(0);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const T d = abs(cs.state[i] - ref[i]);
        if (d > m) {
            m = d;
        }
    }
    return m;
}

// =============================================================================
// Order fits
// =============================================================================

/// Result of a least-squares slope fit of log(error) against log(h).
struct OrderFit {
    double slope = 0.0;
    double residual_rms = 0.0;
    int points_used = 0;
};

namespace detail {

/// Fits log(err) ~ slope * log(h) + b, excluding points at the round-off
/// floor (100x epsilon of the reference scale).
template <typename T>
[[nodiscard]] OrderFit fit_loglog(const std::vector<std::pair<T, T>>& samples, const T& scale) {
    using std::abs;
    using std::log;
    const T floor = T(100) * real_epsilon<T>() * (abs(scale) > T(1) ? abs(scale) : T(1));
    std::vector<std::pair<double, double>> pts;
    for (const auto& [h, err] : samples) {
        if (err > floor) {
            pts.emplace_back(to_double(log(h)), to_double(log(err)));
        }
    }
    if (pts.size() < 2) {
        throw InsufficientSignalError(
            "all error samples sit at the round-off floor; no order is recoverable");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        throw ArgumentError("order fit requires distinct step widths");
    }
    OrderFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (const auto& [x, y] : pts) {
        const double r = y - (fit.slope * x + intercept);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.points_used = static_cast<int>(pts.size());
    return fit;
}

} // namespace detail

/// Local order: error of a single scheme application of width h from the
/// problem's exact start, fitted over h_list (at least three widths).
template <typename T>
[[nodiscard]] OrderFit local_order(const Problem<T>& problem, const MpeScheme& scheme,
                                   const std::vector<T>& h_list) {
    if (h_list.size() < 3) {
        throw ArgumentError("local order fit needs at least three step widths");
    }
    const auto plan = make_plan<T>(scheme);
    const ClockedState<T> start = problem.initial_state();
    std::vector<std::pair<T, T>> samples;
    T scale(1);
    for (const T& h : h_list) {
        if (h <= T(0)) {
            throw ArgumentError("step widths must be positive");
        }
        const ClockedState<T> out = mpe_step(plan, problem.system, start, h);
        samples.emplace_back(h, error_norm(problem, out));
        using std::abs;
        for (const T& v : problem.exact(start.t + h)) {
            if (abs(v) > scale) {
                scale = abs(v);
            }
        }
    }
    return detail::fit_loglog(samples, scale);
}

/// Global order: endpoint error after integrating to t_end with each step
/// count, fitted against the resulting widths.  For final-correction schemes
/// the entry s of steps_list selects the substep count m = s (same node tail
/// and kernel), since m is what refines the trajectory.
template <typename T>
[[nodiscard]] OrderFit global_order(const Problem<T>& problem, const MpeScheme& scheme,
                                    const T& t_end, const std::vector<int>& steps_list) {
    if (steps_list.size() < 2) {
        throw ArgumentError("global order fit needs at least two step counts");
    }
    const ClockedState<T> start = problem.initial_state();
    std::vector<std::pair<T, T>> samples;
    for (int steps : steps_list) {
        if (steps < 1) {
            throw ArgumentError("step counts must be positive");
        }
        MpeScheme used = scheme;
        if (scheme.mode == SchemeMode::FinalCorrection) {
            used = build_final_correction(steps, scheme.order / 2, scheme.kernel);
        }
        const auto trajectory = integrate(used, problem.system, start, t_end, steps);
        const T h = (t_end - start.t) / T(steps);
        samples.emplace_back(h, error_norm(problem, trajectory.back()));
    }
    using std::abs;
    T scale(1);
    for (const T& v : problem.exact(t_end)) {
        if (abs(v) > scale) {
            scale = abs(v);
        }
    }
    return detail::fit_loglog(samples, scale);
}

/// Recovers the leading tail coefficients (c_p, ..., c_{p+count-1}) of a
/// scalar function g(t) = prefix(t) + sum_i c_{p+i} t^{p+i} + O(t^{p+count}),
/// where prefix holds the known coefficients c_0..c_{p-1}.  The tail is
/// interpolated exactly on `count` geometrically spaced nodes t0, t0/ratio,
/// t0/ratio^2, ...; run at extended precision, since peeling the prefix is a
/// cancellation and the result inherits the O(t0^{p+count}) truncation bias
/// of the neglected remainder.
template <typename T>
[[nodiscard]] std::vector<T> fit_series_tail(const std::function<T(const T&)>& g,
                                             const std::vector<T>& prefix, int first_power,
                                             int count, const T& t0, const T& ratio) {
    if (first_power < 0) {
        throw ArgumentError("first recovered power must be non-negative");
    }
    if (count < 1) {
        throw ArgumentError("series fit needs at least one coefficient");
    }
    if (static_cast<int>(prefix.size()) != first_power) {
        throw ArgumentError("prefix must hold exactly the coefficients below the tail");
    }
    if (!(t0 > T(0)) || !(ratio > T(1))) {
        throw ArgumentError("series fit needs t0 > 0 and ratio > 1");
    }

    const std::size_t m = static_cast<std::size_t>(count);
    std::vector<std::vector<T>> a(m, std::vector<T>(m + 1, T(0)));
    T node = t0;
    for (std::size_t j = 0; j < m; ++j) {
        T prefix_value(0);
        for (std::size_t i = prefix.size(); i-- > 0;) {
            prefix_value = prefix_value * node + prefix[i];
        }
        T scale(1);
        for (int i = 0; i < first_power; ++i) {
            scale *= node;
        }
        T power(1);
        for (std::size_t i = 0; i < m; ++i) {
            a[j][i] = power;
            power *= node;
        }
        a[j][m] = (g(node) - prefix_value) / scale;
        node /= ratio;
    }

    // Gaussian elimination with partial pivoting.
    using std::abs;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < m; ++row) {
            if (abs(a[row][col]) > abs(a[pivot][col])) {
                pivot = row;
            }
        }
        if (a[pivot][col] == T(0)) {
            throw DegenerateNodeError("series fit nodes produced a singular system");
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t row = col + 1; row < m; ++row) {
            const T factor = a[row][col] / a[col][col];
            for (std::size_t i = col; i <= m; ++i) {
                a[row][i] -= factor * a[col][i];
            }
        }
    }
    std::vector<T> x(m, T(0));
    for (std::size_t row = m; row-- > 0;) {
        T sum = a[row][m];
        for (std::size_t i = row + 1; i < m; ++i) {
            sum -= a[row][i] * x[i];
        }
        x[row] = sum / a[row][row];
    }
    return x;
}

// =============================================================================
// Uniform-convergence sweeps
// =============================================================================

/// One scheme's column of a sweep: observable values and error norms on the
/// shared grid.
template <typename T>
struct SweepColumn {
    std::string label;
    int order = 0;
    std::vector<T> values;
    std::vector<T> errors;
    T max_error{};
};

template <typename T>
struct UniformSweep {
    std::vector<T> grid;
    std::vector<SweepColumn<T>> columns;
};

/// Scalar component displayed in sweep tables: the propagator's upper-right
/// entry for the matrix problem, the radial function q for the others.
template <typename T>
[[nodiscard]] std::size_t problem_observable_index(const Problem<T>& problem) {
    return problem.name == "matrix2x2" ? 1 : 0;
}

/// Runs one single-application sweep column over the grid.
template <typename T>
[[nodiscard]] SweepColumn<T> sweep_column(const Problem<T>& problem, const MpeScheme& scheme,
                                          const std::vector<T>& grid) {
    const auto plan = make_plan<T>(scheme);
    const ClockedState<T> start = problem.initial_state();
    SweepColumn<T> col;
    col.label = scheme.label;
    col.order = scheme.order;
    col.values.reserve(grid.size());
    col.errors.reserve(grid.size());
    col.max_error = T(0);
    for (const T& t : grid) {
        const ClockedState<T> out = mpe_step(plan, problem.system, start, t - start.t);
        col.values.push_back(out.state[problem_observable_index(problem)]);
        const T err = error_norm(problem, out);
        col.errors.push_back(err);
        if (err > col.max_error) {
            col.max_error = err;
        }
    }
    return col;
}

/// Single-application sweep of several schemes over one grid.  `jobs` > 1
/// evaluates columns concurrently; output order is the scheme order given.
template <typename T>
[[nodiscard]] UniformSweep<T> uniform_convergence_sweep(const Problem<T>& problem,
                                                        const std::vector<MpeScheme>& schemes,
                                                        const std::vector<T>& grid,
                                                        int jobs = 1) {
    UniformSweep<T> sweep;
    sweep.grid = grid;
    sweep.columns.resize(schemes.size());
    if (jobs <= 1 || schemes.size() <= 1) {
        for (std::size_t i = 0; i < schemes.size(); ++i) {
            sweep.columns[i] = sweep_column(problem, schemes[i], grid);
        }
        return sweep;
    }
    std::vector<std::future<SweepColumn<T>>> futures;
    futures.reserve(schemes.size());
    for (const MpeScheme& scheme : schemes) {
        futures.push_back(std::async(std::launch::async, [&problem, scheme, &grid] {
            return sweep_column(problem, scheme, grid);
        }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) {
        sweep.columns[i] = futures[i].get();
    }
    return sweep;
}

// =============================================================================
// Round-off study
// =============================================================================

struct RoundoffColumn {
    int order = 0;
    std::vector<double> errors_double;
    std::vector<double> errors_extended;
    double max_double = 0.0;
    double max_extended = 0.0;
};

struct RoundoffReport {
    std::vector<double> grid;
    std::vector<RoundoffColumn> columns;
    /// First scanned order whose double-precision error is dominated by
    /// round-off (non-improving, or far above the extended reference);
    /// -1 when the scan never degrades.
    int onset_order = -1;
};

namespace detail {

template <typename T>
[[nodiscard]] std::vector<double> roundoff_errors(ProblemKind kind, int order,
                                                  const std::vector<double>& grid) {
    const Problem<T> problem = make_problem<T>(kind);
    std::vector<T> tgrid;
    tgrid.reserve(grid.size());
    for (double t : grid) {
        tgrid.push_back(T(t));
    }
    const SweepColumn<T> col =
        sweep_column(problem, scheme_for_order(order, KernelKind::StrangAB), tgrid);
    std::vector<double> out;
    out.reserve(col.errors.size());
    for (const T& e : col.errors) {
        out.push_back(to_double(e));
    }
    return out;
}

} // namespace detail

/// Sweeps the same orders at double and extended precision and reports where
/// double-precision results stop improving relative to the extended reference.
[[nodiscard]] inline RoundoffReport roundoff_study(ProblemKind kind,
                                                   const std::vector<int>& orders,
                                                   const std::vector<double>& grid,
                                                   int jobs = 1) {
    if (orders.empty()) {
        throw ArgumentError("round-off study needs at least one order");
    }
    RoundoffReport report;
    report.grid = grid;
    report.columns.resize(orders.size());

    auto run_one = [&](std::size_t i) {
        RoundoffColumn col;
        col.order = orders[i];
        col.errors_double = detail::roundoff_errors<double>(kind, orders[i], grid);
        col.errors_extended = detail::roundoff_errors<ExtendedReal>(kind, orders[i], grid);
        for (double e : col.errors_double) {
            col.max_double = std::max(col.max_double, e);
        }
        for (double e : col.errors_extended) {
            col.max_extended = std::max(col.max_extended, e);
        }
        return col;
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < orders.size(); ++i) {
            report.columns[i] = run_one(i);
        }
    } else {
        std::vector<std::future<RoundoffColumn>> futures;
        futures.reserve(orders.size());
        for (std::size_t i = 0; i < orders.size(); ++i) {
            futures.push_back(std::async(std::launch::async, run_one, i));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
            report.columns[i] = futures[i].get();
        }
    }

    for (std::size_t i = 0; i < report.columns.size(); ++i) {
        const RoundoffColumn& col = report.columns[i];
        const bool stopped_improving =
            i > 0 && col.max_double > report.columns[i - 1].max_double;
        const bool dominated = col.max_double > 5.0 * std::max(col.max_extended, 1e-300);
        if (stopped_improving || dominated) {
            report.onset_order = col.order;
            break;
        }
    }
    return report;
}

// =============================================================================
// CSV output
// =============================================================================

namespace detail {

inline void write_metadata(std::ostream& os,
                           const std::vector<std::pair<std::string, std::string>>& fields) {
    os << "# tool=mpe version=" << kVersion;
    for (const auto& [key, value] : fields) {
        os << " " << key << "=" << value;
    }
    os << "\n";
}

} // namespace detail

/// Matrix-problem study: exact upper-right entry against truncated Magnus
/// series and single-application even schemes of orders 2..10 on [0, 4].
template <typename T>
void write_figure1_csv(std::ostream& os, int points = 200, int jobs = 1) {
    const Problem<T> problem = make_problem<T>(ProblemKind::Matrix2x2);
    const std::vector<T> grid = linspace(T(0), T(4), points);
    const std::vector<int> orders{2, 4, 6, 8, 10};

    std::vector<MpeScheme> schemes;
    schemes.reserve(orders.size());
    for (int order : orders) {
        schemes.push_back(build_even(order / 2, KernelKind::FrozenMidpoint));
    }
    const UniformSweep<T> sweep = uniform_convergence_sweep(problem, schemes, grid, jobs);

    detail::write_metadata(os, {{"study", "figure1"},
                                {"problem", problem.name},
                                {"precision", precision_name<T>()},
                                {"kernel", kernel_name(KernelKind::FrozenMidpoint)},
                                {"schemes", "magnus-4..10,even-2..10"}});
    os << "t,exact";
    for (int order : {4, 6, 8, 10}) {
        os << ",magnus" << order;
    }
    for (int order : orders) {
        os << ",mpe" << order;
    }
    os << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const T t = grid[i];
        os << format_real(t) << "," << format_real(matrix2x2_f_exact(t));
        for (int order : {4, 6, 8, 10}) {
            os << "," << format_real(magnus_f_series(t, order));
        }
        for (const auto& col : sweep.columns) {
            os << "," << format_real(col.values[i]);
        }
        os << "\n";
    }
}

/// Radial-problem wavefunction study: exact q(t) and single-application
/// scheme values at the requested orders on [0.1, 5].
template <typename T>
void write_figure2_csv(std::ostream& os, const std::vector<int>& orders, int points = 200,
                       int jobs = 1, ProblemKind kind = ProblemKind::Hydrogen) {
    const Problem<T> problem = make_problem<T>(kind);
    const std::vector<T> grid = linspace(T(1) / T(10), T(5), points);
    std::vector<MpeScheme> schemes;
    schemes.reserve(orders.size());
    for (int order : orders) {
        schemes.push_back(scheme_for_order(order, KernelKind::StrangAB));
    }
    const UniformSweep<T> sweep = uniform_convergence_sweep(problem, schemes, grid, jobs);

    std::string scheme_list;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        scheme_list += (i ? "," : "") + schemes[i].label;
    }
    detail::write_metadata(os, {{"study", "figure2"},
                                {"problem", problem.name},
                                {"precision", precision_name<T>()},
                                {"kernel", kernel_name(KernelKind::StrangAB)},
                                {"schemes", scheme_list}});
    os << "t,exact";
    for (int order : orders) {
        os << ",mpe" << order;
    }
    os << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const T t = grid[i];
        os << format_real(t) << ","
           << format_real(problem.exact(t)[problem_observable_index(problem)]);
        for (const auto& col : sweep.columns) {
            os << "," << format_real(col.values[i]);
        }
        os << "\n";
    }
}

/// Round-off study rows (t, order, error at double, error at extended).
inline void write_figure3_csv(std::ostream& os, const std::vector<int>& orders,
                              int points = 200, int jobs = 1,
                              ProblemKind kind = ProblemKind::Hydrogen) {
    const std::vector<double> grid_d = linspace(0.1, 5.0, points);
    const RoundoffReport report = roundoff_study(kind, orders, grid_d, jobs);

    std::string order_list;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        order_list += (i ? "," : "") + std::to_string(orders[i]);
    }
    detail::write_metadata(os, {{"study", "figure3"},
                                {"problem", problem_name(kind)},
                                {"precision", "double+extended"},
                                {"kernel", kernel_name(KernelKind::StrangAB)},
                                {"orders", order_list},
                                {"onset_order", std::to_string(report.onset_order)}});
    os << "t,order,double_error,extended_error\n";
    for (const RoundoffColumn& col : report.columns) {
        for (std::size_t i = 0; i < report.grid.size(); ++i) {
            os << format_real(report.grid[i]) << "," << col.order << ","
               << format_real(col.errors_double[i]) << ","
               << format_real(col.errors_extended[i]) << "\n";
        }
    }
}

} // namespace mpe
