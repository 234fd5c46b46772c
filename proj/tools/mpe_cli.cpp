// =============================================================================
// mpe: command-line front end for the multi-product extrapolation library.
//
// Subcommands
//   coeffs       print extrapolation nodes with exact and decimal weights
//   step         one step of a scheme or explicit integrator, with force counts
//   integrate    trajectory over an interval as CSV
//   convergence  fitted local/global orders for a list of schemes
//   figure       canned CSV studies (1: matrix problem vs Magnus,
//                2: radial sweep per order, 3: double/extended round-off)
//
// Exit codes: 0 success, 2 argument/usage errors, 1 runtime failures.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "mpe/mpe.hpp"

namespace {

using mpe::ExtendedReal;

template <typename F>
void with_real(const std::string& precision, F&& f) {
    if (precision == "double") {
        f(std::type_identity<double>{});
    } else if (precision == "extended") {
        f(std::type_identity<ExtendedReal>{});
    } else {
        throw mpe::ArgumentError("unknown precision: " + precision);
    }
}

[[nodiscard]] std::vector<std::string> state_labels(const std::string& problem_name,
                                                    std::size_t dim) {
    if (problem_name == "matrix2x2") {
        return {"y00", "y01", "y10", "y11"};
    }
    if (dim == 2) {
        return {"q", "v"};
    }
    std::vector<std::string> labels;
    labels.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        labels.push_back("y" + std::to_string(i));
    }
    return labels;
}

template <typename T>
void write_state_row(std::ostream& os, const mpe::Problem<T>& problem,
                     const mpe::ClockedState<T>& cs) {
    os << mpe::format_real(cs.t);
    for (const T& v : cs.state) {
        os << "," << mpe::format_real(v);
    }
    os << "," << mpe::format_real(mpe::error_norm(problem, cs));
}

// -----------------------------------------------------------------------------
// coeffs
// -----------------------------------------------------------------------------

struct CoeffsOptions {
    std::string parity = "even";
    int n = 0;
    std::vector<int> ks;
    int correction_m = 0;
};

void run_coeffs(const CoeffsOptions& o) {
    std::vector<int> ks;
    if (!o.ks.empty()) {
        if (o.n > 0) {
            throw mpe::ArgumentError("--n and --ks are mutually exclusive");
        }
        ks = o.ks;
    } else if (o.correction_m > 0) {
        ks = mpe::final_correction_sequence(o.correction_m, o.n > 0 ? o.n : 2);
    } else if (o.n > 0) {
        ks = o.parity == "odd" ? mpe::odd_sequence(o.n) : mpe::even_sequence(o.n);
    } else {
        throw mpe::ArgumentError("coeffs needs --n or --ks");
    }
    // Weights depend only on the node set, so print rows in canonical
    // ascending-node order regardless of the order given.
    std::sort(ks.begin(), ks.end());
    const mpe::WeightSet w = mpe::closed_form_weights(ks);
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::cout << w.ks[i] << "\t" << w.cs[i].to_string() << "\t"
                  << mpe::format_real(mpe::rational_to_real<double>(w.cs[i])) << "\n";
    }
}

// -----------------------------------------------------------------------------
// step
// -----------------------------------------------------------------------------

struct StepOptions {
    std::string problem = "hydrogen";
    std::string method = "mpe";
    int order = 4;
    std::string kernel = "ab";
    double h = 0.0;
    double t0 = std::numeric_limits<double>::quiet_NaN();
    std::string precision = "double";
};

template <typename T>
void run_step_t(const StepOptions& o) {
    if (o.h <= 0.0) {
        throw mpe::ArgumentError("--h must be positive");
    }
    const mpe::Problem<T> problem = mpe::make_problem<T>(mpe::parse_problem(o.problem));
    const T t0 = std::isnan(o.t0) ? problem.t_start : T(o.t0);
    const mpe::ClockedState<T> start{problem.exact(t0), t0};
    const T h(o.h);

    std::vector<std::pair<std::string, std::string>> meta{
        {"command", "step"},
        {"problem", problem.name},
        {"precision", mpe::precision_name<T>()},
        {"method", o.method},
    };
    const std::vector<std::string> labels = state_labels(problem.name, problem.dim);

    if (o.method == "mpe") {
        const mpe::MpeScheme scheme =
            mpe::scheme_for_order(o.order, mpe::parse_kernel(o.kernel));
        meta.emplace_back("kernel", mpe::kernel_name(scheme.kernel));
        meta.emplace_back("scheme", scheme.label);

        std::optional<mpe::StepBudget> budget;
        if (problem.force) {
            mpe::ForceField<T> force = *problem.force;
            budget = mpe::force_budget(scheme, force, problem.system, start, h);
        }
        const mpe::ClockedState<T> out = mpe::mpe_step(scheme, problem.system, start, h);

        mpe::detail::write_metadata(std::cout, meta);
        std::cout << "t";
        for (const auto& l : labels) {
            std::cout << "," << l;
        }
        std::cout << ",error";
        if (budget) {
            std::cout << ",kernel_applications,forces_raw,forces_shared";
        }
        std::cout << "\n";
        write_state_row(std::cout, problem, out);
        if (budget) {
            std::cout << "," << budget->kernel_applications << "," << budget->forces_raw
                      << "," << budget->forces_shared;
        }
        std::cout << "\n";
        return;
    }

    if (!problem.force) {
        throw mpe::CapabilityError("explicit integrators need a force-based problem");
    }
    const mpe::ExplicitMethod method = mpe::parse_explicit_method(o.method);
    mpe::ForceField<T> force = *problem.force;
    force.set_sharing(false);
    force.reset_evaluations();
    const mpe::PhaseState<T> phase = mpe::split_state_to_phase(start, problem.dof);
    const mpe::ClockedState<T> out =
        mpe::phase_to_split_state(mpe::explicit_step(method, force, phase, h));
    const std::int64_t forces = force.evaluations();

    mpe::detail::write_metadata(std::cout, meta);
    std::cout << "t";
    for (const auto& l : labels) {
        std::cout << "," << l;
    }
    std::cout << ",error,forces\n";
    write_state_row(std::cout, problem, out);
    std::cout << "," << forces << "\n";
}

// -----------------------------------------------------------------------------
// integrate
// -----------------------------------------------------------------------------

struct IntegrateOptions {
    std::string problem = "hydrogen";
    std::string method = "mpe";
    int order = 4;
    std::string kernel = "ab";
    std::string mode = "per-step";
    int correction_m = 0;
    int steps = 100;
    double t0 = std::numeric_limits<double>::quiet_NaN();
    double t1 = 1.0;
    std::string precision = "double";
};

template <typename T>
void run_integrate_t(const IntegrateOptions& o) {
    const mpe::Problem<T> problem = mpe::make_problem<T>(mpe::parse_problem(o.problem));
    const T t0 = std::isnan(o.t0) ? problem.t_start : T(o.t0);
    const mpe::ClockedState<T> start{problem.exact(t0), t0};
    const T t1(o.t1);

    std::vector<std::pair<std::string, std::string>> meta{
        {"command", "integrate"},
        {"problem", problem.name},
        {"precision", mpe::precision_name<T>()},
        {"method", o.method},
        {"steps", std::to_string(o.steps)},
    };

    std::vector<mpe::ClockedState<T>> trajectory;
    if (o.method == "mpe") {
        mpe::MpeScheme scheme;
        if (o.mode == "corrected") {
            if (o.order % 2 != 0) {
                throw mpe::ArgumentError("final correction applies to even-order schemes");
            }
            const int m = o.correction_m > 0 ? o.correction_m : o.steps;
            scheme = mpe::build_final_correction(m, o.order / 2, mpe::parse_kernel(o.kernel));
        } else if (o.mode == "per-step") {
            scheme = mpe::scheme_for_order(o.order, mpe::parse_kernel(o.kernel));
        } else {
            throw mpe::ArgumentError("unknown mode: " + o.mode);
        }
        meta.emplace_back("kernel", mpe::kernel_name(scheme.kernel));
        meta.emplace_back("scheme", scheme.label);
        trajectory = mpe::integrate(scheme, problem.system, start, t1, o.steps);
    } else {
        if (!problem.force) {
            throw mpe::CapabilityError("explicit integrators need a force-based problem");
        }
        if (o.steps < 1) {
            throw mpe::ArgumentError("--steps must be positive");
        }
        const mpe::ExplicitMethod method = mpe::parse_explicit_method(o.method);
        mpe::ForceField<T> force = *problem.force;
        const T h = (t1 - t0) / T(o.steps);
        mpe::PhaseState<T> phase = mpe::split_state_to_phase(start, problem.dof);
        trajectory.push_back(start);
        for (int i = 0; i < o.steps; ++i) {
            phase = mpe::explicit_step(method, force, phase, h);
            trajectory.push_back(mpe::phase_to_split_state(phase));
        }
    }

    mpe::detail::write_metadata(std::cout, meta);
    std::cout << "t";
    for (const auto& l : state_labels(problem.name, problem.dim)) {
        std::cout << "," << l;
    }
    std::cout << ",error\n";
    for (const auto& cs : trajectory) {
        write_state_row(std::cout, problem, cs);
        std::cout << "\n";
    }
}

// -----------------------------------------------------------------------------
// convergence
// -----------------------------------------------------------------------------

struct ConvergenceOptions {
    std::string problem = "hydrogen";
    std::vector<int> orders{2, 3, 4, 5, 6};
    std::string kernel = "ab";
    std::string scope = "local";
    std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
    double t1 = 1.0;
    std::vector<int> steps{8, 16, 32, 64};
    std::string precision = "double";
};

template <typename T>
void run_convergence_t(const ConvergenceOptions& o) {
    const mpe::Problem<T> problem = mpe::make_problem<T>(mpe::parse_problem(o.problem));
    const mpe::KernelKind kernel = mpe::parse_kernel(o.kernel);
    std::vector<T> hs;
    hs.reserve(o.hs.size());
    for (double h : o.hs) {
        hs.push_back(T(h));
    }

    mpe::detail::write_metadata(std::cout, {{"command", "convergence"},
                                            {"problem", problem.name},
                                            {"precision", mpe::precision_name<T>()},
                                            {"kernel", mpe::kernel_name(kernel)},
                                            {"scope", o.scope}});
    std::cout << "order,label,slope,residual_rms,points_used\n";
    for (int order : o.orders) {
        const mpe::MpeScheme scheme = mpe::scheme_for_order(order, kernel);
        std::cout << order << "," << scheme.label << ",";
        try {
            mpe::OrderFit fit;
            if (o.scope == "local") {
                fit = mpe::local_order(problem, scheme, hs);
            } else if (o.scope == "global") {
                fit = mpe::global_order(problem, scheme, T(o.t1), o.steps);
            } else {
                throw mpe::ArgumentError("unknown scope: " + o.scope);
            }
            std::cout << mpe::format_real(fit.slope) << ","
                      << mpe::format_real(fit.residual_rms) << "," << fit.points_used
                      << "\n";
        } catch (const mpe::InsufficientSignalError&) {
            std::cout << "nan,nan,0\n";
        }
    }
}

// -----------------------------------------------------------------------------
// figure
// -----------------------------------------------------------------------------

struct FigureOptions {
    int which = 1;
    std::string out;
    std::vector<int> orders;
    int points = 200;
    std::string precision = "double";
    int jobs = 1;
    std::string problem = "hydrogen";
};

void run_figure(const FigureOptions& o) {
    if (o.points < 2) {
        throw mpe::ArgumentError("--points must be at least 2");
    }
    if (o.jobs < 1) {
        throw mpe::ArgumentError("--jobs must be at least 1");
    }
    const std::string out = o.out.empty() ? "figure" + std::to_string(o.which) + ".csv" : o.out;

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (out != "-") {
        file.open(out);
        if (!file) {
            throw mpe::Error("cannot open output file: " + out);
        }
        os = &file;
    }

    const mpe::ProblemKind radial_kind = mpe::parse_problem(o.problem);
    if (o.which != 1 && radial_kind == mpe::ProblemKind::Matrix2x2) {
        throw mpe::ArgumentError("figures 2 and 3 sweep the radial problems");
    }

    switch (o.which) {
        case 1:
            with_real(o.precision, [&](auto tag) {
                using T = typename decltype(tag)::type;
                mpe::write_figure1_csv<T>(*os, o.points, o.jobs);
            });
            break;
        case 2: {
            const std::vector<int> orders = o.orders.empty()
                                                ? std::vector<int>{4, 8, 16, 32}
                                                : o.orders;
            with_real(o.precision, [&](auto tag) {
                using T = typename decltype(tag)::type;
                mpe::write_figure2_csv<T>(*os, orders, o.points, o.jobs, radial_kind);
            });
            break;
        }
        case 3: {
            const std::vector<int> orders =
                o.orders.empty() ? std::vector<int>{40, 44, 48, 52, 56, 60, 64, 68}
                                 : o.orders;
            mpe::write_figure3_csv(*os, orders, o.points, o.jobs, radial_kind);
            break;
        }
        default:
            throw mpe::ArgumentError("figure index must be 1, 2, or 3");
    }
    if (os == &file) {
        file.close();
        std::cout << "wrote " << out << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    CLI::App app{"multi-product split-operator integrators"};
    // Long-form help only: --h is the step-width option of several subcommands.
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", std::string(mpe::kVersion));
    app.require_subcommand(1);

    const auto parity_check = CLI::IsMember({"even", "odd"});
    const auto precision_check = CLI::IsMember({"double", "extended"});
    const auto kernel_check = CLI::IsMember({"t1", "ab", "ba", "midpoint"});
    const auto method_check = CLI::IsMember(
        {"mpe", "verlet", "rk2", "kutta3", "nystrom3", "ba3", "nystrom5", "nystrom7"});
    const auto problem_check = CLI::IsMember({"matrix2x2", "hydrogen", "oscillator"});

    CoeffsOptions co;
    auto* coeffs = app.add_subcommand("coeffs", "Print extrapolation nodes and weights");
    coeffs->add_option("--parity", co.parity, "Node family: even or odd")->check(parity_check);
    coeffs->add_option("--n", co.n, "Number of nodes in the standard family");
    coeffs->add_option("--ks", co.ks, "Explicit node list (comma separated)")
        ->delimiter(',');
    coeffs->add_option("--correction-m", co.correction_m,
                       "Leading node of a final-correction tail (with --n)");
    coeffs->callback([&co] { run_coeffs(co); });

    StepOptions so;
    auto* step = app.add_subcommand("step", "Apply one integration step");
    step->add_option("--problem", so.problem, "Built-in problem")->check(problem_check);
    step->add_option("--method", so.method, "mpe or an explicit integrator")
        ->check(method_check);
    step->add_option("--order", so.order, "Scheme order for --method mpe");
    step->add_option("--kernel", so.kernel, "Kernel for even-order schemes")
        ->check(kernel_check);
    step->add_option("--h", so.h, "Step width")->required();
    step->add_option("--t0", so.t0, "Start clock (default: problem start)");
    step->add_option("--precision", so.precision, "double or extended")
        ->check(precision_check);
    step->callback([&so] {
        with_real(so.precision, [&so](auto tag) {
            using T = typename decltype(tag)::type;
            run_step_t<T>(so);
        });
    });

    IntegrateOptions io;
    auto* integrate = app.add_subcommand("integrate", "Integrate over an interval");
    integrate->add_option("--problem", io.problem, "Built-in problem")->check(problem_check);
    integrate->add_option("--method", io.method, "mpe or an explicit integrator")
        ->check(method_check);
    integrate->add_option("--order", io.order, "Scheme order for --method mpe");
    integrate->add_option("--kernel", io.kernel, "Kernel for even-order schemes")
        ->check(kernel_check);
    integrate->add_option("--mode", io.mode, "per-step or corrected")
        ->check(CLI::IsMember({"per-step", "corrected"}));
    integrate->add_option("--correction-m", io.correction_m,
                          "Substep count in corrected mode (default: --steps)");
    integrate->add_option("--steps", io.steps, "Number of steps");
    integrate->add_option("--t0", io.t0, "Start clock (default: problem start)");
    integrate->add_option("--t1", io.t1, "End clock")->required();
    integrate->add_option("--precision", io.precision, "double or extended")
        ->check(precision_check);
    integrate->callback([&io] {
        with_real(io.precision, [&io](auto tag) {
            using T = typename decltype(tag)::type;
            run_integrate_t<T>(io);
        });
    });

    ConvergenceOptions vo;
    auto* convergence =
        app.add_subcommand("convergence", "Fit observed orders of accuracy");
    convergence->add_option("--problem", vo.problem, "Built-in problem")
        ->check(problem_check);
    convergence->add_option("--orders", vo.orders, "Scheme orders (comma separated)")
        ->delimiter(',');
    convergence->add_option("--kernel", vo.kernel, "Kernel for even-order schemes")
        ->check(kernel_check);
    convergence->add_option("--scope", vo.scope, "local or global")
        ->check(CLI::IsMember({"local", "global"}));
    convergence->add_option("--h", vo.hs, "Step widths for local fits")->delimiter(',');
    convergence->add_option("--t1", vo.t1, "End clock for global fits");
    convergence->add_option("--steps", vo.steps, "Step counts for global fits")
        ->delimiter(',');
    convergence->add_option("--precision", vo.precision, "double or extended")
        ->check(precision_check);
    convergence->callback([&vo] {
        with_real(vo.precision, [&vo](auto tag) {
            using T = typename decltype(tag)::type;
            run_convergence_t<T>(vo);
        });
    });

    FigureOptions fo;
    auto* figure = app.add_subcommand("figure", "Write a canned CSV study");
    figure->add_option("which", fo.which, "Study index: 1, 2, or 3")
        ->required()
        ->check(CLI::Range(1, 3));
    figure->add_option("--out", fo.out, "Output path ('-' for stdout)");
    figure->add_option("--orders", fo.orders, "Scheme orders (studies 2 and 3)")
        ->delimiter(',');
    figure->add_option("--points", fo.points, "Grid points");
    figure->add_option("--precision", fo.precision, "double or extended (studies 1 and 2)")
        ->check(precision_check);
    figure->add_option("--jobs", fo.jobs, "Concurrent sweep columns");
    figure->add_option("--problem", fo.problem, "Radial problem for studies 2 and 3")
        ->check(problem_check);
    figure->callback([&fo] { run_figure(fo); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const mpe::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
