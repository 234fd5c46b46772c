// Benchmark problems: exact solutions, closed forms, Magnus baselines.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mpe/harness.hpp"

using namespace mpe;

namespace {

/// Right-hand side A(t) * Y of a linear problem, in the problem's state layout.
template <typename T>
StateVector<T> linear_rhs(const Problem<T>& p, const StateVector<T>& state, const T& t) {
    return detail::apply_propagator(p.a_matrix(t), state);
}

/// Max-abs residual of the exact solution against the linear ODE, using an
/// extended-precision central difference for the time derivative.
double ode_residual(const Problem<ExtendedReal>& p, const ExtendedReal& t) {
    const ExtendedReal d = ExtendedReal(1) / ExtendedReal(100000000);
    const auto plus = p.exact(t + d);
    const auto minus = p.exact(t - d);
    const auto rhs = linear_rhs(p, p.exact(t), t);
    ExtendedReal worst(0);
    ExtendedReal scale(1);
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const ExtendedReal derivative = (plus[i] - minus[i]) / (ExtendedReal(2) * d);
        const ExtendedReal gap = abs(derivative - rhs[i]);
        if (gap > worst) {
            worst = gap;
        }
        const ExtendedReal magnitude = abs(rhs[i]);
        if (magnitude > scale) {
            scale = magnitude;
        }
    }
    return to_double(worst / scale);
}

double endpoint_error(const Problem<double>& p,
                      ClockedState<double> (*stepper)(const Problem<double>&,
                                                      const ClockedState<double>&,
                                                      const double&),
                      int steps, double t1) {
    ClockedState<double> cs = p.initial_state();
    const double h = (t1 - cs.t) / steps;
    for (int i = 0; i < steps; ++i) {
        cs = stepper(p, cs, h);
    }
    return error_norm(p, cs);
}

double stepper_slope(const Problem<double>& p,
                     ClockedState<double> (*stepper)(const Problem<double>&,
                                                     const ClockedState<double>&,
                                                     const double&)) {
    std::vector<std::pair<double, double>> samples;
    for (int steps : {8, 16, 32, 64}) {
        samples.emplace_back(1.0 / steps, endpoint_error(p, stepper, steps, 1.0));
    }
    return detail::fit_loglog(samples, 1.0).slope;
}

} // namespace

TEST_CASE("problem names round-trip") {
    for (ProblemKind kind :
         {ProblemKind::Matrix2x2, ProblemKind::Hydrogen, ProblemKind::Oscillator}) {
        CHECK(parse_problem(problem_name(kind)) == kind);
        CHECK(make_problem<double>(kind).name == problem_name(kind));
    }
    CHECK_THROWS_AS(parse_problem("kepler"), ArgumentError);
}

TEST_CASE("problem shapes") {
    const auto m = matrix2x2_problem<double>();
    CHECK(m.dim == 4);
    CHECK(m.linear);
    CHECK_FALSE(m.force.has_value());
    CHECK(m.initial_state().state == StateVector<double>{1.0, 0.0, 0.0, 1.0});
    CHECK(m.initial_state().t == 0.0);

    const auto h = hydrogen_problem<double>();
    CHECK(h.dim == 2);
    CHECK(h.dof == 1);
    CHECK(h.force.has_value());
    CHECK(h.t_start == 1e-6);

    const auto o = radial_oscillator_problem<double>();
    CHECK(o.t_start == 0.0);
    CHECK(o.initial_state().state == StateVector<double>{0.0, 1.0});
}

TEST_CASE("exact solutions satisfy their equations") {
    CHECK(ode_residual(matrix2x2_problem<ExtendedReal>(), ExtendedReal(1) / ExtendedReal(2)) <=
          1e-12);
    CHECK(ode_residual(matrix2x2_problem<ExtendedReal>(), ExtendedReal(2)) <= 1e-12);
    CHECK(ode_residual(hydrogen_problem<ExtendedReal>(), ExtendedReal(7) / ExtendedReal(10)) <=
          1e-12);
    CHECK(ode_residual(hydrogen_problem<ExtendedReal>(), ExtendedReal(3)) <= 1e-12);
    CHECK(ode_residual(radial_oscillator_problem<ExtendedReal>(), ExtendedReal(1)) <= 1e-12);
    CHECK(ode_residual(radial_oscillator_problem<ExtendedReal>(),
                       ExtendedReal(5) / ExtendedReal(2)) <= 1e-12);
}

TEST_CASE("upper-right closed forms match single-application schemes") {
    const auto problem = matrix2x2_problem<double>();
    for (int order : {2, 4, 6, 8, 10}) {
        const MpeScheme scheme = build_even(order / 2, KernelKind::FrozenMidpoint);
        for (double t : {0.5, 1.0, 2.0}) {
            const auto out = mpe_step(scheme, problem.system, problem.initial_state(), t);
            const double expected = matrix2x2_f_closed_form(t, order);
            INFO("order " << order << " t " << t);
            CHECK(std::abs(out.state[1] - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
        }
    }
    CHECK_THROWS_AS(matrix2x2_f_closed_form(1.0, 3), ArgumentError);
    CHECK_THROWS_AS(matrix2x2_f_closed_form(1.0, 12), ArgumentError);
}

TEST_CASE("closed forms converge to the exact off-diagonal entry") {
    // The order-10 approximant is very accurate at moderate widths.
    for (double t : {0.25, 0.5, 1.0}) {
        const double exact = matrix2x2_f_exact(t);
        CHECK(std::abs(matrix2x2_f_closed_form(t, 10) - exact) <
              std::abs(matrix2x2_f_closed_form(t, 2) - exact));
    }
}

TEST_CASE("truncated exponential-series baseline behaves like a power series") {
    CHECK_THROWS_AS(magnus_f_series(1.0, 3), ArgumentError);
    CHECK_THROWS_AS(magnus_f_series(1.0, 12), ArgumentError);

    const double inside = 0.8; // well inside the convergence radius 2*pi/3
    const double exact_in = matrix2x2_f_exact(inside);
    double previous = std::abs(magnus_f_series(inside, 2) - exact_in);
    for (int order : {4, 6, 8, 10}) {
        const double err = std::abs(magnus_f_series(inside, order) - exact_in);
        INFO("order " << order);
        CHECK(err < previous);
        previous = err;
    }

    const double outside = 3.5; // beyond the convergence radius
    const double exact_out = matrix2x2_f_exact(outside);
    previous = std::abs(magnus_f_series(outside, 4) - exact_out);
    for (int order : {6, 8, 10}) {
        const double err = std::abs(magnus_f_series(outside, order) - exact_out);
        INFO("order " << order);
        CHECK(err > previous);
        previous = err;
    }
}

TEST_CASE("midpoint-exponential stepper matches the frozen-midpoint kernel") {
    const auto p = matrix2x2_problem<double>();
    const ClockedState<double> in = p.initial_state();
    const auto direct = magnus2_step(p, in, 0.7);
    const auto kernel = kernel_step(p.system, KernelKind::FrozenMidpoint, in, 0.7);
    REQUIRE(direct.t == kernel.t);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(within_ulps(direct.state[i], kernel.state[i], 4));
    }
}

TEST_CASE("exponential-baseline convergence orders") {
    const auto matrix = matrix2x2_problem<double>();
    CHECK(stepper_slope(matrix, magnus2_step<double>) == Catch::Approx(2.0).margin(0.3));
    CHECK(stepper_slope(matrix, magnus4_step<double>) == Catch::Approx(4.0).margin(0.3));

    const auto oscillator = radial_oscillator_problem<double>();
    CHECK(stepper_slope(oscillator, magnus4_step<double>) == Catch::Approx(4.0).margin(0.3));
}

TEST_CASE("exponential baselines require linear structure") {
    Problem<double> blank;
    const ClockedState<double> in{{1.0, 0.0}, 0.0};
    CHECK_THROWS_AS(magnus2_step(blank, in, 0.1), CapabilityError);
    CHECK_THROWS_AS(magnus4_step(blank, in, 0.1), CapabilityError);
}

TEST_CASE("hydrogen coefficient is singular at the origin") {
    const auto p = hydrogen_problem<double>();
    REQUIRE(p.force.has_value());
    CHECK_THROWS_AS(p.force->eval(StateVector<double>{1.0}, 0.0), SingularityError);
    // The kick flow inherits the singularity.
    CHECK_THROWS_AS(p.system.flow_b(StateVector<double>{1.0, 0.0}, 0.0, 0.1), SingularityError);
    // Away from the origin everything is regular.
    CHECK_NOTHROW(p.system.flow_b(StateVector<double>{1.0, 0.0}, 0.5, 0.1));
}

TEST_CASE("regularized origin kick") {
    const auto p = hydrogen_problem<double>(
        HydrogenOptions<double>{.t_start_offset = 0.0, .regularized_origin = true});
    // q = 0 at the singular time: v picks up the limiting factor (1 - 2h).
    const auto kicked = p.system.flow_b(StateVector<double>{0.0, 1.0}, 0.0, 0.25);
    CHECK(kicked[0] == 0.0);
    CHECK(kicked[1] == 0.5);
    // q != 0 at the singular time has no finite limit.
    CHECK_THROWS_AS(p.system.flow_b(StateVector<double>{0.1, 1.0}, 0.0, 0.25),
                    SingularityError);
    // Regular times are untouched by the wrapper.
    const auto base = hydrogen_problem<double>();
    const auto a = p.system.flow_b(StateVector<double>{0.4, 0.2}, 1.5, 0.3);
    const auto b = base.system.flow_b(StateVector<double>{0.4, 0.2}, 1.5, 0.3);
    CHECK(a == b);
}

TEST_CASE("split variants of the triangular problem") {
    const auto frozen = matrix2x2_problem<double>(Matrix2x2Split::Frozen);
    const auto split_tv = matrix2x2_problem<double>(Matrix2x2Split::SplitTV);

    // The frozen variant has an identity drift.
    const StateVector<double> s{0.3, -0.2, 0.5, 0.9};
    CHECK(frozen.system.flow_a(s, 1.0, 0.5) == s);

    // The split variant's kick is nilpotent: widths add exactly.
    const auto once = split_tv.system.flow_b(s, 2.0, 0.7);
    const auto twice = split_tv.system.flow_b(split_tv.system.flow_b(s, 2.0, 0.3), 2.0, 0.4);
    CHECK(once == twice);

    // Both variants deliver fourth-order convergence of the same scheme.
    const MpeScheme scheme = build_even(2, KernelKind::StrangAB);
    for (const auto* p : {&frozen, &split_tv}) {
        std::vector<std::pair<double, double>> samples;
        for (double h : {0.5, 0.4, 0.3, 0.2}) {
            const auto out = mpe_step(scheme, p->system, p->initial_state(), h);
            samples.emplace_back(h, error_norm(*p, out));
        }
        CHECK(detail::fit_loglog(samples, 1.0).slope == Catch::Approx(5.0).margin(0.6));
    }
}

TEST_CASE("hydrogen trajectories stay accurate over the sweep range") {
    const auto p = hydrogen_problem<double>();
    const MpeScheme scheme = scheme_for_order(8);
    // One application per target time, exactly as the error sweeps do.  A
    // single order-8 application loses accuracy as the width grows; multiple
    // steps recover it.
    for (double t : {0.5, 1.0, 2.0}) {
        const auto out = mpe_step(scheme, p.system, p.initial_state(), t - p.t_start);
        CHECK(error_norm(p, out) <= 2e-2);
    }
    const auto trajectory = integrate(scheme, p.system, p.initial_state(), 5.0, 20);
    CHECK(error_norm(p, trajectory.back()) <= 1e-4);
}
