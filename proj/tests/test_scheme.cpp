// Multi-product schemes: builders, plans, stepping, final correction.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mpe/harness.hpp"

using namespace mpe;

TEST_CASE("scheme builders") {
    const MpeScheme e3 = build_even(3);
    CHECK(e3.order == 6);
    CHECK(e3.parity == Parity::Even);
    CHECK(e3.label == "even-6");
    CHECK(e3.weights.ks == std::vector<int>{1, 2, 3});

    const MpeScheme o3 = build_odd(3);
    CHECK(o3.order == 5);
    CHECK(o3.parity == Parity::Odd);
    CHECK(o3.kernel == KernelKind::OddBasis);
    CHECK(o3.label == "odd-5");
    CHECK(o3.weights.ks == std::vector<int>{1, 3, 5});

    const MpeScheme c = build_custom({4, 1, 2});
    CHECK(c.order == 6);
    CHECK(c.label == "custom-3-node");

    const MpeScheme fc = build_final_correction(12, 2);
    CHECK(fc.order == 4);
    CHECK(fc.mode == SchemeMode::FinalCorrection);
    CHECK(fc.correction_m == 12);
    CHECK(fc.weights.ks == std::vector<int>{12, 1});
    CHECK(fc.label == "corrected-4-m12");

    CHECK_THROWS_AS(build_even(0), ArgumentError);
    CHECK_THROWS_AS(build_even(2, KernelKind::T1), ArgumentError);
    CHECK_THROWS_AS(build_even(2, KernelKind::OddBasis), ArgumentError);
    CHECK_THROWS_AS(build_custom({1, 2, 2}), DegenerateNodeError);
    CHECK_THROWS_AS(build_final_correction(1, 2), DegenerateNodeError);
}

TEST_CASE("plans sort nodes ascending and realize exact weights") {
    const auto plan = make_plan<double>(build_custom({4, 1, 2}));
    CHECK(plan.ks == std::vector<int>{1, 2, 4});
    const auto plan2 = make_plan<double>(build_even(2));
    REQUIRE(plan2.cs.size() == 2);
    CHECK(plan2.cs[0] == Catch::Approx(-1.0 / 3.0).epsilon(1e-16));
    CHECK(plan2.cs[1] == Catch::Approx(4.0 / 3.0).epsilon(1e-16));
}

TEST_CASE("plan validation") {
    MpeScheme s = build_odd(2);
    s.weights.ks = {1, 2};
    CHECK_THROWS_AS(make_plan<double>(s), ArgumentError);

    MpeScheme bad_kernel = build_odd(2);
    bad_kernel.kernel = KernelKind::StrangAB;
    CHECK_THROWS_AS(make_plan<double>(bad_kernel), ArgumentError);

    MpeScheme empty;
    CHECK_THROWS_AS(make_plan<double>(empty), ArgumentError);
}

TEST_CASE("zero-width scheme step is the identity") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const ClockedState<double> in{{0.4, 0.9}, 0.7};
    for (const MpeScheme& scheme : {build_even(3), build_odd(3)}) {
        const auto out = mpe_step(scheme, problem.system, in, 0.0);
        CHECK(out.state[0] == Catch::Approx(in.state[0]).epsilon(1e-15));
        CHECK(out.state[1] == Catch::Approx(in.state[1]).epsilon(1e-15));
        CHECK(out.t == in.t);
    }
}

TEST_CASE("scheme and plan overloads agree") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const ClockedState<double> in = problem.initial_state();
    const MpeScheme scheme = build_even(2);
    const auto a = mpe_step(scheme, problem.system, in, 0.25);
    const auto b = mpe_step(make_plan<double>(scheme), problem.system, in, 0.25);
    CHECK(a.state == b.state);
    CHECK(a.t == b.t);
}

TEST_CASE("even schemes reach their nominal one-step order") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const std::vector<double> hs{0.4, 0.3, 0.2, 0.15, 0.1};
    for (int n : {1, 2, 3}) {
        const auto fit = local_order(problem, build_even(n), hs);
        INFO("n=" << n);
        CHECK(fit.slope == Catch::Approx(2 * n + 1).margin(0.5));
    }
}

TEST_CASE("odd schemes reach their nominal one-step order") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const std::vector<double> hs{0.4, 0.3, 0.2, 0.15, 0.1};
    for (int n : {1, 2, 3}) {
        const auto fit = local_order(problem, build_odd(n), hs);
        INFO("n=" << n);
        CHECK(fit.slope == Catch::Approx(2 * n).margin(0.5));
    }
}

TEST_CASE("custom node sets extrapolate like natural ones") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const std::vector<double> hs{0.4, 0.3, 0.2, 0.15};
    const auto fit = local_order(problem, build_custom({1, 2, 4}), hs);
    CHECK(fit.slope == Catch::Approx(7.0).margin(0.8));
}

TEST_CASE("per-step integration walks the interval") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const auto trajectory =
        integrate(build_even(2), problem.system, problem.initial_state(), 1.0, 10);
    REQUIRE(trajectory.size() == 11);
    CHECK(trajectory.front().t == 0.0);
    CHECK(trajectory.back().t == Catch::Approx(1.0).margin(1e-15));
    CHECK(error_norm(problem, trajectory.back()) < 1e-5);
    CHECK_THROWS_AS(
        integrate(build_even(2), problem.system, problem.initial_state(), 1.0, 0),
        ArgumentError);
}

TEST_CASE("global error of per-step integration matches the nominal order") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const auto fit =
        global_order(problem, build_even(2), 1.0, std::vector<int>{4, 8, 16, 32});
    CHECK(fit.slope == Catch::Approx(4.0).margin(0.5));
}

TEST_CASE("final correction lifts the endpoint only") {
    const Problem<double> problem = radial_oscillator_problem<double>();
    const ClockedState<double> start = problem.initial_state();
    const double t1 = 0.25;

    SECTION("a single corrected application has fifth-order local error") {
        const auto fit = local_order(problem, build_final_correction(8, 2),
                                     std::vector<double>{0.5, 0.4, 0.3, 0.25});
        CHECK(fit.slope == Catch::Approx(5.0).margin(0.6));
    }

    SECTION("substep refinement stays second order, with a lifted constant") {
        // At fixed width the coarse whole-interval terms leave an O(m^-2)
        // remainder; the gain over the plain trajectory is the constant.
        const auto fit = global_order(problem, build_final_correction(8, 2), t1,
                                      std::vector<int>{8, 16, 32});
        CHECK(fit.slope == Catch::Approx(2.0).margin(0.4));
    }

    SECTION("interior states stay second order") {
        // Error at the trajectory midpoint must shrink like h^2, not h^4.
        auto midpoint_error = [&](int m) {
            const auto traj =
                integrate(build_final_correction(m, 2), problem.system, start, t1, 1);
            const auto& mid = traj[static_cast<std::size_t>(m / 2)];
            return error_norm(problem, mid);
        };
        const double e16 = midpoint_error(16);
        const double e32 = midpoint_error(32);
        CHECK(e16 / e32 == Catch::Approx(4.0).margin(1.5));
    }

    SECTION("endpoint beats the uncorrected trajectory") {
        const int m = 16;
        const auto corrected =
            integrate(build_final_correction(m, 2), problem.system, start, t1, 1);
        ClockedState<double> plain = start;
        const double sub = (t1 - start.t) / m;
        for (int i = 0; i < m; ++i) {
            plain = kernel_step(problem.system, KernelKind::StrangAB, plain, sub);
        }
        CHECK(error_norm(problem, corrected.back()) <
              0.1 * error_norm(problem, plain));
        // Interior entries are exactly the plain kernel states.
        const auto& interior = corrected[m / 2];
        ClockedState<double> walk = start;
        for (int i = 0; i < m / 2; ++i) {
            walk = kernel_step(problem.system, KernelKind::StrangAB, walk, sub);
        }
        CHECK(interior.state == walk.state);
    }
}

TEST_CASE("kernels are interchangeable for even schemes") {
    const Problem<double> problem = matrix2x2_problem<double>();
    const std::vector<double> hs{0.5, 0.4, 0.3, 0.2};
    for (KernelKind kernel :
         {KernelKind::StrangAB, KernelKind::StrangBA, KernelKind::FrozenMidpoint}) {
        const auto fit = local_order(problem, build_even(2, kernel), hs);
        INFO(kernel_name(kernel));
        CHECK(fit.slope == Catch::Approx(5.0).margin(0.6));
    }
}

TEST_CASE("extended precision stepping stays consistent with double") {
    const Problem<double> pd = radial_oscillator_problem<double>();
    const Problem<ExtendedReal> pe = radial_oscillator_problem<ExtendedReal>();
    const auto out_d =
        mpe_step(build_even(3), pd.system, pd.initial_state(), 0.25);
    const auto out_e = mpe_step(build_even(3), pe.system, pe.initial_state(),
                                ExtendedReal(1) / ExtendedReal(4));
    CHECK(std::abs(out_d.state[0] - to_double(out_e.state[0])) < 1e-13);
    CHECK(std::abs(out_d.state[1] - to_double(out_e.state[1])) < 1e-13);
}
