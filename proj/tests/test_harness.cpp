// Order-measurement harness, series-coefficient extraction, sweeps, CSV output.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "mpe/harness.hpp"

using namespace mpe;

namespace {

/// Constant-coefficient diagonal problem; the frozen-exponential kernel is
/// exact on it, so error fits must report an empty signal.
Problem<double> diagonal_problem() {
    Problem<double> p;
    p.name = "diag";
    p.dim = 2;
    p.t_start = 0.0;
    p.linear = true;
    p.a_matrix = [](const double&) {
        return Matrix<double>{{2.0, 0.0}, {0.0, -1.0}};
    };
    p.exact = [](const double& t) {
        return StateVector<double>{std::exp(2.0 * t), std::exp(-t)};
    };
    p.system.dim = 2;
    p.system.time_dependent = false;
    p.system.full_exp = [](const StateVector<double>& s, const double&, const double& h) {
        return StateVector<double>{s[0] * std::exp(2.0 * h), s[1] * std::exp(-h)};
    };
    return p;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) {
        n += c == '\n';
    }
    return n;
}

} // namespace

TEST_CASE("linspace") {
    const auto g = linspace(0.5, 2.0, 4);
    REQUIRE(g.size() == 4);
    CHECK(g.front() == 0.5);
    CHECK(g.back() == 2.0);
    CHECK(g[1] == Catch::Approx(1.0));
    CHECK(g[2] == Catch::Approx(1.5));
    CHECK_THROWS_AS(linspace(0.0, 1.0, 1), ArgumentError);
}

TEST_CASE("scheme_for_order maps orders onto parities") {
    CHECK(scheme_for_order(2).label == "even-2");
    CHECK(scheme_for_order(3).label == "odd-3");
    CHECK(scheme_for_order(4).label == "even-4");
    CHECK(scheme_for_order(5).label == "odd-5");
    CHECK(scheme_for_order(8).label == "even-8");
    CHECK(scheme_for_order(1).label == "odd-1");
    for (int order : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) {
        CHECK(scheme_for_order(order).order == order);
    }
    CHECK(scheme_for_order(4, KernelKind::FrozenMidpoint).kernel ==
          KernelKind::FrozenMidpoint);
    CHECK_THROWS_AS(scheme_for_order(0), ArgumentError);
}

TEST_CASE("error norm vanishes on the exact state") {
    const auto p = radial_oscillator_problem<double>();
    ClockedState<double> cs;
    cs.t = 1.3;
    cs.state = p.exact(cs.t);
    CHECK(error_norm(p, cs) == 0.0);
}

TEST_CASE("log-log fits recover exact power laws") {
    std::vector<std::pair<double, double>> samples;
    for (double h : {0.4, 0.2, 0.1, 0.05}) {
        samples.emplace_back(h, 3.7 * h * h * h);
    }
    const OrderFit fit = detail::fit_loglog(samples, 1.0);
    CHECK(fit.slope == Catch::Approx(3.0).epsilon(1e-10));
    CHECK(fit.residual_rms <= 1e-10);
    CHECK(fit.points_used == 4);

    // Samples at the round-off floor carry no signal.
    std::vector<std::pair<double, double>> flat;
    for (double h : {0.4, 0.2, 0.1}) {
        flat.emplace_back(h, 1e-18);
    }
    CHECK_THROWS_AS(detail::fit_loglog(flat, 1.0), InsufficientSignalError);
}

TEST_CASE("order fit input validation") {
    const auto p = radial_oscillator_problem<double>();
    const MpeScheme scheme = build_even(1);
    CHECK_THROWS_AS(local_order(p, scheme, std::vector<double>{0.2, 0.1}), ArgumentError);
    CHECK_THROWS_AS(local_order(p, scheme, std::vector<double>{0.2, 0.1, -0.05}),
                    ArgumentError);
    CHECK_THROWS_AS(global_order(p, scheme, 1.0, std::vector<int>{8}), ArgumentError);
    CHECK_THROWS_AS(global_order(p, scheme, 1.0, std::vector<int>{8, 0}), ArgumentError);
}

TEST_CASE("an exact propagator yields no fittable error signal") {
    const Problem<double> p = diagonal_problem();
    const MpeScheme scheme = build_even(1, KernelKind::FrozenMidpoint);
    CHECK_THROWS_AS(local_order(p, scheme, std::vector<double>{0.3, 0.2, 0.1}),
                    InsufficientSignalError);
}

TEST_CASE("series tail extraction is exact on polynomials") {
    const auto g = [](const double& t) {
        return 3.0 - 2.0 * t + 0.5 * t * t - 0.25 * t * t * t;
    };
    const auto coeffs = fit_series_tail<double>(g, {3.0, -2.0}, 2, 2, 0.5, 2.0);
    REQUIRE(coeffs.size() == 2);
    CHECK(coeffs[0] == Catch::Approx(0.5).epsilon(1e-11));
    CHECK(coeffs[1] == Catch::Approx(-0.25).epsilon(1e-11));
}

TEST_CASE("series tail extraction input validation") {
    const auto g = [](const double& t) { return t; };
    CHECK_THROWS_AS(fit_series_tail<double>(g, {1.0}, 2, 2, 0.5, 2.0), ArgumentError);
    CHECK_THROWS_AS(fit_series_tail<double>(g, {}, 0, 0, 0.5, 2.0), ArgumentError);
    CHECK_THROWS_AS(fit_series_tail<double>(g, {}, 0, 2, 0.0, 2.0), ArgumentError);
    CHECK_THROWS_AS(fit_series_tail<double>(g, {}, 0, 2, 0.5, 1.0), ArgumentError);
    CHECK_THROWS_AS(fit_series_tail<double>(g, {}, -1, 2, 0.5, 2.0), ArgumentError);
}

TEST_CASE("series tail extraction recovers known Taylor coefficients") {
    using R = ExtendedReal;

    SECTION("t e^{-t}") {
        const auto g = [](const R& t) { return t * exp(-t); };
        // c0..c2 known; recover c3..c5 with four guard coefficients.  The
        // guards absorb the truncation bias of the neglected remainder.
        const auto coeffs =
            fit_series_tail<R>(g, {R(0), R(1), R(-1)}, 3, 7, R(2) / R(5), R(3) / R(2));
        CHECK(to_double(coeffs[0]) == Catch::Approx(1.0 / 2).epsilon(1e-6));
        CHECK(to_double(coeffs[1]) == Catch::Approx(-1.0 / 6).epsilon(1e-6));
        CHECK(to_double(coeffs[2]) == Catch::Approx(1.0 / 24).epsilon(1e-5));
    }

    SECTION("t e^{-t^2/2}") {
        const auto g = [](const R& t) { return t * exp(-t * t / R(2)); };
        const std::vector<R> prefix{R(0), R(1), R(0), R(-1) / R(2), R(0)};
        const auto coeffs = fit_series_tail<R>(g, prefix, 5, 9, R(1) / R(2), R(7) / R(5));
        const std::vector<double> expected{1.0 / 8, 0.0, -1.0 / 48, 0.0};
        for (std::size_t i = 0; i < expected.size(); ++i) {
            INFO("coefficient " << i);
            CHECK(std::abs(to_double(coeffs[i]) - expected[i]) <=
                  std::max(1e-6, 1e-6 * std::abs(expected[i])));
        }
    }
}

TEST_CASE("sweep columns evaluate one application per grid point") {
    const auto p = radial_oscillator_problem<double>();
    const auto grid = linspace(0.0, 2.0, 5);
    const auto col = sweep_column(p, build_even(2), grid);
    CHECK(col.label == "even-4");
    CHECK(col.order == 4);
    REQUIRE(col.values.size() == 5);
    REQUIRE(col.errors.size() == 5);
    // Zero-width application reproduces the initial state exactly.
    CHECK(col.errors[0] == 0.0);
    CHECK(col.max_error > 0.0);
    for (double e : col.errors) {
        CHECK(e <= col.max_error);
    }
}

TEST_CASE("sweeps are deterministic across job counts") {
    const auto p = hydrogen_problem<double>();
    const std::vector<MpeScheme> schemes{scheme_for_order(2), scheme_for_order(4),
                                         scheme_for_order(6)};
    const auto grid = linspace(0.1, 5.0, 9);
    const auto serial = uniform_convergence_sweep(p, schemes, grid, 1);
    const auto parallel = uniform_convergence_sweep(p, schemes, grid, 4);
    REQUIRE(serial.columns.size() == parallel.columns.size());
    for (std::size_t i = 0; i < serial.columns.size(); ++i) {
        CHECK(serial.columns[i].label == parallel.columns[i].label);
        CHECK(serial.columns[i].values == parallel.columns[i].values);
        CHECK(serial.columns[i].errors == parallel.columns[i].errors);
    }
    // Higher order means smaller worst-case error on this range.
    CHECK(serial.columns[2].max_error < serial.columns[1].max_error);
    CHECK(serial.columns[1].max_error < serial.columns[0].max_error);
}

TEST_CASE("round-off study shape and validation") {
    CHECK_THROWS_AS(roundoff_study(ProblemKind::Oscillator, {}, {0.5, 1.0}), ArgumentError);

    const auto grid = linspace(0.5, 2.0, 4);
    const RoundoffReport report = roundoff_study(ProblemKind::Oscillator, {2, 4}, grid, 2);
    CHECK(report.grid == grid);
    REQUIRE(report.columns.size() == 2);
    for (const auto& col : report.columns) {
        CHECK(col.errors_double.size() == grid.size());
        CHECK(col.errors_extended.size() == grid.size());
        CHECK(col.max_double > 0.0);
    }
    // At these low orders double precision tracks extended precision, so no
    // round-off onset is detected.
    CHECK(report.onset_order == -1);
    CHECK(report.columns[1].max_double < report.columns[0].max_double);
}

TEST_CASE("figure CSV writers") {
    SECTION("matrix problem study") {
        std::ostringstream first;
        write_figure1_csv<double>(first, 6);
        const std::string text = first.str();
        CHECK(text.rfind("# tool=mpe version=", 0) == 0);
        CHECK(text.find("study=figure1") != std::string::npos);
        CHECK(text.find("t,exact,magnus4,magnus6,magnus8,magnus10,mpe2,mpe4,mpe6,mpe8,mpe10\n") !=
              std::string::npos);
        CHECK(count_lines(text) == 2 + 6);

        std::ostringstream second;
        write_figure1_csv<double>(second, 6);
        CHECK(second.str() == text); // byte-identical reruns
    }

    SECTION("wavefunction study") {
        std::ostringstream os;
        write_figure2_csv<double>(os, {2, 4}, 5, 2);
        const std::string text = os.str();
        CHECK(text.find("study=figure2") != std::string::npos);
        CHECK(text.find("problem=hydrogen") != std::string::npos);
        CHECK(text.find("t,exact,mpe2,mpe4\n") != std::string::npos);
        CHECK(count_lines(text) == 2 + 5);
    }

    SECTION("round-off study rows") {
        std::ostringstream os;
        write_figure3_csv(os, {2, 4}, 4, 2, ProblemKind::Oscillator);
        const std::string text = os.str();
        CHECK(text.find("study=figure3") != std::string::npos);
        CHECK(text.find("onset_order=") != std::string::npos);
        CHECK(text.find("t,order,double_error,extended_error\n") != std::string::npos);
        CHECK(count_lines(text) == 2 + 2 * 4);
    }
}
