#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "divhjb/fit.hpp"
#include "divhjb/ode.hpp"
#include "divhjb/quadrature.hpp"

using namespace divhjb;

// ---------------------------------------------------------------- integrator

TEST_CASE("integrator reproduces exponential decay to tolerance") {
    const OdeRhs rhs = [](double, const State2& y) -> State2 { return {-y[0], -2.0 * y[1]}; };
    const DensePath path = integrate_ivp(rhs, 0.0, {1.0, 1.0}, 5.0, IvpConfig{});
    REQUIRE(path.reason == IvpTermination::Completed);
    REQUIRE(path.xs.size() == 501);
    for (std::size_t i = 0; i < path.xs.size(); i += 50) {
        CHECK(path.states[i][0] == doctest::Approx(std::exp(-path.xs[i])).epsilon(1e-8));
        CHECK(path.states[i][1] == doctest::Approx(std::exp(-2.0 * path.xs[i])).epsilon(1e-8));
    }
    CHECK(path.stop_x == doctest::Approx(5.0));
}

TEST_CASE("integrator tracks a harmonic oscillator over many periods") {
    const OdeRhs rhs = [](double, const State2& y) -> State2 { return {y[1], -y[0]}; };
    const DensePath path = integrate_ivp(rhs, 0.0, {1.0, 0.0}, 20.0, IvpConfig{});
    REQUIRE(path.reason == IvpTermination::Completed);
    const State2 last = path.states.back();
    CHECK(last[0] == doctest::Approx(std::cos(20.0)).epsilon(1e-7));
    CHECK(last[1] == doctest::Approx(-std::sin(20.0)).epsilon(1e-7));
}

TEST_CASE("dense output grid is uniform and starts at x0") {
    const OdeRhs rhs = [](double, const State2& y) -> State2 { return {y[1], 0.0}; };
    IvpConfig cfg;
    cfg.dense_spacing = 0.25;
    const DensePath path = integrate_ivp(rhs, 1.0, {0.0, 1.0}, 3.0, cfg);
    REQUIRE(path.xs.size() == 9);
    for (std::size_t i = 0; i < path.xs.size(); ++i) {
        CHECK(path.xs[i] == doctest::Approx(1.0 + 0.25 * static_cast<double>(i)));
        // linear solution y = x - 1 is exact for any interpolant
        CHECK(path.states[i][0] == doctest::Approx(path.xs[i] - 1.0).epsilon(1e-12));
    }
}

TEST_CASE("guard stops integration and reports GuardStop") {
    const OdeRhs rhs = [](double, const State2& y) -> State2 { return {y[0], 0.0}; };
    const OdeGuard guard = [](double, const State2& y) { return y[0] > 10.0; };
    const DensePath path = integrate_ivp(rhs, 0.0, {1.0, 0.0}, 50.0, IvpConfig{}, guard);
    CHECK(path.reason == IvpTermination::GuardStop);
    CHECK(path.stop_x < 50.0);
    CHECK(path.stop_x > 2.0);  // e^x reaches 10 at x = ln 10 = 2.30
    CHECK(path.states.back()[0] <= 10.0 + 1.0);
}

TEST_CASE("finite-time blow-up ends in SingularStop near the pole") {
    // y' = y^2, y(0) = 1 blows up at x = 1
    const OdeRhs rhs = [](double, const State2& y) -> State2 { return {y[0] * y[0], 0.0}; };
    const DensePath path = integrate_ivp(rhs, 0.0, {1.0, 0.0}, 2.0, IvpConfig{});
    CHECK(path.reason == IvpTermination::SingularStop);
    CHECK(path.stop_x == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("non-finite initial state reports Diverged") {
    const OdeRhs rhs = [](double, const State2&) -> State2 {
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    };
    const DensePath path = integrate_ivp(rhs, 0.0, {1.0, 0.0}, 1.0, IvpConfig{});
    CHECK(path.reason == IvpTermination::Diverged);
    CHECK(path.xs.size() == 1);
}

TEST_CASE("tightening tolerances reduces the endpoint error") {
    const OdeRhs rhs = [](double x, const State2& y) -> State2 {
        return {y[1], -y[0] + std::sin(3.0 * x)};
    };
    IvpConfig loose;
    loose.rel_tol = 1e-5;
    loose.abs_tol = 1e-7;
    IvpConfig tight;
    tight.rel_tol = 1e-12;
    tight.abs_tol = 1e-14;
    tight.max_step = 0.02;
    const double exact0 = -0.125 * std::sin(3.0 * 4.0) + 0.375 * std::sin(4.0);
    const auto pl = integrate_ivp(rhs, 0.0, {0.0, 0.0}, 4.0, loose);
    const auto pt = integrate_ivp(rhs, 0.0, {0.0, 0.0}, 4.0, tight);
    // forced oscillator with y(0)=y'(0)=0: y = (3 sin x - sin 3x)/8
    CHECK(std::abs(pt.states.back()[0] - exact0) <= std::abs(pl.states.back()[0] - exact0));
    CHECK(pt.states.back()[0] == doctest::Approx(exact0).epsilon(1e-9));
}

TEST_CASE("integrator validates its configuration") {
    const OdeRhs rhs = [](double, const State2& y) -> State2 { return y; };
    CHECK_THROWS_AS(integrate_ivp(rhs, 1.0, {1.0, 1.0}, 1.0, IvpConfig{}),
                    std::invalid_argument);
    IvpConfig bad;
    bad.rel_tol = -1.0;
    CHECK_THROWS_AS(integrate_ivp(rhs, 0.0, {1.0, 1.0}, 1.0, bad), std::invalid_argument);
}

// ---------------------------------------------------------------- quadrature

TEST_CASE("adaptive Simpson integrates polynomials and transcendentals") {
    CHECK(quad_adaptive([](double x) { return x * x * x; }, 0.0, 2.0) ==
          doctest::Approx(4.0).epsilon(1e-12));
    CHECK(quad_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(quad_adaptive([](double) { return 1.0; }, 3.0, 3.0) == 0.0);
    // reversed limits follow the orientation convention of Simpson's rule
    CHECK(quad_adaptive([](double x) { return x; }, 1.0, 0.0) ==
          doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("adaptive Simpson rejects non-finite integrands") {
    CHECK_THROWS_AS(quad_adaptive([](double x) { return 1.0 / x; }, -1.0, 1.0),
                    std::runtime_error);
}

TEST_CASE("exponential-weight quadrature matches closed forms") {
    // int_0^inf rate e^{-rate s} ds = 1
    CHECK(quad_exp_weight([](double) { return 1.0; }, 0.7) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // E[S] for S ~ Exp(rate) is 1/rate
    CHECK(quad_exp_weight([](double s) { return s; }, 0.4) ==
          doctest::Approx(2.5).epsilon(1e-8));
    // truncated mass: int_0^u r e^{-rs} ds = 1 - e^{-ru}
    CHECK(quad_exp_weight([](double) { return 1.0; }, 2.0, 1.5) ==
          doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-10));
    // Laplace transform: E[e^{-aS}] = r/(r+a)
    CHECK(quad_exp_weight([](double s) { return std::exp(-0.3 * s); }, 0.5) ==
          doctest::Approx(0.5 / 0.8).epsilon(1e-9));
}

TEST_CASE("exponential-weight quadrature handles a clamped kink") {
    // E[(x - S)^+] for S ~ Exp(xi): x - (1 - e^{-xi x})/xi
    const double xi = 0.4, x = 3.0;
    const double exact = x - (1.0 - std::exp(-xi * x)) / xi;
    CHECK(quad_exp_weight([&](double s) { return std::max(x - s, 0.0); }, xi) ==
          doctest::Approx(exact).epsilon(1e-8));
    CHECK(quad_exp_weight([](double) { return 1.0; }, 1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(quad_exp_weight([](double) { return 1.0; }, -1.0), std::invalid_argument);
}

// ----------------------------------------------------------------------- fit

TEST_CASE("linear fit recovers exact linear data") {
    const std::vector<double> xs{0, 1, 2, 3, 4, 5};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(0.7 * x - 1.3);
    const LinearFit f = fit_linear(xs, ys);
    CHECK(f.a1 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(f.b1 == doctest::Approx(-1.3).epsilon(1e-12));
    CHECK(f.rss == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("linear fit minimizes the residual sum of squares") {
    const std::vector<double> xs{0, 1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> ys{0.1, 0.9, 2.2, 2.8, 4.1, 5.2, 5.8, 7.1};
    const LinearFit f = fit_linear(xs, ys);
    const auto rss_at = [&](double a, double b) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (a * xs[i] + b);
            s += r * r;
        }
        return s;
    };
    CHECK(f.rss == doctest::Approx(rss_at(f.a1, f.b1)).epsilon(1e-12));
    for (double da : {-0.01, 0.01})
        for (double db : {-0.01, 0.01})
            CHECK(f.rss <= rss_at(f.a1 + da, f.b1 + db) + 1e-12);
}

TEST_CASE("power-basis fit recovers exact power-law data") {
    const std::vector<double> xs{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(4.2 * std::pow(x, 0.5) + 5.1);
    const PowerFit f = fit_power(xs, ys, 0.5);
    CHECK(f.a2 == doctest::Approx(4.2).epsilon(1e-12));
    CHECK(f.b2 == doctest::Approx(5.1).epsilon(1e-12));
    CHECK(f.alpha == 0.5);
    CHECK_THROWS_AS(fit_power(xs, ys, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(fit_power(std::vector<double>{-1.0, 2.0}, std::vector<double>{1.0, 2.0},
                              0.5),
                    std::invalid_argument);
}

TEST_CASE("log-basis fit recovers exact data in the ln(x+1) basis") {
    const std::vector<double> xs{0, 1, 2, 3, 4, 5};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(-2.0 * std::log1p(x) + 0.25);
    const LogBasisFit f = fit_log_basis(xs, ys);
    CHECK(f.a2 == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(f.b2 == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("fits reject degenerate inputs") {
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(fit_linear(one, one), std::invalid_argument);
    const std::vector<double> xs{2.0, 2.0, 2.0};
    const std::vector<double> ys{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_linear(xs, ys), std::invalid_argument);  // singular design
    const std::vector<double> short_y{1.0, 2.0};
    CHECK_THROWS_AS(fit_linear(std::vector<double>{1.0, 2.0, 3.0}, short_y),
                    std::invalid_argument);  // length mismatch
    const std::vector<double> with_nan{0.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(fit_linear(std::vector<double>{0.0, 1.0}, with_nan), std::invalid_argument);
}
