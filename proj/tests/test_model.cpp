#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "divhjb/model.hpp"

using namespace divhjb;

TEST_CASE("default parameters are the reference set and pass validation") {
    ModelParams p;
    CHECK(p.mu == doctest::Approx(0.26));
    CHECK(p.lambda == doctest::Approx(0.1));
    CHECK(p.xi == doctest::Approx(0.4));
    CHECK(p.beta == doctest::Approx(0.05));
    CHECK_NOTHROW(validate_params(p));
    CHECK(net_profit_check(p));  // 0.26 > 0.1/0.4
}

TEST_CASE("validation names the offending field") {
    ModelParams p;
    p.mu = -0.1;
    CHECK_THROWS_WITH_AS(validate_params(p), "mu must be positive", std::invalid_argument);
    p = ModelParams{};
    p.lambda = 0.0;
    CHECK_THROWS_WITH_AS(validate_params(p), "lambda must be positive", std::invalid_argument);
    p = ModelParams{};
    p.xi = -1.0;
    CHECK_THROWS_WITH_AS(validate_params(p), "xi must be positive", std::invalid_argument);
    p = ModelParams{};
    p.beta = 0.0;
    CHECK_THROWS_WITH_AS(validate_params(p), "beta must be positive", std::invalid_argument);
}

TEST_CASE("net profit check distinguishes drift sign") {
    ModelParams p;
    p.mu = 0.25;
    p.lambda = 0.1;
    p.xi = 0.4;  // expected claim outflow 0.25
    CHECK_FALSE(net_profit_check(p));
    p.mu = 0.2500001;
    CHECK(net_profit_check(p));
}

TEST_CASE("power utility value and derivative") {
    UtilitySpec u;  // power, alpha = 0.5
    CHECK(utility_value(u, 0.0) == 0.0);
    CHECK(utility_value(u, 0.25) == doctest::Approx(1.0));      // 2 sqrt(0.25)
    CHECK(utility_value(u, 4.0) == doctest::Approx(4.0));       // 2 sqrt(4)
    CHECK(utility_derivative(u, 0.25) == doctest::Approx(2.0));  // 1/sqrt(0.25)
    CHECK(utility_derivative(u, 0.0) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(utility_value(u, -0.1), std::domain_error);
    CHECK_THROWS_AS(utility_derivative(u, -0.1), std::domain_error);

    u.alpha = 0.25;
    CHECK(utility_value(u, 16.0) == doctest::Approx(8.0));  // 16^{1/4} / (1/4)
}

TEST_CASE("log utility value and derivative") {
    UtilitySpec u{UtilityKind::Log, 0.5};
    CHECK(utility_value(u, 0.0) == 0.0);
    CHECK(utility_value(u, std::exp(1.0) - 1.0) == doctest::Approx(1.0));
    CHECK(utility_derivative(u, 0.0) == doctest::Approx(1.0));
    CHECK(utility_derivative(u, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("utility validation") {
    UtilitySpec u;
    u.alpha = 1.0;
    CHECK_THROWS_AS(validate_utility(u), std::invalid_argument);
    u.alpha = 0.0;
    CHECK_THROWS_AS(validate_utility(u), std::invalid_argument);
    u.alpha = 0.5;
    CHECK_NOTHROW(validate_utility(u));
    // alpha is ignored for log utility
    UtilitySpec lg{UtilityKind::Log, 7.0};
    CHECK_NOTHROW(validate_utility(lg));
}

TEST_CASE("optimal rate inverts marginal utility (power)") {
    UtilitySpec u;  // alpha = 0.5 -> c* = vx^{-2}
    CHECK(optimal_rate_from_slope(u, 2.0) == doctest::Approx(0.25));
    CHECK(optimal_rate_from_slope(u, 1.9) == doctest::Approx(1.0 / 3.61));
    // U'(c*) == vx round trip
    for (double vx : {0.5, 1.0, 1.9, 3.0}) {
        const double c = optimal_rate_from_slope(u, vx);
        CHECK(utility_derivative(u, c) == doctest::Approx(vx).epsilon(1e-12));
    }
    CHECK_THROWS_AS(optimal_rate_from_slope(u, 0.0), std::domain_error);
    CHECK_THROWS_AS(optimal_rate_from_slope(u, -1.0), std::domain_error);
}

TEST_CASE("optimal rate inverts marginal utility (log), clamping above 1") {
    UtilitySpec u{UtilityKind::Log, 0.5};
    bool clamped = true;
    CHECK(optimal_rate_from_slope(u, 0.5, &clamped) == doctest::Approx(1.0));
    CHECK_FALSE(clamped);
    CHECK(optimal_rate_from_slope(u, 1.0, &clamped) == doctest::Approx(0.0));
    CHECK_FALSE(clamped);
    // slopes above 1 would invert to a negative rate; the rate clamps to 0
    CHECK(optimal_rate_from_slope(u, 1.5, &clamped) == 0.0);
    CHECK(clamped);
}

TEST_CASE("optimal rate maximizes the Hamiltonian d -> U(d) - d vx") {
    for (UtilityKind kind : {UtilityKind::Power, UtilityKind::Log}) {
        UtilitySpec u{kind, 0.5};
        for (double vx : {0.6, 0.9, 1.9}) {
            const double c = optimal_rate_from_slope(u, vx);
            const double best = utility_value(u, c) - c * vx;
            for (double d : {c * 0.5, c * 0.9, c + 0.1, c + 1.0, 0.01}) {
                if (d < 0.0) continue;
                CHECK(utility_value(u, d) - d * vx <= best + 1e-12);
            }
        }
    }
}
