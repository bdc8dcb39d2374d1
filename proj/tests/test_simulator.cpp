#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "divhjb/hjb.hpp"
#include "divhjb/simulator.hpp"

using namespace divhjb;

namespace {
const ModelParams kRef{};
const UtilitySpec kPower{};
}  // namespace

TEST_CASE("grid policy interpolates and extrapolates linearly") {
    GridPolicy g;
    g.xs = {0.0, 1.0, 2.0, 3.0};
    g.cs = {0.2, 0.4, 0.4, 1.0};
    CHECK(g.rate_at(0.0) == doctest::Approx(0.2));
    CHECK(g.rate_at(0.5) == doctest::Approx(0.3));
    CHECK(g.rate_at(1.7) == doctest::Approx(0.4));
    CHECK(g.rate_at(2.5) == doctest::Approx(0.7));
    // beyond the last knot: continue the final segment
    CHECK(g.rate_at(4.0) == doctest::Approx(1.6));
    CHECK(g.rate_at(-0.5) == doctest::Approx(0.1));
}

TEST_CASE("grid policy built from a solve matches the solution rates") {
    const HjbSolution sol = solve_value_function(kRef, kPower, 1.9, 10.0);
    const GridPolicy g = GridPolicy::from_solution(sol);
    REQUIRE(g.xs.size() == sol.xs.size());
    CHECK(g.rate_at(5.0) == doctest::Approx(sol.rate_at(5.0)).epsilon(1e-12));
    CHECK(g.rate_at(5.005) ==
          doctest::Approx(0.5 * (sol.cs[500] + sol.cs[501])).epsilon(1e-9));
}

TEST_CASE("strategy validation") {
    CHECK_NOTHROW(validate_strategy(LinearPolicy{0.1, 0.2}));
    CHECK_THROWS_AS(validate_strategy(LinearPolicy{-0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(validate_strategy(LinearPolicy{0.1, -0.2}), std::invalid_argument);
    CHECK_NOTHROW(validate_strategy(ConstantPolicy{0.0}));
    CHECK_THROWS_AS(validate_strategy(ConstantPolicy{-1.0}), std::invalid_argument);

    GridPolicy g;
    g.xs = {0.0, 1.0, 2.0};
    g.cs = {0.1, 0.2, 0.3};
    CHECK_NOTHROW(validate_strategy(g));
    g.cs = {0.1, 0.2};  // size mismatch
    CHECK_THROWS_AS(validate_strategy(g), std::invalid_argument);
    g.xs = {0.0};
    g.cs = {0.1};  // a single knot is not a grid
    CHECK_THROWS_AS(validate_strategy(g), std::invalid_argument);
    g.xs = {0.0, 1.0, 2.5};  // non-uniform spacing
    g.cs = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(validate_strategy(g), std::invalid_argument);
    g.xs = {0.0, 1.0, 2.0};
    g.cs = {0.3, 0.2, 0.1};  // decreasing rates
    CHECK_THROWS_AS(validate_strategy(g), std::invalid_argument);
}

TEST_CASE("policy dispatch") {
    CHECK(policy_rate(StrategySpec{LinearPolicy{0.1, 0.2}}, 3.0) == doctest::Approx(0.5));
    CHECK(policy_rate(StrategySpec{ConstantPolicy{0.7}}, 3.0) == doctest::Approx(0.7));
}

TEST_CASE("paths are reproducible by seed") {
    const StrategySpec s = LinearPolicy{0.0772, 0.26};
    const PathResult a = simulate_path(kRef, kPower, s, 5.0, 400.0, 1234);
    const PathResult b = simulate_path(kRef, kPower, s, 5.0, 400.0, 1234);
    CHECK(a.total == b.total);
    CHECK(a.ruin_time.has_value() == b.ruin_time.has_value());
    const PathResult c = simulate_path(kRef, kPower, s, 5.0, 400.0, 1235);
    CHECK(a.total != c.total);
}

TEST_CASE("zero consumption accrues zero utility") {
    // ruin may or may not happen; either way power U(0) = 0 pays nothing
    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        const PathResult r =
            simulate_path(kRef, kPower, ConstantPolicy{0.0}, 1.0, 400.0, seed);
        CHECK(r.total == 0.0);
    }
}

TEST_CASE("consuming the premium from an empty reserve matches the closed form") {
    // x0 = 0, c = mu: the reserve stays at zero until the first claim, which
    // ruins it. Conditional on ruin time T, the payoff is U(mu)(1-e^{-beta T})/beta.
    const double umu = utility_value(kPower, kRef.mu);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const PathResult r =
            simulate_path(kRef, kPower, ConstantPolicy{kRef.mu}, 0.0, 400.0, seed);
        CHECK(r.total <= umu / kRef.beta + 1e-12);
        if (r.ruin_time) {
            const double expected =
                umu * (1.0 - std::exp(-kRef.beta * *r.ruin_time)) / kRef.beta;
            CHECK(r.total == doctest::Approx(expected).epsilon(1e-10));
        }
    }

    // E[total] = U(mu)/(beta+lambda); with 20000 paths this pins two digits
    const PathEstimate est =
        estimate_value(kRef, kPower, ConstantPolicy{kRef.mu}, 0.0, 20000, 400.0, 42);
    const double closed = umu / (kRef.beta + kRef.lambda);
    CHECK(std::abs(est.mean - closed) <= 3.5 * est.std_error);
    CHECK(est.ruin_fraction > 0.99);
    CHECK(est.n_paths == 20000);
}

TEST_CASE("estimator bookkeeping") {
    const PathEstimate est =
        estimate_value(kRef, kPower, ConstantPolicy{0.3}, 2.0, 500, 100.0, 42);
    CHECK(est.horizon == doctest::Approx(100.0));
    // bias bound: discounted tail of the largest reachable rate
    const double cmax = std::max(0.3, kRef.mu);
    CHECK(est.bias_bound ==
          doctest::Approx(utility_value(kPower, cmax) * std::exp(-kRef.beta * 100.0) /
                          kRef.beta)
              .epsilon(1e-12));
    CHECK(est.std_error > 0.0);
    CHECK_THROWS_AS(estimate_value(kRef, kPower, ConstantPolicy{0.3}, 2.0, 1, 100.0, 42),
                    std::invalid_argument);
}

TEST_CASE("linear policy agrees with its tabulated twin") {
    const LinearPolicy lin{0.0772, 0.2583};
    GridPolicy grid;
    for (int i = 0; i <= 4000; ++i) {
        const double x = 0.01 * i;
        grid.xs.push_back(x);
        grid.cs.push_back(lin.a1 * x + lin.b1);
    }
    const PathEstimate a = estimate_value(kRef, kPower, lin, 5.0, 4000, 400.0, 42);
    const PathEstimate b = estimate_value(kRef, kPower, grid, 5.0, 4000, 400.0, 42);
    // same seeds, same claims; only the flow integrator differs
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(5e-4));
    CHECK(a.ruin_fraction == doctest::Approx(b.ruin_fraction).epsilon(5e-3));
}

TEST_CASE("short horizons cap the accrued utility") {
    const double h = 1.0;
    const PathResult r = simulate_path(kRef, kPower, ConstantPolicy{0.5}, 50.0, h, 99);
    const double cap = utility_value(kPower, 0.5) * (1.0 - std::exp(-kRef.beta * h)) /
                       kRef.beta;
    CHECK(r.total <= cap + 1e-12);
    CHECK(r.total > 0.0);
}
