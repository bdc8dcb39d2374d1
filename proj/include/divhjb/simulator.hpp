#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "divhjb/hjb.hpp"
#include "divhjb/model.hpp"

namespace divhjb {

/// c(x) = a1 x + b1 on x >= 0.
struct LinearPolicy {
    double a1 = 0.0;
    double b1 = 0.0;
};

/// c(x) = c0 everywhere.
struct ConstantPolicy {
    double c0 = 0.0;
};

/// Rates tabulated on a uniform grid; linear interpolation inside, linear
/// continuation of the last segment beyond the grid.
struct GridPolicy {
    std::vector<double> xs;
    std::vector<double> cs;

    static GridPolicy from_solution(const HjbSolution& sol);
    double rate_at(double x) const;
};

using StrategySpec = std::variant<LinearPolicy, GridPolicy, ConstantPolicy>;

/// Admissibility: nonnegative and non-decreasing on the domain.
/// Throws std::invalid_argument otherwise.
void validate_strategy(const StrategySpec& s);

double policy_rate(const StrategySpec& s, double x);

struct PathResult {
    double total = 0.0;  ///< accumulated discounted utility of dividends
    std::optional<double> ruin_time;
};

/// One path of the regulated surplus under a Markov dividend policy.
///
/// Between claims, reserves follow x' = mu - c(x): exactly (closed-form flow)
/// for linear and constant policies, by RK4 steps of 0.01 otherwise. Claims
/// arrive at Exp(lambda) epochs with Exp(xi) sizes; a jump below zero is ruin
/// and stops the path. At x = 0 the applied rate is min(c(0), mu), so
/// dividends alone never cause ruin. The discounted utility integral
/// accumulates by the trapezoid rule on the same steps.
///
/// All randomness comes from a seeded, standard-specified generator
/// (mt19937_64 with inverse-CDF exponentials), so results are bit-identical
/// across platforms for a given seed.
PathResult simulate_path(const ModelParams& p, const UtilitySpec& u, const StrategySpec& s,
                         double x0, double horizon, std::uint64_t seed);

struct PathEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    double ruin_fraction = 0.0;  ///< fraction of paths ruined before the horizon
    double horizon = 0.0;
    double bias_bound = 0.0;  ///< truncation bias bound U(c_max) e^{-beta*horizon} / beta
};

/// Mean discounted utility over n_paths independent seeded streams (per-path
/// seeds derived from `seed` by SplitMix64). Aggregation uses pairwise
/// summation, so the estimate is independent of accumulation order.
PathEstimate estimate_value(const ModelParams& p, const UtilitySpec& u, const StrategySpec& s,
                            double x0, long n_paths, double horizon = 400.0,
                            std::uint64_t seed = 42);

}  // namespace divhjb
