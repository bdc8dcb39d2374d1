#pragma once

#include <vector>

#include "divhjb/hjb.hpp"
#include "divhjb/model.hpp"

namespace divhjb {

/// Large-x asymptote of the value function.
/// Power: ((1-alpha)/beta)^{1-alpha} * x^alpha / alpha.
/// Log:   (1/beta) * (ln(beta (x+1)) - 1).
double asym_value(const ModelParams& p, const UtilitySpec& u, double x);

/// Large-x asymptote of v_x.
/// Power: ((1-alpha)/beta)^{1-alpha} * x^{alpha-1}.  Log: 1 / (beta (x+1)).
double asym_slope(const ModelParams& p, const UtilitySpec& u, double x);

/// Large-x asymptote of the optimal rate.
/// Power: beta x / (1-alpha).  Log: beta x + beta - 1.
double asym_rate(const ModelParams& p, const UtilitySpec& u, double x);

struct ConvergenceDiagnostic {
    std::vector<double> xs;
    std::vector<double> ratio_v;   ///< v / asym_value
    std::vector<double> ratio_vx;  ///< v_x / asym_slope
    std::vector<double> ratio_c;   ///< c* / asym_rate
    // per-series monotone-trend flag: |ratio - 1| non-increasing over samples
    bool trend_v = false;
    bool trend_vx = false;
    bool trend_c = false;
};

/// Ratio diagnostics against the asymptotes, sampled on the grid tail
/// (20 samples, one per block of 10 points over the final 200 grid points).
/// Requires a Decaying solution; throws std::invalid_argument otherwise.
/// If sample_xs is non-empty, ratios are evaluated at those points instead.
ConvergenceDiagnostic convergence_diagnostic(const HjbSolution& sol,
                                             const std::vector<double>& sample_xs = {});

}  // namespace divhjb
