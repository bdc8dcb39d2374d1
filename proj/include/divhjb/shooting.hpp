#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "divhjb/fit.hpp"
#include "divhjb/hjb.hpp"
#include "divhjb/model.hpp"

namespace divhjb {

struct ShootingConfig {
    double b_start = 1.96;
    /// Strictly decreasing positive decrements; each stage scans down in steps
    /// of schedule[i], backs up one step on infeasibility and refines with the
    /// next decrement.
    std::vector<double> step_schedule = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
    double epsilon = 0.005;  ///< early-stop threshold on |a - A|
    int fit_count = 11;      ///< fit abscissae x = 0, 1, ..., fit_count - 1
    double x_max = 10.0;     ///< solve horizon per candidate
    long mc_check = 0;       ///< Monte Carlo cross-check draws for A (0 = off)
    IvpConfig ivp;
};

/// Utility-aware defaults: power starts at 1.96 (just under the singular
/// slope mu^{-(1-alpha)} at the reference parameters), log at 0.80 (just over
/// its singular slope 1/(mu+1), i.e. on the bubble side, as the search
/// requires a start that is not already infeasible).
ShootingConfig default_shooting_config(const ModelParams& p, const UtilitySpec& u);

void validate_shooting_config(const ShootingConfig& cfg);

enum class CandidateLabel {
    Correct,  ///< decaying solution with a feasible fitted trajectory
    TooBig,   ///< bubble: the slope starts above the singular locus
    TooSmall  ///< fitted rate intercept b1 > mu: the proxy reserve path dies at once
};

const char* to_string(CandidateLabel label);

/// Fitted value surrogate: power basis {x^alpha, 1} or log basis {ln(x+1), 1}.
using ValueFit = std::variant<PowerFit, LogBasisFit>;

/// Evaluates the surrogate; clamps to 0 for x < 0 (no value after ruin).
double value_fit_eval(const ValueFit& fit, double x);

struct CandidateEvaluation {
    double b = 0.0;   ///< candidate initial slope v_x(0)
    double a = 0.0;   ///< boundary value v(0) implied by b
    double A = 0.0;   ///< first-jump self-consistency estimate (NaN unless Correct)
    double gap = 0.0; ///< a - A (NaN unless Correct)
    CandidateLabel label = CandidateLabel::Correct;
    LinearFit rate_fit;  ///< c-hat(x) = a1 x + b1 (populated unless TooBig)
    ValueFit value_fit;  ///< v-hat (populated only when Correct)
};

/// Reserve path under the fitted linear rate started from an empty reserve:
/// x(t) = ((mu - b1)/a1) (1 - e^{-a1 t}), the solution of x' = mu - c-hat(x),
/// x(0) = 0. Throws std::domain_error when a1 <= 0 or b1 > mu (the path would
/// be negative for all t > 0, the TooSmall signal).
double deterministic_trajectory(const ModelParams& p, const LinearFit& fit, double t);

/// First-jump estimate of v(0) under the fitted surrogates:
///   A = E[e^{-beta T} v-hat(x(T) - S)] + E[int_0^T e^{-beta t} U(c-hat(x(t))) dt]
/// with T ~ Exp(lambda) the first claim time and S ~ Exp(xi) its size. The
/// jump term truncates the claim integral at the reserve level (ruin pays
/// nothing); the running term uses the interchanged (Fubini) form
/// int_0^inf e^{-(beta+lambda) t} U(c-hat(x(t))) dt.
double first_jump_value(const ModelParams& p, const UtilitySpec& u,
                        const LinearFit& rate_fit, const ValueFit& value_fit);

/// Monte Carlo cross-check of first_jump_value: averages the same two terms
/// over n draws of (T, S). Returns the estimate and its standard error.
struct FirstJumpMc {
    double mean = 0.0;
    double std_error = 0.0;
};
FirstJumpMc first_jump_value_mc(const ModelParams& p, const UtilitySpec& u,
                                const LinearFit& rate_fit, const ValueFit& value_fit,
                                long n_draws, std::uint64_t seed = 42);

/// Full candidate pipeline: boundary value, ODE solve, classification
/// (bubble -> TooBig), rate fit on the integer abscissae, trajectory
/// feasibility (b1 > mu -> TooSmall), value fit, first-jump estimate.
CandidateEvaluation evaluate_candidate(const ModelParams& p, const UtilitySpec& u,
                                       double b, const ShootingConfig& cfg);

struct ShootingReport {
    /// Feasibility-boundary bracket: largest TooSmall candidate seen and the
    /// smallest non-TooSmall candidate above it (NaN when never observed).
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    double final_b = 0.0;
    double final_a = 0.0;
    double final_gap = 0.0;  ///< NaN when no Correct candidate exists
    CandidateLabel final_label = CandidateLabel::Correct;
    std::vector<CandidateEvaluation> rows;  ///< every evaluation, in order
    std::vector<std::string> warnings;
};

/// Staged refinement of the initial slope: at each schedule step d, decrease b
/// by d while candidates stay feasible; on hitting TooSmall, back up one step
/// and refine with the next (smaller) d. Stops early when |a - A| < epsilon.
/// When no Correct candidate exists at all (the log-utility regime), the scan
/// converges to the TooSmall/TooBig boundary and reports the feasible-side
/// endpoint with gap = NaN and a warning.
/// Throws std::invalid_argument when b_start itself is TooSmall.
ShootingReport search_initial_slope(const ModelParams& p, const UtilitySpec& u,
                                    const ShootingConfig& cfg);

}  // namespace divhjb
