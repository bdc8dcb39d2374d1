#pragma once

#include <stdexcept>

namespace divhjb {

/// Parameters of the surplus process x + mu*t - sum(Y_i) with Poisson(lambda)
/// claim arrivals, Exp(xi) claim sizes (mean 1/xi) and discount rate beta.
struct ModelParams {
    double mu = 0.26;      ///< premium income rate per unit time
    double lambda = 0.1;   ///< claim arrival intensity
    double xi = 0.4;       ///< claim-size rate parameter
    double beta = 0.05;    ///< discount rate
};

/// Throws std::invalid_argument naming the offending field. Positivity of all
/// four rates is required; the net profit condition is checked separately.
void validate_params(const ModelParams& p);

/// True iff premium income outpaces the expected claim outflow, mu > lambda/xi.
bool net_profit_check(const ModelParams& p);

enum class UtilityKind { Power, Log };

/// Power: U(d) = d^alpha / alpha with 0 < alpha < 1.
/// Log:   U(d) = ln(d + 1).
/// Both satisfy U(0) = 0, U' > 0, U'' < 0 on (0, inf).
struct UtilitySpec {
    UtilityKind kind = UtilityKind::Power;
    double alpha = 0.5;  ///< exponent, Power only
};

void validate_utility(const UtilitySpec& u);

/// U(d). Throws std::domain_error for d < 0.
double utility_value(const UtilitySpec& u, double d);

/// U'(d). Power at d = 0 returns +infinity (the Inada condition at zero).
double utility_derivative(const UtilitySpec& u, double d);

/// Optimal dividend rate c* = (U')^{-1}(vx), the maximizer of the Hamiltonian
/// d |-> U(d) - d*vx. Power: vx^{-1/(1-alpha)}. Log: 1/vx - 1.
/// For Log with vx > 1 the unconstrained maximizer is negative, which is
/// inadmissible; the rate clamps to 0 and *clamped (when given) is set.
/// Throws std::domain_error for vx <= 0.
double optimal_rate_from_slope(const UtilitySpec& u, double vx, bool* clamped = nullptr);

}  // namespace divhjb
