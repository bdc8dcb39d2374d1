#include "divhjb/model.hpp"

#include <cmath>
#include <limits>

namespace divhjb {

void validate_params(const ModelParams& p) {
    if (!(p.mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!(p.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(p.xi > 0.0)) throw std::invalid_argument("xi must be positive");
    if (!(p.beta > 0.0)) throw std::invalid_argument("beta must be positive");
}

bool net_profit_check(const ModelParams& p) {
    return p.mu > p.lambda / p.xi;
}

void validate_utility(const UtilitySpec& u) {
    if (u.kind == UtilityKind::Power && !(u.alpha > 0.0 && u.alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
}

double utility_value(const UtilitySpec& u, double d) {
    if (d < 0.0) throw std::domain_error("utility_value: negative dividend rate");
    if (u.kind == UtilityKind::Power) {
        if (d == 0.0) return 0.0;
        return std::pow(d, u.alpha) / u.alpha;
    }
    return std::log1p(d);
}

double utility_derivative(const UtilitySpec& u, double d) {
    if (d < 0.0) throw std::domain_error("utility_derivative: negative dividend rate");
    if (u.kind == UtilityKind::Power) {
        if (d == 0.0) return std::numeric_limits<double>::infinity();
        return std::pow(d, u.alpha - 1.0);
    }
    return 1.0 / (d + 1.0);
}

double optimal_rate_from_slope(const UtilitySpec& u, double vx, bool* clamped) {
    if (!(vx > 0.0)) throw std::domain_error("optimal_rate_from_slope: slope must be positive");
    if (clamped) *clamped = false;
    if (u.kind == UtilityKind::Power) {
        return std::pow(vx, -1.0 / (1.0 - u.alpha));
    }
    if (vx > 1.0) {
        // (U')^{-1}(vx) < 0 is inadmissible; pay nothing instead.
        if (clamped) *clamped = true;
        return 0.0;
    }
    return 1.0 / vx - 1.0;
}

}  // namespace divhjb
