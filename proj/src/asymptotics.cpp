#include "divhjb/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace divhjb {

double asym_value(const ModelParams& p, const UtilitySpec& u, double x) {
    if (u.kind == UtilityKind::Power) {
        const double k = std::pow((1.0 - u.alpha) / p.beta, 1.0 - u.alpha);
        return k * std::pow(x, u.alpha) / u.alpha;
    }
    return (std::log(p.beta * (x + 1.0)) - 1.0) / p.beta;
}

double asym_slope(const ModelParams& p, const UtilitySpec& u, double x) {
    if (u.kind == UtilityKind::Power) {
        const double k = std::pow((1.0 - u.alpha) / p.beta, 1.0 - u.alpha);
        return k * std::pow(x, u.alpha - 1.0);
    }
    return 1.0 / (p.beta * (x + 1.0));
}

double asym_rate(const ModelParams& p, const UtilitySpec& u, double x) {
    if (u.kind == UtilityKind::Power) return p.beta * x / (1.0 - u.alpha);
    return p.beta * x + p.beta - 1.0;
}

ConvergenceDiagnostic convergence_diagnostic(const HjbSolution& sol,
                                             const std::vector<double>& sample_xs) {
    if (sol.classification != SolutionClass::Decaying)
        throw std::invalid_argument(
            "convergence_diagnostic: requires a Decaying solution branch");

    std::vector<double> xs = sample_xs;
    if (xs.empty()) {
        const std::size_t n = sol.xs.size();
        if (n < 200)
            throw std::invalid_argument(
                "convergence_diagnostic: grid too short, need at least 200 points");
        // One sample per block of 10 points over the final 200 grid points,
        // taken at each block's last point so the sequence ends at the grid end.
        for (std::size_t k = 0; k < 20; ++k) xs.push_back(sol.xs[n - 200 + 10 * k + 9]);
    }

    ConvergenceDiagnostic d;
    d.xs = xs;
    for (double x : xs) {
        d.ratio_v.push_back(sol.value_at(x) / asym_value(sol.params, sol.utility, x));
        d.ratio_vx.push_back(sol.slope_at(x) / asym_slope(sol.params, sol.utility, x));
        d.ratio_c.push_back(sol.rate_at(x) / asym_rate(sol.params, sol.utility, x));
    }

    const auto trending = [](const std::vector<double>& r) {
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            if (std::abs(r[i + 1] - 1.0) > std::abs(r[i] - 1.0)) return false;
        return !r.empty();
    };
    d.trend_v = trending(d.ratio_v);
    d.trend_vx = trending(d.ratio_vx);
    d.trend_c = trending(d.ratio_c);
    return d;
}

}  // namespace divhjb
