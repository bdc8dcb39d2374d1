#pragma once

#include <span>

namespace divhjb {

/// y ~ a1 * x + b1
struct LinearFit {
    double a1 = 0.0;   ///< slope
    double b1 = 0.0;   ///< intercept
    double rss = 0.0;  ///< residual sum of squares
};

/// y ~ a2 * x^alpha + b2 with the exponent held fixed (linear least squares
/// in the basis {x^alpha, 1}).
struct PowerFit {
    double a2 = 0.0;
    double b2 = 0.0;
    double alpha = 0.5;
    double rss = 0.0;
};

/// y ~ a2 * ln(x + 1) + b2. Value surrogate used for log utility, where the
/// value function grows like ln(x + 1) instead of a power.
struct LogBasisFit {
    double a2 = 0.0;
    double b2 = 0.0;
    double rss = 0.0;
};

/// Ordinary least squares. Throws std::invalid_argument on fewer than two
/// samples or a singular design (all basis values equal).
LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys);
PowerFit fit_power(std::span<const double> xs, std::span<const double> ys, double alpha);
LogBasisFit fit_log_basis(std::span<const double> xs, std::span<const double> ys);

}  // namespace divhjb
