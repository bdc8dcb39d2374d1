#pragma once

#include <functional>
#include <limits>

namespace divhjb {

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance.
/// Throws std::runtime_error (with the sample point) if f returns a
/// non-finite value.
double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10);

/// Integral of f(s) * rate * exp(-rate * s) ds over [0, upper].
///
/// Computed after the substitution u = exp(-rate*s), which absorbs the weight
/// exactly and maps the domain to [exp(-rate*upper), 1]; adaptive Simpson then
/// handles kinks in f (e.g. a clamped integrand). An unbounded upper limit is
/// truncated where the weight's tail mass falls below 1e-12 (s = 27.6 / rate).
double quad_exp_weight(const std::function<double(double)>& f, double rate,
                       double upper = std::numeric_limits<double>::infinity(),
                       double abs_tol = 1e-9);

}  // namespace divhjb
