#include "divhjb/fit.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace divhjb {

namespace {

// Least squares for y ~ a*phi(x) + b over the sample, solved from the 2x2
// normal equations. Returns {a, b, rss}.
struct Fit2 {
    double a, b, rss;
};

Fit2 fit_two_param(std::span<const double> xs, std::span<const double> ys,
                   const std::function<double(double)>& phi) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit: xs and ys differ in length");
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("fit: need at least 2 samples");

    double Spp = 0.0, Sp = 0.0, Spy = 0.0, Sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = phi(xs[i]);
        if (!std::isfinite(p) || !std::isfinite(ys[i]))
            throw std::invalid_argument("fit: non-finite sample");
        Spp += p * p;
        Sp += p;
        Spy += p * ys[i];
        Sy += ys[i];
    }
    const double det = Spp * static_cast<double>(n) - Sp * Sp;
    // det == 0 iff all phi(x_i) coincide: the design matrix is rank one.
    if (std::abs(det) < 1e-12 * (Spp * static_cast<double>(n) + Sp * Sp + 1e-300))
        throw std::invalid_argument("fit: singular design (basis column is constant)");

    const double a = (Spy * static_cast<double>(n) - Sp * Sy) / det;
    const double b = (Spp * Sy - Sp * Spy) / det;

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (a * phi(xs[i]) + b);
        rss += r * r;
    }
    return {a, b, rss};
}

}  // namespace

LinearFit fit_linear(std::span<const double> xs, std::span<const double> ys) {
    const Fit2 f = fit_two_param(xs, ys, [](double x) { return x; });
    return {f.a, f.b, f.rss};
}

PowerFit fit_power(std::span<const double> xs, std::span<const double> ys, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("fit_power: alpha must lie in (0,1)");
    for (double x : xs)
        if (x < 0.0) throw std::invalid_argument("fit_power: abscissae must be nonnegative");
    const Fit2 f = fit_two_param(xs, ys, [alpha](double x) { return std::pow(x, alpha); });
    return {f.a, f.b, alpha, f.rss};
}

LogBasisFit fit_log_basis(std::span<const double> xs, std::span<const double> ys) {
    for (double x : xs)
        if (x <= -1.0) throw std::invalid_argument("fit_log_basis: abscissae must exceed -1");
    const Fit2 f = fit_two_param(xs, ys, [](double x) { return std::log1p(x); });
    return {f.a, f.b, f.rss};
}

}  // namespace divhjb
