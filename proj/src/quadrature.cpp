#include "divhjb/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace divhjb {

namespace {

double checked_eval(const std::function<double(double)>& f, double s) {
    const double v = f(s);
    if (!std::isfinite(v))
        throw std::runtime_error("quadrature: integrand non-finite at s = " + std::to_string(s));
    return v;
}

// Recursive adaptive Simpson with Richardson acceptance test.
double simpson_rec(const std::function<double(double)>& f, double a, double fa, double m,
                   double fm, double b, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = checked_eval(f, lm), frm = checked_eval(f, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double abs_tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = checked_eval(f, a), fm = checked_eval(f, m), fb = checked_eval(f, b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, m, fm, b, fb, whole, abs_tol, 56);
}

double quad_exp_weight(const std::function<double(double)>& f, double rate, double upper,
                       double abs_tol) {
    if (!(rate > 0.0)) throw std::invalid_argument("quad_exp_weight: rate must be positive");
    if (upper <= 0.0) return 0.0;

    // Tail mass e^{-rate*s} drops below 1e-12 at s = 27.6 / rate.
    const double s_cut = 27.6 / rate;
    const double s_hi = std::isfinite(upper) ? std::min(upper, s_cut) : s_cut;

    // u = e^{-rate*s}:  int_0^{s_hi} f(s) rate e^{-rate s} ds = int_{u_lo}^1 f(-ln(u)/rate) du.
    const double u_lo = std::exp(-rate * s_hi);
    return quad_adaptive([&](double u) { return f(-std::log(u) / rate); }, u_lo, 1.0, abs_tol);
}

}  // namespace divhjb
