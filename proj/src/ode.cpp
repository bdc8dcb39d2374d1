#include "divhjb/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace divhjb {

const char* to_string(IvpTermination t) {
    switch (t) {
        case IvpTermination::Completed: return "completed";
        case IvpTermination::GuardStop: return "guard";
        case IvpTermination::SingularStop: return "singular";
        case IvpTermination::Diverged: return "diverged";
    }
    return "unknown";
}

namespace {

bool finite(const State2& y) {
    return std::isfinite(y[0]) && std::isfinite(y[1]);
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
// 5th-order solution weights (also the a7j row: FSAL).
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Error weights: b - b_hat (embedded 4th order).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

State2 axpy(const State2& y, double h, const State2& k) {
    return {y[0] + h * k[0], y[1] + h * k[1]};
}

// Cubic Hermite interpolation on [x, x+h] given endpoint values and slopes.
State2 hermite(double theta, const State2& y0, const State2& f0, const State2& y1,
               const State2& f1, double h) {
    const double t = theta, t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    State2 out;
    for (int i = 0; i < 2; ++i)
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    return out;
}

}  // namespace

DensePath integrate_ivp(const OdeRhs& rhs, double x0, State2 y0, double x_end,
                        const IvpConfig& cfg, const OdeGuard& guard) {
    if (!(x_end > x0)) throw std::invalid_argument("integrate_ivp: x_end must exceed x0");
    if (!(cfg.rel_tol > 0 && cfg.abs_tol > 0 && cfg.max_step > 0 && cfg.dense_spacing > 0))
        throw std::invalid_argument("integrate_ivp: tolerances and steps must be positive");

    DensePath path;
    path.xs.push_back(x0);
    path.states.push_back(y0);

    double x = x0;
    State2 y = y0;
    State2 f = rhs(x, y);
    if (!finite(y) || !finite(f)) {
        path.reason = IvpTermination::Diverged;
        path.stop_x = x;
        return path;
    }

    double h = std::min(cfg.max_step, (x_end - x0) / 10.0);
    std::size_t next_dense = 1;  // index of the next dense grid point to emit

    auto emit_dense = [&](double step_x, double step_h, const State2& ya, const State2& fa,
                          const State2& yb, const State2& fb) {
        // Fill every dense point that falls inside (step_x, step_x + step_h].
        for (;;) {
            const double xd = x0 + static_cast<double>(next_dense) * cfg.dense_spacing;
            if (xd > step_x + step_h + 1e-14 || xd > x_end + 1e-14) break;
            const double theta = std::clamp((xd - step_x) / step_h, 0.0, 1.0);
            path.xs.push_back(xd);
            path.states.push_back(hermite(theta, ya, fa, yb, fb, step_h));
            ++next_dense;
        }
    };

    const double h_floor = 1e-13;
    while (x < x_end) {
        h = std::min({h, cfg.max_step, x_end - x});
        if (h < h_floor) {
            path.reason = IvpTermination::SingularStop;
            path.stop_x = x;
            return path;
        }

        const State2 k1 = f;
        const State2 k2 = rhs(x + c2 * h, axpy(y, h, {a21 * k1[0], a21 * k1[1]}));
        const State2 k3 = rhs(x + c3 * h, {y[0] + h * (a31 * k1[0] + a32 * k2[0]),
                                           y[1] + h * (a31 * k1[1] + a32 * k2[1])});
        const State2 k4 = rhs(x + c4 * h, {y[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
                                           y[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])});
        const State2 k5 = rhs(
            x + c5 * h, {y[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
                         y[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])});
        const State2 k6 = rhs(x + h, {y[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] +
                                                  a64 * k4[0] + a65 * k5[0]),
                                      y[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] +
                                                  a64 * k4[1] + a65 * k5[1])});
        State2 y_new;
        for (int i = 0; i < 2; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State2 k7 = rhs(x + h, y_new);  // FSAL stage

        if (!finite(y_new) || !finite(k2) || !finite(k3) || !finite(k4) || !finite(k5) ||
            !finite(k6) || !finite(k7)) {
            // A trial stage left the domain (e.g. overshot past a singular
            // point). Reject the step and retry smaller; the h_floor check
            // above ends the integration if no step survives.
            h *= 0.2;
            continue;
        }

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double scale =
                cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (ei / scale) * (ei / scale);
        }
        err = std::sqrt(err / 2.0);

        if (err <= 1.0) {
            emit_dense(x, h, y, k1, y_new, k7);
            x += h;
            y = y_new;
            f = k7;
            if (guard && guard(x, y)) {
                path.reason = IvpTermination::GuardStop;
                path.stop_x = x;
                return path;
            }
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h *= factor;
    }

    path.reason = IvpTermination::Completed;
    path.stop_x = x;
    return path;
}

}  // namespace divhjb
