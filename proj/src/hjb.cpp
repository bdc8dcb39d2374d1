#include "divhjb/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace divhjb {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(SolutionClass c) {
    switch (c) {
        case SolutionClass::Decaying: return "Decaying";
        case SolutionClass::Bubble: return "Bubble";
        case SolutionClass::SingularStop: return "SingularStop";
    }
    return "?";
}

std::size_t HjbSolution::index_of(double x) const {
    if (xs.size() < 2) throw std::domain_error("index_of: solution grid too small");
    const double h = xs[1] - xs[0];
    if (x < xs.front() - 0.5 * h || x > xs.back() + 0.5 * h)
        throw std::domain_error("index_of: x outside the solved range");
    const auto i = static_cast<long long>(std::llround((x - xs.front()) / h));
    const auto n = static_cast<long long>(xs.size());
    return static_cast<std::size_t>(std::clamp(i, 0LL, n - 1));
}

namespace {

double lerp_on_grid(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.size() < 2) throw std::domain_error("interpolation: solution grid too small");
    const double h = xs[1] - xs[0];
    if (x < xs.front() - 1e-12 || x > xs.back() + 1e-12)
        throw std::domain_error("interpolation: x outside the solved range");
    const double xc = std::clamp(x, xs.front(), xs.back());
    auto j = static_cast<std::size_t>((xc - xs.front()) / h);
    j = std::min(j, xs.size() - 2);
    const double t = (xc - xs[j]) / h;
    return ys[j] * (1.0 - t) + ys[j + 1] * t;
}

}  // namespace

double HjbSolution::value_at(double x) const { return lerp_on_grid(xs, vs, x); }
double HjbSolution::slope_at(double x) const { return lerp_on_grid(xs, vxs, x); }
double HjbSolution::rate_at(double x) const { return lerp_on_grid(xs, cs, x); }

double curvature_rhs(const ModelParams& p, const UtilitySpec& u, double v, double vx) {
    const double c = optimal_rate_from_slope(u, vx);
    const double denom = p.mu - c;
    if (std::abs(denom) < 1e-12)
        throw SingularLocusError("curvature_rhs: optimal rate equals the premium rate");
    const double num = (p.xi * p.mu - p.beta - p.lambda) * vx - p.xi * p.beta * v +
                       p.xi * (utility_value(u, c) - c * vx);
    return -num / denom;
}

double boundary_v0(const ModelParams& p, const UtilitySpec& u, double b) {
    validate_params(p);
    validate_utility(u);
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::invalid_argument("boundary_v0: initial slope must be positive and finite");
    const double c0 = optimal_rate_from_slope(u, b);
    return (p.mu * b + utility_value(u, c0) - c0 * b) / (p.beta + p.lambda);
}

SolutionClass classify_solution(std::span<const double> vxs, IvpTermination reason) {
    if (reason == IvpTermination::SingularStop) return SolutionClass::SingularStop;
    if (reason == IvpTermination::GuardStop) return SolutionClass::Bubble;
    const std::size_t n = vxs.size();
    if (n < 10) throw ClassificationError("classify_solution: fewer than 10 grid points");

    const std::size_t q = n - n / 4;  // start of the final quarter
    bool tail_increasing = true, tail_decreasing = true;
    for (std::size_t i = q; i + 1 < n; ++i) {
        if (!(vxs[i + 1] > vxs[i])) tail_increasing = false;
        if (!(vxs[i + 1] < vxs[i])) tail_decreasing = false;
    }
    if (tail_increasing) return SolutionClass::Bubble;
    if (vxs.back() > vxs.front()) return SolutionClass::Bubble;
    if (tail_decreasing && vxs.back() < vxs.front()) return SolutionClass::Decaying;
    throw ClassificationError("classify_solution: tail is neither monotone, cannot classify");
}

HjbSolution solve_value_function(const ModelParams& p, const UtilitySpec& u, double b,
                                 double x_max, const IvpConfig& cfg) {
    validate_params(p);
    validate_utility(u);
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::invalid_argument("solve_value_function: initial slope must be positive");
    if (!(x_max > 0.0) || !std::isfinite(x_max))
        throw std::invalid_argument("solve_value_function: x_max must be positive");
    const double c0 = optimal_rate_from_slope(u, b);
    if (std::abs(p.mu - c0) < 1e-12)
        throw std::invalid_argument(
            "solve_value_function: initial slope sits on the singular locus");

    const double v0 = boundary_v0(p, u, b);

    const OdeRhs rhs = [&p, &u](double, const State2& s) -> State2 {
        try {
            return {s[1], curvature_rhs(p, u, s[0], s[1])};
        } catch (const SingularLocusError&) {
            return {kNaN, kNaN};
        } catch (const std::domain_error&) {  // slope crossed zero
            return {kNaN, kNaN};
        }
    };
    // Diverging slopes never return: abort once v_x is two orders above start.
    const double guard_level = 100.0 * b;
    const OdeGuard guard = [guard_level](double, const State2& s) {
        return s[1] > guard_level;
    };

    const DensePath path = integrate_ivp(rhs, 0.0, {v0, b}, x_max, cfg, guard);

    HjbSolution sol;
    sol.params = p;
    sol.utility = u;
    sol.b = b;

    // Truncate where the slope stops being positive; the optimal rate is
    // undefined there and the economic branch has ended.
    std::size_t keep = path.xs.size();
    for (std::size_t i = 0; i < path.xs.size(); ++i) {
        if (!(path.states[i][1] > 0.0)) {
            keep = i;
            break;
        }
    }
    sol.xs.reserve(keep);
    sol.vs.reserve(keep);
    sol.vxs.reserve(keep);
    sol.cs.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        sol.xs.push_back(path.xs[i]);
        sol.vs.push_back(path.states[i][0]);
        sol.vxs.push_back(path.states[i][1]);
        sol.cs.push_back(optimal_rate_from_slope(u, path.states[i][1]));
    }
    sol.stop_x = (keep == path.xs.size() && keep > 0) ? path.stop_x
                 : keep > 0                           ? sol.xs.back()
                                                      : 0.0;
    sol.classification = classify_solution(std::span<const double>(sol.vxs), path.reason);
    return sol;
}

double hjb_residual(const HjbSolution& sol, double x) {
    const std::size_t i = sol.index_of(x);
    const double xi_pt = sol.xs[i];
    const ModelParams& p = sol.params;

    // Convolution int_0^{x_i} v(x_i - y) xi e^{-xi y} dy by the trapezoid rule
    // on the dense grid; grid point j contributes v(x_j) at lag y = x_i - x_j.
    double conv = 0.0;
    if (i > 0) {
        const double h = sol.xs[1] - sol.xs[0];
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) {
            const double w = (j == 0 || j == i) ? 0.5 : 1.0;
            acc += w * sol.vs[j] * p.xi * std::exp(-p.xi * (xi_pt - sol.xs[j]));
        }
        conv = acc * h;
    }

    const double c = sol.cs[i];
    return (p.mu - c) * sol.vxs[i] - (p.beta + p.lambda) * sol.vs[i] +
           utility_value(sol.utility, c) + p.lambda * conv;
}

double riccati_residual(const HjbSolution& sol, std::size_t index, bool* one_sided) {
    const std::size_t n = sol.vs.size();
    if (n < 2) throw std::out_of_range("riccati_residual: solution grid too small");
    if (index >= n) throw std::out_of_range("riccati_residual: index outside the grid");

    // y(v) = v_x viewed as a function of v; y_v by differences on (vs, vxs).
    std::size_t lo = index > 0 ? index - 1 : index;
    std::size_t hi = index + 1 < n ? index + 1 : index;
    if (one_sided) *one_sided = (lo == index || hi == index);
    const double y_v = (sol.vxs[hi] - sol.vxs[lo]) / (sol.vs[hi] - sol.vs[lo]);

    const ModelParams& p = sol.params;
    const double v = sol.vs[index];
    const double y = sol.vxs[index];

    if (sol.utility.kind == UtilityKind::Power) {
        const double alpha = sol.utility.alpha;
        const double pw = std::pow(y, -alpha / (1.0 - alpha));  // = U(c*) * alpha = c* * y
        return p.mu * y * y_v + (p.xi * p.mu - p.beta - p.lambda) * y - p.xi * p.beta * v +
               p.xi * (1.0 - alpha) / alpha * pw - pw * y_v;
    }
    if (y > 1.0) {
        // Slopes above 1 shut dividends off; the first-order form loses the
        // utility terms there.
        return p.mu * y * y_v + (p.xi * p.mu - p.beta - p.lambda) * y - p.xi * p.beta * v;
    }
    return (p.xi * p.mu + p.xi - p.beta - p.lambda) * y - p.xi * std::log(y) -
           p.xi * p.beta * v - p.xi + (p.mu + 1.0) * y * y_v - y_v;
}

}  // namespace divhjb
