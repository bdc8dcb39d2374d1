#include "divhjb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace divhjb {

namespace {

// Uniform in [0,1) with 53 random bits, identical across platforms.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exp_draw(std::mt19937_64& rng, double rate) {
    return -std::log1p(-unit_uniform(rng)) / rate;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace

GridPolicy GridPolicy::from_solution(const HjbSolution& sol) {
    GridPolicy g;
    g.xs = sol.xs;
    g.cs = sol.cs;
    return g;
}

double GridPolicy::rate_at(double x) const {
    if (xs.size() < 2) throw std::invalid_argument("GridPolicy: need at least 2 grid points");
    const double h = xs[1] - xs[0];
    const double u = (x - xs.front()) / h;
    const auto last = static_cast<long long>(xs.size()) - 2;
    const long long j = std::clamp(static_cast<long long>(std::floor(u)), 0LL, last);
    const double theta = u - static_cast<double>(j);  // outside [0,1] extrapolates
    const auto k = static_cast<std::size_t>(j);
    return cs[k] + (cs[k + 1] - cs[k]) * theta;
}

void validate_strategy(const StrategySpec& s) {
    if (const auto* lin = std::get_if<LinearPolicy>(&s)) {
        if (!std::isfinite(lin->a1) || !std::isfinite(lin->b1))
            throw std::invalid_argument("strategy: linear coefficients must be finite");
        if (lin->a1 < 0.0)
            throw std::invalid_argument("strategy: rate must be non-decreasing (a1 >= 0)");
        if (lin->b1 < 0.0)
            throw std::invalid_argument("strategy: rate must be nonnegative (b1 >= 0)");
        return;
    }
    if (const auto* cons = std::get_if<ConstantPolicy>(&s)) {
        if (!std::isfinite(cons->c0) || cons->c0 < 0.0)
            throw std::invalid_argument("strategy: constant rate must be finite, >= 0");
        return;
    }
    const auto& g = std::get<GridPolicy>(s);
    if (g.xs.size() != g.cs.size() || g.xs.size() < 2)
        throw std::invalid_argument("strategy: grid needs matching xs/cs with >= 2 points");
    const double h = g.xs[1] - g.xs[0];
    if (!(h > 0.0)) throw std::invalid_argument("strategy: grid spacing must be positive");
    for (std::size_t i = 0; i + 1 < g.xs.size(); ++i) {
        if (std::abs((g.xs[i + 1] - g.xs[i]) - h) > 1e-9 * std::max(1.0, h))
            throw std::invalid_argument("strategy: grid must be uniformly spaced");
        if (g.cs[i + 1] < g.cs[i] - 1e-12)
            throw std::invalid_argument("strategy: grid rates must be non-decreasing");
    }
    for (double c : g.cs)
        if (!std::isfinite(c) || c < 0.0)
            throw std::invalid_argument("strategy: grid rates must be finite, >= 0");
}

double policy_rate(const StrategySpec& s, double x) {
    if (const auto* lin = std::get_if<LinearPolicy>(&s)) return lin->a1 * x + lin->b1;
    if (const auto* cons = std::get_if<ConstantPolicy>(&s)) return cons->c0;
    return std::get<GridPolicy>(s).rate_at(x);
}

namespace {

// Discounted utility of a constant rate over [t0, t1].
double constant_rate_utility(const UtilitySpec& u, double rate, double beta, double t0,
                             double t1) {
    if (t1 <= t0) return 0.0;
    return utility_value(u, rate) * (std::exp(-beta * t0) - std::exp(-beta * t1)) / beta;
}

struct FlowState {
    double x;
    double util = 0.0;
};

// Exact flow for a constant applied rate c0 on x > 0 (regulated at 0).
void flow_constant(const ModelParams& p, const UtilitySpec& u, double c0, double t0, double t1,
                   FlowState& fs) {
    double t = t0;
    if (c0 > p.mu && fs.x > 0.0) {
        const double t_hit = t + fs.x / (c0 - p.mu);
        const double t_end = std::min(t_hit, t1);
        fs.util += constant_rate_utility(u, c0, p.beta, t, t_end);
        fs.x -= (c0 - p.mu) * (t_end - t);
        if (t_hit > t1) return;
        fs.x = 0.0;
        t = t_hit;
    }
    if (fs.x <= 0.0 && c0 >= p.mu) {  // absorbed at zero, dividends capped at mu
        fs.x = 0.0;
        fs.util += constant_rate_utility(u, std::min(c0, p.mu), p.beta, t, t1);
        return;
    }
    // c0 <= mu: reserves grow (or hold) at constant rate
    fs.util += constant_rate_utility(u, c0, p.beta, t, t1);
    fs.x += (p.mu - c0) * (t1 - t);
}

// Exact flow x(t) = xbar + (x - xbar) e^{-a1 dt} for a linear rate; the
// discounted utility integral accumulates by the trapezoid rule on the exact
// flow with step 0.01.
void flow_linear(const ModelParams& p, const UtilitySpec& u, const LinearPolicy& pol,
                 double t0, double t1, FlowState& fs) {
    if (pol.a1 == 0.0) {
        flow_constant(p, u, pol.b1, t0, t1, fs);
        return;
    }
    const double xbar = (p.mu - pol.b1) / pol.a1;
    double t = t0;
    if (fs.x <= 0.0 && pol.b1 >= p.mu) {
        fs.x = 0.0;
        fs.util += constant_rate_utility(u, p.mu, p.beta, t, t1);
        return;
    }
    double t_end = t1;
    bool hits_zero = false;
    if (xbar < 0.0 && fs.x > 0.0) {  // draining policy: reserves reach 0 in finite time
        const double t_hit = t + std::log((fs.x - xbar) / (-xbar)) / pol.a1;
        if (t_hit < t1) {
            t_end = t_hit;
            hits_zero = true;
        }
    }
    const double x_start = fs.x;
    const auto x_at = [&](double s) {  // s = time since t
        return xbar + (x_start - xbar) * std::exp(-pol.a1 * s);
    };
    double du_prev =
        std::exp(-p.beta * t) * utility_value(u, std::max(pol.a1 * x_start + pol.b1, 0.0));
    double s = 0.0;
    const double span = t_end - t;
    while (s < span - 1e-12) {
        const double h = std::min(0.01, span - s);
        s += h;
        const double xs_ = std::max(x_at(s), 0.0);
        const double du =
            std::exp(-p.beta * (t + s)) * utility_value(u, std::max(pol.a1 * xs_ + pol.b1, 0.0));
        fs.util += 0.5 * (du_prev + du) * h;
        du_prev = du;
    }
    fs.x = std::max(x_at(span), 0.0);
    if (hits_zero) {
        fs.x = 0.0;
        flow_linear(p, u, pol, t_end, t1, fs);  // continues in the absorbed state
    }
}

// RK4 flow with step 0.01 for tabulated policies; trapezoid utility on the
// same steps, linear backtracking to the zero crossing.
void flow_grid(const ModelParams& p, const UtilitySpec& u, const GridPolicy& pol, double t0,
               double t1, FlowState& fs) {
    const double c_at_zero = pol.rate_at(0.0);
    const auto drift = [&](double x) {
        if (x <= 0.0) return p.mu - std::min(c_at_zero, p.mu);
        return p.mu - pol.rate_at(x);
    };
    const auto paid_rate = [&](double x) {
        if (x <= 0.0) return std::min(c_at_zero, p.mu);
        return pol.rate_at(x);
    };
    double t = t0;
    double du_prev = std::exp(-p.beta * t) * utility_value(u, paid_rate(fs.x));
    while (t < t1 - 1e-12) {
        if (fs.x <= 1e-12 && c_at_zero >= p.mu) {  // absorbed at zero
            fs.x = 0.0;
            fs.util += constant_rate_utility(u, std::min(c_at_zero, p.mu), p.beta, t, t1);
            return;
        }
        const double h = std::min(0.01, t1 - t);
        const double k1 = drift(fs.x);
        const double k2 = drift(fs.x + 0.5 * h * k1);
        const double k3 = drift(fs.x + 0.5 * h * k2);
        const double k4 = drift(fs.x + h * k3);
        const double x_new = fs.x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (x_new <= 0.0 && fs.x > 0.0) {
            const double theta = std::clamp(fs.x / (fs.x - x_new), 0.0, 1.0);
            const double h_hit = theta * h;
            const double du_hit =
                std::exp(-p.beta * (t + h_hit)) * utility_value(u, pol.rate_at(0.0));
            fs.util += 0.5 * (du_prev + du_hit) * h_hit;
            t += h_hit;
            fs.x = 0.0;
            du_prev = std::exp(-p.beta * t) * utility_value(u, paid_rate(0.0));
            continue;
        }
        t += h;
        fs.x = x_new;
        const double du = std::exp(-p.beta * t) * utility_value(u, paid_rate(fs.x));
        fs.util += 0.5 * (du_prev + du) * h;
        du_prev = du;
    }
}

void flow_segment(const ModelParams& p, const UtilitySpec& u, const StrategySpec& s, double t0,
                  double t1, FlowState& fs) {
    if (t1 <= t0) return;
    if (const auto* lin = std::get_if<LinearPolicy>(&s)) {
        flow_linear(p, u, *lin, t0, t1, fs);
    } else if (const auto* cons = std::get_if<ConstantPolicy>(&s)) {
        flow_constant(p, u, cons->c0, t0, t1, fs);
    } else {
        flow_grid(p, u, std::get<GridPolicy>(s), t0, t1, fs);
    }
}

}  // namespace

PathResult simulate_path(const ModelParams& p, const UtilitySpec& u, const StrategySpec& s,
                         double x0, double horizon, std::uint64_t seed) {
    validate_params(p);
    validate_utility(u);
    validate_strategy(s);
    if (!(x0 >= 0.0) || !std::isfinite(x0))
        throw std::invalid_argument("simulate_path: x0 must be nonnegative");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("simulate_path: horizon must be positive");

    std::mt19937_64 rng(seed);
    FlowState fs{x0};
    PathResult out;
    double t = 0.0;
    while (true) {
        const double t_claim = t + exp_draw(rng, p.lambda);
        flow_segment(p, u, s, t, std::min(t_claim, horizon), fs);
        if (t_claim >= horizon) break;
        t = t_claim;
        fs.x -= exp_draw(rng, p.xi);
        if (fs.x < 0.0) {
            out.ruin_time = t;
            break;
        }
    }
    out.total = fs.util;
    return out;
}

PathEstimate estimate_value(const ModelParams& p, const UtilitySpec& u, const StrategySpec& s,
                            double x0, long n_paths, double horizon, std::uint64_t seed) {
    if (n_paths < 2) throw std::invalid_argument("estimate_value: need at least 2 paths");
    validate_params(p);
    validate_utility(u);
    validate_strategy(s);

    std::vector<double> totals;
    totals.reserve(static_cast<std::size_t>(n_paths));
    long ruined = 0;
    std::uint64_t state = seed;
    for (long i = 0; i < n_paths; ++i) {
        const std::uint64_t path_seed = splitmix64(state);
        const PathResult r = simulate_path(p, u, s, x0, horizon, path_seed);
        totals.push_back(r.total);
        if (r.ruin_time) ++ruined;
    }

    const auto n = static_cast<double>(n_paths);
    const double mean = pairwise_sum(totals.data(), totals.size()) / n;
    std::vector<double> sq;
    sq.reserve(totals.size());
    for (double v : totals) sq.push_back((v - mean) * (v - mean));
    const double var = pairwise_sum(sq.data(), sq.size()) / (n - 1.0);

    PathEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(var / n);
    est.n_paths = n_paths;
    est.ruin_fraction = static_cast<double>(ruined) / n;
    est.horizon = horizon;
    const double c_max = std::max(policy_rate(s, x0), p.mu);
    est.bias_bound = utility_value(u, c_max) * std::exp(-p.beta * horizon) / p.beta;
    return est;
}

}  // namespace divhjb
