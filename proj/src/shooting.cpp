#include "divhjb/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "divhjb/quadrature.hpp"

namespace divhjb {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(CandidateLabel label) {
    switch (label) {
        case CandidateLabel::Correct: return "Correct";
        case CandidateLabel::TooBig: return "TooBig";
        case CandidateLabel::TooSmall: return "TooSmall";
    }
    return "?";
}

ShootingConfig default_shooting_config(const ModelParams& p, const UtilitySpec& u) {
    (void)p;  // reference-parameter defaults; adjust b_start for other regimes
    ShootingConfig cfg;
    if (u.kind == UtilityKind::Log) cfg.b_start = 0.80;
    return cfg;
}

void validate_shooting_config(const ShootingConfig& cfg) {
    if (!(cfg.b_start > 0.0) || !std::isfinite(cfg.b_start))
        throw std::invalid_argument("shooting config: b_start must be positive");
    if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("shooting config: epsilon must be positive");
    if (cfg.step_schedule.empty())
        throw std::invalid_argument("shooting config: step schedule is empty");
    double prev = std::numeric_limits<double>::infinity();
    for (double d : cfg.step_schedule) {
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("shooting config: step decrements must be positive");
        if (!(d < prev))
            throw std::invalid_argument(
                "shooting config: step decrements must be strictly decreasing");
        prev = d;
    }
    if (cfg.fit_count < 2)
        throw std::invalid_argument("shooting config: fit_count must be at least 2");
    if (!(cfg.x_max >= static_cast<double>(cfg.fit_count - 1)))
        throw std::invalid_argument(
            "shooting config: x_max must cover the fit abscissae 0..fit_count-1");
    if (cfg.mc_check < 0)
        throw std::invalid_argument("shooting config: mc_check must be nonnegative");
}

double value_fit_eval(const ValueFit& fit, double x) {
    if (x < 0.0) return 0.0;  // ruin pays nothing
    if (const auto* pf = std::get_if<PowerFit>(&fit))
        return pf->a2 * std::pow(x, pf->alpha) + pf->b2;
    const auto& lf = std::get<LogBasisFit>(fit);
    return lf.a2 * std::log1p(x) + lf.b2;
}

double deterministic_trajectory(const ModelParams& p, const LinearFit& fit, double t) {
    if (!(fit.a1 > 0.0))
        throw std::domain_error("deterministic_trajectory: rate slope a1 must be positive");
    if (fit.b1 > p.mu)
        throw std::domain_error(
            "deterministic_trajectory: rate intercept b1 exceeds the premium rate");
    return (p.mu - fit.b1) / fit.a1 * (1.0 - std::exp(-fit.a1 * t));
}

double first_jump_value(const ModelParams& p, const UtilitySpec& u, const LinearFit& rate_fit,
                        const ValueFit& value_fit) {
    const double a1 = rate_fit.a1, b1 = rate_fit.b1;
    if (!(a1 > 0.0))
        throw std::domain_error("first_jump_value: rate slope a1 must be positive");
    if (b1 > p.mu)
        throw std::domain_error("first_jump_value: rate intercept b1 exceeds the premium rate");
    const auto traj = [&](double t) { return (p.mu - b1) / a1 * (1.0 - std::exp(-a1 * t)); };

    // E[e^{-beta T} v-hat(x(T) - S)], T ~ Exp(lambda), S ~ Exp(xi), zero on ruin.
    const auto post_jump = [&](double t) {
        const double xt = traj(t);
        return quad_exp_weight([&](double s) { return value_fit_eval(value_fit, xt - s); },
                               p.xi, xt, 1e-10);
    };
    const double jump =
        p.lambda / (p.lambda + p.beta) * quad_exp_weight(post_jump, p.lambda + p.beta,
                                                         std::numeric_limits<double>::infinity(),
                                                         1e-9);

    // E[int_0^T e^{-beta t} U(c-hat(x(t))) dt] = int_0^inf e^{-(beta+lambda)t} U dt.
    const auto running_rate = [&](double t) {
        return utility_value(u, std::max(a1 * traj(t) + b1, 0.0));
    };
    const double running =
        quad_exp_weight(running_rate, p.beta + p.lambda,
                        std::numeric_limits<double>::infinity(), 1e-9) /
        (p.beta + p.lambda);

    return jump + running;
}

namespace {

// Uniform in [0,1) with 53 random bits, identical across platforms.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exp_draw(std::mt19937_64& rng, double rate) {
    return -std::log1p(-unit_uniform(rng)) / rate;
}

}  // namespace

FirstJumpMc first_jump_value_mc(const ModelParams& p, const UtilitySpec& u,
                                const LinearFit& rate_fit, const ValueFit& value_fit,
                                long n_draws, std::uint64_t seed) {
    if (n_draws < 2) throw std::invalid_argument("first_jump_value_mc: need at least 2 draws");
    const double a1 = rate_fit.a1, b1 = rate_fit.b1;
    const auto traj = [&](double t) {
        return deterministic_trajectory(p, rate_fit, t);
    };

    std::mt19937_64 rng(seed);
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(n_draws));
    for (long i = 0; i < n_draws; ++i) {
        const double T = exp_draw(rng, p.lambda);
        const double S = exp_draw(rng, p.xi);
        const double jump_part = std::exp(-p.beta * T) * value_fit_eval(value_fit, traj(T) - S);
        const double running_part = quad_adaptive(
            [&](double t) {
                return std::exp(-p.beta * t) *
                       utility_value(u, std::max(a1 * traj(t) + b1, 0.0));
            },
            0.0, T, 1e-8);
        samples.push_back(jump_part + running_part);
    }

    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(n_draws);
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    const double var = ss / static_cast<double>(n_draws - 1);
    return {mean, std::sqrt(var / static_cast<double>(n_draws))};
}

CandidateEvaluation evaluate_candidate(const ModelParams& p, const UtilitySpec& u, double b,
                                       const ShootingConfig& cfg) {
    CandidateEvaluation ev;
    ev.b = b;
    ev.a = boundary_v0(p, u, b);
    ev.A = kNaN;
    ev.gap = kNaN;

    const HjbSolution sol = solve_value_function(p, u, b, cfg.x_max, cfg.ivp);

    if (sol.classification == SolutionClass::Bubble) {
        ev.label = CandidateLabel::TooBig;
        return ev;
    }
    if (sol.classification == SolutionClass::SingularStop) {
        // The integration died on the singular locus; the side of the locus
        // still tells the search which way to move.
        const double c0 = optimal_rate_from_slope(u, b);
        ev.label = c0 > p.mu ? CandidateLabel::TooSmall : CandidateLabel::TooBig;
        return ev;
    }

    // Decaying. A branch that could not be continued across the whole fit
    // window has already left the economic region: treat as TooSmall.
    const double spacing = cfg.ivp.dense_spacing;
    if (sol.xs.empty() || sol.xs.back() < cfg.x_max - 0.5 * spacing) {
        ev.label = CandidateLabel::TooSmall;
        return ev;
    }

    std::vector<double> xs_fit, cs_fit, vs_fit;
    for (int i = 0; i < cfg.fit_count; ++i) {
        const double x = static_cast<double>(i);
        xs_fit.push_back(x);
        cs_fit.push_back(sol.rate_at(x));
        vs_fit.push_back(sol.value_at(x));
    }
    ev.rate_fit = fit_linear(xs_fit, cs_fit);
    if (ev.rate_fit.b1 > p.mu) {
        ev.label = CandidateLabel::TooSmall;
        return ev;
    }

    if (u.kind == UtilityKind::Power)
        ev.value_fit = fit_power(xs_fit, vs_fit, u.alpha);
    else
        ev.value_fit = fit_log_basis(xs_fit, vs_fit);

    ev.A = first_jump_value(p, u, ev.rate_fit, ev.value_fit);
    ev.gap = ev.a - ev.A;
    ev.label = CandidateLabel::Correct;
    return ev;
}

ShootingReport search_initial_slope(const ModelParams& p, const UtilitySpec& u,
                                    const ShootingConfig& cfg) {
    validate_params(p);
    validate_utility(u);
    validate_shooting_config(cfg);

    ShootingReport rep;
    rep.bracket_low = kNaN;
    rep.bracket_high = kNaN;

    std::optional<CandidateEvaluation> last_correct;
    std::optional<CandidateEvaluation> best_toosmall;  // largest fit-backed TooSmall

    const auto note = [&](const CandidateEvaluation& ev) {
        rep.rows.push_back(ev);
        if (ev.label == CandidateLabel::TooSmall) {
            if (std::isnan(rep.bracket_low) || ev.b > rep.bracket_low) rep.bracket_low = ev.b;
            if (ev.rate_fit.b1 > p.mu && (!best_toosmall || ev.b > best_toosmall->b))
                best_toosmall = ev;
        } else {
            if (std::isnan(rep.bracket_high) || ev.b < rep.bracket_high)
                rep.bracket_high = ev.b;
            if (ev.label == CandidateLabel::Correct) last_correct = ev;
        }
    };

    CandidateEvaluation chosen;
    bool early_stop = false;

    CandidateEvaluation ev = evaluate_candidate(p, u, cfg.b_start, cfg);
    note(ev);
    if (ev.label == CandidateLabel::TooSmall)
        throw std::invalid_argument(
            "search_initial_slope: b_start is already below the feasibility boundary; "
            "start with a larger slope");
    if (ev.label == CandidateLabel::Correct && std::abs(ev.gap) < cfg.epsilon) {
        chosen = ev;
        early_stop = true;
    }

    double b_hi = cfg.b_start;
    for (std::size_t k = 0; k < cfg.step_schedule.size() && !early_stop; ++k) {
        const double d = cfg.step_schedule[k];
        double b = b_hi;
        while (true) {
            const double b_next = b - d;
            if (!(b_next > 0.0)) break;
            const CandidateEvaluation row = evaluate_candidate(p, u, b_next, cfg);
            note(row);
            if (row.label == CandidateLabel::TooSmall) break;  // back up, next decrement
            b = b_next;
            b_hi = b_next;
            if (row.label == CandidateLabel::Correct && std::abs(row.gap) < cfg.epsilon) {
                chosen = row;
                early_stop = true;
                break;
            }
        }
    }

    if (!early_stop) {
        rep.warnings.push_back(
            "step schedule exhausted before the self-consistency gap fell below epsilon");
        if (last_correct) {
            chosen = *last_correct;
        } else if (best_toosmall) {
            chosen = *best_toosmall;
            rep.warnings.push_back(
                "no candidate produced a fitted dividend-rate intercept at or below mu, so "
                "no initial slope matches the first-jump value for this utility; reporting "
                "the feasibility-boundary candidate with an undefined gap");
        } else {
            throw std::runtime_error(
                "search_initial_slope: every candidate diverged; lower b_start or widen "
                "the step schedule");
        }
    }

    rep.final_b = chosen.b;
    rep.final_a = chosen.a;
    rep.final_gap = chosen.gap;
    rep.final_label = chosen.label;

    if (cfg.mc_check > 0 && chosen.label == CandidateLabel::Correct) {
        const FirstJumpMc mc =
            first_jump_value_mc(p, u, chosen.rate_fit, chosen.value_fit, cfg.mc_check);
        if (std::abs(chosen.A - mc.mean) > 4.0 * mc.std_error + 1e-9)
            rep.warnings.push_back(
                "Monte Carlo cross-check of the first-jump value deviates from the "
                "quadrature result by more than four standard errors");
    }
    return rep;
}

}  // namespace divhjb
