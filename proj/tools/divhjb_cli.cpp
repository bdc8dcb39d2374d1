// Command-line surface for the dividend value-function library: solves the
// free-boundary ODE, runs the initial-slope search, emits asymptotic ratio
// diagnostics and Monte Carlo estimates as CSV/JSON artifacts.
//
// Exit codes: 0 success, 1 usage/config error, 2 bubble detected by `solve`.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "divhjb/asymptotics.hpp"
#include "divhjb/hjb.hpp"
#include "divhjb/model.hpp"
#include "divhjb/shooting.hpp"
#include "divhjb/simulator.hpp"

using nlohmann::json;

namespace {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown config key \"" + where + item.key() + "\"");
    }
}

double get_number(const json& obj, const std::string& where, const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number())
        throw ConfigError("config key \"" + where + key + "\" must be a number");
    return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& where, const char* key, long dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_integer())
        throw ConfigError("config key \"" + where + key + "\" must be an integer");
    return obj[key].get<long>();
}

divhjb::ModelParams parse_model(const json& root) {
    divhjb::ModelParams p;
    if (!root.contains("model")) return p;
    const json& m = root["model"];
    if (!m.is_object()) throw ConfigError("config key \"model\" must be an object");
    reject_unknown_keys(m, "model.", {"mu", "lambda", "xi", "beta"});
    p.mu = get_number(m, "model.", "mu", p.mu);
    p.lambda = get_number(m, "model.", "lambda", p.lambda);
    p.xi = get_number(m, "model.", "xi", p.xi);
    p.beta = get_number(m, "model.", "beta", p.beta);
    divhjb::validate_params(p);
    return p;
}

divhjb::UtilitySpec parse_utility(const json& root) {
    divhjb::UtilitySpec u;
    if (!root.contains("utility")) return u;
    const json& j = root["utility"];
    if (!j.is_object()) throw ConfigError("config key \"utility\" must be an object");
    reject_unknown_keys(j, "utility.", {"kind", "alpha"});
    if (j.contains("kind")) {
        const std::string kind = j["kind"].get<std::string>();
        if (kind == "power")
            u.kind = divhjb::UtilityKind::Power;
        else if (kind == "log")
            u.kind = divhjb::UtilityKind::Log;
        else
            throw ConfigError("config key \"utility.kind\" must be \"power\" or \"log\"");
    }
    u.alpha = get_number(j, "utility.", "alpha", u.alpha);
    divhjb::validate_utility(u);
    return u;
}

// Integrator keys shared by the solve/search/asymptotics blocks.
divhjb::IvpConfig parse_ivp(const json& blk, const std::string& where) {
    divhjb::IvpConfig ivp;
    ivp.rel_tol = get_number(blk, where, "rel_tol", ivp.rel_tol);
    ivp.abs_tol = get_number(blk, where, "abs_tol", ivp.abs_tol);
    ivp.max_step = get_number(blk, where, "max_step", ivp.max_step);
    ivp.dense_spacing = get_number(blk, where, "dense_spacing", ivp.dense_spacing);
    if (!(ivp.rel_tol > 0.0)) throw ConfigError("config key \"" + where + "rel_tol\" must be > 0");
    if (!(ivp.abs_tol > 0.0)) throw ConfigError("config key \"" + where + "abs_tol\" must be > 0");
    if (!(ivp.max_step > 0.0)) throw ConfigError("config key \"" + where + "max_step\" must be > 0");
    if (!(ivp.dense_spacing > 0.0))
        throw ConfigError("config key \"" + where + "dense_spacing\" must be > 0");
    return ivp;
}

std::string fmt6(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

// JSON artifacts round to the same 6 decimal places as the CSVs so reruns
// with one seed are byte-identical.
json jnum(double v) {
    if (!std::isfinite(v)) return json();  // serializes as null
    return std::round(v * 1e6) / 1e6;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing output file " + path.string());
}

std::string solution_csv(const divhjb::HjbSolution& sol, bool integer_rows_only) {
    std::ostringstream os;
    os << "x,v,vx,c\n";
    for (std::size_t i = 0; i < sol.xs.size(); ++i) {
        if (integer_rows_only) {
            const double r = std::round(sol.xs[i]);
            if (std::abs(sol.xs[i] - r) > 1e-9) continue;
        }
        os << fmt6(sol.xs[i]) << ',' << fmt6(sol.vs[i]) << ',' << fmt6(sol.vxs[i]) << ','
           << fmt6(sol.cs[i]) << '\n';
    }
    return os.str();
}

std::string report_csv(const divhjb::ShootingReport& rep) {
    std::ostringstream os;
    os << "label,b,a,A,gap\n";
    for (const auto& row : rep.rows)
        os << to_string(row.label) << ',' << fmt6(row.b) << ',' << fmt6(row.a) << ','
           << fmt6(row.A) << ',' << fmt6(row.gap) << '\n';
    return os.str();
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

json load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return json::object();
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("cannot open config file " + args.config_path);
    json root = json::parse(in);
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(root, "",
                        {"model", "utility", "solve", "search", "asymptotics", "simulate"});
    return root;
}

std::filesystem::path prepare_out_dir(const CommonArgs& args) {
    std::filesystem::path dir(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

json block_or_empty(const json& root, const char* name) {
    if (!root.contains(name)) return json::object();
    if (!root[name].is_object())
        throw ConfigError(std::string("config key \"") + name + "\" must be an object");
    return root[name];
}

int cmd_solve(const CommonArgs& args) {
    const json root = load_config(args);
    const auto p = parse_model(root);
    const auto u = parse_utility(root);
    const json blk = block_or_empty(root, "solve");
    reject_unknown_keys(blk, "solve.",
                        {"b", "x_max", "rel_tol", "abs_tol", "max_step", "dense_spacing"});
    const double b = get_number(blk, "solve.", "b", 1.9);
    const double x_max = get_number(blk, "solve.", "x_max", 10.0);
    const auto ivp = parse_ivp(blk, "solve.");

    const auto sol = divhjb::solve_value_function(p, u, b, x_max, ivp);
    const auto dir = prepare_out_dir(args);
    write_file(dir / "solve.csv", solution_csv(sol, false));

    json summary;
    summary["b"] = jnum(b);
    summary["classification"] = to_string(sol.classification);
    summary["stop_x"] = jnum(sol.stop_x);
    summary["v0"] = jnum(sol.vs.front());
    summary["v_end"] = jnum(sol.vs.back());
    summary["vx_end"] = jnum(sol.vxs.back());
    write_file(dir / "solve.json", summary.dump(2) + "\n");

    std::cout << "classification=" << to_string(sol.classification) << " rows=" << sol.xs.size()
              << " v(0)=" << fmt6(sol.vs.front()) << " -> " << (dir / "solve.csv").string()
              << '\n';
    return sol.classification == divhjb::SolutionClass::Bubble ? 2 : 0;
}

int cmd_search(const CommonArgs& args) {
    const json root = load_config(args);
    const auto p = parse_model(root);
    const auto u = parse_utility(root);
    const json blk = block_or_empty(root, "search");
    reject_unknown_keys(blk, "search.",
                        {"b_start", "epsilon", "step_schedule", "fit_count", "x_max", "mc_check",
                         "rel_tol", "abs_tol", "max_step", "dense_spacing"});

    divhjb::ShootingConfig cfg = divhjb::default_shooting_config(p, u);
    cfg.b_start = get_number(blk, "search.", "b_start", cfg.b_start);
    cfg.epsilon = get_number(blk, "search.", "epsilon", cfg.epsilon);
    cfg.fit_count = static_cast<int>(get_integer(blk, "search.", "fit_count", cfg.fit_count));
    cfg.x_max = get_number(blk, "search.", "x_max", cfg.x_max);
    cfg.mc_check = get_integer(blk, "search.", "mc_check", cfg.mc_check);
    cfg.ivp = parse_ivp(blk, "search.");
    if (blk.contains("step_schedule")) {
        if (!blk["step_schedule"].is_array())
            throw ConfigError("config key \"search.step_schedule\" must be an array");
        cfg.step_schedule = blk["step_schedule"].get<std::vector<double>>();
    }

    const auto rep = divhjb::search_initial_slope(p, u, cfg);
    const auto dir = prepare_out_dir(args);
    write_file(dir / "search.csv", report_csv(rep));

    json summary;
    summary["b_final"] = jnum(rep.final_b);
    summary["a_final"] = jnum(rep.final_a);
    summary["gap"] = jnum(rep.final_gap);
    summary["label"] = to_string(rep.final_label);
    summary["bracket_low"] = jnum(rep.bracket_low);
    summary["bracket_high"] = jnum(rep.bracket_high);
    summary["evaluations"] = rep.rows.size();
    summary["warnings"] = rep.warnings;
    write_file(dir / "search.json", summary.dump(2) + "\n");

    std::cout << "b_final=" << fmt6(rep.final_b) << " a_final=" << fmt6(rep.final_a)
              << " gap=" << fmt6(rep.final_gap) << " label=" << to_string(rep.final_label)
              << " evaluations=" << rep.rows.size() << '\n';
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << '\n';
    return 0;
}

int cmd_asymptotics(const CommonArgs& args) {
    const json root = load_config(args);
    const auto p = parse_model(root);
    const auto u = parse_utility(root);
    const json blk = block_or_empty(root, "asymptotics");
    reject_unknown_keys(blk, "asymptotics.",
                        {"b", "x_max", "x_points", "rel_tol", "abs_tol", "max_step",
                         "dense_spacing"});
    const double b = get_number(blk, "asymptotics.", "b", 1.9);
    const double x_max = get_number(blk, "asymptotics.", "x_max", 500.0);
    const auto ivp = parse_ivp(blk, "asymptotics.");
    std::vector<double> x_points;
    if (blk.contains("x_points")) {
        if (!blk["x_points"].is_array())
            throw ConfigError("config key \"asymptotics.x_points\" must be an array");
        x_points = blk["x_points"].get<std::vector<double>>();
    }

    const auto sol = divhjb::solve_value_function(p, u, b, x_max, ivp);
    const auto d = divhjb::convergence_diagnostic(sol, x_points);

    std::ostringstream os;
    os << "x,ratio_v,ratio_vx,ratio_c\n";
    for (std::size_t i = 0; i < d.xs.size(); ++i)
        os << fmt6(d.xs[i]) << ',' << fmt6(d.ratio_v[i]) << ',' << fmt6(d.ratio_vx[i]) << ','
           << fmt6(d.ratio_c[i]) << '\n';
    const auto dir = prepare_out_dir(args);
    write_file(dir / "asymptotics.csv", os.str());

    json summary;
    summary["b"] = jnum(b);
    summary["x_max"] = jnum(x_max);
    summary["trend_v"] = d.trend_v;
    summary["trend_vx"] = d.trend_vx;
    summary["trend_c"] = d.trend_c;
    write_file(dir / "asymptotics.json", summary.dump(2) + "\n");

    std::cout << "samples=" << d.xs.size() << " trend_v=" << d.trend_v
              << " trend_vx=" << d.trend_vx << " trend_c=" << d.trend_c << " -> "
              << (dir / "asymptotics.csv").string() << '\n';
    return 0;
}

divhjb::StrategySpec parse_strategy(const json& blk, const divhjb::ModelParams& p,
                                    const divhjb::UtilitySpec& u) {
    if (!blk.contains("strategy")) {
        // Default: tabulated rates from the reference decaying solution.
        const auto sol = divhjb::solve_value_function(p, u, 1.9, 10.0);
        return divhjb::GridPolicy::from_solution(sol);
    }
    const json& s = blk["strategy"];
    if (!s.is_object()) throw ConfigError("config key \"simulate.strategy\" must be an object");
    if (!s.contains("type"))
        throw ConfigError("config key \"simulate.strategy.type\" is required");
    const std::string type = s["type"].get<std::string>();
    const std::string where = "simulate.strategy.";
    if (type == "linear") {
        reject_unknown_keys(s, where, {"type", "a1", "b1"});
        divhjb::LinearPolicy pol;
        pol.a1 = get_number(s, where, "a1", 0.0);
        pol.b1 = get_number(s, where, "b1", 0.0);
        return pol;
    }
    if (type == "constant") {
        reject_unknown_keys(s, where, {"type", "c0"});
        divhjb::ConstantPolicy pol;
        pol.c0 = get_number(s, where, "c0", 0.0);
        return pol;
    }
    if (type == "grid") {
        reject_unknown_keys(s, where, {"type", "b", "x_max", "xs", "cs"});
        if (s.contains("xs") || s.contains("cs")) {
            divhjb::GridPolicy pol;
            if (!s.contains("xs") || !s.contains("cs"))
                throw ConfigError("config keys \"simulate.strategy.xs\" and \".cs\" go together");
            pol.xs = s["xs"].get<std::vector<double>>();
            pol.cs = s["cs"].get<std::vector<double>>();
            return pol;
        }
        const double b = get_number(s, where, "b", 1.9);
        const double x_max = get_number(s, where, "x_max", 10.0);
        const auto sol = divhjb::solve_value_function(p, u, b, x_max);
        return divhjb::GridPolicy::from_solution(sol);
    }
    throw ConfigError("config key \"simulate.strategy.type\" must be linear, constant or grid");
}

int cmd_simulate(const CommonArgs& args) {
    const json root = load_config(args);
    const auto p = parse_model(root);
    const auto u = parse_utility(root);
    const json blk = block_or_empty(root, "simulate");
    reject_unknown_keys(blk, "simulate.", {"strategy", "x0", "n_paths", "horizon", "seed"});
    const auto strategy = parse_strategy(blk, p, u);
    const double x0 = get_number(blk, "simulate.", "x0", 0.0);
    const long n_paths = get_integer(blk, "simulate.", "n_paths", 10000);
    const double horizon = get_number(blk, "simulate.", "horizon", 400.0);
    auto seed = static_cast<std::uint64_t>(get_integer(blk, "simulate.", "seed", 42));
    if (args.seed) seed = *args.seed;

    const auto est = divhjb::estimate_value(p, u, strategy, x0, n_paths, horizon, seed);

    json summary;
    summary["mean"] = jnum(est.mean);
    summary["std_error"] = jnum(est.std_error);
    summary["n_paths"] = est.n_paths;
    summary["ruin_fraction"] = jnum(est.ruin_fraction);
    summary["horizon"] = jnum(est.horizon);
    summary["bias_bound"] = jnum(est.bias_bound);
    const auto dir = prepare_out_dir(args);
    write_file(dir / "simulate.json", summary.dump(2) + "\n");

    std::cout << "mean=" << fmt6(est.mean) << " std_error=" << fmt6(est.std_error)
              << " ruin_fraction=" << fmt6(est.ruin_fraction) << " -> "
              << (dir / "simulate.json").string() << '\n';
    return 0;
}

int cmd_tables(const CommonArgs& args) {
    const json root = load_config(args);
    const auto p = parse_model(root);
    const auto u = parse_utility(root);
    const auto dir = prepare_out_dir(args);

    // Reference tables: dense decaying solve, bubble solve, slope search.
    const auto sol1 = divhjb::solve_value_function(p, u, 1.9, 10.0);
    write_file(dir / "table1.csv", solution_csv(sol1, true));

    const auto sol2 = divhjb::solve_value_function(p, u, 2.0, 10.0);
    write_file(dir / "table2.csv", solution_csv(sol2, true));

    const auto rep = divhjb::search_initial_slope(p, u, divhjb::default_shooting_config(p, u));
    write_file(dir / "table3.csv", report_csv(rep));

    std::cout << "table1: " << to_string(sol1.classification) << ", table2: "
              << to_string(sol2.classification) << ", table3: b_final=" << fmt6(rep.final_b)
              << " gap=" << fmt6(rep.final_gap) << " -> " << dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expected-utility dividend value functions for a compound Poisson surplus"};
    app.require_subcommand(1);

    CommonArgs args;
    app.add_option("--config", args.config_path, "JSON config file");
    app.add_option("--out", args.out_dir, "output directory for CSV/JSON artifacts");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "override the simulation seed");

    auto* solve = app.add_subcommand("solve", "integrate the value ODE for a given v_x(0)");
    auto* search = app.add_subcommand("search", "locate the initial slope by staged shooting");
    auto* asym = app.add_subcommand("asymptotics", "ratio diagnostics against the asymptotes");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo value of a dividend policy");
    auto* tables = app.add_subcommand("tables", "reproduce the three reference tables");
    for (auto* sub : {solve, search, asym, simulate, tables}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (seed_opt->count() > 0) args.seed = seed_flag;

    try {
        if (solve->parsed()) return cmd_solve(args);
        if (search->parsed()) return cmd_search(args);
        if (asym->parsed()) return cmd_asymptotics(args);
        if (simulate->parsed()) return cmd_simulate(args);
        if (tables->parsed()) return cmd_tables(args);
    } catch (const json::exception& e) {
        std::cerr << "error: config JSON: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
