#include "fallowopt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "fallowopt/analysis.hpp"
#include "fallowopt/errors.hpp"
#include "fallowopt/format.hpp"
#include "fallowopt/optimizer.hpp"

namespace fallowopt::cli {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& raw, const std::string& what) {
    const std::string text = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw InvalidInput(what + ": '" + raw + "' is not a finite number");
    return v;
}

std::uint64_t parse_seed(const std::string& raw) {
    const std::string text = trim(raw);
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw InvalidInput("seed: '" + raw + "' is not a non-negative integer");
    return v;
}

SolverMethod parse_solver(const std::string& name) {
    if (name == "dormand_prince") return SolverMethod::dormand_prince;
    if (name == "rosenbrock") return SolverMethod::rosenbrock;
    throw InvalidInput("solver: '" + name + "' (expected dormand_prince or rosenbrock)");
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto num = [&] { return parse_number(value, key); };
    ModelParams& p = cfg.params;
    if (key == "beta") p.beta = num();
    else if (key == "a") p.a = num();
    else if (key == "alpha") p.alpha = num();
    else if (key == "gamma") p.gamma = num();
    else if (key == "mu") p.mu = num();
    else if (key == "omega") p.omega = num();
    else if (key == "delta") p.delta = num();
    else if (key == "rho") p.rho = num();
    else if (key == "K") p.cap_k = num();
    else if (key == "d") p.d = num();
    else if (key == "D") p.cap_d = num();
    else if (key == "q") p.q = num();
    else if (key == "S0") p.s0 = num();
    else if (key == "P0") p.p0 = num();
    else if (key == "m") p.m = num();
    else if (key == "c") p.c = num();
    else if (key == "tmax") cfg.t_max = num();
    else if (key == "mode") cfg.reg.mode = parse_mode(value.c_str());
    else if (key == "tau_sup") cfg.reg.tau_sup = num();
    else if (key == "penalty_fraction") cfg.reg.penalty_fraction = num();
    else if (key == "seed") cfg.ars.seed = parse_seed(value);
    else if (key == "grid_step") cfg.grid_step = num();
    else if (key == "sample_step") cfg.sample_step = num();
    else if (key == "solver") cfg.solver.method = parse_solver(value);
    else if (key == "rel_tol") cfg.solver.rel_tol = num();
    else if (key == "abs_tol") cfg.solver.abs_tol = num();
    else if (key == "max_steps") {
        const double v = num();
        if (v < 1.0 || v != std::floor(v)) throw InvalidInput("max_steps must be an integer >= 1");
        cfg.solver.max_steps = static_cast<long>(v);
    }
    else if (key == "taus") cfg.taus = parse_list(value);
    else if (key == "p_grid") cfg.p_grid = parse_list(value);
    else if (key == "two_season_taus") cfg.two_season_taus = parse_list(value);
    else throw InvalidInput("unknown config key '" + key + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot write '" + path.string() + "'");
    return os;
}

void write_json(const std::filesystem::path& path, const json& doc) {
    auto os = open_output(path);
    os << doc.dump(2) << '\n';
}

std::string join(std::span<const double> values, char sep) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += sep;
        s += format_number(values[i]);
    }
    return s;
}

json params_json(const ModelParams& p) {
    return {{"beta", p.beta}, {"a", p.a},     {"alpha", p.alpha}, {"gamma", p.gamma},
            {"mu", p.mu},     {"omega", p.omega}, {"delta", p.delta}, {"rho", p.rho},
            {"K", p.cap_k},   {"d", p.d},     {"D", p.cap_d},     {"q", p.q},
            {"S0", p.s0},     {"P0", p.p0},   {"m", p.m},         {"c", p.c}};
}

// Raw flag values; unset flags leave the config-file value in place.
struct Flags {
    std::optional<std::string> config;
    std::optional<double> tmax;
    std::optional<std::string> mode;
    std::optional<double> tau_sup;
    std::optional<std::string> seed;
    std::optional<double> grid_step;
    std::optional<std::string> out;
    std::optional<std::string> taus;
    std::optional<std::string> p_grid;
    std::optional<std::string> two_season_taus;
    std::optional<double> sample_step;
    std::vector<std::string> schedules;
    bool verbose = false;
};

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    if (f.config) apply_config_text(read_file(*f.config), cfg);
    if (f.tmax) cfg.t_max = *f.tmax;
    if (f.mode) cfg.reg.mode = parse_mode(f.mode->c_str());
    if (f.tau_sup) cfg.reg.tau_sup = *f.tau_sup;
    if (f.seed) cfg.ars.seed = parse_seed(*f.seed);
    if (f.grid_step) cfg.grid_step = *f.grid_step;
    if (f.out) cfg.out_dir = *f.out;
    if (f.taus) cfg.taus = parse_list(*f.taus);
    if (f.p_grid) cfg.p_grid = parse_list(*f.p_grid);
    if (f.two_season_taus) cfg.two_season_taus = parse_list(*f.two_season_taus);
    if (f.sample_step) cfg.sample_step = *f.sample_step;
    if (const char* env = std::getenv("FALLOWOPT_THREADS")) {
        const double t = parse_number(env, "FALLOWOPT_THREADS");
        if (t < 1.0 || t != std::floor(t)) throw InvalidInput("FALLOWOPT_THREADS must be an integer >= 1");
        cfg.ars.threads = static_cast<unsigned>(t);
    }
    cfg.params.validate();
    cfg.ars.validate();
    if (!(cfg.t_max > 0.0)) throw InvalidInput("tmax must be > 0");
    return cfg;
}

void prepare_out(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + cfg.out_dir.string() + "'");
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const FallowSchedule schedule(cfg.taus, cfg.t_max);
    SolverConfig solver = cfg.solver;
    if (!(cfg.sample_step > 0.0)) throw InvalidInput("sample_step must be > 0");
    solver.sample_step = cfg.sample_step;
    const MultiSeasonOutcome sim = simulate_schedule(cfg.params, schedule, true, solver);
    prepare_out(cfg);

    auto seasons = open_output(cfg.out_dir / "seasons.csv");
    seasons << "k,t_k,tau_k,P_start,Y_k,R_k,P_after_harvest\n";
    auto traj = open_output(cfg.out_dir / "trajectory.csv");
    traj << "k,t,t_season,P,S,X\n";
    for (std::size_t k = 0; k < sim.seasons.size(); ++k) {
        const SeasonOutcome& s = sim.seasons[k];
        seasons << k << ',' << format_number(sim.season_starts[k]) << ','
                << format_number(k == 0 ? 0.0 : schedule.taus()[k - 1]) << ','
                << format_number(sim.initial_p[k]) << ',' << format_number(s.yield) << ','
                << format_number(s.profit) << ',' << format_number(s.p_after_harvest) << '\n';
        for (const TrajectoryPoint& pt : s.trajectory) {
            traj << k << ',' << format_number(sim.season_starts[k] + pt.t) << ',' << format_number(pt.t)
                 << ',' << format_number(pt.p) << ',' << format_number(pt.s) << ','
                 << format_number(pt.x) << '\n';
        }
    }
    out << "seasons " << sim.seasons.size() << "\ntotal_profit " << format_number(sim.total_profit)
        << "\nfinal_infestation " << format_number(sim.final_infestation) << '\n';
}

void cmd_optimize(RunConfig cfg, bool verbose, std::ostream& out, std::ostream& err) {
    cfg.ars.keep_log = true;
    if (verbose)
        err << "optimizing " << to_string(cfg.reg.mode) << " mode, tmax " << format_number(cfg.t_max)
            << ", seed " << cfg.ars.seed << '\n';
    const OptimizationOutcome res = optimize(cfg.params, cfg.t_max, cfg.reg, cfg.ars, cfg.solver);
    prepare_out(cfg);

    json doc;
    doc["mode"] = to_string(res.mode);
    doc["t_max"] = cfg.t_max;
    doc["seed"] = res.seed;
    doc["n_star"] = res.n_star;
    doc["seasons"] = res.n_star + 1;
    doc["tau_star"] = res.tau_star;
    doc["profit"] = res.profit_star;
    doc["penalized_profit"] = res.penalized_profit ? json(*res.penalized_profit) : json(nullptr);
    doc["penalty_rate"] = res.penalty_rate ? json(*res.penalty_rate) : json(nullptr);
    doc["final_infestation"] = res.final_infestation;
    doc["evaluations"] = res.evaluations;
    if (res.mode == RegularizationMode::bounded) doc["tau_sup"] = cfg.reg.tau_sup;
    json dims = json::array();
    for (const DimensionResult& d : res.per_dimension) {
        dims.push_back({{"n", d.n},
                        {"taus", d.taus},
                        {"objective", d.objective},
                        {"profit", d.profit},
                        {"evaluations", d.evaluations},
                        {"trivial", d.trivial}});
    }
    doc["per_dimension"] = std::move(dims);
    doc["params"] = params_json(cfg.params);
    write_json(cfg.out_dir / "result.json", doc);

    auto log = open_output(cfg.out_dir / "iterations.csv");
    log << "n,round,phase,sigma,objective,failed,accepted,taus\n";
    for (const DimensionResult& d : res.per_dimension) {
        for (const IterateRecord& r : d.log) {
            log << d.n << ',' << r.round << ',' << to_string(r.phase) << ',' << format_number(r.sigma)
                << ',' << format_number(r.objective) << ',' << (r.failed ? 1 : 0) << ','
                << (r.accepted ? 1 : 0) << ',' << join(r.taus, ';') << '\n';
        }
    }

    out << "n_star " << res.n_star << "\ntau_star " << join(res.tau_star, ',') << "\nprofit "
        << format_number(res.profit_star) << '\n';
    if (res.penalized_profit) out << "penalized_profit " << format_number(*res.penalized_profit) << '\n';
    out << "final_infestation " << format_number(res.final_infestation) << "\nevaluations "
        << res.evaluations << '\n';
}

void cmd_scan_constant(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ConstantScan scan = optimize_constant(cfg.params, cfg.t_max, cfg.grid_step, cfg.solver);
    prepare_out(cfg);

    auto xi = open_output(cfg.out_dir / "xi.csv");
    xi << "n,seasons,tau,profit,final_infestation\n";
    for (std::size_t i = 0; i < scan.xi.size(); ++i) {
        const ConstantPoint& p = scan.xi_points[i];
        xi << scan.xi[i].fallows << ',' << p.seasons << ',' << format_number(p.tau) << ','
           << format_number(p.profit) << ',' << format_number(p.final_infestation) << '\n';
    }
    auto grid = open_output(cfg.out_dir / "profit-vs-tau.csv");
    grid << "tau,seasons,profit,final_infestation\n";
    for (const ConstantPoint& p : scan.grid_points) {
        grid << format_number(p.tau) << ',' << p.seasons << ',' << format_number(p.profit) << ','
             << format_number(p.final_infestation) << '\n';
    }
    if (!scan.best_on_xi)
        err << "warning: the grid beats every element of the switching set; the monotonicity "
               "assumption may not hold for these parameters\n";
    out << "tau_star " << format_number(scan.best.tau) << "\nseasons " << scan.best.seasons
        << "\nprofit " << format_number(scan.best.profit) << "\nfinal_infestation "
        << format_number(scan.best.final_infestation) << '\n';
}

json report_json(const MonotonicityReport& r) {
    json doc;
    doc["p_grid"] = r.p_grid;
    doc["samples"] = r.sample_times.size();
    doc["ordered_p"] = r.ordered_p;
    doc["ordered_x"] = r.ordered_x;
    doc["ordered_s"] = r.ordered_s;
    doc["monotone"] = r.monotone();
    if (r.first_violation) {
        const auto& v = *r.first_violation;
        doc["first_violation"] = {{"time", v.time},
                                  {"variable", to_string(v.variable)},
                                  {"lower_p_init", v.lower_p_init},
                                  {"upper_p_init", v.upper_p_init}};
    } else {
        doc["first_violation"] = nullptr;
    }
    return doc;
}

void cmd_check_monotonicity(RunConfig cfg, std::ostream& out) {
    if (cfg.p_grid.empty())
        for (int i = 0; i <= 8; ++i) cfg.p_grid.push_back(25.0 * i);
    const MonotonicityReport report =
        check_monotonicity(cfg.params, cfg.p_grid, cfg.sample_step, cfg.solver);
    json doc = report_json(report);
    doc["sample_step"] = cfg.sample_step;
    if (!cfg.two_season_taus.empty()) {
        const TwoSeasonScenario sc =
            two_season_scenario(cfg.params, cfg.two_season_taus, cfg.sample_step, cfg.solver);
        json runs = json::array();
        for (const TwoSeasonRun& r : sc.runs)
            runs.push_back({{"tau", r.tau}, {"p_second_start", r.p_second_start}, {"profit", r.profit}});
        doc["two_season"] = {{"runs", runs}, {"second_season", report_json(sc.second_season_report)}};
    }
    prepare_out(cfg);
    write_json(cfg.out_dir / "report.json", doc);
    out << "monotone " << (report.monotone() ? "yes" : "no") << '\n';
}

NamedSchedule parse_named_schedule(const std::string& spec, double t_max) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw InvalidInput("schedule '" + spec + "' must look like NAME=tau1,tau2,...");
    const std::string values = spec.substr(eq + 1);
    return {spec.substr(0, eq), FallowSchedule(trim(values).empty() ? std::vector<double>{} : parse_list(values), t_max)};
}

void cmd_compare(RunConfig cfg, const std::vector<std::string>& specs, bool verbose,
                 std::ostream& out, std::ostream& err) {
    std::vector<NamedSchedule> schedules;
    for (const std::string& s : specs) schedules.push_back(parse_named_schedule(s, cfg.t_max));
    if (schedules.empty()) {
        if (!(cfg.reg.tau_sup > 0.0)) cfg.reg.tau_sup = 60.0;
        for (auto mode : {RegularizationMode::free, RegularizationMode::bounded,
                          RegularizationMode::penalized}) {
            if (verbose) err << "optimizing " << to_string(mode) << " strategy\n";
            RegularizationSpec reg = cfg.reg;
            reg.mode = mode;
            const OptimizationOutcome res = optimize(cfg.params, cfg.t_max, reg, cfg.ars, cfg.solver);
            schedules.push_back({to_string(mode), FallowSchedule(res.tau_star, cfg.t_max)});
        }
        if (verbose) err << "scanning constant fallows\n";
        const ConstantScan scan = optimize_constant(cfg.params, cfg.t_max, cfg.grid_step, cfg.solver);
        schedules.push_back({"constant", constant_schedule(cfg.t_max, cfg.params.cap_d, scan.best.tau)});
    }
    const ComparisonTable table = strategy_comparison(cfg.params, schedules, cfg.solver);
    prepare_out(cfg);
    auto os = open_output(cfg.out_dir / "comparison.csv");
    table.write_csv(os);
    for (const StrategySummary& s : table.totals)
        out << s.strategy << " total_profit " << format_number(s.total_profit) << " final_infestation "
            << format_number(s.final_infestation) << '\n';
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "key=value parameter file");
    sub->add_option("--tmax", f.tmax, "planning horizon (days)");
    sub->add_option("--out", f.out, "output directory");
    sub->add_flag("--verbose", f.verbose, "progress messages on stderr");
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(parse_number(item, "list entry"));
    if (values.empty()) throw InvalidInput("empty list '" + text + "'");
    return values;
}

void apply_config_text(const std::string& text, RunConfig& cfg) {
    std::istringstream in(text);
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config line " + std::to_string(no) + ": expected key = value");
        try {
            set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const InvalidInput& e) {
            throw InvalidInput("config line " + std::to_string(no) + ": " + e.what());
        }
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fallow scheduling for banana crops under nematode pressure"};
    app.require_subcommand(1);
    Flags f;

    auto* simulate = app.add_subcommand("simulate", "simulate one schedule");
    add_common(simulate, f);
    simulate->add_option("--taus", f.taus, "comma-separated fallow durations (days)");
    simulate->add_option("--sample-step", f.sample_step, "trajectory sampling step (days)");

    auto* opt = app.add_subcommand("optimize", "optimal fallow sequence");
    add_common(opt, f);
    opt->add_option("--mode", f.mode, "free, bounded, penalized or constant");
    opt->add_option("--tau-sup", f.tau_sup, "upper bound on each fallow (bounded mode)");
    opt->add_option("--seed", f.seed, "random seed");

    auto* scan = app.add_subcommand("scan-constant", "constant fallow scan");
    add_common(scan, f);
    scan->add_option("--grid-step", f.grid_step, "verification grid step (days, 0 disables)");

    auto* mono = app.add_subcommand("check-monotonicity", "trajectory ordering check");
    add_common(mono, f);
    mono->add_option("--p-grid", f.p_grid, "comma-separated initial infestations, ascending");
    mono->add_option("--sample-step", f.sample_step, "sampling step (days)");
    mono->add_option("--two-season-taus", f.two_season_taus, "fallows of a two-season scenario");

    auto* cmp = app.add_subcommand("compare", "per-season comparison of strategies");
    add_common(cmp, f);
    cmp->add_option("--schedule", f.schedules, "NAME=tau1,tau2,... (repeatable)");
    cmp->add_option("--tau-sup", f.tau_sup, "bound for the bounded strategy (default 60)");
    cmp->add_option("--seed", f.seed, "random seed");
    cmp->add_option("--grid-step", f.grid_step, "constant scan grid step (days)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        RunConfig cfg = resolve(f);
        if (*simulate) cmd_simulate(cfg, out);
        else if (*opt) cmd_optimize(cfg, f.verbose, out, err);
        else if (*scan) cmd_scan_constant(cfg, out, err);
        else if (*mono) cmd_check_monotonicity(cfg, out);
        else cmd_compare(cfg, f.schedules, f.verbose, out, err);
        return kOk;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Infeasible& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const NumericalFailure& e) {
        err << "numerical failure at t = " << format_number(e.last_valid_time()) << ": " << e.what()
            << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace fallowopt::cli
