#include "fallowopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fallowopt/errors.hpp"

namespace fallowopt {

namespace {

// Every schedule starts with the same season from P0, so it is integrated once
// and reused. The chaining below mirrors simulate_schedule step for step.
class ProfitEvaluator {
public:
    ProfitEvaluator(const ModelParams& params, const SolverConfig& solver)
        : params_(params), solver_(solver), first_(integrate_season(params.p0, params, false, solver)) {}

    double operator()(std::span<const double> taus) const {
        double total = first_.profit;
        double p_after = first_.p_after_harvest;
        for (double tau : taus) {
            const SeasonOutcome season =
                integrate_season(apply_fallow(p_after, params_.omega, tau), params_, false, solver_);
            total += season.profit;
            p_after = season.p_after_harvest;
        }
        return total;
    }

private:
    const ModelParams& params_;
    const SolverConfig& solver_;
    SeasonOutcome first_;
};

Rng dimension_rng(std::uint64_t seed, std::size_t n) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n)};
    return Rng(seq);
}

// True when `a` should replace the incumbent `b` across dimensions.
bool better(const DimensionResult& a, const DimensionResult& b) {
    const double scale = std::max({1.0, std::abs(a.objective), std::abs(b.objective)});
    if (std::abs(a.objective - b.objective) > 1e-12 * scale) return a.objective > b.objective;
    if (a.n != b.n) return a.n < b.n;
    return distance_to_centroid(a.taus) < distance_to_centroid(b.taus);
}

OptimizationOutcome optimize_constant_mode(const ModelParams& params, double t_max,
                                           const ArsConfig& cfg, const SolverConfig& solver) {
    const ConstantScan scan = optimize_constant(params, t_max, 1.0, solver);
    OptimizationOutcome out;
    out.mode = RegularizationMode::constant;
    out.seed = cfg.seed;
    out.n_star = scan.best.seasons - 1;
    out.tau_star.assign(out.n_star, scan.best.tau);
    out.profit_star = scan.best.profit;
    out.final_infestation = scan.best.final_infestation;
    out.evaluations = scan.xi_points.size() + scan.grid_points.size();
    return out;
}

}  // namespace

OptimizationOutcome optimize(const ModelParams& params, double t_max, const RegularizationSpec& reg,
                             const ArsConfig& cfg, const SolverConfig& solver,
                             std::optional<SolverConfig> search) {
    params.validate();
    reg.validate();
    cfg.validate();
    if (reg.mode == RegularizationMode::constant)
        return optimize_constant_mode(params, t_max, cfg, solver);

    const std::size_t n_max = max_fallow_count(t_max, params.cap_d);
    std::size_t n_min = 1;
    std::optional<double> upper;
    if (reg.mode == RegularizationMode::bounded) {
        n_min = min_fallow_count_bounded(t_max, params.cap_d, reg.tau_sup);
        upper = reg.tau_sup;
        if (n_min > n_max)
            throw Infeasible("no schedule keeps every fallow below " + std::to_string(reg.tau_sup) +
                             " days: needs " + std::to_string(n_min) + " fallows, at most " +
                             std::to_string(n_max) + " fit");
    }

    const SolverConfig& ranking = search ? *search : solver;
    const ProfitEvaluator raw(params, ranking);
    std::optional<PenalizedProfit> penalized;
    std::optional<PenalizedProfit> reported;
    if (reg.mode == RegularizationMode::penalized) {
        penalized.emplace(params, t_max, reg.penalty_fraction, ranking);
        reported.emplace(params, t_max, reg.penalty_fraction, solver);
    }

    OptimizationOutcome out;
    out.mode = reg.mode;
    out.seed = cfg.seed;
    std::optional<std::size_t> best;

    for (std::size_t n = n_min; n <= n_max; ++n) {
        const SimplexSpec spec(t_max, params.cap_d, n, upper);
        DimensionResult dim;
        dim.n = n;
        if (n == 1) {
            dim.trivial = true;
            dim.taus = spec.centroid();
            if (!spec.contains(dim.taus)) continue;
            dim.profit = raw(dim.taus);
            dim.objective = penalized ? penalized->penalize(dim.taus, dim.profit) : dim.profit;
            dim.evaluations = 1;
        } else {
            Objective objective;
            if (penalized) {
                penalized->penalty_rate(n);  // warm the cache before any concurrent use
                objective = [&](std::span<const double> taus) {
                    return penalized->penalize(taus, raw(taus));
                };
            } else {
                objective = [&](std::span<const double> taus) { return raw(taus); };
            }
            Rng rng = dimension_rng(cfg.seed, n);
            ArsResult ars = ars_optimize(spec, objective, cfg, rng);
            dim.taus = std::move(ars.taus);
            dim.objective = ars.objective;
            dim.profit = raw(dim.taus);
            dim.evaluations = ars.evaluations;
            dim.log = std::move(ars.log);
        }
        out.evaluations += dim.evaluations;
        out.per_dimension.push_back(std::move(dim));
        const std::size_t idx = out.per_dimension.size() - 1;
        if (!best || better(out.per_dimension[idx], out.per_dimension[*best])) best = idx;
    }
    if (!best) throw Infeasible("no admissible fallow count for this horizon and bound");

    const DimensionResult& winner = out.per_dimension[*best];
    out.n_star = winner.n;
    out.tau_star = winner.taus;
    const MultiSeasonOutcome check =
        simulate_schedule(params, FallowSchedule(out.tau_star, t_max), false, solver);
    out.profit_star = check.total_profit;
    out.final_infestation = check.final_infestation;
    if (reported) {
        out.penalty_rate = reported->penalty_rate(out.n_star);
        out.penalized_profit = reported->penalize(out.tau_star, out.profit_star);
    }
    return out;
}

FallowSchedule constant_schedule(double t_max, double cap_d, double tau) {
    const std::size_t seasons = constant_season_count(t_max, cap_d, tau);
    if (seasons == 0) throw InvalidInput("the horizon is shorter than one season");
    return FallowSchedule(std::vector<double>(seasons - 1, tau), t_max);
}

ConstantPoint constant_profit(const ModelParams& params, double t_max, double tau,
                              const SolverConfig& solver) {
    const FallowSchedule schedule = constant_schedule(t_max, params.cap_d, tau);
    const MultiSeasonOutcome sim = simulate_schedule(params, schedule, false, solver);
    return {tau, schedule.season_count(), sim.total_profit, sim.final_infestation};
}

ConstantScan optimize_constant(const ModelParams& params, double t_max, double grid_step,
                               const SolverConfig& solver) {
    params.validate();
    if (!(grid_step >= 0.0) || !std::isfinite(grid_step))
        throw InvalidInput("grid step must be finite and >= 0");
    ConstantScan scan;
    scan.xi = xi_set(t_max, params.cap_d);
    for (const XiElement& xi : scan.xi) scan.xi_points.push_back(constant_profit(params, t_max, xi.tau, solver));

    if (grid_step > 0.0) {
        const double upper = t_max - 2.0 * params.cap_d;
        const auto steps = static_cast<std::size_t>(std::floor(upper / grid_step + 1e-9));
        scan.grid_points.reserve(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i)
            scan.grid_points.push_back(
                constant_profit(params, t_max, static_cast<double>(i) * grid_step, solver));
    }

    scan.best = scan.xi_points.front();
    for (const ConstantPoint& p : scan.xi_points)
        if (p.profit > scan.best.profit) scan.best = p;
    for (const ConstantPoint& p : scan.grid_points) {
        if (p.profit > scan.best.profit) {
            scan.best = p;
            scan.best_on_xi = false;
        }
    }
    return scan;
}

}  // namespace fallowopt
