#include "fallowopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fallowopt/errors.hpp"
#include "fallowopt/format.hpp"

namespace fallowopt {

const char* to_string(StateVariable v) noexcept {
    switch (v) {
        case StateVariable::p: return "P";
        case StateVariable::s: return "S";
        case StateVariable::x: return "X";
    }
    return "?";
}

namespace {

struct Labelled {
    double p_init;
    const std::vector<TrajectoryPoint>* trajectory;
};

bool below(double lo, double hi) {
    const double slack = kOrderingSlack * std::max({1.0, std::abs(lo), std::abs(hi)});
    return hi < lo - slack;
}

// `runs` must be sorted by ascending p_init and share the same sample times.
MonotonicityReport ordering_report(const std::vector<Labelled>& runs) {
    MonotonicityReport report;
    for (const Labelled& r : runs) report.p_grid.push_back(r.p_init);
    if (runs.empty()) return report;
    const auto& reference = *runs.front().trajectory;
    for (const TrajectoryPoint& pt : reference) report.sample_times.push_back(pt.t);

    auto flag = [&](StateVariable v, double t, double lo, double hi) {
        switch (v) {
            case StateVariable::p: report.ordered_p = false; break;
            case StateVariable::s: report.ordered_s = false; break;
            case StateVariable::x: report.ordered_x = false; break;
        }
        if (!report.first_violation) report.first_violation = MonotonicityViolation{t, v, lo, hi};
    };

    for (std::size_t i = 0; i < reference.size(); ++i) {
        if (reference[i].t <= 0.0) continue;
        for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
            const auto& a = (*runs[j].trajectory)[i];
            const auto& b = (*runs[j + 1].trajectory)[i];
            if (std::abs(a.t - b.t) > 1e-9 * std::max(1.0, a.t))
                throw InvalidInput("trajectories are not sampled on a common grid");
            const double lo = runs[j].p_init;
            const double hi = runs[j + 1].p_init;
            if (below(a.p, b.p)) flag(StateVariable::p, a.t, lo, hi);
            if (below(a.x, b.x)) flag(StateVariable::x, a.t, lo, hi);
            if (below(b.s, a.s)) flag(StateVariable::s, a.t, lo, hi);
        }
    }
    return report;
}

SolverConfig with_sampling(SolverConfig solver, double sample_step) {
    if (!(sample_step > 0.0) || !std::isfinite(sample_step))
        throw InvalidInput("sample step must be > 0");
    solver.sample_step = sample_step;
    return solver;
}

}  // namespace

MonotonicityReport check_monotonicity(const ModelParams& params, const std::vector<double>& p_grid,
                                      double sample_step, SolverConfig solver) {
    params.validate();
    solver = with_sampling(solver, sample_step);
    if (p_grid.empty()) throw InvalidInput("monotonicity check needs at least one initial value");
    for (double p : p_grid)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw InvalidInput("initial infestation values must be finite and >= 0");
    if (!std::is_sorted(p_grid.begin(), p_grid.end()))
        throw InvalidInput("initial infestation grid must be sorted ascending");

    std::vector<SeasonOutcome> seasons;
    seasons.reserve(p_grid.size());
    for (double p : p_grid) seasons.push_back(integrate_season(p, params, true, solver));
    std::vector<Labelled> runs;
    for (std::size_t i = 0; i < p_grid.size(); ++i) runs.push_back({p_grid[i], &seasons[i].trajectory});
    return ordering_report(runs);
}

TwoSeasonScenario two_season_scenario(const ModelParams& params, const std::vector<double>& taus,
                                      double sample_step, SolverConfig solver) {
    params.validate();
    solver = with_sampling(solver, sample_step);
    if (taus.empty()) throw InvalidInput("two-season scenario needs at least one fallow length");

    const SeasonOutcome first = integrate_season(params.p0, params, false, solver);
    TwoSeasonScenario out;
    for (double tau : taus) {
        TwoSeasonRun run;
        run.tau = tau;
        run.p_second_start = apply_fallow(first.p_after_harvest, params.omega, tau);
        SeasonOutcome second = integrate_season(run.p_second_start, params, true, solver);
        run.profit = first.profit + second.profit;
        run.second_season = std::move(second.trajectory);
        out.runs.push_back(std::move(run));
    }

    std::vector<Labelled> ordered;
    for (const TwoSeasonRun& r : out.runs) ordered.push_back({r.p_second_start, &r.second_season});
    std::sort(ordered.begin(), ordered.end(),
              [](const Labelled& a, const Labelled& b) { return a.p_init < b.p_init; });
    out.second_season_report = ordering_report(ordered);
    return out;
}

ComparisonTable strategy_comparison(const ModelParams& params,
                                    const std::vector<NamedSchedule>& schedules,
                                    const SolverConfig& solver) {
    if (schedules.empty()) throw InvalidInput("comparison needs at least one strategy");
    const double t_max = schedules.front().schedule.t_max();
    for (const NamedSchedule& s : schedules) {
        if (std::abs(s.schedule.t_max() - t_max) > 1e-9 * std::max(1.0, t_max))
            throw InvalidInput("strategy '" + s.name + "' uses a different horizon (" +
                               format_number(s.schedule.t_max()) + " vs " + format_number(t_max) + ")");
    }

    ComparisonTable table;
    for (const NamedSchedule& s : schedules) {
        const MultiSeasonOutcome sim = simulate_schedule(params, s.schedule, false, solver);
        const auto taus = s.schedule.taus();
        for (std::size_t k = 0; k < sim.seasons.size(); ++k) {
            table.rows.push_back({s.name, k, sim.season_starts[k], k == 0 ? 0.0 : taus[k - 1],
                                  sim.seasons[k].yield, sim.seasons[k].profit,
                                  sim.seasons[k].p_after_harvest});
        }
        table.totals.push_back({s.name, sim.total_profit, sim.final_infestation});
    }
    return table;
}

void ComparisonTable::write_csv(std::ostream& os) const {
    os << "strategy,k,t_k,tau_k,Y_k,R_k,P_after_harvest\n";
    for (const ComparisonRow& r : rows) {
        os << r.strategy << ',' << r.k << ',' << format_number(r.t_k) << ',' << format_number(r.tau_k)
           << ',' << format_number(r.yield) << ',' << format_number(r.profit) << ','
           << format_number(r.p_after_harvest) << '\n';
    }
}

}  // namespace fallowopt
