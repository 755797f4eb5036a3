#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fallowopt/model.hpp"
#include "fallowopt/params.hpp"
#include "fallowopt/schedule.hpp"

namespace fallowopt {

enum class StateVariable { p, s, x };

const char* to_string(StateVariable v) noexcept;

struct MonotonicityViolation {
    double time = 0.0;
    StateVariable variable = StateVariable::p;
    double lower_p_init = 0.0;  ///< smaller initial infestation of the pair
    double upper_p_init = 0.0;
};

/// Ordering of single-season trajectories by initial soil infestation:
/// more initial pests must give more P and X and less S at every sample time.
struct MonotonicityReport {
    std::vector<double> p_grid;
    std::vector<double> sample_times;
    bool ordered_p = true;
    bool ordered_x = true;
    bool ordered_s = true;
    std::optional<MonotonicityViolation> first_violation;

    bool monotone() const noexcept { return ordered_p && ordered_x && ordered_s; }
};

/// Relative slack used to separate solver noise from genuine crossings.
inline constexpr double kOrderingSlack = 1e-9;

MonotonicityReport check_monotonicity(const ModelParams& params, const std::vector<double>& p_grid,
                                      double sample_step, SolverConfig solver = {});

/// Two seasons separated by one fallow, repeated for several fallow lengths.
/// Used to exhibit the loss of monotonicity at extreme infestation.
struct TwoSeasonRun {
    double tau = 0.0;
    double p_second_start = 0.0;  ///< P(t_1+)
    double profit = 0.0;          ///< R_0 + R_1
    std::vector<TrajectoryPoint> second_season;
};

struct TwoSeasonScenario {
    std::vector<TwoSeasonRun> runs;
    MonotonicityReport second_season_report;  ///< ordering of the second seasons
};

TwoSeasonScenario two_season_scenario(const ModelParams& params, const std::vector<double>& taus,
                                      double sample_step, SolverConfig solver = {});

struct NamedSchedule {
    std::string name;
    FallowSchedule schedule;
};

struct ComparisonRow {
    std::string strategy;
    std::size_t k = 0;
    double t_k = 0.0;
    double tau_k = 0.0;  ///< fallow preceding season k (0 for the first season)
    double yield = 0.0;
    double profit = 0.0;
    double p_after_harvest = 0.0;
};

struct StrategySummary {
    std::string strategy;
    double total_profit = 0.0;
    double final_infestation = 0.0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;  ///< grouped by strategy, then season index
    std::vector<StrategySummary> totals;

    void write_csv(std::ostream& os) const;
};

/// One multi-season simulation per strategy. All schedules must share the
/// same horizon.
ComparisonTable strategy_comparison(const ModelParams& params,
                                    const std::vector<NamedSchedule>& schedules,
                                    const SolverConfig& solver = {});

}  // namespace fallowopt
