#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fallowopt/ars.hpp"
#include "fallowopt/economics.hpp"
#include "fallowopt/model.hpp"
#include "fallowopt/params.hpp"

namespace fallowopt {

/// Best schedule found for one fallow count.
struct DimensionResult {
    std::size_t n = 0;
    std::vector<double> taus;
    double objective = 0.0;  ///< value compared across dimensions
    double profit = 0.0;     ///< raw multi-season profit (search solver)
    std::size_t evaluations = 0;
    bool trivial = false;  ///< single-point simplex, no search needed
    std::vector<IterateRecord> log;
};

struct OptimizationOutcome {
    RegularizationMode mode = RegularizationMode::free;
    std::size_t n_star = 0;
    std::vector<double> tau_star;
    double profit_star = 0.0;                   ///< raw profit, re-simulated
    std::optional<double> penalized_profit;     ///< penalized mode only
    std::optional<double> penalty_rate;         ///< r for n_star, penalized mode only
    double final_infestation = 0.0;
    std::size_t evaluations = 0;
    std::uint64_t seed = 0;
    std::vector<DimensionResult> per_dimension;
};

/// Loops over admissible fallow counts, solves each simplex (closed form for
/// a single fallow, adaptive random search otherwise) and keeps the best.
/// Ties prefer fewer seasons, then the schedule closer to the centroid.
///
/// Bounded mode restricts n to [n_min, n_max] and every fallow to tau_sup;
/// penalized mode ranks by the penalized profit. Constant mode delegates to
/// optimize_constant.
///
/// Candidates are ranked with `search` (the reference `solver` when
/// nullopt); profit_star, final_infestation and the penalty quantities are
/// always recomputed with `solver`.
OptimizationOutcome optimize(const ModelParams& params, double t_max, const RegularizationSpec& reg,
                             const ArsConfig& cfg, const SolverConfig& solver = {},
                             std::optional<SolverConfig> search = SolverConfig::fast_search());

struct ConstantPoint {
    double tau = 0.0;
    std::size_t seasons = 0;
    double profit = 0.0;
    double final_infestation = 0.0;
};

struct ConstantScan {
    std::vector<XiElement> xi;
    std::vector<ConstantPoint> xi_points;    ///< R at every element of xi
    std::vector<ConstantPoint> grid_points;  ///< R on the verification grid
    ConstantPoint best;
    bool best_on_xi = true;  ///< false when the grid beat every xi point
};

/// Schedule of N(tau) - 1 equal fallows; an incomplete trailing season is
/// not planted.
FallowSchedule constant_schedule(double t_max, double cap_d, double tau);

/// Profit of constant fallows tau over [0, t_max].
ConstantPoint constant_profit(const ModelParams& params, double t_max, double tau,
                              const SolverConfig& solver = {});

/// Maximizes the constant-fallow profit over the xi set and a uniform grid
/// on [0, t_max - 2D] with step `grid_step` (0 disables the grid).
ConstantScan optimize_constant(const ModelParams& params, double t_max, double grid_step,
                               const SolverConfig& solver = {});

}  // namespace fallowopt
