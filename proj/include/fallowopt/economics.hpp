#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <span>

#include "fallowopt/model.hpp"
#include "fallowopt/params.hpp"
#include "fallowopt/schedule.hpp"

namespace fallowopt {

enum class RegularizationMode { free, bounded, penalized, constant };

const char* to_string(RegularizationMode mode) noexcept;
/// Throws InvalidInput on an unknown name.
RegularizationMode parse_mode(const char* name);

struct RegularizationSpec {
    RegularizationMode mode = RegularizationMode::free;
    double tau_sup = 0.0;             ///< upper bound on each fallow (bounded mode)
    double penalty_fraction = 0.1;    ///< penalty magnitude relative to R(centroid)

    void validate() const;
};

/// Cumulated profit over all seasons of the schedule.
double total_profit(const ModelParams& params, const FallowSchedule& schedule,
                    const SolverConfig& solver = {});

/// Euclidean distance from `taus` to the centroid of its simplex.
double distance_to_centroid(std::span<const double> taus);

/// Largest centroid distance on the simplex of n fallows summing to `size`
/// (a vertex), i.e. size * sqrt((n - 1) / n).
double max_centroid_distance(std::size_t n, double size);

/// Profit with a linear penalty on the distance to the simplex centroid:
///
///     R~(tau) = R(tau) - r * |tau - tau0|,   r = R(tau0) / (d_max / fraction)
///
/// R(tau0) is computed once per fallow count and cached; the cache is safe
/// for concurrent readers.
class PenalizedProfit {
public:
    PenalizedProfit(ModelParams params, double t_max, double fraction = 0.1,
                    SolverConfig solver = {});

    /// Penalty rate r for n fallows (XAF per day of distance). Zero when the
    /// simplex is a single point.
    double penalty_rate(std::size_t n) const;

    /// Rejects the empty schedule and schedules off the simplex.
    double operator()(const FallowSchedule& schedule) const;

    /// Penalized value when the raw profit is already known.
    double penalize(std::span<const double> taus, double raw_profit) const;

    const ModelParams& params() const noexcept { return params_; }
    double t_max() const noexcept { return t_max_; }

private:
    ModelParams params_;
    double t_max_;
    double fraction_;
    SolverConfig solver_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, double> rate_cache_;
};

}  // namespace fallowopt
