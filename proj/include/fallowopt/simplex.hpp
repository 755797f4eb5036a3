#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace fallowopt {

using Rng = std::mt19937_64;

/// Maximum number of fallows whose seasons fit in the horizon:
/// floor(t_max / D) - 1. Requires t_max > 2 D.
std::size_t max_fallow_count(double t_max, double cap_d);

/// Smallest fallow count for which fallows bounded by `tau_sup` can fill the
/// horizon: ceil((t_max - D) / (tau_sup + D)).
std::size_t min_fallow_count_bounded(double t_max, double cap_d, double tau_sup);

/// Total fallow budget L = t_max - (n + 1) D for n fallows.
double simplex_size(double t_max, double cap_d, std::size_t n);

/// The simplex of n fallows summing to `size`, optionally intersected with
/// the box tau_k <= upper.
struct SimplexSpec {
    std::size_t n = 1;
    double size = 0.0;
    std::optional<double> upper;

    SimplexSpec(double t_max, double cap_d, std::size_t fallows,
                std::optional<double> upper_bound = std::nullopt);
    /// Simplex of `fallows` coordinates summing to `budget`, independent of
    /// any horizon.
    static SimplexSpec with_size(std::size_t fallows, double budget,
                                 std::optional<double> upper_bound = std::nullopt);

    std::vector<double> centroid() const;
    bool contains(std::span<const double> taus) const noexcept;
};

/// Projects `raw` onto the zero-sum hyperplane and normalizes it. Returns
/// nullopt when the projection is (numerically) zero.
std::optional<std::vector<double>> project_to_hyperplane(std::span<const double> raw);

/// Uniformly drawn unit direction in the zero-sum hyperplane (n >= 2).
std::vector<double> draw_direction(std::size_t n, Rng& rng);

/// Constant fallow duration at which the season count changes.
struct XiElement {
    std::size_t fallows = 0;  ///< n; the schedule has n + 1 seasons
    double tau = 0.0;         ///< (t_max - (n + 1) D) / n
};

/// All constant fallow durations tau >= 0 for which (t_max - D) / (D + tau)
/// is an integer, ascending.
std::vector<XiElement> xi_set(double t_max, double cap_d);

/// Number of complete seasons for a constant fallow tau:
/// max{ N : t_max >= N D + (N - 1) tau }.
std::size_t constant_season_count(double t_max, double cap_d, double tau);

}  // namespace fallowopt
