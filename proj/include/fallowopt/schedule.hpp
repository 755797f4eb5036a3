#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fallowopt {

/// Ordered fallow durations between consecutive cropping seasons, together
/// with the planning horizon. A schedule of n fallows has n + 1 seasons.
class FallowSchedule {
public:
    /// Throws InvalidInput on negative or non-finite durations, or a
    /// non-positive horizon.
    FallowSchedule(std::vector<double> taus, double t_max);

    std::span<const double> taus() const noexcept { return taus_; }
    double t_max() const noexcept { return t_max_; }
    std::size_t fallow_count() const noexcept { return taus_.size(); }
    std::size_t season_count() const noexcept { return taus_.size() + 1; }

    double total_fallow() const noexcept;

    /// Season start times t_k = k D + sum_{i <= k} tau_i.
    std::vector<double> season_starts(double cap_d) const;

    /// Time of the last harvest.
    double last_harvest(double cap_d) const noexcept;

    /// True when the fallows sum to t_max - (n + 1) D within `tol` days, i.e.
    /// the last harvest lands on the horizon.
    bool on_simplex(double cap_d, double tol = 1e-9) const noexcept;

private:
    std::vector<double> taus_;
    double t_max_;
};

}  // namespace fallowopt
