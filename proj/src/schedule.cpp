#include "fallowopt/schedule.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "fallowopt/errors.hpp"

namespace fallowopt {

FallowSchedule::FallowSchedule(std::vector<double> taus, double t_max)
    : taus_(std::move(taus)), t_max_(t_max) {
    if (!std::isfinite(t_max_) || t_max_ <= 0.0) throw InvalidInput("schedule horizon must be > 0");
    for (double tau : taus_) {
        if (!std::isfinite(tau) || tau < 0.0)
            throw InvalidInput("fallow durations must be finite and >= 0");
    }
}

double FallowSchedule::total_fallow() const noexcept {
    return std::accumulate(taus_.begin(), taus_.end(), 0.0);
}

std::vector<double> FallowSchedule::season_starts(double cap_d) const {
    std::vector<double> starts;
    starts.reserve(season_count());
    double t = 0.0;
    starts.push_back(t);
    for (double tau : taus_) {
        t += cap_d + tau;
        starts.push_back(t);
    }
    return starts;
}

double FallowSchedule::last_harvest(double cap_d) const noexcept {
    return static_cast<double>(season_count()) * cap_d + total_fallow();
}

bool FallowSchedule::on_simplex(double cap_d, double tol) const noexcept {
    const double budget = t_max_ - static_cast<double>(season_count()) * cap_d;
    return std::abs(total_fallow() - budget) <= tol;
}

}  // namespace fallowopt
