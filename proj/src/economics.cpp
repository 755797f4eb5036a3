#include "fallowopt/economics.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "fallowopt/errors.hpp"
#include "fallowopt/simplex.hpp"

namespace fallowopt {

const char* to_string(RegularizationMode mode) noexcept {
    switch (mode) {
        case RegularizationMode::free: return "free";
        case RegularizationMode::bounded: return "bounded";
        case RegularizationMode::penalized: return "penalized";
        case RegularizationMode::constant: return "constant";
    }
    return "?";
}

RegularizationMode parse_mode(const char* name) {
    for (auto mode : {RegularizationMode::free, RegularizationMode::bounded,
                      RegularizationMode::penalized, RegularizationMode::constant}) {
        if (std::strcmp(name, to_string(mode)) == 0) return mode;
    }
    throw InvalidInput(std::string("unknown regularization mode '") + name +
                       "' (expected free, bounded, penalized or constant)");
}

void RegularizationSpec::validate() const {
    if (mode == RegularizationMode::bounded && !(tau_sup > 0.0 && std::isfinite(tau_sup)))
        throw InvalidInput("bounded mode requires tau_sup > 0");
    if (mode == RegularizationMode::penalized && !(penalty_fraction > 0.0))
        throw InvalidInput("penalized mode requires a penalty fraction > 0");
}

double total_profit(const ModelParams& params, const FallowSchedule& schedule,
                    const SolverConfig& solver) {
    return simulate_schedule(params, schedule, false, solver).total_profit;
}

double distance_to_centroid(std::span<const double> taus) {
    if (taus.empty()) return 0.0;
    double mean = 0.0;
    for (double t : taus) mean += t;
    mean /= static_cast<double>(taus.size());
    double sq = 0.0;
    for (double t : taus) sq += (t - mean) * (t - mean);
    return std::sqrt(sq);
}

double max_centroid_distance(std::size_t n, double size) {
    if (n == 0) throw InvalidInput("max_centroid_distance: n must be >= 1");
    const double nd = static_cast<double>(n);
    return size * std::sqrt((nd - 1.0) / nd);
}

PenalizedProfit::PenalizedProfit(ModelParams params, double t_max, double fraction,
                                 SolverConfig solver)
    : params_(params), t_max_(t_max), fraction_(fraction), solver_(solver) {
    params_.validate();
    if (!(fraction_ > 0.0)) throw InvalidInput("penalty fraction must be > 0");
}

double PenalizedProfit::penalty_rate(std::size_t n) const {
    if (n == 0) throw InvalidInput("penalized profit is undefined for an empty schedule");
    {
        std::lock_guard lock(mutex_);
        if (auto it = rate_cache_.find(n); it != rate_cache_.end()) return it->second;
    }
    const double size = simplex_size(t_max_, params_.cap_d, n);
    const double d_max = max_centroid_distance(n, size);
    double rate = 0.0;
    if (d_max > 0.0) {
        const FallowSchedule centre(std::vector<double>(n, size / static_cast<double>(n)), t_max_);
        rate = fraction_ * total_profit(params_, centre, solver_) / d_max;
    }
    std::lock_guard lock(mutex_);
    return rate_cache_.emplace(n, rate).first->second;
}

double PenalizedProfit::penalize(std::span<const double> taus, double raw_profit) const {
    return raw_profit - penalty_rate(taus.size()) * distance_to_centroid(taus);
}

double PenalizedProfit::operator()(const FallowSchedule& schedule) const {
    if (schedule.fallow_count() == 0)
        throw InvalidInput("penalized profit is undefined for an empty schedule");
    if (!schedule.on_simplex(params_.cap_d, 1e-6))
        throw InvalidInput("penalized profit requires the last harvest to land on the horizon");
    return penalize(schedule.taus(), total_profit(params_, schedule, solver_));
}

}  // namespace fallowopt
