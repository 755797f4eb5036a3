#include "fallowopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fallowopt/errors.hpp"

namespace fallowopt {

namespace {

void require_horizon(double t_max, double cap_d) {
    if (!(cap_d > 0.0) || !std::isfinite(t_max))
        throw InvalidInput("season duration must be > 0 and the horizon finite");
    if (!(t_max > 2.0 * cap_d))
        throw InvalidInput("the horizon must span at least two seasons (t_max > 2 D)");
}

}  // namespace

std::size_t max_fallow_count(double t_max, double cap_d) {
    require_horizon(t_max, cap_d);
    return static_cast<std::size_t>(std::floor(t_max / cap_d)) - 1;
}

std::size_t min_fallow_count_bounded(double t_max, double cap_d, double tau_sup) {
    if (!(tau_sup > 0.0)) throw InvalidInput("tau_sup must be > 0");
    require_horizon(t_max, cap_d);
    // Guard against (t_max - D) / (tau_sup + D) landing a hair above an integer.
    const double ratio = (t_max - cap_d) / (tau_sup + cap_d);
    const double nearest = std::round(ratio);
    const double n = std::abs(ratio - nearest) <= 1e-12 * std::max(1.0, ratio) ? nearest : std::ceil(ratio);
    return static_cast<std::size_t>(std::max(1.0, n));
}

double simplex_size(double t_max, double cap_d, std::size_t n) {
    const std::size_t n_max = max_fallow_count(t_max, cap_d);
    if (n < 1 || n > n_max)
        throw InvalidInput("fallow count " + std::to_string(n) + " outside [1, " +
                           std::to_string(n_max) + "]");
    return t_max - static_cast<double>(n + 1) * cap_d;
}

SimplexSpec::SimplexSpec(double t_max, double cap_d, std::size_t fallows,
                         std::optional<double> upper_bound)
    : n(fallows), size(simplex_size(t_max, cap_d, fallows)), upper(upper_bound) {
    if (upper && !(*upper > 0.0)) throw InvalidInput("fallow upper bound must be > 0");
}

SimplexSpec SimplexSpec::with_size(std::size_t fallows, double budget,
                                   std::optional<double> upper_bound) {
    if (fallows < 1) throw InvalidInput("simplex needs at least one fallow");
    if (!(budget >= 0.0) || !std::isfinite(budget)) throw InvalidInput("simplex size must be >= 0");
    if (upper_bound && !(*upper_bound > 0.0)) throw InvalidInput("fallow upper bound must be > 0");
    SimplexSpec spec(1000.0, 1.0, 1);
    spec.n = fallows;
    spec.size = budget;
    spec.upper = upper_bound;
    return spec;
}

std::vector<double> SimplexSpec::centroid() const {
    return std::vector<double>(n, size / static_cast<double>(n));
}

bool SimplexSpec::contains(std::span<const double> taus) const noexcept {
    if (taus.size() != n) return false;
    for (double t : taus) {
        if (!(t >= 0.0)) return false;
        if (upper && t > *upper) return false;
    }
    return true;
}

std::optional<std::vector<double>> project_to_hyperplane(std::span<const double> raw) {
    if (raw.empty()) return std::nullopt;
    const double mean =
        std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
    std::vector<double> d(raw.begin(), raw.end());
    double sq = 0.0;
    for (double& v : d) {
        v -= mean;
        sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) return std::nullopt;
    for (double& v : d) v /= norm;
    return d;
}

std::vector<double> draw_direction(std::size_t n, Rng& rng) {
    if (n < 2) throw InvalidInput("a zero-sum direction needs n >= 2");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> raw(n);
    for (;;) {
        for (double& v : raw) v = unit(rng);
        if (auto d = project_to_hyperplane(raw)) return std::move(*d);
    }
}

std::vector<XiElement> xi_set(double t_max, double cap_d) {
    const std::size_t n_max = max_fallow_count(t_max, cap_d);
    std::vector<XiElement> out;
    out.reserve(n_max);
    // Larger n gives a shorter fallow, so walking n downward yields ascending tau.
    for (std::size_t n = n_max; n >= 1; --n) {
        const double numerator = t_max - static_cast<double>(n + 1) * cap_d;
        out.push_back({n, numerator / static_cast<double>(n)});
    }
    return out;
}

std::size_t constant_season_count(double t_max, double cap_d, double tau) {
    if (!(tau >= 0.0)) throw InvalidInput("constant fallow must be >= 0");
    if (!(cap_d > 0.0)) throw InvalidInput("season duration must be > 0");
    // t_max >= N D + (N - 1) tau  <=>  N <= (t_max + tau) / (D + tau)
    const double ratio = (t_max + tau) / (cap_d + tau);
    const double nearest = std::round(ratio);
    const double n = std::abs(ratio - nearest) <= 1e-12 * std::max(1.0, ratio) ? nearest : std::floor(ratio);
    return n < 0.0 ? 0 : static_cast<std::size_t>(n);
}

}  // namespace fallowopt
