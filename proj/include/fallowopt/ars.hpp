#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "fallowopt/simplex.hpp"

namespace fallowopt {

/// Adaptive random search settings. Batch sizes and the budget scale with n^2.
struct ArsConfig {
    double shrink = 0.3;           ///< sigma^i = shrink * sigma^(i-1)
    std::size_t levels = 5;        ///< standard deviations tried per selection phase
    std::size_t sel_factor = 2;    ///< selection draws per level = sel_factor * n^2
    std::size_t expl_factor = 5;   ///< exploitation draws = expl_factor * n^2
    std::size_t stall_limit = 4;   ///< stop after more than this many stalled phases
    std::size_t budget_factor = 100;  ///< stop after more than budget_factor * n^2 evaluations
    std::size_t reject_cap = 100;     ///< radius redraws before a fresh direction
    std::size_t direction_cap = 100;  ///< fresh directions before a candidate is skipped
    std::uint64_t seed = 1;
    unsigned threads = 1;  ///< concurrent objective evaluations inside a selection batch
    bool keep_log = false;

    std::size_t sel_batch(std::size_t n) const noexcept { return sel_factor * n * n; }
    std::size_t expl_batch(std::size_t n) const noexcept { return expl_factor * n * n; }
    std::size_t eval_budget(std::size_t n) const noexcept { return budget_factor * n * n; }

    void validate() const;
};

enum class ArsPhase { init, selection, exploitation };

std::string_view to_string(ArsPhase phase) noexcept;

/// One evaluated candidate.
struct IterateRecord {
    ArsPhase phase = ArsPhase::init;
    std::size_t round = 0;
    double sigma = 0.0;
    std::vector<double> taus;
    double objective = 0.0;
    bool failed = false;    ///< objective threw NumericalFailure
    bool accepted = false;  ///< became the new incumbent
};

enum class ArsStop { smallest_sigma, no_improvement, budget };

std::string_view to_string(ArsStop reason) noexcept;

struct ArsResult {
    std::vector<double> taus;
    double objective = 0.0;
    std::size_t evaluations = 0;
    std::size_t rounds = 0;
    std::size_t skipped = 0;  ///< candidates dropped after exhausting direction redraws
    ArsStop stop = ArsStop::budget;
    std::vector<IterateRecord> log;  ///< filled when ArsConfig::keep_log
};

/// Maps a fallow vector to the value being maximized. May throw
/// NumericalFailure; that candidate is then discarded. Must be safe to call
/// concurrently when ArsConfig::threads > 1.
using Objective = std::function<double(std::span<const double>)>;

/// Maximizes `objective` over `spec` (n >= 2) by alternating
/// variance-selection and variance-exploitation phases, starting from the
/// centroid with sigma = simplex size.
ArsResult ars_optimize(const SimplexSpec& spec, const Objective& objective, const ArsConfig& cfg,
                       Rng& rng);

}  // namespace fallowopt
