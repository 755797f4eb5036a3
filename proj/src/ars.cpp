#include "fallowopt/ars.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include "fallowopt/errors.hpp"

namespace fallowopt {

std::string_view to_string(ArsPhase phase) noexcept {
    switch (phase) {
        case ArsPhase::init: return "init";
        case ArsPhase::selection: return "selection";
        case ArsPhase::exploitation: return "exploitation";
    }
    return "?";
}

std::string_view to_string(ArsStop reason) noexcept {
    switch (reason) {
        case ArsStop::smallest_sigma: return "smallest_sigma";
        case ArsStop::no_improvement: return "no_improvement";
        case ArsStop::budget: return "budget";
    }
    return "?";
}

void ArsConfig::validate() const {
    if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidInput("ARS shrink factor must lie in (0, 1)");
    if (levels == 0) throw InvalidInput("ARS needs at least one sigma level");
    if (sel_factor == 0 || expl_factor == 0 || budget_factor == 0)
        throw InvalidInput("ARS batch and budget factors must be >= 1");
    if (reject_cap == 0 || direction_cap == 0) throw InvalidInput("ARS redraw caps must be >= 1");
    if (threads == 0) throw InvalidInput("ARS thread count must be >= 1");
}

namespace {

struct Evaluation {
    double value = 0.0;
    bool failed = false;
};

class Search {
public:
    Search(const SimplexSpec& spec, const Objective& objective, const ArsConfig& cfg, Rng& rng)
        : spec_(spec), objective_(objective), cfg_(cfg), rng_(rng),
          budget_(cfg.eval_budget(spec.n)) {}

    ArsResult run() {
        const std::size_t n = spec_.n;
        best_ = spec_.centroid();
        const Evaluation init = evaluate(best_);
        ++result_.evaluations;
        // A failing centroid leaves every finite candidate as an improvement.
        best_value_ = init.failed ? -std::numeric_limits<double>::infinity() : init.value;
        record(ArsPhase::init, 0.0, best_, init, true);

        std::vector<double> sigmas(cfg_.levels + 1);
        sigmas[0] = spec_.size;
        for (std::size_t i = 1; i <= cfg_.levels; ++i) sigmas[i] = cfg_.shrink * sigmas[i - 1];

        std::size_t sigma_level = 0;
        std::size_t smallest_streak = 0;
        std::size_t stall_streak = 0;

        for (;;) {
            ++result_.rounds;
            bool improved = false;

            // Selection: every level samples around the same frozen centre.
            const std::vector<double> centre = best_;
            for (std::size_t i = 1; i <= cfg_.levels && !exhausted(); ++i) {
                std::vector<std::vector<double>> batch;
                batch.reserve(cfg_.sel_batch(n));
                for (std::size_t j = 0; j < cfg_.sel_batch(n); ++j) {
                    if (auto c = draw_candidate(centre, sigmas[i])) batch.push_back(std::move(*c));
                }
                const std::size_t room = budget_ + 1 - result_.evaluations;
                if (batch.size() > room) batch.resize(room);
                const auto values = evaluate_batch(batch);
                for (std::size_t j = 0; j < batch.size(); ++j) {
                    ++result_.evaluations;
                    const bool accept = !values[j].failed && values[j].value > best_value_;
                    if (accept) {
                        best_ = batch[j];
                        best_value_ = values[j].value;
                        sigma_level = i;
                        improved = true;
                    }
                    record(ArsPhase::selection, sigmas[i], batch[j], values[j], accept);
                }
            }

            // Exploitation: re-centre on each improvement.
            const double sigma_star = sigmas[sigma_level];
            for (std::size_t j = 0; j < cfg_.expl_batch(n) && !exhausted(); ++j) {
                auto candidate = draw_candidate(best_, sigma_star);
                if (!candidate) continue;
                const Evaluation e = evaluate(*candidate);
                ++result_.evaluations;
                const bool accept = !e.failed && e.value > best_value_;
                if (accept) {
                    best_ = *candidate;
                    best_value_ = e.value;
                    improved = true;
                }
                record(ArsPhase::exploitation, sigma_star, *candidate, e, accept);
            }

            if (exhausted()) {
                result_.stop = ArsStop::budget;
                break;
            }
            smallest_streak = sigma_level == cfg_.levels ? smallest_streak + 1 : 0;
            stall_streak = improved ? 0 : stall_streak + 1;
            if (smallest_streak > cfg_.stall_limit) {
                result_.stop = ArsStop::smallest_sigma;
                break;
            }
            if (stall_streak > cfg_.stall_limit) {
                result_.stop = ArsStop::no_improvement;
                break;
            }
        }

        result_.taus = best_;
        result_.objective = best_value_;
        return std::move(result_);
    }

private:
    bool exhausted() const noexcept { return result_.evaluations > budget_; }

    std::optional<std::vector<double>> draw_candidate(const std::vector<double>& centre,
                                                      double sigma) {
        std::normal_distribution<double> radius(0.0, sigma);
        std::vector<double> candidate(centre.size());
        for (std::size_t k = 0; k < cfg_.direction_cap; ++k) {
            const std::vector<double> d = draw_direction(spec_.n, rng_);
            for (std::size_t attempt = 0; attempt < cfg_.reject_cap; ++attempt) {
                const double r = radius(rng_);
                for (std::size_t i = 0; i < candidate.size(); ++i) candidate[i] = centre[i] + r * d[i];
                if (spec_.contains(candidate)) return candidate;
            }
        }
        ++result_.skipped;
        return std::nullopt;
    }

    Evaluation evaluate(std::span<const double> taus) const {
        try {
            return {objective_(taus), false};
        } catch (const NumericalFailure&) {
            return {0.0, true};
        }
    }

    std::vector<Evaluation> evaluate_batch(const std::vector<std::vector<double>>& batch) const {
        std::vector<Evaluation> out(batch.size());
        const std::size_t workers = std::min<std::size_t>(cfg_.threads, batch.size());
        if (workers <= 1) {
            for (std::size_t j = 0; j < batch.size(); ++j) out[j] = evaluate(batch[j]);
            return out;
        }
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t j = w; j < batch.size(); j += workers) out[j] = evaluate(batch[j]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        return out;
    }

    void record(ArsPhase phase, double sigma, const std::vector<double>& taus, const Evaluation& e,
                bool accepted) {
        if (!cfg_.keep_log) return;
        result_.log.push_back({phase, result_.rounds, sigma, taus, e.value, e.failed, accepted});
    }

    const SimplexSpec& spec_;
    const Objective& objective_;
    const ArsConfig& cfg_;
    Rng& rng_;
    std::size_t budget_;
    std::vector<double> best_;
    double best_value_ = 0.0;
    ArsResult result_;
};

}  // namespace

ArsResult ars_optimize(const SimplexSpec& spec, const Objective& objective, const ArsConfig& cfg,
                       Rng& rng) {
    cfg.validate();
    if (spec.n < 2) throw InvalidInput("ARS needs n >= 2; a single fallow is fixed by the horizon");
    if (!objective) throw InvalidInput("ARS objective is empty");
    return Search(spec, objective, cfg, rng).run();
}

}  // namespace fallowopt
