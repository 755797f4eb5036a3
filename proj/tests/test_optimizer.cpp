#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fallowopt/errors.hpp"
#include "fallowopt/optimizer.hpp"

using namespace fallowopt;

namespace {

void check_on_simplex(const OptimizationOutcome& res, double t_max, double cap_d) {
    const double sum = std::accumulate(res.tau_star.begin(), res.tau_star.end(), 0.0);
    CHECK(std::abs(sum - (t_max - static_cast<double>(res.n_star + 1) * cap_d)) <= 1e-9);
    for (double t : res.tau_star) CHECK(t >= -1e-12);
}

}  // namespace

TEST_CASE("a single admissible fallow is returned without search") {
    const ModelParams p;
    const OptimizationOutcome res = optimize(p, 700, {}, {});
    CHECK(res.n_star == 1);
    REQUIRE(res.tau_star.size() == 1);
    CHECK(res.tau_star[0] == 700 - 2 * 330);
    REQUIRE(res.per_dimension.size() == 1);
    CHECK(res.per_dimension[0].trivial);
    CHECK(res.evaluations == 1);
}

TEST_CASE("free mode on the 80-day simplex ends at the first vertex") {
    const ModelParams p;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        ArsConfig cfg;
        cfg.seed = seed;
        const OptimizationOutcome res = optimize(p, 1400, {}, cfg);
        CHECK(res.n_star == 3);
        REQUIRE(res.tau_star.size() == 3);
        CHECK(std::abs(res.tau_star[0] - 80) <= 1.0);
        CHECK(res.tau_star[1] <= 1.0);
        CHECK(res.tau_star[2] <= 1.0);
        check_on_simplex(res, 1400, p.cap_d);
        CHECK(res.profit_star == simulate_schedule(p, FallowSchedule(res.tau_star, 1400)).total_profit);
    }
}

TEST_CASE("heavy initial infestation on the 20-day simplex") {
    ModelParams p;
    p.p0 = 10000;
    ArsConfig cfg;
    const OptimizationOutcome res = optimize(p, 1340, {}, cfg);
    REQUIRE(res.per_dimension.size() == 3);
    const DimensionResult& three = res.per_dimension[2];
    REQUIRE(three.n == 3);
    CHECK(std::abs(three.taus[0] - 20) <= 1.0);
}

TEST_CASE("bounded mode") {
    const ModelParams p;
    RegularizationSpec reg;
    reg.mode = RegularizationMode::bounded;
    reg.tau_sup = 60;
    const OptimizationOutcome res = optimize(p, 1340, reg, {});
    CHECK(res.n_star == 3);
    for (double t : res.tau_star) CHECK(t <= 60.0);
    CHECK(std::abs(res.tau_star[2] - 20) <= 1.0);
    check_on_simplex(res, 1340, p.cap_d);

    reg.tau_sup = 1;
    CHECK_THROWS_AS(optimize(p, 4000, reg, {}), Infeasible);
}

TEST_CASE("penalized mode reports both profits") {
    const ModelParams p;
    RegularizationSpec reg;
    reg.mode = RegularizationMode::penalized;
    const OptimizationOutcome res = optimize(p, 1400, reg, {});
    REQUIRE(res.penalized_profit.has_value());
    REQUIRE(res.penalty_rate.has_value());
    CHECK(*res.penalized_profit <= res.profit_star);
    CHECK(res.profit_star - *res.penalized_profit ==
          doctest::Approx(*res.penalty_rate * distance_to_centroid(res.tau_star)).epsilon(1e-12));
    const PenalizedProfit reference(p, 1400);
    CHECK(*res.penalty_rate == reference.penalty_rate(res.n_star));

    const OptimizationOutcome free = optimize(p, 1400, {}, {});
    CHECK(distance_to_centroid(res.tau_star) <= distance_to_centroid(free.tau_star));
    CHECK_FALSE(free.penalized_profit.has_value());
}

TEST_CASE("identical seeds reproduce the outcome exactly") {
    const ModelParams p;
    ArsConfig cfg;
    cfg.seed = 77;
    cfg.keep_log = true;
    const OptimizationOutcome a = optimize(p, 1400, {}, cfg);
    const OptimizationOutcome b = optimize(p, 1400, {}, cfg);
    CHECK(a.tau_star == b.tau_star);
    CHECK(a.profit_star == b.profit_star);
    CHECK(a.evaluations == b.evaluations);
    REQUIRE(a.per_dimension.size() == b.per_dimension.size());
    for (std::size_t i = 0; i < a.per_dimension.size(); ++i)
        CHECK(a.per_dimension[i].log.size() == b.per_dimension[i].log.size());

    cfg.seed = 78;
    const OptimizationOutcome c = optimize(p, 1400, {}, cfg);
    CHECK(c.tau_star != a.tau_star);
}

TEST_CASE("reference solver can drive the search") {
    const ModelParams p;
    const OptimizationOutcome res = optimize(p, 1400, {}, {}, {}, std::nullopt);
    CHECK(res.n_star == 3);
    CHECK(std::abs(res.tau_star[0] - 80) <= 1.0);
}

TEST_CASE("constant schedules") {
    const FallowSchedule s = constant_schedule(4000, 330, 37);
    CHECK(s.fallow_count() == 10);
    CHECK(s.on_simplex(330));
    CHECK(constant_schedule(4000, 330, 40).fallow_count() == 9);

    const ModelParams p;
    const ConstantPoint c = constant_profit(p, 4000, 37);
    CHECK(c.seasons == 11);
    CHECK(c.profit == doctest::Approx(52000).epsilon(0.02));
}

TEST_CASE("constant scan on a short horizon") {
    const ModelParams p;
    const ConstantScan scan = optimize_constant(p, 1400, 1.0);
    REQUIRE(scan.xi.size() == 3);
    CHECK(scan.xi_points.size() == 3);
    CHECK(scan.grid_points.size() == 1400 - 660 + 1);
    CHECK(scan.best_on_xi);
    bool found = false;
    for (const ConstantPoint& x : scan.xi_points) found = found || x.tau == scan.best.tau;
    CHECK(found);
    for (const ConstantPoint& g : scan.grid_points) CHECK(g.profit <= scan.best.profit);

    RegularizationSpec reg;
    reg.mode = RegularizationMode::constant;
    const OptimizationOutcome res = optimize(p, 1400, reg, {});
    CHECK(res.profit_star == scan.best.profit);
    CHECK(res.n_star + 1 == scan.best.seasons);
}
