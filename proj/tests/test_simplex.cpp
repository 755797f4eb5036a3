#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fallowopt/errors.hpp"
#include "fallowopt/simplex.hpp"

using namespace fallowopt;

TEST_CASE("fallow count bounds") {
    CHECK(max_fallow_count(4000, 330) == 11);
    CHECK(max_fallow_count(1400, 330) == 3);
    CHECK(max_fallow_count(661, 330) == 1);
    CHECK_THROWS_AS(max_fallow_count(660, 330), InvalidInput);

    CHECK(min_fallow_count_bounded(4000, 330, 60) == 10);
    CHECK(min_fallow_count_bounded(990, 330, 1000) == 1);
    CHECK(min_fallow_count_bounded(4000, 330, 1) == 12);
    CHECK(min_fallow_count_bounded(1340, 330, 60) == 3);
    CHECK_THROWS_AS(min_fallow_count_bounded(4000, 330, 0), InvalidInput);
}

TEST_CASE("simplex size") {
    CHECK(simplex_size(1400, 330, 3) == 80);
    CHECK(simplex_size(1340, 330, 3) == 20);
    CHECK(simplex_size(4000, 330, 10) == 370);
    CHECK_THROWS_AS(simplex_size(4000, 330, 0), InvalidInput);
    CHECK_THROWS_AS(simplex_size(4000, 330, 12), InvalidInput);
}

TEST_CASE("simplex membership") {
    const SimplexSpec plain(1400, 330, 3);
    CHECK(plain.centroid() == std::vector<double>(3, 80.0 / 3.0));
    const std::vector<double> vertex{80, 0, 0};
    const std::vector<double> negative{81, -1, 0};
    const std::vector<double> short_vec{40, 40};
    CHECK(plain.contains(vertex));
    CHECK_FALSE(plain.contains(negative));
    CHECK_FALSE(plain.contains(short_vec));

    const SimplexSpec boxed(1400, 330, 3, 60.0);
    CHECK_FALSE(boxed.contains(vertex));
    const std::vector<double> inside{60, 20, 0};
    CHECK(boxed.contains(inside));
}

TEST_CASE("zero-sum directions") {
    Rng rng(11);
    for (std::size_t n : {2, 3, 5, 11}) {
        for (int i = 0; i < 200; ++i) {
            const auto d = draw_direction(n, rng);
            REQUIRE(d.size() == n);
            const double sum = std::accumulate(d.begin(), d.end(), 0.0);
            const double norm = std::sqrt(std::inner_product(d.begin(), d.end(), d.begin(), 0.0));
            CHECK(std::abs(sum) < 1e-12);
            CHECK(std::abs(norm - 1.0) < 1e-12);
            if (n == 2) {
                CHECK(std::abs(std::abs(d[0]) - 1.0 / std::sqrt(2.0)) < 1e-12);
                CHECK(d[1] == doctest::Approx(-d[0]));
            }
        }
    }
    CHECK_THROWS_AS(draw_direction(1, rng), InvalidInput);

    const std::vector<double> flat{0.4, 0.4, 0.4};
    CHECK_FALSE(project_to_hyperplane(flat).has_value());
}

TEST_CASE("switching set of constant fallows") {
    const auto xi = xi_set(4000, 330);
    REQUIRE(xi.size() == 11);
    const std::vector<double> rounded{4, 37, 78, 129, 194, 282, 404, 588, 893, 1505, 3340};
    for (std::size_t i = 0; i < xi.size(); ++i) {
        CHECK(std::round(xi[i].tau) == rounded[i]);
        CHECK(xi[i].fallows == 11 - i);
        // (t_max - D) / (D + xi) = n exactly: xi * n must be the integer
        // t_max - (n + 1) D, so t_max - D = n D + xi n.
        const long n = static_cast<long>(xi[i].fallows);
        const long numerator = 4000 - (n + 1) * 330;
        CHECK(xi[i].tau * n == doctest::Approx(static_cast<double>(numerator)).epsilon(1e-14));
        CHECK(4000 - 330 == n * 330 + numerator);
        CHECK((4000.0 - 330.0) / (330.0 + xi[i].tau) == doctest::Approx(static_cast<double>(n)).epsilon(1e-14));
        if (i > 0) CHECK(xi[i].tau > xi[i - 1].tau);
    }

    const auto small = xi_set(990, 330);
    REQUIRE(small.size() == 2);
    CHECK(small[0].tau == 0);
    CHECK(small[1].tau == 330);
    const auto single = xi_set(700, 330);
    REQUIRE(single.size() == 1);
    CHECK(single[0].tau == 40);
}

TEST_CASE("constant fallow season count") {
    CHECK(constant_season_count(4000, 330, 37) == 11);
    CHECK(constant_season_count(4000, 330, 37.5) == 10);
    CHECK(constant_season_count(4000, 330, 0) == 12);
    CHECK(constant_season_count(4000, 330, 3340) == 2);
    for (const XiElement& xi : xi_set(4000, 330)) {
        CHECK(constant_season_count(4000, 330, xi.tau) == xi.fallows + 1);
        CHECK(constant_season_count(4000, 330, xi.tau + 1e-6) == xi.fallows);
    }
}
