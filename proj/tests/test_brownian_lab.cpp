#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "amoc/brownian_lab.hpp"
#include "amoc/empirical.hpp"
#include "amoc/error.hpp"
#include "amoc/limit_theory.hpp"
#include "amoc/rng.hpp"

using namespace amoc;

namespace {

std::size_t index_of(const std::vector<double>& grid, double t) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), t - 1e-15);
    REQUIRE(it != grid.end());
    REQUIRE(std::fabs(*it - t) < 1e-15);
    return static_cast<std::size_t>(it - grid.begin());
}

} // namespace

TEST_CASE("grid shape") {
    const auto g = make_grid(BridgeGrid{64, 4, 1e-6});
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end());
    CHECK(std::binary_search(g.begin(), g.end(), 1e-6));
    CHECK(std::binary_search(g.begin(), g.end(), 1.0 - 1e-6));
    CHECK(g[1] == 1e-6);
    const auto plain = make_grid(BridgeGrid{64, 0, 1e-6});
    CHECK(plain.size() == 65);
    CHECK_THROWS_AS(make_grid(BridgeGrid{1, 0, 0.0}), DomainError);
}

TEST_CASE("bridge endpoints are pinned") {
    const auto p = simulate_bridge(256, 8, 3);
    CHECK(p.values.front() == 0.0);
    CHECK(p.values.back() == 0.0);
    CHECK(p.values.size() == p.grid.size());
}

TEST_CASE("bridge covariance") {
    const auto grid = make_grid(BridgeGrid{1000, 0, 0.0});
    const std::size_t i10 = index_of(grid, 0.1), i25 = index_of(grid, 0.25), i50 = index_of(grid, 0.5),
                      i75 = index_of(grid, 0.75), i90 = index_of(grid, 0.9);
    const std::size_t m = 10000;
    std::vector<double> b10(m), b25(m), b50(m), b75(m), b90(m), prod(m);
    for (std::size_t r = 0; r < m; ++r) {
        Philox4x32 rng(77, r);
        const auto p = simulate_bridge(grid, rng);
        b10[r] = p.values[i10];
        b25[r] = p.values[i25];
        b50[r] = p.values[i50];
        b75[r] = p.values[i75];
        b90[r] = p.values[i90];
        prod[r] = b25[r] * b75[r];
    }
    for (auto [vals, t] : {std::pair{&b10, 0.1}, std::pair{&b50, 0.5}, std::pair{&b90, 0.9}}) {
        const double var = t * (1 - t);
        std::vector<double> sq(m);
        for (std::size_t r = 0; r < m; ++r) sq[r] = (*vals)[r] * (*vals)[r];
        const auto mv = mean_var(*vals);
        const auto sv = mean_var(sq);
        CHECK(std::fabs(mv.mean) < 3.0 * std::sqrt(var / m));
        CHECK(std::fabs(sv.mean - var) < 3.0 * sv.standard_error());
        std::vector<double> z(*vals);
        for (auto& v : z) v /= std::sqrt(var);
        std::sort(z.begin(), z.end());
        CHECK(ks_distance_sorted(z, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }) <
              1.63 / std::sqrt(static_cast<double>(m)));
    }
    const auto cv = mean_var(prod);
    CHECK(std::fabs(cv.mean - 1.0 / 16.0) < 3.0 * cv.standard_error());
}

TEST_CASE("weighted functional") {
    BridgePath zero{make_grid(BridgeGrid{8, 0, 0.0}), std::vector<double>(9, 0.0)};
    CHECK(weighted_sup_functional(zero) == 0.0);
    CHECK(de_sup_functional(zero, 100.0) == 0.0);
    BridgePath spike = zero;
    spike.values[4] = 1.3;
    CHECK(weighted_sup_functional(spike) == doctest::Approx(1.3 / q_weight(0.5)).epsilon(1e-15));
    CHECK(weighted_sup_functional(spike) == doctest::Approx(1.3 / 0.70710678118654752).epsilon(1e-15));

    auto p = simulate_bridge(512, 8, 5);
    const double w = weighted_sup_functional(p);
    for (auto& v : p.values) v *= 2.5;
    CHECK(weighted_sup_functional(p) == doctest::Approx(2.5 * w).epsilon(1e-14));
}

TEST_CASE("Darling-Erdos functional grows with the horizon") {
    const auto p = simulate_bridge(1024, 16, 9);
    double prev = -1e300;
    for (double t : {10.0, 100.0, 1e4, 1e6, 1e8}) {
        const double v = de_sup_functional(p, t);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(de_sup_functional(p, 1e4, Sides::two) >= de_sup_functional(p, 1e4, Sides::one));
    CHECK_THROWS_AS(de_sup_functional(p, 5.0), DomainError);
}

TEST_CASE("limit draws do not depend on the thread count") {
    for (auto f : {Functional::weighted_sup_q, Functional::darling_erdos}) {
        LimitConfig c;
        c.functional = f;
        c.reps = 64;
        c.grid_size = 256;
        c.refine = 4;
        c.horizon = 1e4;
        c.seed = 12;
        const auto a = limit_draws(c, 1);
        const auto b = limit_draws(c, 4);
        CHECK(a == b);
    }
    CHECK(parse_functional("darling_erdos") == Functional::darling_erdos);
    CHECK_THROWS_AS(parse_functional("sup"), UsageError);
}

TEST_CASE("limit quantiles") {
    LimitConfig c;
    c.reps = 99;
    const std::vector<double> probs{0.5, 0.9, 0.95};
    CHECK_THROWS_AS(limit_quantiles(c, probs), DomainError);
    c.reps = 400;
    c.grid_size = 512;
    c.seed = 1;
    const auto q = limit_quantiles(c, probs);
    CHECK(std::is_sorted(q.values.begin(), q.values.end()));
}

TEST_CASE("weighted functional median agrees across seeds") {
    LimitConfig c;
    c.reps = 10000;
    c.grid_size = 1024;
    c.refine = 8;
    c.seed = 100;
    const auto a = limit_draws(c);
    c.seed = 200;
    const auto b = limit_draws(c);
    const double se = std::hypot(bootstrap_quantile_se(a, 0.5, 200, 1), bootstrap_quantile_se(b, 0.5, 200, 2));
    const std::vector<double> p{0.5};
    CHECK(std::fabs(quantiles(a, p)[0] - quantiles(b, p)[0]) < 3.0 * se);
}

TEST_CASE("weighted functional under grid refinement") {
    LimitConfig c;
    c.reps = 10000;
    c.grid_size = 1024;
    c.refine = 8;
    c.seed = 300;
    const auto a = limit_draws(c);
    c.grid_size = 2048;
    const auto b = limit_draws(c);
    const double se = std::hypot(bootstrap_quantile_se(a, 0.95, 200, 3), bootstrap_quantile_se(b, 0.95, 200, 4));
    const std::vector<double> p95{0.95}, p999{0.999};
    CHECK(std::fabs(quantiles(a, p95)[0] - quantiles(b, p95)[0]) < 3.0 * se);
    const double qa = quantiles(a, p999)[0], qb = quantiles(b, p999)[0];
    CHECK(std::fabs(qb / qa - 1.0) < 0.10);
}
