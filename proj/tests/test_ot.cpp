#include "doctest.h"

#include "wquant/measure.hpp"
#include "wquant/ot.hpp"
#include "wquant/rng.hpp"

#include <cmath>
#include <vector>

using namespace wquant;

namespace {

DiscreteMeasure random_discrete(int dim, std::size_t n, Rng& rng, double span,
                                bool uniform_weights) {
    std::vector<double> xs(n * dim), ws(n);
    for (double& v : xs) v = rng.uniform(-span, span);
    for (double& w : ws) w = uniform_weights ? 1.0 : rng.uniform(0.5, 1.5);
    return make_discrete(dim, std::move(xs), std::move(ws));
}

} // namespace

TEST_CASE("two-point transport in closed form") {
    DiscreteMeasure a = make_discrete(1, {0.0}, {1.0});
    DiscreteMeasure b = make_discrete(1, {-1.0, 1.0}, {0.5, 0.5});
    for (double p : {1.0, 2.0, 3.0}) {
        // all mass travels distance 1 regardless of p
        CHECK(wasserstein_1d(a, b, p) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(wasserstein_lp(a, b, p).value == doctest::Approx(1.0).epsilon(1e-12));
    }

    // asymmetric split: W_p^p = 1/4 + 3/4 (1/3)^p
    DiscreteMeasure c = make_discrete(1, {1.0, -1.0 / 3}, {0.25, 0.75});
    for (double p : {1.0, 2.0}) {
        double expect = std::pow(0.25 * 1.0 + 0.75 * std::pow(1.0 / 3, p), 1.0 / p);
        CHECK(wasserstein_1d(a, c, p) == doctest::Approx(expect).epsilon(1e-13));
        CHECK(wasserstein_lp(a, c, p).value == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("identical measures are at distance zero") {
    Rng rng(11);
    DiscreteMeasure a = random_discrete(2, 20, rng, 1.0, false);
    WassersteinResult r = wasserstein_lp(a, a, 2.0);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(wasserstein_bruteforce(make_discrete(1, {0.0, 1.0}, {0.5, 0.5}),
                                 make_discrete(1, {0.0, 1.0}, {0.5, 0.5}), 2.0) ==
          doctest::Approx(0.0));
}

TEST_CASE("network simplex matches brute force on small instances") {
    Rng rng(12);
    for (int t = 0; t < 60; ++t) {
        const double p = double(t % 3) + 1.0;
        const int dim = 1 + (t / 3) % 3;
        DiscreteMeasure a, b;
        if (t % 2 == 0) {
            // equal-size uniform instances: brute force enumerates matchings
            const std::size_t n = 2 + t % 4;
            a = random_discrete(dim, n, rng, 1.0, true);
            b = random_discrete(dim, n, rng, 1.0, true);
        } else {
            // general weights, small enough for basis enumeration
            a = random_discrete(dim, 1 + rng.below(4), rng, 1.0, false);
            b = random_discrete(dim, 1 + rng.below(4), rng, 1.0, false);
        }
        double bf = wasserstein_bruteforce(a, b, p);
        WassersteinResult lp = wasserstein_lp(a, b, p);
        CHECK(std::abs(lp.value - bf) / (1.0 + bf) <= 1e-12);
    }
}

TEST_CASE("quantile coupling matches the LP in one dimension") {
    Rng rng(13);
    for (int t = 0; t < 40; ++t) {
        const double p = double(t % 2) + 1.0;
        DiscreteMeasure a = random_discrete(1, 30 + rng.below(31), rng, 2.0, false);
        DiscreteMeasure b = random_discrete(1, 30 + rng.below(31), rng, 2.0, false);
        double direct = wasserstein_1d(a, b, p);
        double lp = wasserstein_lp(a, b, p).value;
        CHECK(std::abs(direct - lp) <= 1e-9 * (1.0 + direct));
    }
}

TEST_CASE("transport plans are feasible and certified") {
    Rng rng(14);
    DiscreteMeasure a = random_discrete(2, 25, rng, 1.5, false);
    DiscreteMeasure b = random_discrete(2, 40, rng, 1.5, false);
    WassersteinResult r = wasserstein_lp(a, b, 2.0);

    // duality gap certificate from the solver
    CHECK(r.dual_gap <= 1e-9 * (1.0 + std::pow(r.value, 2.0)));

    // marginals of the plan match the inputs
    std::vector<double> row(a.size(), 0.0), col(b.size(), 0.0);
    double cost = 0.0;
    for (const PlanEntry& e : r.plan.entries) {
        REQUIRE(e.i < a.size());
        REQUIRE(e.j < b.size());
        CHECK(e.mass > -1e-15);
        row[e.i] += e.mass;
        col[e.j] += e.mass;
        cost += e.mass * sq_dist(a.x(e.i), b.x(e.j), 2);
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(row[i] == doctest::Approx(a.ws[i]).epsilon(1e-10));
    for (std::size_t j = 0; j < b.size(); ++j)
        CHECK(col[j] == doctest::Approx(b.ws[j]).epsilon(1e-10));
    CHECK(std::pow(cost, 0.5) == doctest::Approx(r.value).epsilon(1e-10));
}

TEST_CASE("W_p is monotone in p for probability measures") {
    Rng rng(15);
    for (int t = 0; t < 10; ++t) {
        DiscreteMeasure a = random_discrete(2, 12, rng, 1.0, false);
        DiscreteMeasure b = random_discrete(2, 15, rng, 1.0, false);
        double w1 = wasserstein_lp(a, b, 1.0).value;
        double w2 = wasserstein_lp(a, b, 2.0).value;
        double w3 = wasserstein_lp(a, b, 3.0).value;
        CHECK(w1 <= w2 + 1e-10);
        CHECK(w2 <= w3 + 1e-10);
    }
}

TEST_CASE("metric axioms hold on random families") {
    Rng rng(16);
    for (int t = 0; t < 5; ++t) {
        std::vector<DiscreteMeasure> ms;
        for (int i = 0; i < 3; ++i)
            ms.push_back(random_discrete(2, 3 + rng.below(10), rng, 1.0, false));
        MetricReport rep = metric_check(ms, 2.0);
        CHECK(rep.pass);
        CHECK(rep.max_symmetry_gap <= 1e-8);
        CHECK(rep.max_triangle_violation <= 1e-8);
        CHECK(rep.identity_failures == 0);
    }
}

TEST_CASE("solver rejects oversized or mismatched inputs") {
    Rng rng(17);
    DiscreteMeasure a = random_discrete(1, 4, rng, 1.0, false);
    DiscreteMeasure b2 = random_discrete(2, 4, rng, 1.0, false);
    CHECK_THROWS_AS(wasserstein_lp(a, b2, 2.0), Error);
    CHECK_THROWS_AS(wasserstein_1d(b2, b2, 2.0), Error);
    CHECK_THROWS_AS(wasserstein_bruteforce(random_discrete(1, 9, rng, 1.0, true),
                                           random_discrete(1, 9, rng, 1.0, true), 2.0),
                    Error);
}
