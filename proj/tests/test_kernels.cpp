#include "doctest.h"

#include "wquant/common.hpp"
#include "wquant/kernels.hpp"
#include "wquant/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace wquant;
namespace k = wquant::kernels;

namespace {

std::vector<double> random_flat(std::size_t n, std::size_t d, Rng& rng, double span) {
    std::vector<double> out(n * d);
    for (double& v : out) v = rng.uniform(-span, span);
    return out;
}

} // namespace

TEST_CASE("kernel dispatch reports a valid implementation") {
    k::Isa isa = k::active_isa();
    CHECK((isa == k::Isa::scalar || isa == k::Isa::avx2));
    CHECK(!k::isa_name().empty());
    if (isa == k::Isa::avx2) CHECK(k::detail::avx2_supported());
}

TEST_CASE("scalar and avx2 nearest_site agree exactly") {
    if (!k::detail::avx2_supported()) return;
    const auto& sc = k::detail::scalar_impl();
    const auto& vx = k::detail::avx2_impl();

    Rng rng(71);
    for (std::size_t d : {1, 2, 3, 5}) {
        const std::size_t n = 137, m = 23;
        auto pts = random_flat(n, d, rng, 2.0);
        auto sites = random_flat(m, d, rng, 2.0);

        std::vector<std::int32_t> ia(n), ib(n);
        std::vector<double> sa(n), sb(n);
        sc.nearest_site(pts.data(), n, sites.data(), m, d, ia.data(), sa.data());
        vx.nearest_site(pts.data(), n, sites.data(), m, d, ib.data(), sb.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(ia[i] == ib[i]);
            CHECK(sa[i] == sb[i]); // step-equivalent arithmetic: exactly equal
        }
    }
}

TEST_CASE("nearest_site ties resolve to the lowest site index") {
    // Query equidistant from sites 0 and 2 (site 1 is far away).
    std::vector<double> sites = {-1.0, 9.0, 1.0};
    std::vector<double> pt = {0.0};
    std::int32_t idx = -1;
    double sq = -1.0;

    const auto& sc = k::detail::scalar_impl();
    sc.nearest_site(pt.data(), 1, sites.data(), 3, 1, &idx, &sq);
    CHECK(idx == 0);
    CHECK(sq == 1.0);

    if (k::detail::avx2_supported()) {
        const auto& vx = k::detail::avx2_impl();
        vx.nearest_site(pt.data(), 1, sites.data(), 3, 1, &idx, &sq);
        CHECK(idx == 0);
        CHECK(sq == 1.0);
    }
}

TEST_CASE("scalar and avx2 cost_matrix agree exactly for p in {1, 2}") {
    if (!k::detail::avx2_supported()) return;
    const auto& sc = k::detail::scalar_impl();
    const auto& vx = k::detail::avx2_impl();

    Rng rng(72);
    for (std::size_t d : {1, 3}) {
        for (double p : {1.0, 2.0, 3.0}) {
            const std::size_t n = 31, m = 17;
            auto xs = random_flat(n, d, rng, 1.5);
            auto ys = random_flat(m, d, rng, 1.5);
            std::vector<double> ca(n * m), cb(n * m);
            sc.cost_matrix(xs.data(), n, ys.data(), m, d, p, ca.data());
            vx.cost_matrix(xs.data(), n, ys.data(), m, d, p, cb.data());
            for (std::size_t i = 0; i < n * m; ++i) {
                if (p == 1.0 || p == 2.0)
                    CHECK(ca[i] == cb[i]);
                else
                    CHECK(ca[i] == doctest::Approx(cb[i]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("scalar and avx2 weighted reductions agree to rounding") {
    if (!k::detail::avx2_supported()) return;
    const auto& sc = k::detail::scalar_impl();
    const auto& vx = k::detail::avx2_impl();

    Rng rng(73);
    const std::size_t n = 1001, d = 3;
    auto xs = random_flat(n, d, rng, 2.0);
    auto ys = random_flat(n, d, rng, 2.0);
    std::vector<double> ws(n);
    for (double& w : ws) w = rng.uniform(0.1, 1.0);
    std::vector<double> c = {0.25, -0.5, 1.0};

    for (double p : {1.0, 2.0, 2.5}) {
        double a = sc.weighted_pow_dist(xs.data(), ws.data(), n, c.data(), d, p);
        double b = vx.weighted_pow_dist(xs.data(), ws.data(), n, c.data(), d, p);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));

        double pa = sc.weighted_pow_dist_pairs(xs.data(), ys.data(), ws.data(), n, d, p);
        double pb = vx.weighted_pow_dist_pairs(xs.data(), ys.data(), ws.data(), n, d, p);
        CHECK(pa == doctest::Approx(pb).epsilon(1e-12));
    }
}

TEST_CASE("scalar and avx2 min_reduced_cost agree on value and index") {
    if (!k::detail::avx2_supported()) return;
    const auto& sc = k::detail::scalar_impl();
    const auto& vx = k::detail::avx2_impl();

    Rng rng(74);
    for (std::size_t len : {1, 3, 4, 7, 64, 129}) {
        std::vector<double> cost(len), pi(len);
        for (std::size_t j = 0; j < len; ++j) {
            cost[j] = rng.uniform(0.0, 4.0);
            pi[j] = rng.uniform(-1.0, 1.0);
        }
        double pi_src = rng.uniform(-1.0, 1.0);

        double ba = 0.0, bb = 0.0;
        std::size_t aa = 0, ab = 0;
        sc.min_reduced_cost(cost.data(), pi.data(), pi_src, len, &ba, &aa);
        vx.min_reduced_cost(cost.data(), pi.data(), pi_src, len, &bb, &ab);
        CHECK(ba == bb);
        CHECK(aa == ab);
        CHECK(aa < len);
    }

    // Exact ties across lane boundaries pick the smallest index.
    std::vector<double> cost(9, 1.0), pi(9, 0.0);
    cost[2] = 0.5;
    cost[6] = 0.5;
    double b = 0.0;
    std::size_t a = 0;
    vx.min_reduced_cost(cost.data(), pi.data(), 0.0, 9, &b, &a);
    CHECK(b == 0.5);
    CHECK(a == 2);
}

TEST_CASE("force_isa switches the active implementation") {
    const k::Isa before = k::active_isa();

    k::force_isa(k::Isa::scalar);
    CHECK(k::active_isa() == k::Isa::scalar);
    CHECK(k::isa_name() == "scalar");

    if (k::detail::avx2_supported()) {
        k::force_isa(k::Isa::avx2);
        CHECK(k::active_isa() == k::Isa::avx2);
        CHECK(k::isa_name() == "avx2");
    } else {
        CHECK_THROWS_AS(k::force_isa(k::Isa::avx2), Error);
    }

    k::force_isa(before);
}

TEST_CASE("public entry points route through the active implementation") {
    // Same inputs through both forced ISAs must give the same nearest sites.
    Rng rng(75);
    const std::size_t n = 64, m = 9, d = 2;
    auto pts = random_flat(n, d, rng, 1.0);
    auto sites = random_flat(m, d, rng, 1.0);

    const k::Isa before = k::active_isa();
    k::force_isa(k::Isa::scalar);
    std::vector<std::int32_t> ia(n);
    std::vector<double> sa(n);
    k::nearest_site(pts.data(), n, sites.data(), m, d, ia.data(), sa.data());

    if (k::detail::avx2_supported()) {
        k::force_isa(k::Isa::avx2);
        std::vector<std::int32_t> ib(n);
        std::vector<double> sb(n);
        k::nearest_site(pts.data(), n, sites.data(), m, d, ib.data(), sb.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(ia[i] == ib[i]);
            CHECK(sa[i] == sb[i]);
        }
    }
    k::force_isa(before);
}
