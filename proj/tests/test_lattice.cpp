#include "doctest.h"

#include "wquant/lattice.hpp"
#include "wquant/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace wquant;

namespace {

double dist2(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

} // namespace

TEST_CASE("cubic lattice geometry") {
    for (int d = 1; d <= 4; ++d) {
        Lattice L = make_lattice(LatticeKind::Zd, d);
        CHECK(L.geom.covering_radius == doctest::Approx(0.5 * std::sqrt(d)).epsilon(1e-12));
        CHECK(L.geom.diameter == doctest::Approx(std::sqrt(d)).epsilon(1e-12));
        CHECK(L.geom.relevant_vectors.size() == 2 * std::size_t(d));
    }
}

TEST_CASE("hexagonal lattice geometry") {
    Lattice L = make_lattice(LatticeKind::A2, 2);
    // nearest-neighbor distance 1: hexagonal cell with circumradius 1/sqrt(3)
    CHECK(L.geom.covering_radius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(L.geom.diameter == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(L.geom.relevant_vectors.size() == 6);
    CHECK(L.geom.vertices.size() == 6);

    // generators (1, 0) and (1/2, sqrt(3)/2)
    Point s = L.site_of(1.0, {0, 1});
    CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s[1] == doctest::Approx(0.5 * std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("checkerboard lattice geometry") {
    // Deep holes at distance max(1, sqrt(d)/2).
    CHECK(make_lattice(LatticeKind::Dn, 3).geom.covering_radius == doctest::Approx(1.0));
    CHECK(make_lattice(LatticeKind::Dn, 4).geom.covering_radius == doctest::Approx(1.0));
    CHECK(make_lattice(LatticeKind::Dn, 5).geom.covering_radius ==
          doctest::Approx(0.5 * std::sqrt(5.0)));
    // minimal vectors (+-1, +-1, 0, ...) in every coordinate pair
    CHECK(make_lattice(LatticeKind::Dn, 3).geom.relevant_vectors.size() >= 12);
}

TEST_CASE("general lattices are LLL-reduced before use") {
    // Generators (1, 10) and (0, 1) span Z^2; the reduced cell is the unit square.
    Lattice L = make_lattice(LatticeKind::general, 2, {1.0, 0.0, 10.0, 1.0});
    CHECK(L.geom.covering_radius == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

    // Doubled square grid: covering radius sqrt(2), diameter 2 sqrt(2).
    Lattice L2 = make_lattice(LatticeKind::general, 2, {2.0, 0.0, 0.0, 2.0});
    CHECK(L2.geom.covering_radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(L2.geom.diameter == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("site_of scales lattice coordinates") {
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    Point s = Z2.site_of(0.25, {3, -2});
    CHECK(s[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(s[1] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("cubic decode uses half-open cells with lex-smallest ties") {
    Lattice Z1 = make_lattice(LatticeKind::Zd, 1);
    CHECK(decode(Z1, 1.0, {0.49}) == CellId{0});
    CHECK(decode(Z1, 1.0, {0.5}) == CellId{0});
    CHECK(decode(Z1, 1.0, {0.51}) == CellId{1});
    CHECK(decode(Z1, 1.0, {-0.5}) == CellId{-1}); // tie between -1 and 0

    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    CHECK(decode(Z2, 0.5, {0.74, -0.26}) == CellId{1, -1});
}

TEST_CASE("decode returns a certified nearest site on every lattice") {
    Rng rng(41);
    for (LatticeKind kind : {LatticeKind::Zd, LatticeKind::A2, LatticeKind::Dn}) {
        const int d = kind == LatticeKind::Dn ? 3 : 2;
        Lattice L = make_lattice(kind, d);
        for (double h : {1.0, 0.35}) {
            for (int t = 0; t < 200; ++t) {
                Point x(d);
                for (int k = 0; k < d; ++k) x[k] = rng.uniform(-2.0, 2.0);
                CellId id = decode(L, h, x);
                Point site = L.site_of(h, id);

                double d2 = dist2(x, site);
                double cert = h * L.geom.covering_radius;
                CHECK(d2 <= cert * cert * (1.0 + 1e-9) + 1e-12);

                // no relevant neighbor is strictly closer
                for (const Point& v : L.geom.relevant_vectors) {
                    Point nb = site;
                    for (int k = 0; k < d; ++k) nb[k] += h * v[k];
                    CHECK(d2 <= dist2(x, nb) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("decode_batch matches decode") {
    Lattice A2 = make_lattice(LatticeKind::A2, 2);
    Rng rng(42);
    const std::size_t n = 64;
    std::vector<double> xs(2 * n);
    for (double& v : xs) v = rng.uniform(-1.5, 1.5);

    std::vector<CellId> ids;
    decode_batch(A2, 0.5, xs.data(), n, ids);
    REQUIRE(ids.size() == n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(decode(A2, 0.5, {xs[2 * i], xs[2 * i + 1]}) == ids[i]);
}

TEST_CASE("covering counts of small balls") {
    Lattice Z1 = make_lattice(LatticeKind::Zd, 1);
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    Lattice A2 = make_lattice(LatticeKind::A2, 2);
    Lattice D3 = make_lattice(LatticeKind::Dn, 3);

    // counts enumerable by hand: sites with |h site| <= R + h rad(V_0)
    CHECK(covering_count(Z1, 1.0, 0.4) == 1);
    CHECK(covering_count(Z1, 1.0, 1.0) == 3);
    CHECK(covering_count(Z2, 1.0, 0.1) == 1);
    CHECK(covering_count(Z2, 1.0, 1.0) == 9);  // norms 0, 1, sqrt(2) <= 1.707
    CHECK(covering_count(Z2, 0.5, 1.0) == 21); // scaled norms up to sqrt(5)/2 <= 1.354
    CHECK(covering_count(A2, 1.0, 1.0) == 7);  // shell of 6 at distance 1 <= 1.577
    CHECK(covering_count(D3, 1.0, 0.5) == 13); // 12 minimal vectors at sqrt(2) <= 1.5
}

TEST_CASE("covering counts scale at most like 3^d per halving") {
    for (LatticeKind kind : {LatticeKind::Zd, LatticeKind::A2, LatticeKind::Dn}) {
        const int d = kind == LatticeKind::Dn ? 3 : 2;
        Lattice L = make_lattice(kind, d);
        double threed = std::pow(3.0, d);
        for (double R : {0.7, 1.3}) {
            long base = covering_count(L, 1.0, R);
            for (double h : {0.5, 1.0 / 3.0, 0.25}) {
                long n = covering_count(L, h, R);
                CHECK(double(n) <= threed * std::pow(h, -d) * double(base) + 1e-9);
            }
        }
    }
}

TEST_CASE("cells_intersecting_box covers the box") {
    Rng rng(43);
    for (LatticeKind kind : {LatticeKind::Zd, LatticeKind::A2}) {
        Lattice L = make_lattice(kind, 2);
        Box box{{-0.8, 0.1}, {0.4, 0.9}};
        auto ids = cells_intersecting_box(L, 0.3, box);
        REQUIRE(!ids.empty());
        CHECK(std::is_sorted(ids.begin(), ids.end()));
        CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());

        for (int t = 0; t < 300; ++t) {
            Point x = {rng.uniform(box.lo[0], box.hi[0]), rng.uniform(box.lo[1], box.hi[1])};
            CellId id = decode(L, 0.3, x);
            CHECK(std::binary_search(ids.begin(), ids.end(), id));
        }
    }
}

TEST_CASE("lattice kind names") {
    CHECK(std::string(lattice_kind_name(LatticeKind::Zd)) == "Zd");
    CHECK(std::string(lattice_kind_name(LatticeKind::Dn)) == "Dn");
    CHECK(std::string(lattice_kind_name(LatticeKind::A2)) == "A2");
    CHECK(std::string(lattice_kind_name(LatticeKind::general)) == "general");
}

TEST_CASE("make_lattice validation") {
    CHECK_THROWS_AS(make_lattice(LatticeKind::Zd, 9), Error);
    CHECK_THROWS_AS(make_lattice(LatticeKind::A2, 3), Error);
    CHECK_THROWS_AS(make_lattice(LatticeKind::Dn, 1), Error);
    CHECK_THROWS_AS(make_lattice(LatticeKind::general, 2, {1.0, 2.0, 2.0, 4.0}), Error);
    CHECK_THROWS_AS(make_lattice(LatticeKind::general, 2, {1.0, 0.0}), Error);
}
