#include "doctest.h"

#include "wquant/measure.hpp"

#include <cmath>
#include <string>

using namespace wquant;

TEST_CASE("make_discrete merges coincident atoms, sorts, and normalizes") {
    DiscreteMeasure m = make_discrete(1, {0.5, 0.5, -0.25}, {2.0, 1.0, 1.0});
    REQUIRE(m.size() == 2);
    // lexicographic atom order, weights divided by the total mass 4
    CHECK(m.xs[0] == -0.25);
    CHECK(m.xs[1] == 0.5);
    CHECK(m.ws[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.ws[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_discrete rejects bad input") {
    CHECK_THROWS_AS(make_discrete(1, {0.0}, {-1.0}), Error);
    CHECK_THROWS_AS(make_discrete(1, {0.0, 1.0}, {1.0}), Error);
    CHECK_THROWS_AS(make_discrete(0, {}, {}), Error);
    try {
        make_discrete(1, {0.0}, {-1.0});
    } catch (const Error& e) {
        CHECK(std::string(e.kind()) == "invalid-input");
    }
}

TEST_CASE("moments of the unit cube") {
    // d = 1: E|x|^2 = 1/12, E|x| = 1/4 on [-1/2, 1/2].
    Measure m1 = make_uniform_cube(1);
    CHECK(moment(m1, 2.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    // |x| is kinked at the origin, so the tensor rule is only ~1e-4 accurate
    CHECK(moment(m1, 1.0) == doctest::Approx(0.25).epsilon(1e-3));

    // d = 2, side 2, centered at (1, 1): E|x|^2 over [0,2]^2 is 8/3.
    Measure m2 = make_uniform_cube(2, 2.0, {1.0, 1.0});
    CHECK(moment(m2, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gaussian second moment matches sigma^2 per axis") {
    Measure g1 = make_gaussian(1, 0.5);
    CHECK(moment(g1, 2.0) == doctest::Approx(0.25).epsilon(1e-9));

    Measure g2 = make_gaussian(2, 0.3);
    CHECK(moment(g2, 2.0) == doctest::Approx(2 * 0.09).epsilon(1e-9));

    // shifted mean: E|x|^2 = |mean|^2 + d sigma^2
    Measure gs = make_gaussian(1, 0.1, {1.0});
    CHECK(moment(gs, 2.0) == doctest::Approx(1.01).epsilon(1e-9));
}

TEST_CASE("discrete moments are exact sums") {
    Measure m = make_atoms({{{-0.25}, 1.0}, {{0.5}, 3.0}});
    REQUIRE(m.is_discrete());
    CHECK(moment(m, 2.0) == doctest::Approx(0.203125).epsilon(1e-15));
    CHECK(moment(m, 1.0) == doctest::Approx(0.4375).epsilon(1e-15));
}

TEST_CASE("mixture moments combine linearly") {
    Measure a = make_atoms({{{0.0}, 1.0}});
    Measure b = make_atoms({{{2.0}, 1.0}});
    Measure mix = make_mixture({0.3, 0.7}, {a, b});
    CHECK(moment(mix, 2.0) == doctest::Approx(0.7 * 4.0).epsilon(1e-15));
    CHECK(mix.dim() == 1);
}

TEST_CASE("sampling is deterministic in the seed and lands in the support") {
    Measure cube = make_uniform_cube(2);
    Rng r1(99), r2(99), r3(100);
    DiscreteMeasure s1 = sample(cube, 500, r1);
    DiscreteMeasure s2 = sample(cube, 500, r2);
    DiscreteMeasure s3 = sample(cube, 500, r3);

    REQUIRE(s1.size() == 500);
    CHECK(s1.xs == s2.xs);
    CHECK(s1.xs != s3.xs);
    CHECK(s1.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

    Box support = support_box(cube);
    for (std::size_t i = 0; i < s1.size(); ++i)
        CHECK(support.contains(s1.x(i)));
}

TEST_CASE("gaussian sampling respects the truncation box") {
    Measure g = make_gaussian(1, 1.0, {}, 3.0); // clipped at 3 sigma
    Rng rng(7);
    DiscreteMeasure s = sample(g, 2000, rng);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(s.xs[i]) <= 3.0 + 1e-12);
}

TEST_CASE("pushforward relocates discrete atoms exactly") {
    Measure m = make_atoms({{{1.0, 0.0}, 1.0}, {{0.0, 2.0}, 1.0}});
    Measure moved = pushforward(
        m, [](const Point& x) { return Point{x[0] + 10.0, x[1]}; }, 2);
    REQUIRE(moved.is_discrete());
    const DiscreteMeasure& d = moved.as_discrete();
    REQUIRE(d.size() == 2);
    CHECK(d.xs[0] == 10.0); // (10, 2) sorts before (11, 0)
    CHECK(d.xs[1] == 2.0);
    CHECK(d.xs[2] == 11.0);
    CHECK(d.xs[3] == 0.0);
}

TEST_CASE("support box and radius of standard measures") {
    Measure cube = make_uniform_cube(2);
    Box b = support_box(cube);
    REQUIRE(b.dim() == 2);
    CHECK(b.lo[0] == doctest::Approx(-0.5));
    CHECK(b.hi[1] == doctest::Approx(0.5));
    CHECK(support_radius(cube) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));

    Measure off = make_uniform_cube(1, 1.0, {3.0});
    CHECK(support_radius(off) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("circle arc surrogate sits exactly on the circle") {
    const double r = 0.35;
    Measure arc = make_circle_arc({0.0, 0.0}, r, 0.0, 6.283185307179586, 512);
    REQUIRE(arc.is_discrete());
    const DiscreteMeasure& d = arc.as_discrete();
    CHECK(d.size() == 512);
    CHECK(moment(arc, 2.0) == doctest::Approx(r * r).epsilon(1e-14));
    for (std::size_t i = 0; i < d.size(); ++i) {
        double n2 = d.xs[2 * i] * d.xs[2 * i] + d.xs[2 * i + 1] * d.xs[2 * i + 1];
        CHECK(std::sqrt(n2) == doctest::Approx(r).epsilon(1e-13));
    }

    // a quarter arc keeps only the first-quadrant angles
    Measure quarter = make_circle_arc({0.0, 0.0}, 1.0, 0.0, 1.5707963267948966, 64);
    const DiscreteMeasure& q = quarter.as_discrete();
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(q.xs[2 * i] >= -1e-12);
        CHECK(q.xs[2 * i + 1] >= -1e-12);
    }
}

TEST_CASE("density_integral integrates constants to one") {
    Measure cube = make_uniform_cube(3);
    const DensityMeasure& f = std::get<DensityMeasure>(cube.v);
    CHECK(density_integral(f, [](const double*) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(make_uniform_cube(0), Error);
    CHECK_THROWS_AS(make_gaussian(1, -1.0), Error);
    CHECK_THROWS_AS(make_mixture({0.5}, {}), Error);
    CHECK_THROWS_AS(make_circle_arc({0.0}, 1.0, 0.0, 1.0), Error);
}
