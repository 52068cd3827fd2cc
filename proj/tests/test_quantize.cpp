#include "doctest.h"

#include "wquant/harness.hpp"
#include "wquant/quad.hpp"
#include "wquant/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

using namespace wquant;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    const GaussRule& g2 = gauss_legendre(2);
    REQUIRE(g2.x.size() == 2);
    CHECK(g2.x[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(g2.w[0] + g2.w[1] == doctest::Approx(2.0).epsilon(1e-14));

    double quad2 = 0.0;
    for (std::size_t i = 0; i < 2; ++i) quad2 += g2.w[i] * g2.x[i] * g2.x[i];
    CHECK(quad2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14)); // int x^2 over [-1,1]

    const GaussRule& g4 = gauss_legendre(4);
    double quad6 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) quad6 += g4.w[i] * std::pow(g4.x[i], 6.0);
    CHECK(quad6 == doctest::Approx(2.0 / 7.0).epsilon(1e-13)); // int x^6 over [-1,1]
}

TEST_CASE("quantizing the unit interval on a half-step grid") {
    Measure mu = make_uniform_cube(1);
    Lattice Z1 = make_lattice(LatticeKind::Zd, 1);
    Approximant ap = quantize_lattice(mu, Z1, 0.5, ApproximantMode::dirac);

    // cells (-0.75,-0.25], (-0.25,0.25], (0.25,0.75] get masses 1/4, 1/2, 1/4
    REQUIRE(ap.cells.size() == 3);
    CHECK(ap.cells[0].id == CellId{-1});
    CHECK(ap.cells[1].id == CellId{0});
    CHECK(ap.cells[2].id == CellId{1});
    CHECK(ap.cells[0].site[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(ap.cells[1].site[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(ap.cells[0].mass == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(ap.cells[1].mass == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ap.cells[2].mass == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("cell masses always sum to the base mass") {
    Measure cube = make_uniform_cube(2);
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    Lattice A2 = make_lattice(LatticeKind::A2, 2);

    for (double h : {0.3, 0.25, 0.17}) {
        Approximant za = quantize_lattice(cube, Z2, h, ApproximantMode::dirac);
        double zm = 0.0;
        for (const ApproxCell& c : za.cells) {
            CHECK(c.mass > 0.0);
            zm += c.mass;
        }
        CHECK(zm == doctest::Approx(1.0).epsilon(1e-10));

        Approximant aa = quantize_lattice(cube, A2, h, ApproximantMode::dirac);
        double am = 0.0;
        for (const ApproxCell& c : aa.cells) am += c.mass;
        CHECK(am == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("quantizing an approximant's site measure is idempotent") {
    Measure cube = make_uniform_cube(2);
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    Approximant ap = quantize_lattice(cube, Z2, 0.4, ApproximantMode::dirac);

    Approximant again =
        quantize_discrete(ap.site_measure(), ap.scheme, ApproximantMode::dirac);
    REQUIRE(again.cells.size() == ap.cells.size());
    for (std::size_t i = 0; i < ap.cells.size(); ++i) {
        CHECK(again.cells[i].id == ap.cells[i].id);
        CHECK(again.cells[i].mass == doctest::Approx(ap.cells[i].mass).epsilon(1e-14));
    }
}

TEST_CASE("dirac coupling cost of the interval is h over sqrt(12)") {
    Measure mu = make_uniform_cube(1);
    Lattice Z1 = make_lattice(LatticeKind::Zd, 1);
    for (double h : {0.5, 0.25, 0.125}) {
        DiscreteMeasure base = discretize_on_scheme(mu, LatticeScheme{Z1, h}, {});
        Approximant ap = quantize_discrete(base, LatticeScheme{Z1, h},
                                           ApproximantMode::dirac);
        // per-cell integrand is quadratic, so the 2-node rule is exact
        double c = coupling_cost(base, ap, 2.0);
        CHECK(c == doctest::Approx(h / std::sqrt(12.0)).epsilon(1e-12));
        CHECK(c <= Z1.geom.diameter * h + 1e-12);
    }
}

TEST_CASE("coupling cost is bounded by cell diameter on every lattice") {
    Measure cube = make_uniform_cube(2);
    for (LatticeKind kind : {LatticeKind::Zd, LatticeKind::A2}) {
        Lattice L = make_lattice(kind, 2);
        for (double h : {0.5, 0.2}) {
            DiscreteMeasure base = discretize_on_scheme(cube, LatticeScheme{L, h}, {});
            for (ApproximantMode mode :
                 {ApproximantMode::dirac, ApproximantMode::indicator}) {
                Approximant ap = quantize_discrete(base, LatticeScheme{L, h}, mode);
                CHECK(coupling_cost(base, ap, 2.0) <= L.geom.diameter * h + 1e-9);
            }
        }
    }
}

TEST_CASE("indicator realizations stay inside their cells") {
    Measure cube = make_uniform_cube(2);
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    DiscreteMeasure base = discretize_on_scheme(cube, LatticeScheme{Z2, 0.5}, {});
    Approximant ap = quantize_discrete(base, LatticeScheme{Z2, 0.5},
                                       ApproximantMode::indicator);
    REQUIRE(ap.cells.size() == 9);

    DiscreteMeasure real = ap.realization();
    CHECK(real.size() == 9 * 32); // 16 d nodes per cell
    CHECK(real.total_mass() == doctest::Approx(1.0).epsilon(1e-10));

    const double reach = 0.5 * Z2.geom.covering_radius + 1e-9;
    for (std::size_t i = 0; i < real.size(); ++i) {
        double best = HUGE_VAL;
        for (const ApproxCell& c : ap.cells)
            best = std::min(best, sq_dist(real.x(i), c.site.data(), 2));
        CHECK(std::sqrt(best) <= reach);
    }

    // the exact distance never exceeds the coupling cost
    double coup = coupling_cost(base, ap, 2.0);
    double w = measure_distance(base, real, 2.0);
    CHECK(w <= coup + 1e-8);
}

TEST_CASE("dirac realization is the site measure") {
    Measure cube = make_uniform_cube(1);
    Lattice Z1 = make_lattice(LatticeKind::Zd, 1);
    Approximant ap = quantize_lattice(cube, Z1, 0.5, ApproximantMode::dirac);
    DiscreteMeasure a = ap.realization();
    DiscreteMeasure b = ap.site_measure();
    REQUIRE(a.size() == b.size());
    CHECK(a.xs == b.xs);
    CHECK(a.ws == b.ws);
}

TEST_CASE("nonuniform sites partition the mass by nearest site") {
    Measure mu = make_uniform_cube(1);
    std::vector<double> sites = {-0.3, 0.2, 0.45};
    Approximant ap = quantize_nonuniform(mu, sites, 1, ApproximantMode::dirac);

    // boundaries at -0.05 and 0.325 split [-0.5, 0.5] into 0.45 / 0.375 / 0.175
    REQUIRE(ap.cells.size() == 3);
    CHECK(ap.cells[0].site_index == 0);
    CHECK(ap.cells[0].mass == doctest::Approx(0.45).epsilon(2e-3));
    CHECK(ap.cells[1].mass == doctest::Approx(0.375).epsilon(2e-3));
    CHECK(ap.cells[2].mass == doctest::Approx(0.175).epsilon(2e-3));
}

TEST_CASE("mesh norm certificates bracket the true covering distance") {
    // single site at the origin over the unit ball: sup distance is exactly 1
    MeshNormResult one = mesh_norm({0.0}, 1, {0.0}, 1.0);
    CHECK(one.upper >= 1.0 - 1e-12);
    CHECK(one.upper <= 1.01);
    // the lower witness only sees midpoint probes, so it trails the sup a bit
    CHECK(one.lower <= 1.0 + 1e-12);
    CHECK(one.lower >= 0.9);

    // five-point grid with spacing 1/2 on [-1, 1]: sup distance 1/4
    MeshNormResult grid = mesh_norm({-1.0, -0.5, 0.0, 0.5, 1.0}, 1, {0.0}, 1.0);
    CHECK(grid.upper >= 0.25 - 1e-12);
    CHECK(grid.upper <= 0.26);
    CHECK(grid.lower <= 0.25 + 1e-12);

    MeshNormResult ball = mesh_norm({0.0, 0.0}, 2, {0.0, 0.0}, 1.0);
    CHECK(ball.upper >= 1.0 - 1e-12);
    CHECK(ball.upper <= 1.02);
    CHECK(ball.lower <= 1.0 + 1e-12);
}

TEST_CASE("separation radius is half the closest pair distance") {
    CHECK(separation_radius({0.0, 1.0, 3.0}, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(separation_radius({0.0, 0.0, 1.0, 0.75}, 2) ==
          doctest::Approx(0.625).epsilon(1e-12)); // sites (0,0) and (1,0.75)
    CHECK_THROWS_AS(separation_radius({0.5, 0.5}, 1), Error);
}

TEST_CASE("budget rule picks h = 3 (count/N)^(1/d) capped at one") {
    Lattice Z1 = make_lattice(LatticeKind::Zd, 1);
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);

    // covering_count(Z1, 1, 1) = 3 and covering_count(Z2, 1, 1) = 9
    CHECK(choose_h_for_budget(Z1, 1.0, 9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(choose_h_for_budget(Z1, 1.0, 36) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(choose_h_for_budget(Z2, 1.0, 81) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(choose_h_for_budget(Z2, 1.0, 324) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(choose_h_for_budget(Z2, 1.0, 80), Error);
    try {
        choose_h_for_budget(Z2, 1.0, 80);
    } catch (const Error& e) {
        CHECK(std::string(e.kind()) == "budget-infeasible");
    }
}

TEST_CASE("moment bound suite holds with positive slack on standard cases") {
    Measure cube = make_uniform_cube(1);
    Lattice Z1 = make_lattice(LatticeKind::Zd, 1);
    DiscreteMeasure base = discretize_on_scheme(cube, LatticeScheme{Z1, 0.25}, {});
    Approximant ap = quantize_discrete(base, LatticeScheme{Z1, 0.25},
                                       ApproximantMode::dirac);

    auto suite = moment_bound_suite(base, ap, 2.0);
    REQUIRE(suite.size() == 3);
    CHECK(suite[0].inequality_id == "lattice_site_norm_sum");
    CHECK(suite[1].inequality_id == "lattice_cell_sup_sum");
    CHECK(suite[2].inequality_id == "lattice_cell_sup_combined");
    for (const auto& rep : suite) {
        CHECK(rep.holds);
        CHECK(rep.slack > 0.0);
        CHECK(rep.lhs >= 0.0);
    }

    // site-list variant reports under the sites_ prefix
    std::vector<double> sites = {-0.25, 0.0, 0.25};
    Approximant sap = quantize_discrete(base, SiteScheme{1, sites, support_box(cube)},
                                        ApproximantMode::dirac);
    auto ssuite = moment_bound_suite(base, sap, 2.0);
    REQUIRE(ssuite.size() == 3);
    CHECK(ssuite[0].inequality_id == "sites_site_norm_sum");
    for (const auto& rep : ssuite) CHECK(rep.holds);
}

TEST_CASE("discretization respects the atom cap") {
    Measure cube = make_uniform_cube(2);
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    DiscretizeOptions opts;
    opts.max_atoms = 10;
    CHECK_THROWS_AS(discretize_on_scheme(cube, LatticeScheme{Z2, 0.5}, opts), Error);
    try {
        discretize_on_scheme(cube, LatticeScheme{Z2, 0.5}, opts);
    } catch (const Error& e) {
        CHECK(std::string(e.kind()) == "resource-limit");
    }
}

TEST_CASE("discrete bases pass through discretization unchanged") {
    Measure atoms = make_atoms({{{0.1, 0.2}, 1.0}, {{-0.3, 0.4}, 2.0}});
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    DiscreteMeasure d = discretize_on_scheme(atoms, LatticeScheme{Z2, 0.5}, {});
    CHECK(d.xs == atoms.as_discrete().xs);
    CHECK(d.ws == atoms.as_discrete().ws);
}
