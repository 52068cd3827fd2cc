#include "doctest.h"

#include "wquant/harness.hpp"
#include "wquant/json_io.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

using namespace wquant;
using nlohmann::json;

TEST_CASE("slope fit recovers an exact power law") {
    std::vector<double> xs = {1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, -2.0));

    SlopeFit fit = fit_slope(xs, ys);
    CHECK(!fit.degenerate);
    CHECK(fit.used == 5);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.max_residual <= 1e-12);
}

TEST_CASE("slope fit degenerates gracefully") {
    CHECK(fit_slope({1.0, 2.0}, {1.0, 0.5}).degenerate);       // too few points
    CHECK(fit_slope({2.0, 2.0, 2.0}, {1.0, 1.0, 1.0}).degenerate); // no x spread
    // non-positive ys are skipped, dropping below the minimum count
    CHECK(fit_slope({1.0, 2.0, 4.0}, {1.0, 0.0, 0.25}).degenerate);
}

TEST_CASE("sweep CSV matches the fixed schema byte for byte") {
    SweepRow a;
    a.parameter = 0.5;
    a.coupling = 1.5;
    a.theoretical = 2.0;
    a.terms = 7;
    a.seed = 42;
    a.bound_only = true; // measured stays NaN

    SweepRow b;
    b.parameter = 0.25;
    b.measured = 0.125;
    b.coupling = 0.0625;
    b.theoretical = 1.0;
    b.terms = 3;
    b.seed = 1;

    CHECK(sweep_csv({a, b}) ==
          "parameter,measured_wp,coupling_bound,theoretical_bound,terms,seed\n"
          "0.5,nan,1.5,2,7,42\n"
          "0.25,0.125,0.0625,1,3,1\n");
}

TEST_CASE("parallel_for_index is schedule independent") {
    const std::size_t n = 200;
    std::vector<double> ref(n), par(n);
    parallel_for_index(n, 1, [&](std::size_t i) { ref[i] = double(i) * i; });
    parallel_for_index(n, 4, [&](std::size_t i) { par[i] = double(i) * i; });
    CHECK(ref == par);

    parallel_for_index(0, 4, [&](std::size_t) { throw std::runtime_error("never"); });

    CHECK_THROWS_AS(parallel_for_index(n, 4,
                                       [&](std::size_t i) {
                                           if (i == 37) throw std::runtime_error("boom");
                                       }),
                    std::runtime_error);
}

TEST_CASE("measure_distance picks the right solver") {
    DiscreteMeasure a1 = make_discrete(1, {0.0, 1.0, 2.5}, {0.2, 0.5, 0.3});
    DiscreteMeasure b1 = make_discrete(1, {-1.0, 0.5}, {0.6, 0.4});
    double direct = wasserstein_1d(a1, b1, 2.0);
    CHECK(measure_distance(a1, b1, 2.0) == doctest::Approx(direct).epsilon(1e-14));

    // the same points embedded in the plane go through the LP
    DiscreteMeasure a2 = make_discrete(2, {0.0, 0.0, 1.0, 0.0, 2.5, 0.0}, {0.2, 0.5, 0.3});
    DiscreteMeasure b2 = make_discrete(2, {-1.0, 0.0, 0.5, 0.0}, {0.6, 0.4});
    CHECK(measure_distance(a2, b2, 2.0) == doctest::Approx(direct).epsilon(1e-9));

    // an exceeded pair cap means "no exact value", reported as NaN
    std::vector<double> xs(2 * 60);
    std::vector<double> ws(60, 1.0);
    for (int i = 0; i < 60; ++i) {
        xs[2 * i] = i;
        xs[2 * i + 1] = 0.5 * i;
    }
    DiscreteMeasure big = make_discrete(2, xs, ws);
    CHECK(std::isnan(measure_distance(big, big, 2.0, 100)));
}

TEST_CASE("flatten_measure reduces densities on their quadrature spec") {
    DiscreteMeasure cube1 = flatten_measure(make_uniform_cube(1));
    CHECK(cube1.size() == 64); // tensor Gauss-Legendre, 64 nodes per axis
    CHECK(cube1.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    double m2 = 0.0;
    for (std::size_t i = 0; i < cube1.size(); ++i)
        m2 += cube1.ws[i] * cube1.xs[i] * cube1.xs[i];
    CHECK(m2 == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

    // d = 3 densities use their Monte Carlo spec, clipped to the atom cap
    DiscreteMeasure g3 = flatten_measure(make_gaussian(3, 1.0), 5000);
    CHECK(g3.size() == 5000);
    CHECK(g3.total_mass() == doctest::Approx(1.0).epsilon(1e-9));

    // discrete measures pass through
    Measure atoms = make_atoms({{{1.0}, 1.0}, {{2.0}, 3.0}});
    DiscreteMeasure flat = flatten_measure(atoms);
    CHECK(flat.xs == atoms.as_discrete().xs);
    CHECK(flat.ws == atoms.as_discrete().ws);
}

TEST_CASE("measure JSON round trip for discrete and constructor types") {
    Measure atoms = make_atoms({{{0.5, -0.25}, 1.0}, {{0.0, 0.75}, 3.0}});
    Measure back = measure_from_json(measure_to_json(atoms));
    REQUIRE(back.is_discrete());
    CHECK(back.as_discrete().xs == atoms.as_discrete().xs);
    CHECK(back.as_discrete().ws == atoms.as_discrete().ws);

    Measure cube = measure_from_json(json{{"type", "uniform_cube"}, {"dim", 2}});
    CHECK(cube.dim() == 2);
    CHECK(moment(cube, 2.0) == doctest::Approx(2.0 / 12.0).epsilon(1e-12));

    Measure gauss = measure_from_json(
        json{{"type", "gaussian"}, {"dim", 1}, {"sigma", 0.5}, {"mean", {2.0}}});
    CHECK(moment(gauss, 2.0) == doctest::Approx(4.25).epsilon(1e-9));

    Measure arc = measure_from_json(
        json{{"type", "circle_arc"}, {"radius", 0.5}, {"resolution", 128}});
    REQUIRE(arc.is_discrete());
    CHECK(arc.as_discrete().size() == 128);

    // mixtures survive a round trip through their component list
    Measure mix = make_mixture({0.25, 0.75}, {make_atoms({{{0.0}, 1.0}}),
                                              make_atoms({{{1.0}, 1.0}})});
    Measure mixback = measure_from_json(measure_to_json(mix));
    CHECK(moment(mixback, 1.0) == doctest::Approx(0.75).epsilon(1e-14));

    // density snapshots are reports, not configs
    CHECK_THROWS_AS(measure_from_json(measure_to_json(cube)), Error);
    CHECK_THROWS_AS(measure_from_json(json{{"type", "nope"}}), Error);
}

TEST_CASE("lattice JSON round trip and shorthands") {
    Lattice a2 = make_lattice(LatticeKind::A2, 2);
    Lattice back = lattice_from_json(lattice_to_json(a2));
    CHECK(back.kind == LatticeKind::A2);
    CHECK(back.dim == 2);
    CHECK(back.basis == a2.basis);

    Lattice z3 = lattice_from_json(json{{"kind", "Z3"}});
    CHECK(z3.kind == LatticeKind::Zd);
    CHECK(z3.dim == 3);

    Lattice d4 = lattice_from_json(json{{"kind", "Dn"}, {"dim", 4}});
    CHECK(d4.kind == LatticeKind::Dn);
    CHECK(d4.dim == 4);

    CHECK_THROWS_AS(lattice_from_json(json{{"kind", "E8"}}), Error);
}

TEST_CASE("approximant JSON round trip preserves cells exactly") {
    Measure cube = make_uniform_cube(2);
    Lattice Z2 = make_lattice(LatticeKind::Zd, 2);
    Approximant ap = quantize_lattice(cube, Z2, 0.5, ApproximantMode::indicator);

    Approximant back = approximant_from_json(approximant_to_json(ap));
    CHECK(back.mode == ap.mode);
    CHECK(back.dim == ap.dim);
    REQUIRE(back.cells.size() == ap.cells.size());
    for (std::size_t i = 0; i < ap.cells.size(); ++i) {
        CHECK(back.cells[i].id == ap.cells[i].id);
        CHECK(back.cells[i].site == ap.cells[i].site);
        CHECK(back.cells[i].mass == ap.cells[i].mass);
    }
    // identical cells and scheme give identical realizations
    CHECK(back.realization().xs == ap.realization().xs);

    // site-scheme approximants carry their indices through
    Approximant sap = quantize_nonuniform(cube, {0.0, 0.0, 0.3, 0.3}, 2,
                                          ApproximantMode::dirac);
    Approximant sback = approximant_from_json(approximant_to_json(sap));
    REQUIRE(sback.cells.size() == sap.cells.size());
    for (std::size_t i = 0; i < sap.cells.size(); ++i) {
        CHECK(sback.cells[i].site_index == sap.cells[i].site_index);
        CHECK(sback.cells[i].mass == sap.cells[i].mass);
    }
}

TEST_CASE("quantize job config accepts lattice or site schemes") {
    json lat_job = {{"measure", {{"type", "uniform_cube"}, {"dim", 2}}},
                    {"lattice", {{"kind", "Z2"}}},
                    {"h", 0.5},
                    {"mode", "indicator"},
                    {"p", 1.0}};
    QuantizeJob job = quantize_job_from_json(lat_job);
    CHECK(job.mode == ApproximantMode::indicator);
    CHECK(job.p == 1.0);
    const auto* ls = std::get_if<LatticeScheme>(&job.scheme);
    REQUIRE(ls != nullptr);
    CHECK(ls->h == 0.5);

    json site_job = {{"measure", {{"type", "uniform_cube"}, {"dim", 2}}},
                     {"sites", {{0.0, 0.0}, {0.25, 0.25}}}};
    QuantizeJob sjob = quantize_job_from_json(site_job);
    const auto* ss = std::get_if<SiteScheme>(&sjob.scheme);
    REQUIRE(ss != nullptr);
    CHECK(ss->size() == 2);

    CHECK_THROWS_AS(
        quantize_job_from_json(json{{"measure", {{"type", "uniform_cube"}, {"dim", 1}}}}),
        Error);
}

TEST_CASE("sweep config parsing fills defaults") {
    json cfg_j = {{"measure", {{"type", "uniform_cube"}, {"dim", 1}}},
                  {"lattice", {{"kind", "Z1"}}},
                  {"hs", {0.5, 0.25}},
                  {"mode", "dirac"},
                  {"seed", 5}};
    SweepConfig cfg = sweep_config_from_json(cfg_j);
    CHECK(cfg.hs == std::vector<double>{0.5, 0.25});
    CHECK(cfg.p == 2.0);
    CHECK(cfg.seed == 5);
    REQUIRE(cfg.lattice.has_value());
    CHECK(cfg.lattice->kind == LatticeKind::Zd);
}

TEST_CASE("h sweep on the interval honors every bound") {
    SweepConfig cfg;
    cfg.measure = make_uniform_cube(1);
    cfg.lattice = make_lattice(LatticeKind::Zd, 1);
    cfg.hs = {0.5, 0.25, 0.125};

    SweepReport rep = run_h_sweep(cfg);
    CHECK(rep.bounds_pass);
    REQUIRE(rep.rows.size() == 3);
    for (const SweepRow& r : rep.rows) {
        CHECK(!std::isnan(r.measured));
        CHECK(r.measured <= r.coupling + 1e-8);
        CHECK(r.coupling <= r.theoretical + 1e-9);
    }
    // W_2 here is exactly h / sqrt(12), so the log-log slope is exactly 1
    CHECK(!rep.fit.degenerate);
    CHECK(rep.fit.slope == doctest::Approx(1.0).epsilon(1e-6));

    std::string svg = sweep_svg(rep);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("measured") != std::string::npos);

    // identical rows whatever the job count
    SweepConfig par = cfg;
    par.jobs = 3;
    CHECK(sweep_csv(run_h_sweep(par).rows) == sweep_csv(rep.rows));
}

TEST_CASE("budget sweep respects the term budget") {
    SweepConfig cfg;
    cfg.measure = make_uniform_cube(1);
    cfg.lattice = make_lattice(LatticeKind::Zd, 1);
    cfg.budgets = {9, 36, 144};

    SweepReport rep = run_nterm_sweep(cfg);
    CHECK(rep.bounds_pass);
    REQUIRE(rep.rows.size() == 3);
    for (const SweepRow& r : rep.rows) {
        CHECK(r.terms <= long(r.parameter));
        CHECK(r.term_ok);
        CHECK(r.measured <= r.theoretical + 1e-9);
    }
}

TEST_CASE("nonuniform trials bound the distance by twice the mesh norm") {
    NonuniformConfig cfg;
    cfg.measure = make_uniform_cube(1);
    cfg.site_counts = {8};
    cfg.trials = 2;

    NonuniformReport rep = run_nonuniform(cfg);
    CHECK(rep.all_pass);
    REQUIRE(rep.trials.size() == 2);
    for (const NonuniformTrial& t : rep.trials) {
        CHECK(t.n_sites == 8);
        CHECK(t.mesh_upper >= t.mesh_lower);
        CHECK(t.bound == doctest::Approx(2.0 * t.mesh_upper));
        CHECK(t.measured <= t.bound + 1e-8);
        CHECK(t.separation > 0.0);
        CHECK(t.scaling_const == doctest::Approx(t.mesh_upper * 8.0));
    }
}

TEST_CASE("tail experiment composes truncation and quantization") {
    TailConfig cfg;
    cfg.measure = make_gaussian(1, 1.0);
    cfg.hs = {0.5, 0.25};
    cfg.R = 2.0;

    TailReport rep = run_tail_experiment(cfg);
    CHECK(rep.all_pass);
    CHECK(rep.trunc > 0.0);
    REQUIRE(rep.rows.size() == 2);
    for (const TailRow& r : rep.rows) {
        CHECK(r.pass);
        CHECK(r.measured <= r.bound + 1e-8);
        CHECK(r.bound == doctest::Approx(r.h + rep.trunc)); // diam(V_0) = 1 on Z^1
    }
    REQUIRE(rep.r_grid.size() == rep.trunc_scan.size());
    for (std::size_t i = 1; i < rep.trunc_scan.size(); ++i)
        CHECK(rep.trunc_scan[i] <= rep.trunc_scan[i - 1] + 1e-15);
}

TEST_CASE("baseline comparison produces sane numbers") {
    BaselineConfig cfg;
    cfg.measure = make_uniform_cube(1);
    cfg.budgets = {9};
    cfg.lloyd_samples = 2000;
    cfg.lloyd_iters = 5;
    cfg.empirical_seeds = 3;

    BaselineReport rep = run_baselines(cfg);
    REQUIRE(rep.rows.size() == 1);
    const BaselineRow& r = rep.rows[0];
    CHECK(r.budget == 9);
    CHECK(r.h == doctest::Approx(1.0));
    CHECK(r.lattice_w > 0.0);
    CHECK(r.lloyd_w > 0.0);
    CHECK(r.empirical_w > 0.0);
    CHECK(r.lattice_terms <= 9);
}

TEST_CASE("report JSON carries the sweep rows") {
    SweepConfig cfg;
    cfg.measure = make_uniform_cube(1);
    cfg.lattice = make_lattice(LatticeKind::Zd, 1);
    cfg.hs = {0.5};
    SweepReport rep = run_h_sweep(cfg);

    json j = report_to_json(rep);
    REQUIRE(j.contains("rows"));
    REQUIRE(j["rows"].size() == 1);
    CHECK(j["rows"][0]["parameter"] == 0.5);
    CHECK(j["rows"][0].contains("measured_wp"));
    CHECK(j.contains("fit"));
    CHECK(j["bounds_pass"] == true);
}
