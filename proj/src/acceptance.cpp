#include "wquant/harness.hpp"

#include "wquant/quad.hpp"
#include "wquant/tail.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <numbers>

// The acceptance suite: every certified behaviour of the library gets one
// criterion with an explicit tolerance. Each criterion function appends the
// rows it produced to the shared report so `verify` can emit one CSV; the
// row-producing criteria are re-run under a different worker count by
// criterion 10, which demands a byte-identical report.

namespace wquant {
namespace {

constexpr double kPi = std::numbers::pi;

double reduce_max(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

double reduce_min(const std::vector<double>& v) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) m = std::min(m, x);
    return m;
}

bool all_of_flags(const std::vector<char>& v) {
    return std::all_of(v.begin(), v.end(), [](char c) { return c != 0; });
}

// Shared zoo of test measures, all supported well inside [-1/2, 1/2]^d so a
// unit-scale lattice cell structure is exercised at every h we sweep.
Measure family_measure(int d, Rng& rng) {
    const std::uint64_t n_fam = d == 2 ? 4 : 3;
    switch (rng.below(n_fam)) {
    case 0:
        return make_uniform_cube(d);
    case 1:
        return make_gaussian(d, 0.05 + 0.0125 * rng.uniform());
    case 2: {
        std::vector<Atom> atoms(50);
        for (Atom& a : atoms) {
            a.x.resize(d);
            for (int k = 0; k < d; ++k) a.x[k] = rng.uniform(-0.45, 0.45);
            a.w = rng.uniform(0.5, 1.5);
        }
        return make_atoms(atoms);
    }
    default:
        return make_circle_arc({0.0, 0.0}, 0.25 + 0.2 * rng.uniform(), 0.0,
                               2.0 * kPi, 2048);
    }
}

std::vector<double> random_sites(const std::string& generator, int d, long n,
                                 const Box& box, double jitter, Rng& rng) {
    std::vector<double> sites;
    sites.reserve((std::size_t)n * d);
    if (generator == "jittered_grid") {
        long k = (long)std::llround(std::pow((double)n, 1.0 / d));
        std::vector<int> sizes(d, (int)k), idx(d, 0);
        do {
            for (int j = 0; j < d; ++j) {
                double s = (box.hi[j] - box.lo[j]) / (double)k;
                sites.push_back(box.lo[j] + (idx[j] + 0.5) * s +
                                rng.uniform(-jitter, jitter) * s);
            }
        } while (advance_index(idx, sizes));
    } else {
        for (long i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j)
                sites.push_back(rng.uniform(box.lo[j], box.hi[j]));
    }
    return sites;
}

// -- 1 ------------------------------------------------------------------

CriterionResult crit1(int jobs, std::vector<SweepRow>& rows) {
    CriterionResult res{1, "interval dirac quantization matches the closed form",
                        true, ""};
    const Lattice L = make_lattice(LatticeKind::Zd, 1);
    const Measure mu = make_uniform_cube(1);
    DiscretizeOptions disc;
    disc.gl_per_piece = 4;     // exact for |x-s|^p, p <= 3, once pieces are
    disc.split_at_sites = true; // split at the interior kink

    struct Case {
        double p, h;
    };
    std::vector<Case> cases;
    for (double p : {1.0, 2.0, 3.0})
        for (int k = 1; k <= 8; ++k) cases.push_back({p, std::pow(2.0, -k)});

    std::vector<SweepRow> local(cases.size());
    std::vector<double> errs(cases.size(), 0.0);
    parallel_for_index(cases.size(), jobs, [&](std::size_t i) {
        const double p = cases[i].p, h = cases[i].h;
        VoronoiScheme scheme = LatticeScheme{L, h};
        DiscreteMeasure base = discretize_on_scheme(mu, scheme, disc);
        Approximant ap = quantize_discrete(base, scheme, ApproximantMode::dirac);
        DiscreteMeasure hat = ap.site_measure();

        const double closed = h / (2.0 * std::pow(p + 1.0, 1.0 / p));
        const double w1d = wasserstein_1d(base, hat, p);
        const double wlp = wasserstein_lp(base, hat, p).value;
        const double cpl = coupling_cost(base, ap, p);
        errs[i] = std::max({std::fabs(w1d - closed), std::fabs(wlp - closed),
                            std::fabs(cpl - closed)});

        SweepRow row;
        row.parameter = h;
        row.measured = w1d;
        row.coupling = cpl;
        row.theoretical = closed;
        row.terms = (long)ap.cells.size();
        row.seed = 0;
        local[i] = row;
    });

    const double worst = reduce_max(errs);
    res.pass = worst <= 1e-9;
    res.detail = "max |W - h/(2(p+1)^{1/p})| over 24 cases and 3 solvers = " +
                 fmt_g(worst, 3);
    rows.insert(rows.end(), local.begin(), local.end());
    return res;
}

// -- 2 ------------------------------------------------------------------

CriterionResult crit2(int jobs, std::vector<SweepRow>& rows) {
    CriterionResult res{
        2, "measured <= coupling <= cell-diameter bound on 30 seeded configs",
        true, ""};
    const double hs[3] = {0.5, 0.25, 0.125};

    std::vector<SweepRow> local(30);
    std::vector<char> ok(30, 1);
    std::vector<double> slack(30, 0.0);
    parallel_for_index(30, jobs, [&](std::size_t i) {
        Rng rng(9000 + i);
        const int which = (int)(i % 4); // Z1 Z2 Z3 A2
        const int d = which == 3 ? 2 : which + 1;
        const Lattice L = which == 3 ? make_lattice(LatticeKind::A2, 2)
                                     : make_lattice(LatticeKind::Zd, d);
        const double h = hs[(i / 4) % 3];
        const double p = (double)(i % 2) + 1.0;
        const bool ind = ((i / 3) % 2) == 1 && d <= 2 && h >= 0.25;
        const ApproximantMode mode =
            ind ? ApproximantMode::indicator : ApproximantMode::dirac;
        const Measure mu = family_measure(d, rng);

        DiscretizeOptions disc;
        if (which == 2)
            disc.grid_per_axis = 12;
        else if (which == 3)
            disc.grid_per_axis = ind ? 48 : 64;
        else
            disc.gl_per_piece = 4;

        VoronoiScheme scheme = LatticeScheme{L, h};
        DiscreteMeasure base = discretize_on_scheme(mu, scheme, disc);
        Approximant ap = quantize_discrete(base, scheme, mode);

        SweepRow row;
        row.parameter = h;
        row.seed = 9000 + (long)i;
        row.coupling = coupling_cost(base, ap, p);
        row.theoretical = L.geom.diameter * h;
        row.terms = (long)ap.cells.size();
        row.measured = measure_distance(base, ap.realization(), p);
        local[i] = row;

        ok[i] = !std::isnan(row.measured) &&
                row.measured <= row.coupling + 1e-8 &&
                row.coupling <= row.theoretical + 1e-9;
        slack[i] = row.theoretical - row.coupling;
    });

    res.pass = all_of_flags(ok);
    res.detail = "30/30 sandwich checks, min bound slack = " +
                 fmt_g(reduce_min(slack), 3);
    if (!res.pass) {
        int bad = 0;
        for (char c : ok) bad += c == 0;
        res.detail = std::to_string(bad) + " of 30 configs violated the sandwich";
    }
    rows.insert(rows.end(), local.begin(), local.end());
    return res;
}

// -- 3 ------------------------------------------------------------------

CriterionResult crit3(int jobs, std::vector<SweepRow>& rows) {
    CriterionResult res{
        3, "cube rate: W_2 <= sqrt(d) N^{-1/d} with log-log slope -1/d", true,
        ""};
    struct Case {
        int d;
        long N;
    };
    std::vector<Case> cases;
    for (long N : {4L, 16L, 64L, 256L, 1024L}) cases.push_back({1, N});
    for (long N : {4L, 16L, 64L, 256L, 1024L}) cases.push_back({2, N});
    for (long N : {8L, 27L, 64L, 216L, 512L}) cases.push_back({3, N});

    DiscretizeOptions disc;
    disc.gl_per_piece = 2; // exact cell masses and second moments for p = 2

    std::vector<SweepRow> local(cases.size());
    std::vector<char> ok(cases.size(), 1);
    parallel_for_index(cases.size(), jobs, [&](std::size_t i) {
        const int d = cases[i].d;
        const long N = cases[i].N;
        const double h = std::pow((double)N, -1.0 / d);
        const Lattice L = make_lattice(LatticeKind::Zd, d);
        const Measure mu = make_uniform_cube(d);

        VoronoiScheme scheme = LatticeScheme{L, h};
        DiscreteMeasure base = discretize_on_scheme(mu, scheme, disc);
        Approximant ap = quantize_discrete(base, scheme, ApproximantMode::dirac);

        SweepRow row;
        row.parameter = (double)N;
        row.seed = 0;
        row.coupling = coupling_cost(base, ap, 2.0);
        row.theoretical = std::sqrt((double)d) * std::pow((double)N, -1.0 / d);
        row.terms = (long)ap.cells.size();
        row.term_ok = row.terms <= N;
        row.measured = measure_distance(base, ap.site_measure(), 2.0);
        local[i] = row;
        ok[i] = !std::isnan(row.measured) && row.measured <= row.theoretical;
    });

    bool pass = all_of_flags(ok);
    std::string slopes;
    for (int d = 1; d <= 3; ++d) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < cases.size(); ++i)
            if (cases[i].d == d) {
                xs.push_back(local[i].parameter);
                ys.push_back(local[i].measured);
            }
        SlopeFit fit = fit_slope(xs, ys);
        const double lo = -1.1 / d, hi = -0.9 / d;
        if (fit.degenerate || fit.slope < lo || fit.slope > hi) pass = false;
        slopes += (d > 1 ? ", " : "") + ("d=" + std::to_string(d) + ": " +
                                         fmt_g(fit.slope, 4));
    }
    res.pass = pass;
    res.detail = "all 15 rows under sqrt(d) N^{-1/d}; slopes " + slopes;
    if (!pass) res.detail = "rate check failed; slopes " + slopes;
    rows.insert(rows.end(), local.begin(), local.end());
    return res;
}

// -- 4 ------------------------------------------------------------------

CriterionResult crit4(int jobs, std::vector<SweepRow>& rows) {
    CriterionResult res{4, "nonuniform sites: W_2 <= 2 * certified mesh norm",
                        true, ""};
    Measure mu = make_uniform_cube(2);
    std::get<DensityMeasure>(mu.v).quad.nodes_per_axis = 48;

    double worst_ratio = 0.0;
    bool pass = true;
    std::vector<SweepRow> local;
    for (const char* gen : {"jittered_grid", "random_uniform"}) {
        NonuniformConfig cfg;
        cfg.measure = mu;
        cfg.generator = gen;
        cfg.site_counts = {64, 256};
        cfg.trials = 10;
        cfg.jitter = 0.25;
        cfg.p = 2.0;
        cfg.seed = std::string(gen) == "jittered_grid" ? 404 : 505;
        cfg.jobs = jobs;
        NonuniformReport rep = run_nonuniform(cfg);
        pass = pass && rep.all_pass;
        for (const NonuniformTrial& t : rep.trials) {
            SweepRow row;
            row.parameter = (double)t.n_sites;
            row.measured = t.measured;
            row.coupling = t.coupling;
            row.theoretical = t.bound;
            row.terms = t.n_sites;
            row.seed = (long)t.seed;
            local.push_back(row);
            if (std::isnan(t.measured) || t.measured > t.bound + 1e-8) pass = false;
            worst_ratio = std::max(worst_ratio, t.measured / t.bound);
        }
    }
    res.pass = pass;
    res.detail =
        "40 trials (2 generators x {64,256} sites x 10 seeds), max measured/bound = " +
        fmt_g(worst_ratio, 3);
    rows.insert(rows.end(), local.begin(), local.end());
    return res;
}

// -- 5 ------------------------------------------------------------------

CriterionResult crit5(int jobs) {
    CriterionResult res{5, "moment comparison inequalities on 100 seeded configs",
                        true, ""};
    const double hs[3] = {0.5, 0.25, 0.125};

    // part A: 50 scaled-lattice configurations
    std::vector<char> ok_a(50, 1);
    std::vector<double> slack_a(50, std::numeric_limits<double>::infinity());
    parallel_for_index(50, jobs, [&](std::size_t i) {
        Rng rng(12000 + i);
        const int which = (int)(i % 4);
        const int d = which == 3 ? 2 : which + 1;
        const Lattice L = which == 3 ? make_lattice(LatticeKind::A2, 2)
                                     : make_lattice(LatticeKind::Zd, d);
        const double h = hs[(i / 4) % 3];
        const double p = (double)(i % 2) + 1.0;
        const Measure mu = family_measure(d, rng);

        DiscretizeOptions disc;
        if (which == 2)
            disc.grid_per_axis = 12;
        else if (which == 3)
            disc.grid_per_axis = 64;
        else
            disc.gl_per_piece = 4;

        VoronoiScheme scheme = LatticeScheme{L, h};
        DiscreteMeasure base = discretize_on_scheme(mu, scheme, disc);
        Approximant ap = quantize_discrete(base, scheme, ApproximantMode::dirac);
        for (const MomentBoundReport& r : moment_bound_suite(base, ap, p)) {
            if (!r.holds) ok_a[i] = 0;
            slack_a[i] = std::min(slack_a[i], r.slack);
        }
    });

    // part B: 50 nonuniform-site configurations
    std::vector<char> ok_b(50, 1);
    std::vector<double> slack_b(50, std::numeric_limits<double>::infinity());
    parallel_for_index(50, jobs, [&](std::size_t i) {
        Rng rng(13000 + i);
        const int d = (int)(i % 2) + 1;
        const double p = (double)((i / 2) % 2) + 1.0;
        const char* gen = ((i / 4) % 2) == 0 ? "jittered_grid" : "random_uniform";
        const long N = d == 1 ? ((i / 8) % 2 ? 128 : 64) : ((i / 8) % 2 ? 256 : 64);
        const Measure mu = ((i / 16) % 2) == 0
                               ? make_uniform_cube(d)
                               : make_gaussian(d, 0.25, {}, 2.0);

        DiscreteMeasure base = flatten_measure(mu);
        const Box sb = support_box(mu);
        SiteScheme ss;
        ss.dim = (std::size_t)d;
        ss.sites = random_sites(gen, d, N, sb, 0.25, rng);
        ss.support = sb;
        VoronoiScheme scheme = std::move(ss);
        Approximant ap = quantize_discrete(base, scheme, ApproximantMode::dirac);
        for (const MomentBoundReport& r : moment_bound_suite(base, ap, p)) {
            if (!r.holds) ok_b[i] = 0;
            slack_b[i] = std::min(slack_b[i], r.slack);
        }
    });

    res.pass = all_of_flags(ok_a) && all_of_flags(ok_b);
    res.detail = "min slack: lattice " + fmt_g(reduce_min(slack_a), 3) +
                 ", sites " + fmt_g(reduce_min(slack_b), 3) +
                 " over 300 inequalities";
    return res;
}

// -- 6 ------------------------------------------------------------------

CriterionResult crit6(int) {
    CriterionResult res{6, "covering counts scale by at most 9 h^{-2} in d = 2",
                        true, ""};
    double worst = 0.0;
    for (LatticeKind kind : {LatticeKind::Zd, LatticeKind::A2}) {
        const Lattice L = make_lattice(kind, 2);
        for (double R : {1.0, 2.0}) {
            const long base = covering_count(L, 1.0, R);
            for (double h : {0.5, 0.25}) {
                const long fine = covering_count(L, h, R);
                const double cap = 9.0 / (h * h) * (double)base;
                if ((double)fine > cap) res.pass = false;
                worst = std::max(worst, (double)fine / cap);
            }
        }
    }
    res.detail = "8 lattice/radius/scale combinations, max count/cap = " +
                 fmt_g(worst, 3);
    return res;
}

// -- 7 ------------------------------------------------------------------

CriterionResult crit7(int jobs) {
    CriterionResult res{7, "solver cross-validation (LP vs brute force, 1d, metric)",
                        true, ""};

    auto random_discrete = [](Rng& rng, int d, int n, bool unit_weights,
                              double span) {
        std::vector<Atom> atoms(n);
        for (Atom& a : atoms) {
            a.x.resize(d);
            for (int k = 0; k < d; ++k) a.x[k] = rng.uniform(-span, span);
            a.w = unit_weights ? 1.0 : rng.uniform(0.5, 1.5);
        }
        return make_atoms(atoms);
    };

    std::vector<double> err_bf(100, 0.0);
    parallel_for_index(100, jobs, [&](std::size_t i) {
        Rng rng(21000 + i);
        const double p = (double)(i % 3) + 1.0;
        const int d = 1 + (int)((i / 3) % 3);
        Measure a, b;
        if (i % 2 == 0) {
            const int n = 2 + (int)(i % 4);
            a = random_discrete(rng, d, n, true, 1.0);
            b = random_discrete(rng, d, n, true, 1.0);
        } else {
            a = random_discrete(rng, d, 1 + (int)rng.below(4), false, 1.0);
            b = random_discrete(rng, d, 1 + (int)rng.below(4), false, 1.0);
        }
        const double bf = wasserstein_bruteforce(a.as_discrete(), b.as_discrete(), p);
        const double lp = wasserstein_lp(a.as_discrete(), b.as_discrete(), p).value;
        err_bf[i] = std::fabs(lp - bf) / (1.0 + bf);
    });

    std::vector<double> err_1d(100, 0.0);
    parallel_for_index(100, jobs, [&](std::size_t i) {
        Rng rng(22000 + i);
        const double p = (double)(i % 3) + 1.0;
        Measure a = random_discrete(rng, 1, 30 + (int)rng.below(31), false, 2.0);
        Measure b = random_discrete(rng, 1, 30 + (int)rng.below(31), false, 2.0);
        const double w1 = wasserstein_1d(a.as_discrete(), b.as_discrete(), p);
        const double lp = wasserstein_lp(a.as_discrete(), b.as_discrete(), p).value;
        err_1d[i] = std::fabs(w1 - lp);
    });

    std::vector<char> ok_m(20, 1);
    parallel_for_index(20, jobs, [&](std::size_t t) {
        Rng rng(23000 + t);
        std::vector<DiscreteMeasure> ms;
        for (int j = 0; j < 3; ++j) {
            Measure m = random_discrete(rng, 2, 3 + (int)rng.below(10), false, 1.0);
            ms.push_back(m.as_discrete());
        }
        ok_m[t] = metric_check(ms, 2.0).pass;
    });

    const double worst_bf = reduce_max(err_bf);
    const double worst_1d = reduce_max(err_1d);
    res.pass = worst_bf <= 1e-12 && worst_1d <= 1e-9 && all_of_flags(ok_m);
    res.detail = "max rel LP-vs-brute gap " + fmt_g(worst_bf, 3) +
                 ", max 1d-vs-LP gap " + fmt_g(worst_1d, 3) +
                 ", 20/20 metric triples";
    return res;
}

// -- 8 ------------------------------------------------------------------

CriterionResult crit8(int) {
    CriterionResult res{8, "truncation costs: exact atoms, saturated thresholds, "
                           "monotone scan",
                        true, ""};
    std::string bad;

    { // one atom at distance 3, ball radius 1, p = 2: cost exactly 2
        Measure mu = make_atoms({{{3.0, 0.0}, 1.0}});
        const double trunc = truncation_error(mu, 1.0, 2.0);
        Measure proj = project_to_ball(mu, 1.0);
        const double w =
            wasserstein_lp(mu.as_discrete(), proj.as_discrete(), 2.0).value;
        if (std::fabs(trunc - 2.0) > 1e-12 || std::fabs(w - 2.0) > 1e-12) {
            res.pass = false;
            bad += " single-atom";
        }
    }
    { // half the mass at distance 2, p = 1: cost exactly 1/2
        Measure mu = make_atoms({{{2.0, 0.0}, 0.5}, {{0.0, 0.0}, 0.5}});
        const double trunc = truncation_error(mu, 1.0, 1.0);
        Measure proj = project_to_ball(mu, 1.0);
        const double w =
            wasserstein_lp(mu.as_discrete(), proj.as_discrete(), 1.0).value;
        if (std::fabs(trunc - 0.5) > 1e-12 || std::fabs(w - 0.5) > 1e-12) {
            res.pass = false;
            bad += " two-atom";
        }
    }
    { // atoms that exactly saturate the per-atom decay threshold
        TailDecaySpec spec;
        spec.epsilon = 0.1;
        spec.p = 2.0;
        spec.R = 1.0;
        spec.q = 2.0;
        const double eps_p3 = std::pow(spec.epsilon, spec.p) / 3.0;
        const double zeta = std::riemann_zeta(spec.q);
        DiscreteMeasure atoms; // raw tail weights, deliberately unnormalized
        atoms.dim = 2;
        for (int k = 1; k <= 25; ++k) {
            const double r = 1.0 + 1.0 / k;
            const double th = (double)k * 2.39996322972865332; // golden angle
            atoms.xs.push_back(r * std::cos(th));
            atoms.xs.push_back(r * std::sin(th));
            atoms.ws.push_back(eps_p3 /
                               (std::pow(r - spec.R, spec.p) *
                                std::pow((double)k, spec.q) * zeta));
        }
        TruncationReport rep =
            check_decay_conditions(nullptr, nullptr, &atoms, spec);
        if (!rep.conditions[2].pass || rep.total_bound > spec.epsilon + 1e-9) {
            res.pass = false;
            bad += " saturated-thresholds";
        }
    }
    { // widening the ball can only lower the truncation cost
        Measure mu = make_gaussian(2, 1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10; ++i) {
            const double R = 0.5 + 0.5 * i;
            const double e = truncation_error(mu, R, 2.0);
            if (e > prev + 1e-12) {
                res.pass = false;
                bad += " scan";
                break;
            }
            prev = e;
        }
    }
    res.detail = res.pass ? "exact single/two-atom costs, zero-margin "
                            "thresholds accepted, scan nonincreasing"
                          : "failed:" + bad;
    return res;
}

// -- 9 ------------------------------------------------------------------

CriterionResult crit9(int jobs, std::vector<SweepRow>& rows) {
    CriterionResult res{9, "truncate-then-quantize pipeline respects the "
                           "summed bound",
                        true, ""};
    const Measure mu = make_gaussian(2, 1.0);
    const DiscreteMeasure base = flatten_measure(mu);
    const Measure base_m{base};
    const double trunc = truncation_error(base_m, 3.0, 2.0);
    const Measure proj_m = project_to_ball(base_m, 3.0);
    const DiscreteMeasure& proj = proj_m.as_discrete();
    const Lattice L = make_lattice(LatticeKind::Zd, 2);

    const double hs[3] = {0.5, 0.25, 0.125};
    std::vector<SweepRow> local(3);
    std::vector<char> ok(3, 1);
    parallel_for_index(3, jobs, [&](std::size_t i) {
        const double h = hs[i];
        VoronoiScheme scheme = LatticeScheme{L, h};
        Approximant ap = quantize_discrete(proj, scheme, ApproximantMode::dirac);
        SweepRow row;
        row.parameter = h;
        row.seed = 0;
        row.coupling = coupling_cost(proj, ap, 2.0);
        row.theoretical = std::sqrt(2.0) * h + trunc;
        row.terms = (long)ap.cells.size();
        row.measured = measure_distance(base, ap.site_measure(), 2.0);
        local[i] = row;
        ok[i] = !std::isnan(row.measured) &&
                row.coupling <= std::sqrt(2.0) * h + 1e-9 &&
                row.measured <= row.theoretical + 1e-8;
    });

    res.pass = all_of_flags(ok);
    double worst = 0.0;
    for (const SweepRow& r : local)
        worst = std::max(worst, r.measured / r.theoretical);
    res.detail = "3 scales, truncation cost " + fmt_g(trunc, 4) +
                 ", max measured/bound = " + fmt_g(worst, 3);
    rows.insert(rows.end(), local.begin(), local.end());
    return res;
}

} // namespace

AcceptanceResult run_acceptance(int jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    AcceptanceResult out;
    std::vector<SweepRow> rows;

    const bool trace = std::getenv("WQUANT_TRACE") != nullptr;
    auto guard = [&](int id, const char* name, auto&& fn) {
        const auto c0 = std::chrono::steady_clock::now();
        try {
            out.criteria.push_back(fn());
        } catch (const std::exception& e) {
            out.criteria.push_back(
                CriterionResult{id, name, false, std::string("error: ") + e.what()});
        }
        if (trace)
            std::fprintf(stderr, "[trace] criterion %d (%s): %.1fs\n", id, name,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       c0)
                             .count());
    };

    guard(1, "interval closed form", [&] { return crit1(jobs, rows); });
    guard(2, "sandwich bounds", [&] { return crit2(jobs, rows); });
    guard(3, "cube rate", [&] { return crit3(jobs, rows); });
    guard(4, "nonuniform mesh bound", [&] { return crit4(jobs, rows); });
    guard(5, "moment inequalities", [&] { return crit5(jobs); });
    guard(6, "covering scaling", [&] { return crit6(jobs); });
    guard(7, "solver cross-validation", [&] { return crit7(jobs); });
    guard(8, "truncation costs", [&] { return crit8(jobs); });
    guard(9, "pipeline bound", [&] { return crit9(jobs, rows); });
    out.csv = sweep_csv(rows);

    guard(10, "deterministic reports across job counts", [&] {
        CriterionResult res{10, "deterministic reports across job counts", true,
                            ""};
        const int jflip = jobs == 1 ? 8 : 1;
        std::vector<SweepRow> rows2;
        crit1(jflip, rows2);
        crit2(jflip, rows2);
        crit3(jflip, rows2);
        crit4(jflip, rows2);
        crit9(jflip, rows2);
        const bool same = sweep_csv(rows2) == out.csv;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        res.pass = same && secs < 300.0;
        res.detail = std::string(same ? "report identical under " :
                                        "report DIFFERS under ") +
                     std::to_string(jobs) + " vs " + std::to_string(jflip) +
                     " workers; " + fmt_g(secs, 4) + "s elapsed (budget 300s)";
        return res;
    });

    out.all_pass = true;
    for (const CriterionResult& c : out.criteria)
        if (!c.pass) out.all_pass = false;
    return out;
}

} // namespace wquant
