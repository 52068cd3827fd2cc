#include "wquant/harness.hpp"

#include "wquant/kernels.hpp"
#include "wquant/quad.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <mutex>
#include <thread>

namespace wquant {

void parallel_for_index(std::size_t n, int jobs,
                        const std::function<void(std::size_t)>& f) {
    if (n == 0) return;
    if (jobs <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_err;
    std::mutex err_mu;
    const std::size_t nt = std::min<std::size_t>((std::size_t)jobs, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(err_mu);
                    if (!first_err) first_err = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_err) std::rethrow_exception(first_err);
}

DiscreteMeasure flatten_measure(const Measure& mu, std::size_t max_atoms) {
    if (const auto* dm = std::get_if<DiscreteMeasure>(&mu.v)) return *dm;

    if (const auto* f = std::get_if<DensityMeasure>(&mu.v)) {
        const int d = f->dim;
        DiscreteMeasure out;
        out.dim = d;
        if (f->quad.kind == QuadratureSpec::Kind::tensor_gauss) {
            const GaussRule& gr = gauss_legendre(f->quad.nodes_per_axis);
            const int n = (int)gr.x.size();
            double total = 1.0;
            for (int k = 0; k < d; ++k) total *= n;
            if (total > (double)max_atoms)
                fail_resource("flattening this density needs more than " +
                              std::to_string(max_atoms) + " atoms");
            std::vector<double> mid(d), half(d);
            for (int k = 0; k < d; ++k) {
                mid[k] = 0.5 * (f->support.lo[k] + f->support.hi[k]);
                half[k] = 0.5 * (f->support.hi[k] - f->support.lo[k]);
            }
            std::vector<int> idx(d, 0), sizes(d, n);
            Point x(d);
            do {
                double w = 1.0;
                for (int k = 0; k < d; ++k) {
                    x[k] = mid[k] + half[k] * gr.x[idx[k]];
                    w *= half[k] * gr.w[idx[k]];
                }
                w *= f->pdf(x.data());
                if (w > 0.0) {
                    out.xs.insert(out.xs.end(), x.begin(), x.end());
                    out.ws.push_back(w);
                }
            } while (advance_index(idx, sizes));
        } else {
            std::size_t n = (std::size_t)std::max<long>(1, f->quad.mc_samples);
            n = std::min(n, max_atoms);
            Rng rng(f->quad.seed);
            Point x(d);
            for (std::size_t i = 0; i < n; ++i) {
                for (int k = 0; k < d; ++k)
                    x[k] = rng.uniform(f->support.lo[k], f->support.hi[k]);
                double w = f->pdf(x.data());
                if (w > 0.0) {
                    out.xs.insert(out.xs.end(), x.begin(), x.end());
                    out.ws.push_back(w);
                }
            }
        }
        if (out.ws.empty()) fail_moment("density flattening produced no atoms");
        double tot = 0.0;
        for (double w : out.ws) tot += w;
        for (double& w : out.ws) w /= tot;
        return out;
    }

    const Mixture& mix = std::get<Mixture>(mu.v);
    DiscreteMeasure out;
    out.dim = mu.dim();
    for (std::size_t i = 0; i < mix.parts.size(); ++i) {
        DiscreteMeasure part = flatten_measure(*mix.parts[i], max_atoms);
        out.xs.insert(out.xs.end(), part.xs.begin(), part.xs.end());
        for (double w : part.ws) out.ws.push_back(mix.weights[i] * w);
    }
    return out;
}

double measure_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, double p,
                        std::size_t pair_cap) {
    if (a.dim == 1) return wasserstein_1d(a, b, p);
    if (a.size() * b.size() <= pair_cap) return wasserstein_lp(a, b, p).value;
    return std::numeric_limits<double>::quiet_NaN();
}

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    SlopeFit fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        if (xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i])) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    }
    fit.used = (int)lx.size();
    if (fit.used < 3) return fit;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < fit.used; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= fit.used;
    my /= fit.used;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < fit.used; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (int i = 0; i < fit.used; ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::fabs(ly[i] - (fit.slope * lx[i] + fit.intercept)));
    fit.degenerate = false;
    return fit;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string s = "parameter,measured_wp,coupling_bound,theoretical_bound,terms,seed\n";
    for (const SweepRow& r : rows) {
        s += fmt_g17(r.parameter);
        s += ',';
        s += std::isnan(r.measured) ? "nan" : fmt_g17(r.measured);
        s += ',';
        s += fmt_g17(r.coupling);
        s += ',';
        s += fmt_g17(r.theoretical);
        s += ',';
        s += std::to_string(r.terms);
        s += ',';
        s += std::to_string(r.seed);
        s += '\n';
    }
    return s;
}

// ---------------------------------------------------------------------- SVG

namespace {

struct Series {
    const char* name;
    const char* color;
    bool dashed;
    std::vector<double> x, y;
};

std::string svg_num(double v) { return fmt_g(v, 6); }

} // namespace

std::string sweep_svg(const SweepReport& rep) {
    Series measured{"measured", "#1f77b4", false, {}, {}};
    Series coupling{"coupling", "#2ca02c", false, {}, {}};
    Series theoretical{"bound", "#d62728", true, {}, {}};
    for (const SweepRow& r : rep.rows) {
        if (!std::isnan(r.measured) && r.measured > 0.0 && r.parameter > 0.0) {
            measured.x.push_back(r.parameter);
            measured.y.push_back(r.measured);
        }
        if (r.coupling > 0.0 && r.parameter > 0.0) {
            coupling.x.push_back(r.parameter);
            coupling.y.push_back(r.coupling);
        }
        if (r.theoretical > 0.0 && r.parameter > 0.0) {
            theoretical.x.push_back(r.parameter);
            theoretical.y.push_back(r.theoretical);
        }
    }

    const double W = 640, H = 440, ml = 72, mr = 20, mt = 24, mb = 52;
    double xlo = HUGE_VAL, xhi = -HUGE_VAL, ylo = HUGE_VAL, yhi = -HUGE_VAL;
    for (const Series* s : {&measured, &coupling, &theoretical})
        for (std::size_t i = 0; i < s->x.size(); ++i) {
            xlo = std::min(xlo, std::log10(s->x[i]));
            xhi = std::max(xhi, std::log10(s->x[i]));
            ylo = std::min(ylo, std::log10(s->y[i]));
            yhi = std::max(yhi, std::log10(s->y[i]));
        }

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
                      "height=\"440\" viewBox=\"0 0 640 440\">\n";
    svg += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
    if (!(xhi >= xlo) || !(yhi >= ylo)) {
        svg += "<text x=\"320\" y=\"220\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\">no positive data to plot</text>\n</svg>\n";
        return svg;
    }
    if (xhi - xlo < 1e-12) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi - ylo < 1e-12) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    const double padx = 0.04 * (xhi - xlo), pady = 0.06 * (yhi - ylo);
    xlo -= padx;
    xhi += padx;
    ylo -= pady;
    yhi += pady;

    auto px = [&](double lx) { return ml + (lx - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto py = [&](double ly) { return H - mb - (ly - ylo) / (yhi - ylo) * (H - mt - mb); };

    // frame and ticks
    svg += "<rect x=\"" + svg_num(ml) + "\" y=\"" + svg_num(mt) + "\" width=\"" +
           svg_num(W - ml - mr) + "\" height=\"" + svg_num(H - mt - mb) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    const int nticks = 5;
    for (int t = 0; t < nticks; ++t) {
        double lx = xlo + (xhi - xlo) * t / (nticks - 1.0);
        double ly = ylo + (yhi - ylo) * t / (nticks - 1.0);
        svg += "<line x1=\"" + svg_num(px(lx)) + "\" y1=\"" + svg_num(H - mb) +
               "\" x2=\"" + svg_num(px(lx)) + "\" y2=\"" + svg_num(H - mb + 5) +
               "\" stroke=\"#444\"/>\n";
        svg += "<text x=\"" + svg_num(px(lx)) + "\" y=\"" + svg_num(H - mb + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
               fmt_g(std::pow(10.0, lx), 3) + "</text>\n";
        svg += "<line x1=\"" + svg_num(ml - 5) + "\" y1=\"" + svg_num(py(ly)) +
               "\" x2=\"" + svg_num(ml) + "\" y2=\"" + svg_num(py(ly)) +
               "\" stroke=\"#444\"/>\n";
        svg += "<text x=\"" + svg_num(ml - 8) + "\" y=\"" + svg_num(py(ly) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" +
               fmt_g(std::pow(10.0, ly), 3) + "</text>\n";
    }
    svg += "<text x=\"" + svg_num(0.5 * (ml + W - mr)) + "\" y=\"" + svg_num(H - 12) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
           "parameter (log)</text>\n";
    svg += "<text x=\"16\" y=\"" + svg_num(0.5 * (mt + H - mb)) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 " + svg_num(0.5 * (mt + H - mb)) + ")\">"
           "W_p (log)</text>\n";

    double ly0 = mt + 14;
    for (const Series* s : {&measured, &coupling, &theoretical}) {
        if (s->x.empty()) continue;
        std::string pts;
        for (std::size_t i = 0; i < s->x.size(); ++i) {
            pts += svg_num(px(std::log10(s->x[i])));
            pts += ',';
            pts += svg_num(py(std::log10(s->y[i])));
            pts += ' ';
        }
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
               std::string(s->color) + "\" stroke-width=\"1.5\"" +
               (s->dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        if (!s->dashed)
            for (std::size_t i = 0; i < s->x.size(); ++i)
                svg += "<circle cx=\"" + svg_num(px(std::log10(s->x[i]))) + "\" cy=\"" +
                       svg_num(py(std::log10(s->y[i]))) + "\" r=\"3\" fill=\"" +
                       std::string(s->color) + "\"/>\n";
        svg += "<text x=\"" + svg_num(W - mr - 8) + "\" y=\"" + svg_num(ly0) +
               "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\" "
               "fill=\"" + std::string(s->color) + "\">" + s->name + "</text>\n";
        ly0 += 14;
    }
    svg += "</svg>\n";
    return svg;
}

// -------------------------------------------------------------------- sweeps

SweepReport run_h_sweep(const SweepConfig& cfg) {
    if (!cfg.lattice) fail_invalid("h-sweep needs a lattice");
    if (cfg.hs.empty()) fail_invalid("h-sweep needs at least one h value");
    const Lattice& L = *cfg.lattice;

    SweepReport rep;
    rep.label = "h_sweep";
    rep.rows.resize(cfg.hs.size());
    parallel_for_index(cfg.hs.size(), cfg.jobs, [&](std::size_t i) {
        const double h = cfg.hs[i];
        VoronoiScheme scheme = LatticeScheme{L, h};
        DiscreteMeasure base = discretize_on_scheme(cfg.measure, scheme, cfg.disc);
        Approximant ap = quantize_discrete(base, scheme, cfg.mode);
        SweepRow row;
        row.parameter = h;
        row.seed = cfg.seed;
        row.coupling = coupling_cost(base, ap, cfg.p);
        row.theoretical = L.geom.diameter * h;
        row.terms = (long)ap.cells.size();
        double w = measure_distance(base, ap.realization(), cfg.p, cfg.lp_pair_cap);
        if (std::isnan(w))
            row.bound_only = true;
        else
            row.measured = w;
        rep.rows[i] = row;
    });

    std::vector<double> xs, ys;
    for (const SweepRow& r : rep.rows) {
        if (!r.bound_only) {
            xs.push_back(r.parameter);
            ys.push_back(r.measured);
        }
        if (!r.bound_only && !(r.measured <= r.coupling + 1e-8)) rep.bounds_pass = false;
        if (!(r.coupling <= r.theoretical + 1e-9)) rep.bounds_pass = false;
    }
    rep.fit = fit_slope(xs, ys);
    return rep;
}

SweepReport run_nterm_sweep(const SweepConfig& cfg) {
    if (!cfg.lattice) fail_invalid("budget sweep needs a lattice");
    if (cfg.budgets.empty()) fail_invalid("budget sweep needs at least one N value");
    const Lattice& L = *cfg.lattice;
    const double R =
        cfg.ball_radius > 0.0 ? cfg.ball_radius : support_radius(cfg.measure);
    const long count1 = covering_count(L, 1.0, R);

    SweepReport rep;
    rep.label = "nterm_sweep";
    rep.rows.resize(cfg.budgets.size());
    parallel_for_index(cfg.budgets.size(), cfg.jobs, [&](std::size_t i) {
        const long N = cfg.budgets[i];
        if (N <= 0) fail_invalid("term budgets must be positive");
        const double h = choose_h_for_budget(L, R, (std::size_t)N);
        VoronoiScheme scheme = LatticeScheme{L, h};
        DiscreteMeasure base = discretize_on_scheme(cfg.measure, scheme, cfg.disc);
        Approximant ap = quantize_discrete(base, scheme, cfg.mode);
        SweepRow row;
        row.parameter = (double)N;
        row.seed = cfg.seed;
        row.coupling = coupling_cost(base, ap, cfg.p);
        row.theoretical = 3.0 * L.geom.diameter *
                          std::pow((double)count1, 1.0 / L.dim) *
                          std::pow((double)N, -1.0 / L.dim);
        row.terms = (long)ap.cells.size();
        row.term_ok = row.terms <= N;
        double w = measure_distance(base, ap.realization(), cfg.p, cfg.lp_pair_cap);
        if (std::isnan(w))
            row.bound_only = true;
        else
            row.measured = w;
        rep.rows[i] = row;
    });

    std::vector<double> xs, ys;
    for (const SweepRow& r : rep.rows) {
        if (!r.bound_only) {
            xs.push_back(r.parameter);
            ys.push_back(r.measured);
        }
        if (!r.bound_only && !(r.measured <= r.coupling + 1e-8)) rep.bounds_pass = false;
        if (!(r.coupling <= r.theoretical + 1e-9)) rep.bounds_pass = false;
    }
    rep.fit = fit_slope(xs, ys);
    return rep;
}

// ---------------------------------------------------------------- nonuniform

namespace {

std::vector<double> make_sites(const std::string& generator, int d, long n,
                               const Box& box, double jitter, Rng& rng) {
    std::vector<double> sites;
    sites.reserve((std::size_t)n * d);
    if (generator == "jittered_grid") {
        long k = (long)std::llround(std::pow((double)n, 1.0 / d));
        long kd = 1;
        for (int j = 0; j < d; ++j) kd *= k;
        if (kd != n)
            fail_invalid("jittered grids need a site count that is a d-th power, got " +
                         std::to_string(n));
        std::vector<int> sizes(d, (int)k), idx(d, 0);
        do {
            for (int j = 0; j < d; ++j) {
                double s = (box.hi[j] - box.lo[j]) / (double)k;
                double c = box.lo[j] + (idx[j] + 0.5) * s;
                sites.push_back(c + rng.uniform(-jitter, jitter) * s);
            }
        } while (advance_index(idx, sizes));
        return sites;
    }
    if (generator == "random_uniform") {
        for (int attempt = 0; attempt < 100; ++attempt) {
            sites.clear();
            for (long i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j)
                    sites.push_back(rng.uniform(box.lo[j], box.hi[j]));
            bool dup = false;
            if (n >= 2) {
                try {
                    separation_radius(sites, (std::size_t)d);
                } catch (const Error&) {
                    dup = true; // coincident draw: redo the whole set
                }
            }
            if (!dup) return sites;
        }
        fail_invalid("random site generator kept drawing duplicates");
    }
    fail_invalid("unknown site generator '" + generator + "'");
}

} // namespace

NonuniformReport run_nonuniform(const NonuniformConfig& cfg) {
    if (cfg.site_counts.empty()) fail_invalid("nonuniform run needs site counts");
    if (cfg.trials <= 0) fail_invalid("nonuniform run needs at least one trial");
    const int d = cfg.measure.dim();
    const DiscreteMeasure base = flatten_measure(cfg.measure);
    const Box sb = support_box(cfg.measure);
    const Point center = sb.center();
    const double R = std::max(sb.circumradius(), 1e-9);

    const std::size_t total = cfg.site_counts.size() * (std::size_t)cfg.trials;
    NonuniformReport rep;
    rep.trials.resize(total);
    parallel_for_index(total, cfg.jobs, [&](std::size_t task) {
        const long N = cfg.site_counts[task / cfg.trials];
        const std::uint64_t stream = task;
        Rng rng(cfg.seed, stream);
        std::vector<double> sites =
            make_sites(cfg.generator, d, N, sb, cfg.jitter, rng);

        SiteScheme ss;
        ss.dim = (std::size_t)d;
        ss.sites = sites;
        ss.support = sb;
        VoronoiScheme scheme = std::move(ss);
        Approximant ap = quantize_discrete(base, scheme, ApproximantMode::dirac);

        NonuniformTrial t;
        t.n_sites = N;
        t.seed = stream;
        MeshNormResult mn = mesh_norm(sites, (std::size_t)d, center, R);
        t.mesh_upper = mn.upper;
        t.mesh_lower = mn.lower;
        t.separation = N >= 2 ? separation_radius(sites, (std::size_t)d) : 0.0;
        t.coupling = coupling_cost(base, ap, cfg.p);
        t.measured = measure_distance(base, ap.site_measure(), cfg.p);
        t.bound = 2.0 * mn.upper;
        t.scaling_const = mn.upper * std::pow((double)N, 1.0 / d);
        t.pass = !std::isnan(t.measured) && t.measured <= t.bound + 1e-8;
        rep.trials[task] = t;
    });
    for (const NonuniformTrial& t : rep.trials)
        if (!t.pass) rep.all_pass = false;
    return rep;
}

// ---------------------------------------------------------------------- tail

TailReport run_tail_experiment(const TailConfig& cfg) {
    const int d = cfg.measure.dim();
    const Lattice L =
        cfg.lattice ? *cfg.lattice : make_lattice(LatticeKind::Zd, d);
    const DiscreteMeasure base = flatten_measure(cfg.measure);
    const Measure base_m{base};

    TailReport rep;
    rep.trunc = truncation_error(base_m, cfg.R, cfg.p);
    const Measure proj_m = project_to_ball(base_m, cfg.R);
    const DiscreteMeasure& proj = proj_m.as_discrete();

    rep.rows.resize(cfg.hs.size());
    parallel_for_index(cfg.hs.size(), cfg.jobs, [&](std::size_t i) {
        const double h = cfg.hs[i];
        VoronoiScheme scheme = LatticeScheme{L, h};
        Approximant ap = quantize_discrete(proj, scheme, ApproximantMode::dirac);
        TailRow row;
        row.h = h;
        row.terms = (long)ap.cells.size();
        row.coupling = coupling_cost(proj, ap, cfg.p);
        row.measured = measure_distance(base, ap.site_measure(), cfg.p);
        row.bound = L.geom.diameter * h + rep.trunc;
        row.pass = !std::isnan(row.measured) && row.measured <= row.bound + 1e-8;
        rep.rows[i] = row;
    });

    // informational: truncation cost along a widening radius grid
    for (int i = 0; i < 10; ++i) {
        double r = cfg.R * (0.5 + 0.2 * i);
        rep.r_grid.push_back(r);
        rep.trunc_scan.push_back(truncation_error(base_m, r, cfg.p));
    }
    for (const TailRow& row : rep.rows)
        if (!row.pass) rep.all_pass = false;
    return rep;
}

// ----------------------------------------------------------------- baselines

namespace {

std::vector<double> lloyd_centers(const DiscreteMeasure& cloud, long N, int iters) {
    const int d = cloud.dim;
    const std::size_t n = cloud.size();
    std::vector<double> centers;
    centers.reserve((std::size_t)N * d);
    // init: first N distinct cloud points
    for (std::size_t i = 0; i < n && (long)(centers.size() / d) < N; ++i) {
        bool dup = false;
        for (std::size_t c = 0; c < centers.size() / d && !dup; ++c)
            dup = sq_dist(cloud.x(i), centers.data() + c * d, d) == 0.0;
        if (!dup) centers.insert(centers.end(), cloud.x(i), cloud.x(i) + d);
    }
    if ((long)(centers.size() / d) < N)
        fail_invalid("sample cloud has fewer distinct points than requested centers");

    std::vector<std::int32_t> assign(n);
    std::vector<double> sq(n);
    std::vector<double> sums((std::size_t)N * d);
    std::vector<double> cnt((std::size_t)N);
    for (int it = 0; it < iters; ++it) {
        kernels::nearest_site(cloud.xs.data(), n, centers.data(), (std::size_t)N,
                              (std::size_t)d, assign.data(), sq.data());
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(cnt.begin(), cnt.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = (std::size_t)assign[i];
            cnt[c] += 1.0;
            for (int k = 0; k < d; ++k) sums[c * d + k] += cloud.x(i)[k];
        }
        for (long c = 0; c < N; ++c) {
            if (cnt[(std::size_t)c] > 0.0) {
                for (int k = 0; k < d; ++k)
                    centers[(std::size_t)c * d + k] =
                        sums[(std::size_t)c * d + k] / cnt[(std::size_t)c];
            } else {
                // empty cluster: move it onto the point farthest from its center
                std::size_t far = 0;
                double best = -1.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (sq[i] > best) {
                        best = sq[i];
                        far = i;
                    }
                for (int k = 0; k < d; ++k)
                    centers[(std::size_t)c * d + k] = cloud.x(far)[k];
            }
        }
    }
    // drop exact duplicates (possible when two clusters collapse)
    std::vector<double> unique;
    for (std::size_t c = 0; c < centers.size() / d; ++c) {
        bool dup = false;
        for (std::size_t u = 0; u < unique.size() / d && !dup; ++u)
            dup = sq_dist(centers.data() + c * d, unique.data() + u * d, d) == 0.0;
        if (!dup) unique.insert(unique.end(), centers.data() + c * d,
                                centers.data() + (c + 1) * d);
    }
    return unique;
}

} // namespace

BaselineReport run_baselines(const BaselineConfig& cfg) {
    if (cfg.budgets.empty()) fail_invalid("baseline run needs term budgets");
    const int d = cfg.measure.dim();
    const Lattice L = make_lattice(LatticeKind::Zd, d);
    const DiscreteMeasure base = flatten_measure(cfg.measure);
    const Box sb = support_box(cfg.measure);
    const double R = support_radius(cfg.measure);

    BaselineReport rep;
    rep.rows.resize(cfg.budgets.size());
    parallel_for_index(cfg.budgets.size(), cfg.jobs, [&](std::size_t i) {
        const long N = cfg.budgets[i];
        BaselineRow row;
        row.budget = N;

        row.h = choose_h_for_budget(L, R, (std::size_t)N);
        VoronoiScheme scheme = LatticeScheme{L, row.h};
        Approximant lat = quantize_discrete(base, scheme, ApproximantMode::dirac);
        row.lattice_terms = (long)lat.cells.size();
        row.lattice_w = measure_distance(base, lat.site_measure(), cfg.p);

        Rng rng(cfg.seed, 1000 + i);
        DiscreteMeasure cloud = sample(cfg.measure, cfg.lloyd_samples, rng);
        std::vector<double> centers = lloyd_centers(cloud, N, cfg.lloyd_iters);
        SiteScheme ss;
        ss.dim = (std::size_t)d;
        ss.sites = centers;
        ss.support = sb;
        VoronoiScheme cscheme = std::move(ss);
        Approximant llo = quantize_discrete(base, cscheme, ApproximantMode::dirac);
        row.lloyd_w = measure_distance(base, llo.site_measure(), cfg.p);

        double acc = 0.0;
        for (int s = 0; s < cfg.empirical_seeds; ++s) {
            Rng erng(cfg.seed, 2000 + i * 1000 + (std::size_t)s);
            DiscreteMeasure emp = sample(cfg.measure, (std::size_t)N, erng);
            acc += measure_distance(base, emp, cfg.p);
        }
        row.empirical_w = acc / std::max(1, cfg.empirical_seeds);
        row.lloyd_vs_lattice =
            std::fabs(row.lattice_w - row.lloyd_w) / std::max(row.lloyd_w, 1e-300);
        rep.rows[i] = row;
    });
    return rep;
}

} // namespace wquant
