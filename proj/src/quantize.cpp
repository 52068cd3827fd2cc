#include "wquant/quantize.hpp"

#include "wquant/kernels.hpp"
#include "wquant/quad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <variant>

namespace wquant {

namespace {

double pow_p(double v, double p) {
    if (p == 1.0) return v;
    if (p == 2.0) return v * v;
    if (p == 3.0) return v * v * v;
    return std::pow(v, p);
}

double root_p(double v, double p) {
    if (p == 1.0) return v;
    if (p == 2.0) return std::sqrt(v);
    return std::pow(v, 1.0 / p);
}

// ---------------------------------------------------------------- assignment

// Atom -> cell map plus the canonical cell list (lexicographic id order for
// lattices, ascending site index for site lists). Masses are accumulated in
// atom order, so the result is a pure function of the base measure.
struct Assignment {
    std::vector<std::size_t> cell_of_atom;
    std::vector<ApproxCell> cells;
};

Assignment assign_cells(const DiscreteMeasure& base, const VoronoiScheme& scheme) {
    Assignment out;
    const std::size_t n = base.size();
    out.cell_of_atom.resize(n);

    if (const auto* ls = std::get_if<LatticeScheme>(&scheme)) {
        std::vector<CellId> ids;
        decode_batch(ls->lattice, ls->h, base.xs.data(), n, ids);
        std::map<CellId, std::size_t> index;
        for (const CellId& id : ids) index.emplace(id, 0);
        out.cells.reserve(index.size());
        std::size_t k = 0;
        for (auto& entry : index) {
            entry.second = k++;
            ApproxCell c;
            c.id = entry.first;
            c.site = ls->lattice.site_of(ls->h, entry.first);
            out.cells.push_back(std::move(c));
        }
        for (std::size_t i = 0; i < n; ++i)
            out.cell_of_atom[i] = index.find(ids[i])->second;
    } else {
        const auto& ss = std::get<SiteScheme>(scheme);
        const std::size_t m = ss.size();
        std::vector<std::int32_t> idx(n);
        std::vector<double> sq(n);
        kernels::nearest_site(base.xs.data(), n, ss.sites.data(), m, ss.dim,
                              idx.data(), sq.data());
        std::vector<std::size_t> slot(m, SIZE_MAX);
        for (std::size_t i = 0; i < n; ++i) slot[(std::size_t)idx[i]] = 0;
        std::size_t k = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (slot[j] == SIZE_MAX) continue;
            slot[j] = k++;
            ApproxCell c;
            c.site_index = j;
            c.site.assign(ss.site(j), ss.site(j) + ss.dim);
            out.cells.push_back(std::move(c));
        }
        for (std::size_t i = 0; i < n; ++i)
            out.cell_of_atom[i] = slot[(std::size_t)idx[i]];
    }

    for (std::size_t i = 0; i < n; ++i)
        out.cells[out.cell_of_atom[i]].mass += base.ws[i];
    return out;
}

void check_scheme(const VoronoiScheme& scheme) {
    if (const auto* ls = std::get_if<LatticeScheme>(&scheme)) {
        if (!(ls->h > 0.0) || !(ls->h <= 1.0))
            fail_invalid("lattice scheme needs 0 < h <= 1, got h=" + fmt_g(ls->h, 6));
    } else {
        const auto& ss = std::get<SiteScheme>(scheme);
        if (ss.dim == 0 || ss.sites.empty() || ss.sites.size() % ss.dim != 0)
            fail_invalid("site scheme needs a nonempty flat n x d site array");
        if (ss.size() >= 2) separation_radius(ss.sites, ss.dim); // rejects duplicates
    }
}

// ------------------------------------------------------------ discretization

// Per-axis Gauss-Legendre rule whose pieces are the intersections of the
// axis cells ((lambda-1/2, lambda+1/2] * h) with [lo, hi], optionally split
// at the cell midpoints so |x - site|^p stays smooth per piece for odd p.
struct AxisRule {
    std::vector<double> x, w;
};

AxisRule axis_rule_cells(double lo, double hi, double h, bool split_at_site, int m) {
    AxisRule r;
    const GaussRule& g = gauss_legendre(m);
    auto add_piece = [&](double a, double b) {
        if (!(b - a > 1e-14 * h)) return;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < m; ++i) {
            r.x.push_back(mid + half * g.x[i]);
            r.w.push_back(half * g.w[i]);
        }
    };
    long l0 = (long)std::ceil(lo / h - 0.5);
    long l1 = (long)std::ceil(hi / h - 0.5);
    for (long l = l0; l <= l1; ++l) {
        double a = std::max(lo, (l - 0.5) * h);
        double b = std::min(hi, (l + 0.5) * h);
        if (!(b > a)) continue;
        double s = l * h;
        if (split_at_site && a < s && s < b) {
            add_piece(a, s);
            add_piece(s, b);
        } else {
            add_piece(a, b);
        }
    }
    return r;
}

DiscreteMeasure discretize_density(const DensityMeasure& f, const VoronoiScheme& scheme,
                                   const DiscretizeOptions& opts) {
    const int d = f.dim;
    DiscreteMeasure out;
    out.dim = d;

    // Prefer the cell-aligned product rule whenever the scheme is axis-aligned
    // and the node count fits the budget: per-cell masses come out exact, and
    // the atom count stays proportional to the cell count.  Measures carrying
    // a Monte-Carlo quadrature fall back to sampling when the exact grid would
    // be too large; deterministic quadratures make that overflow a hard error
    // rather than a silent accuracy downgrade.
    const auto* ls = std::get_if<LatticeScheme>(&scheme);
    bool cell_aligned = ls != nullptr && ls->lattice.kind == LatticeKind::Zd;
    std::vector<AxisRule> ax;

    if (cell_aligned) {
        ax.resize(d);
        std::size_t total = 1;
        for (int k = 0; k < d; ++k) {
            ax[k] = axis_rule_cells(f.support.lo[k], f.support.hi[k], ls->h,
                                    opts.split_at_sites, std::max(1, opts.gl_per_piece));
            if (ax[k].x.empty())
                fail_invalid("degenerate support box on axis " + std::to_string(k));
            total *= ax[k].x.size();
            if (total > opts.max_atoms) {
                if (f.quad.kind == QuadratureSpec::Kind::monte_carlo) {
                    cell_aligned = false;
                    break;
                }
                fail_resource("cell-aligned discretization needs more than " +
                              std::to_string(opts.max_atoms) + " atoms");
            }
        }
    }

    if (cell_aligned) {
        std::vector<int> sizes(d);
        for (int k = 0; k < d; ++k) sizes[k] = (int)ax[k].x.size();
        std::vector<int> idx(d, 0);
        Point x(d);
        do {
            double w = 1.0;
            for (int k = 0; k < d; ++k) {
                x[k] = ax[k].x[idx[k]];
                w *= ax[k].w[idx[k]];
            }
            w *= f.pdf(x.data());
            if (w > 0.0) {
                out.xs.insert(out.xs.end(), x.begin(), x.end());
                out.ws.push_back(w);
            }
        } while (advance_index(idx, sizes));
    } else if (f.quad.kind == QuadratureSpec::Kind::monte_carlo) {
        // uniform proposals over the support box, pdf values as weights; the
        // constant volume factor divides out in the normalization below
        std::size_t n = (std::size_t)std::max<long>(1, f.quad.mc_samples);
        n = std::min(n, opts.max_atoms);
        Rng rng(f.quad.seed);
        Point x(d);
        for (std::size_t i = 0; i < n; ++i) {
            for (int k = 0; k < d; ++k) x[k] = rng.uniform(f.support.lo[k], f.support.hi[k]);
            double w = f.pdf(x.data());
            if (w > 0.0) {
                out.xs.insert(out.xs.end(), x.begin(), x.end());
                out.ws.push_back(w);
            }
        }
    } else {
        // midpoint grid over the support box; every grid atom lies in the
        // interior of exactly one axis slab, so the decode is unambiguous
        int g = opts.grid_per_axis;
        if (g <= 0) g = d == 1 ? 4096 : d == 2 ? 160 : d == 3 ? 24 : 10;
        while (g > 1) {
            double tot = 1.0;
            for (int k = 0; k < d; ++k) tot *= g;
            if (tot <= (double)opts.max_atoms) break;
            --g;
        }
        std::vector<int> sizes(d, g), idx(d, 0);
        Point x(d);
        do {
            double w = 1.0;
            for (int k = 0; k < d; ++k) {
                double step = (f.support.hi[k] - f.support.lo[k]) / g;
                x[k] = f.support.lo[k] + (idx[k] + 0.5) * step;
                w *= step;
            }
            w *= f.pdf(x.data());
            if (w > 0.0) {
                out.xs.insert(out.xs.end(), x.begin(), x.end());
                out.ws.push_back(w);
            }
        } while (advance_index(idx, sizes));
    }

    if (out.ws.empty())
        fail_moment("density discretization produced no positive-mass atoms");
    double tot = 0.0;
    for (double w : out.ws) tot += w;
    if (!(tot > 0.0) || !std::isfinite(tot))
        fail_moment("density discretization has non-finite total mass");
    for (double& w : out.ws) w /= tot;
    return out;
}

void require_bounded(const Box& sb) {
    for (int k = 0; k < sb.dim(); ++k)
        if (!std::isfinite(sb.lo[k]) || !std::isfinite(sb.hi[k]))
            fail_invalid("measure support is unbounded; truncate to a ball first "
                         "(tail module: project_to_ball / truncation_error)");
}

// golden-ratio style offsets: alpha_j = phi^-(j+1) with phi the root of
// x^(d+1) = x + 1; the resulting Kronecker sequence is low-discrepancy and
// fully deterministic
std::vector<double> kronecker_alphas(std::size_t d) {
    double phi = 1.5;
    for (int it = 0; it < 80; ++it) phi = std::pow(1.0 + phi, 1.0 / (double)(d + 1));
    std::vector<double> a(d);
    double q = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        q /= phi;
        a[j] = q;
    }
    return a;
}

} // namespace

const char* mode_name(ApproximantMode mode) {
    return mode == ApproximantMode::dirac ? "dirac" : "indicator";
}

std::size_t scheme_dim(const VoronoiScheme& scheme) {
    if (const auto* ls = std::get_if<LatticeScheme>(&scheme))
        return (std::size_t)ls->lattice.dim;
    return std::get<SiteScheme>(scheme).dim;
}

DiscreteMeasure Approximant::site_measure() const {
    DiscreteMeasure out;
    out.dim = (int)dim;
    out.xs.reserve(cells.size() * dim);
    out.ws.reserve(cells.size());
    for (const ApproxCell& c : cells) {
        out.xs.insert(out.xs.end(), c.site.begin(), c.site.end());
        out.ws.push_back(c.mass);
    }
    return out;
}

std::vector<Point> cell_nodes(const Approximant& approx, std::size_t cell_index,
                              std::size_t k) {
    const std::size_t d = approx.dim;
    if (k == 0) k = 16 * d;
    const ApproxCell& cell = approx.cells.at(cell_index);
    const auto* ls = std::get_if<LatticeScheme>(&approx.scheme);

    Point blo(d), bhi(d);
    if (ls) {
        const VoronoiGeometry& geom = ls->lattice.geom;
        if (!geom.vertices.empty()) {
            std::fill(blo.begin(), blo.end(), std::numeric_limits<double>::infinity());
            std::fill(bhi.begin(), bhi.end(), -std::numeric_limits<double>::infinity());
            for (const Point& v : geom.vertices)
                for (std::size_t j = 0; j < d; ++j) {
                    blo[j] = std::min(blo[j], v[j]);
                    bhi[j] = std::max(bhi[j], v[j]);
                }
            for (std::size_t j = 0; j < d; ++j) {
                blo[j] = cell.site[j] + ls->h * blo[j];
                bhi[j] = cell.site[j] + ls->h * bhi[j];
            }
        } else {
            for (std::size_t j = 0; j < d; ++j) {
                blo[j] = cell.site[j] - ls->h * geom.covering_radius;
                bhi[j] = cell.site[j] + ls->h * geom.covering_radius;
            }
        }
    } else {
        const auto& ss = std::get<SiteScheme>(approx.scheme);
        blo = ss.support.lo;
        bhi = ss.support.hi;
    }

    auto accepts = [&](const double* x) -> bool {
        if (ls) {
            Point pt(x, x + d);
            return decode(ls->lattice, ls->h, pt) == cell.id;
        }
        const auto& ss = std::get<SiteScheme>(approx.scheme);
        if (!ss.support.contains(x)) return false;
        std::int32_t ji;
        double sq;
        kernels::nearest_site(x, 1, ss.sites.data(), ss.size(), d, &ji, &sq);
        return (std::size_t)ji == cell.site_index;
    };

    std::vector<Point> nodes;
    nodes.reserve(k);
    // the site decodes to its own cell, so it is always a valid first node
    // (for site schemes only when it lies inside the clip box)
    if (ls || std::get<SiteScheme>(approx.scheme).support.contains(cell.site.data()))
        nodes.push_back(cell.site);

    const std::vector<double> alpha = kronecker_alphas(d);
    Point x(d);
    const std::size_t cap = 1024 * k;
    for (std::size_t t = 1; nodes.size() < k && t <= cap; ++t) {
        for (std::size_t j = 0; j < d; ++j) {
            double u = 0.5 + (double)t * alpha[j];
            u -= std::floor(u);
            x[j] = blo[j] + u * (bhi[j] - blo[j]);
        }
        if (accepts(x.data())) nodes.push_back(x);
    }
    if (nodes.empty()) nodes.push_back(cell.site);
    return nodes;
}

DiscreteMeasure Approximant::realization(std::size_t nodes_per_cell) const {
    if (mode == ApproximantMode::dirac) return site_measure();
    const std::size_t k = nodes_per_cell ? nodes_per_cell : 16 * dim;
    DiscreteMeasure out;
    out.dim = (int)dim;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        std::vector<Point> nodes = cell_nodes(*this, ci, k);
        double w = cells[ci].mass / (double)nodes.size();
        for (const Point& q : nodes) {
            out.xs.insert(out.xs.end(), q.begin(), q.end());
            out.ws.push_back(w);
        }
    }
    return out;
}

DiscreteMeasure discretize_on_scheme(const Measure& mu, const VoronoiScheme& scheme,
                                     const DiscretizeOptions& opts) {
    if ((std::size_t)mu.dim() != scheme_dim(scheme))
        fail_invalid("measure dimension does not match the scheme dimension");
    if (const auto* dm = std::get_if<DiscreteMeasure>(&mu.v)) return *dm;
    if (const auto* f = std::get_if<DensityMeasure>(&mu.v))
        return discretize_density(*f, scheme, opts);

    const auto& mix = std::get<Mixture>(mu.v);
    DiscreteMeasure out;
    out.dim = mu.dim();
    for (std::size_t i = 0; i < mix.parts.size(); ++i) {
        DiscreteMeasure part = discretize_on_scheme(*mix.parts[i], scheme, opts);
        out.xs.insert(out.xs.end(), part.xs.begin(), part.xs.end());
        for (double w : part.ws) out.ws.push_back(mix.weights[i] * w);
    }
    return out;
}

Approximant quantize_discrete(const DiscreteMeasure& base, const VoronoiScheme& scheme,
                              ApproximantMode mode) {
    if (base.size() == 0) fail_invalid("cannot quantize an empty measure");
    if ((std::size_t)base.dim != scheme_dim(scheme))
        fail_invalid("measure dimension does not match the scheme dimension");
    check_scheme(scheme);

    Assignment a = assign_cells(base, scheme);
    Approximant out;
    out.mode = mode;
    out.scheme = scheme;
    out.dim = (std::size_t)base.dim;
    out.cells = std::move(a.cells);
    return out;
}

Approximant quantize_lattice(const Measure& mu, const Lattice& lattice, double h,
                             ApproximantMode mode, const DiscretizeOptions& opts) {
    if (!(h > 0.0) || !(h <= 1.0))
        fail_invalid("lattice quantization needs 0 < h <= 1, got h=" + fmt_g(h, 6));
    require_bounded(support_box(mu));
    VoronoiScheme scheme = LatticeScheme{lattice, h};
    DiscreteMeasure base = discretize_on_scheme(mu, scheme, opts);
    return quantize_discrete(base, scheme, mode);
}

Approximant quantize_nonuniform(const Measure& mu, const std::vector<double>& sites,
                                std::size_t dim, ApproximantMode mode,
                                const DiscretizeOptions& opts) {
    SiteScheme ss;
    ss.dim = dim;
    ss.sites = sites;
    ss.support = support_box(mu);
    require_bounded(ss.support);
    VoronoiScheme scheme = std::move(ss);
    check_scheme(scheme);
    DiscreteMeasure base = discretize_on_scheme(mu, scheme, opts);
    return quantize_discrete(base, scheme, mode);
}

double coupling_cost(const DiscreteMeasure& base, const Approximant& approx, double p) {
    if (!(p >= 1.0)) fail_invalid("transport order p must be >= 1");
    if (base.dim != (int)approx.dim) fail_invalid("dimension mismatch in coupling_cost");
    const std::size_t d = approx.dim;

    // Re-derive the atom -> cell assignment along the identical deterministic
    // path quantize_discrete uses, so the coupling below transports exactly
    // the approximant's cells when `base` is the measure it was built from.
    Assignment a = assign_cells(base, approx.scheme);

    double tot = 0.0;
    if (approx.mode == ApproximantMode::dirac) {
        for (std::size_t i = 0; i < base.size(); ++i) {
            const ApproxCell& c = a.cells[a.cell_of_atom[i]];
            tot += base.ws[i] * pow_from_sq(sq_dist(base.x(i), c.site.data(), (int)d), p);
        }
    } else {
        Approximant tmp;
        tmp.mode = approx.mode;
        tmp.scheme = approx.scheme;
        tmp.dim = approx.dim;
        tmp.cells = a.cells;
        const std::size_t k = 16 * d;
        std::vector<std::vector<Point>> nodes(a.cells.size());
        for (std::size_t ci = 0; ci < a.cells.size(); ++ci)
            nodes[ci] = cell_nodes(tmp, ci, k);
        for (std::size_t i = 0; i < base.size(); ++i) {
            const auto& nd = nodes[a.cell_of_atom[i]];
            double s = 0.0;
            for (const Point& q : nd)
                s += pow_from_sq(sq_dist(base.x(i), q.data(), (int)d), p);
            tot += base.ws[i] * s / (double)nd.size();
        }
    }
    return root_p(tot, p);
}

MeshNormResult mesh_norm(const std::vector<double>& sites, std::size_t dim,
                         const Point& center, double R) {
    if (dim == 0 || sites.empty() || sites.size() % dim != 0)
        fail_invalid("mesh_norm needs a nonempty flat n x d site array");
    if (center.size() != dim) fail_invalid("mesh_norm center has the wrong dimension");
    if (!(R > 0.0)) fail_invalid("mesh_norm domain radius must be positive");
    const std::size_t m = sites.size() / dim;

    MeshNormResult res;
    res.upper = std::numeric_limits<double>::infinity();
    int n = 8;
    const int n_cap = dim == 1 ? 8192 : dim == 2 ? 1024 : dim == 3 ? 128 : 32;
    double prev = -1.0;

    std::vector<double> buf;
    std::vector<char> inner;
    std::vector<std::int32_t> oi;
    std::vector<double> osq;

    for (;;) {
        const double s = 2.0 * R / n;
        const double margin = 0.5 * std::sqrt((double)dim) * s;
        const double keep_sq = (R + margin) * (R + margin);
        const double in_sq = R * R;
        double max_all = 0.0, max_in = 0.0;

        auto flush = [&]() {
            const std::size_t cnt = buf.size() / dim;
            if (cnt == 0) return;
            oi.resize(cnt);
            osq.resize(cnt);
            kernels::nearest_site(buf.data(), cnt, sites.data(), m, dim, oi.data(),
                                  osq.data());
            for (std::size_t i = 0; i < cnt; ++i) {
                double dv = std::sqrt(osq[i]);
                if (dv > max_all) max_all = dv;
                if (inner[i] && dv > max_in) max_in = dv;
            }
            buf.clear();
            inner.clear();
        };

        std::vector<int> sizes(dim, n), idx(dim, 0);
        Point g(dim);
        do {
            double rsq = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                g[j] = center[j] - R + (idx[j] + 0.5) * s;
                double t = g[j] - center[j];
                rsq += t * t;
            }
            if (rsq <= keep_sq) {
                buf.insert(buf.end(), g.begin(), g.end());
                inner.push_back(rsq <= in_sq ? 1 : 0);
                if (buf.size() >= 4096 * dim) flush();
            }
        } while (advance_index(idx, sizes));
        flush();

        // any maximizer has a grid midpoint within `margin`, and the nearest-
        // site distance is 1-Lipschitz, so grid max + margin certifies the sup
        const double cert = max_all + margin;
        ++res.levels;
        if (max_in > res.lower) res.lower = max_in;
        if (cert < res.upper) res.upper = cert;
        if (prev >= 0.0 && std::fabs(cert - prev) < 1e-3 * R) break;
        prev = cert;
        if (n >= n_cap) break;
        n *= 2;
    }
    if (res.upper < res.lower) res.upper = res.lower;
    return res;
}

double separation_radius(const std::vector<double>& sites, std::size_t dim) {
    if (dim == 0 || sites.empty() || sites.size() % dim != 0)
        fail_invalid("separation_radius needs a nonempty flat n x d site array");
    const std::size_t m = sites.size() / dim;
    if (m < 2) fail_invalid("separation_radius needs at least two sites");
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double sq = sq_dist(sites.data() + i * dim, sites.data() + j * dim, (int)dim);
            if (sq < best) {
                best = sq;
                bi = i;
                bj = j;
            }
        }
    if (!(best > 0.0))
        fail_invalid("duplicate sites: indices " + std::to_string(bi) + " and " +
                     std::to_string(bj) + " coincide");
    return 0.5 * std::sqrt(best);
}

std::vector<MomentBoundReport> moment_bound_suite(const DiscreteMeasure& base,
                                                  const Approximant& approx, double p,
                                                  double site_mesh_norm) {
    if (!(p >= 1.0)) fail_invalid("moment order p must be >= 1");
    if (base.dim != (int)approx.dim)
        fail_invalid("dimension mismatch in moment_bound_suite");
    const std::size_t d = approx.dim;

    Point origin(d, 0.0);
    const double Mp = kernels::weighted_pow_dist(base.xs.data(), base.ws.data(),
                                                 base.size(), origin.data(), d, p);

    double site_norm_sum = 0.0;
    for (const ApproxCell& c : approx.cells)
        site_norm_sum += c.mass * pow_from_sq(sq_dist(c.site.data(), origin.data(), (int)d), p);

    double r = 0.0;
    double sup_sum = 0.0;
    std::string prefix;

    if (const auto* ls = std::get_if<LatticeScheme>(&approx.scheme)) {
        prefix = "lattice_";
        const VoronoiGeometry& geom = ls->lattice.geom;
        r = ls->h * geom.covering_radius;
        for (const ApproxCell& c : approx.cells) {
            double sup = 0.0;
            if (!geom.vertices.empty()) {
                // exact polytope maximum of |x| over the cell: attained at a vertex
                Point v(d);
                for (const Point& vert : geom.vertices) {
                    for (std::size_t j = 0; j < d; ++j) v[j] = c.site[j] + ls->h * vert[j];
                    sup = std::max(sup, norm2(v.data(), (int)d));
                }
            } else {
                sup = norm2(c.site.data(), (int)d) + ls->h * geom.covering_radius;
            }
            sup_sum += c.mass * pow_p(sup, p);
        }
    } else {
        prefix = "sites_";
        const auto& ss = std::get<SiteScheme>(approx.scheme);
        if (site_mesh_norm >= 0.0) {
            r = site_mesh_norm;
        } else {
            // certified mesh norm over a ball containing the base support
            Box sb;
            sb.lo.assign(base.x(0), base.x(0) + d);
            sb.hi = sb.lo;
            for (std::size_t i = 1; i < base.size(); ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    sb.lo[j] = std::min(sb.lo[j], base.x(i)[j]);
                    sb.hi[j] = std::max(sb.hi[j], base.x(i)[j]);
                }
            double rad = std::max(sb.circumradius(), 1e-9);
            r = mesh_norm(ss.sites, d, sb.center(), rad).upper;
        }
        Assignment a = assign_cells(base, approx.scheme);
        std::vector<double> cell_sup_sq(a.cells.size(), 0.0);
        for (std::size_t i = 0; i < base.size(); ++i) {
            double nsq = sq_dist(base.x(i), origin.data(), (int)d);
            double& cur = cell_sup_sq[a.cell_of_atom[i]];
            if (nsq > cur) cur = nsq;
        }
        for (std::size_t ci = 0; ci < a.cells.size(); ++ci)
            sup_sum += a.cells[ci].mass * pow_from_sq(cell_sup_sq[ci], p);
    }

    const double c1 = std::pow(2.0, p - 1.0);
    const double rp = pow_p(r, p);
    auto mk = [&](const char* id, double lhs, double rhs) {
        MomentBoundReport rep;
        rep.inequality_id = prefix + id;
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.holds = lhs <= rhs + 1e-9;
        rep.slack = rhs - lhs;
        return rep;
    };

    std::vector<MomentBoundReport> out;
    out.push_back(mk("site_norm_sum", site_norm_sum, c1 * rp + c1 * Mp));
    out.push_back(mk("cell_sup_sum", sup_sum, c1 * site_norm_sum + c1 * rp));
    out.push_back(mk("cell_sup_combined", sup_sum,
                     (std::pow(2.0, 2.0 * p - 2.0) + c1) * rp + c1 * Mp));
    return out;
}

double choose_h_for_budget(const Lattice& lattice, double R, std::size_t N) {
    if (!(R > 0.0)) fail_invalid("ball radius must be positive");
    if (N == 0) fail_budget("term budget must be positive");
    const long count = covering_count(lattice, 1.0, R);
    double need = (double)count;
    for (int k = 0; k < lattice.dim; ++k) need *= 3.0;
    if ((double)N < need - 1e-9) {
        auto min_n = (unsigned long long)std::ceil(need - 1e-9);
        fail_budget("term budget N=" + std::to_string(N) +
                    " cannot reach h <= 1 on this lattice/radius; need N >= " +
                    std::to_string(min_n));
    }
    double h = 3.0 * std::pow((double)count / (double)N, 1.0 / lattice.dim);
    return std::min(h, 1.0);
}

} // namespace wquant
