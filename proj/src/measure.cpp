#include "wquant/measure.hpp"

#include "wquant/kernels.hpp"
#include "wquant/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wquant {

namespace {

constexpr double kDropWeight = 1e-15;

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) fail_invalid(std::string(what) + " contains a non-finite value");
}

} // namespace

int Measure::dim() const {
    if (auto* d = std::get_if<DiscreteMeasure>(&v)) return d->dim;
    if (auto* f = std::get_if<DensityMeasure>(&v)) return f->dim;
    const Mixture& m = std::get<Mixture>(v);
    return m.parts.empty() ? 0 : m.parts.front()->dim();
}

DiscreteMeasure make_discrete(int dim, std::vector<double> xs, std::vector<double> ws) {
    if (dim <= 0) fail_invalid("atom dimension must be positive");
    if (ws.empty()) fail_invalid("discrete measure needs at least one atom");
    if (xs.size() != ws.size() * static_cast<std::size_t>(dim))
        fail_invalid("atom location array does not match weight count");
    check_finite(xs, "atom locations");
    check_finite(ws, "atom weights");
    for (double w : ws)
        if (w <= 0.0) fail_invalid("atom weights must be strictly positive");

    // Merge coincident atoms: sort indices by coordinates, sum runs of equal
    // locations. Sorting makes the summation order (hence the rounding)
    // independent of input order.
    const std::size_t n = ws.size();
    std::vector<std::size_t> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    auto lex_lt = [&](std::size_t a, std::size_t b) {
        const double* pa = xs.data() + a * dim;
        const double* pb = xs.data() + b * dim;
        for (int k = 0; k < dim; ++k) {
            if (pa[k] < pb[k]) return true;
            if (pa[k] > pb[k]) return false;
        }
        return false;
    };
    std::sort(ord.begin(), ord.end(), lex_lt);

    DiscreteMeasure out;
    out.dim = dim;
    out.xs.reserve(xs.size());
    out.ws.reserve(n);
    for (std::size_t r = 0; r < n;) {
        std::size_t s = r;
        double w = 0.0;
        while (r < n && !lex_lt(ord[s], ord[r]) && !lex_lt(ord[r], ord[s])) {
            w += ws[ord[r]];
            ++r;
        }
        const double* px = xs.data() + ord[s] * dim;
        out.xs.insert(out.xs.end(), px, px + dim);
        out.ws.push_back(w);
    }

    // Normalize, drop negligible atoms, normalize again.
    double total = out.total_mass();
    if (!(total > 0.0)) fail_invalid("discrete measure has no mass");
    for (double& w : out.ws) w /= total;

    std::size_t keep = 0;
    for (std::size_t i = 0; i < out.ws.size(); ++i) {
        if (out.ws[i] < kDropWeight) continue;
        if (keep != i) {
            std::copy(out.xs.begin() + i * dim, out.xs.begin() + (i + 1) * dim,
                      out.xs.begin() + keep * dim);
            out.ws[keep] = out.ws[i];
        }
        ++keep;
    }
    if (keep == 0) fail_invalid("all atoms fell below the weight floor");
    out.xs.resize(keep * dim);
    out.ws.resize(keep);

    total = out.total_mass();
    for (double& w : out.ws) w /= total;
    return out;
}

DiscreteMeasure make_discrete(const std::vector<Atom>& atoms) {
    if (atoms.empty()) fail_invalid("discrete measure needs at least one atom");
    int dim = static_cast<int>(atoms.front().x.size());
    std::vector<double> xs, ws;
    xs.reserve(atoms.size() * dim);
    ws.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (static_cast<int>(a.x.size()) != dim)
            fail_invalid("atoms have inconsistent dimensions");
        xs.insert(xs.end(), a.x.begin(), a.x.end());
        ws.push_back(a.w);
    }
    return make_discrete(dim, std::move(xs), std::move(ws));
}

Measure make_uniform_cube(int dim, double side, Point center) {
    if (dim <= 0) fail_invalid("dimension must be positive");
    if (!(side > 0.0)) fail_invalid("cube side must be positive");
    if (center.empty()) center.assign(dim, 0.0);
    if (static_cast<int>(center.size()) != dim) fail_invalid("center has wrong dimension");

    DensityMeasure f;
    f.dim = dim;
    f.support.lo.resize(dim);
    f.support.hi.resize(dim);
    for (int k = 0; k < dim; ++k) {
        f.support.lo[k] = center[k] - 0.5 * side;
        f.support.hi[k] = center[k] + 0.5 * side;
    }
    double density = 1.0;
    for (int k = 0; k < dim; ++k) density /= side;
    f.pdf = [density](const double*) { return density; };
    f.pdf_sup = density;
    f.quad = QuadratureSpec::default_for_dim(dim);
    f.label = "uniform_cube";
    return Measure{std::move(f)};
}

Measure make_gaussian(int dim, double sigma, Point mean, double trunc_sigmas) {
    if (dim <= 0) fail_invalid("dimension must be positive");
    if (!(sigma > 0.0)) fail_invalid("sigma must be positive");
    if (!(trunc_sigmas > 0.0)) fail_invalid("truncation width must be positive");
    if (mean.empty()) mean.assign(dim, 0.0);
    if (static_cast<int>(mean.size()) != dim) fail_invalid("mean has wrong dimension");

    DensityMeasure f;
    f.dim = dim;
    f.support.lo.resize(dim);
    f.support.hi.resize(dim);
    for (int k = 0; k < dim; ++k) {
        f.support.lo[k] = mean[k] - trunc_sigmas * sigma;
        f.support.hi[k] = mean[k] + trunc_sigmas * sigma;
    }
    const double axis_mass = std::erf(trunc_sigmas / std::sqrt(2.0));
    const double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI) * axis_mass);
    const double inv_two_s2 = 1.0 / (2.0 * sigma * sigma);
    Point m = mean;
    int d = dim;
    f.pdf = [m, d, inv_norm, inv_two_s2](const double* x) {
        double e = 0.0;
        for (int k = 0; k < d; ++k) {
            double t = x[k] - m[k];
            e += t * t;
        }
        double v = std::exp(-e * inv_two_s2);
        for (int k = 0; k < d; ++k) v *= inv_norm;
        return v;
    };
    f.pdf_sup = std::pow(inv_norm, dim);
    f.quad = QuadratureSpec::default_for_dim(dim);
    f.label = "gaussian";
    return Measure{std::move(f)};
}

Measure make_atoms(const std::vector<Atom>& atoms) {
    return Measure{make_discrete(atoms)};
}

Measure make_mixture(std::vector<double> weights, std::vector<Measure> parts) {
    if (weights.size() != parts.size() || parts.empty())
        fail_invalid("mixture needs matching, nonempty weights and components");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) fail_invalid("mixture weights must be positive");
        total += w;
    }
    int dim = parts.front().dim();
    Mixture mix;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].dim() != dim) fail_invalid("mixture components have mixed dimensions");
        mix.weights.push_back(weights[i] / total);
        mix.parts.push_back(std::make_shared<Measure>(std::move(parts[i])));
    }
    return Measure{std::move(mix)};
}

Measure make_circle_arc(Point center, double radius, double theta0, double theta1,
                        int resolution) {
    if (center.size() != 2) fail_invalid("circle arc lives in R^2");
    if (!(radius > 0.0)) fail_invalid("arc radius must be positive");
    if (!(theta1 > theta0)) fail_invalid("arc needs theta1 > theta0");
    if (resolution < 8) fail_invalid("arc resolution too small");

    const double dt = (theta1 - theta0) / resolution;
    std::vector<double> xs(2 * static_cast<std::size_t>(resolution));
    std::vector<double> ws(resolution, 1.0 / resolution);
    for (int j = 0; j < resolution; ++j) {
        double t = theta0 + (j + 0.5) * dt;
        xs[2 * j] = center[0] + radius * std::cos(t);
        xs[2 * j + 1] = center[1] + radius * std::sin(t);
    }
    return Measure{make_discrete(2, std::move(xs), std::move(ws))};
}

// --- quadrature over a density ------------------------------------------------

double density_integral(const DensityMeasure& f,
                        const std::function<double(const double*)>& g) {
    const int d = f.dim;
    if (f.quad.kind == QuadratureSpec::Kind::tensor_gauss) {
        const GaussRule& gr = gauss_legendre(f.quad.nodes_per_axis);
        const int n = static_cast<int>(gr.x.size());
        std::vector<double> mid(d), half(d);
        for (int k = 0; k < d; ++k) {
            mid[k] = 0.5 * (f.support.lo[k] + f.support.hi[k]);
            half[k] = 0.5 * (f.support.hi[k] - f.support.lo[k]);
        }
        std::vector<int> idx(d, 0), sizes(d, n);
        Point x(d);
        double acc = 0.0;
        do {
            double w = 1.0;
            for (int k = 0; k < d; ++k) {
                x[k] = mid[k] + half[k] * gr.x[idx[k]];
                w *= half[k] * gr.w[idx[k]];
            }
            acc += w * f.pdf(x.data()) * g(x.data());
        } while (advance_index(idx, sizes));
        return acc;
    }

    // Monte Carlo with uniform proposals over the support box.
    Rng rng(f.quad.seed);
    double vol = 1.0;
    for (int k = 0; k < d; ++k) vol *= (f.support.hi[k] - f.support.lo[k]);
    Point x(d);
    double acc = 0.0;
    for (long i = 0; i < f.quad.mc_samples; ++i) {
        for (int k = 0; k < d; ++k)
            x[k] = rng.uniform(f.support.lo[k], f.support.hi[k]);
        acc += f.pdf(x.data()) * g(x.data());
    }
    return acc * vol / static_cast<double>(f.quad.mc_samples);
}

// --- moments -------------------------------------------------------------------

double moment(const Measure& mu, double p) {
    if (!(p >= 1.0)) fail_invalid("moment order must satisfy p >= 1");
    double m = 0.0;
    if (auto* dm = std::get_if<DiscreteMeasure>(&mu.v)) {
        Point origin(dm->dim, 0.0);
        m = kernels::weighted_pow_dist(dm->xs.data(), dm->ws.data(), dm->size(),
                                       origin.data(), dm->dim, p);
    } else if (auto* f = std::get_if<DensityMeasure>(&mu.v)) {
        int d = f->dim;
        m = density_integral(*f, [d, p](const double* x) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += x[k] * x[k];
            return pow_from_sq(s, p);
        });
    } else {
        const Mixture& mix = std::get<Mixture>(mu.v);
        for (std::size_t i = 0; i < mix.parts.size(); ++i)
            m += mix.weights[i] * moment(*mix.parts[i], p);
    }
    if (!std::isfinite(m)) fail_moment("p-th moment is not finite");
    return m;
}

// --- sampling ------------------------------------------------------------------

namespace {

void draw_one(const Measure& mu, Rng& rng, double* out) {
    if (auto* dm = std::get_if<DiscreteMeasure>(&mu.v)) {
        double u = rng.uniform();
        double acc = 0.0;
        std::size_t pick = dm->size() - 1;
        for (std::size_t i = 0; i < dm->size(); ++i) {
            acc += dm->ws[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        const double* x = dm->x(pick);
        std::copy(x, x + dm->dim, out);
        return;
    }
    if (auto* f = std::get_if<DensityMeasure>(&mu.v)) {
        if (!(f->pdf_sup > 0.0)) fail_sampler("density has no usable pdf bound");
        const int d = f->dim;
        // Expected acceptance rate is 1 / (pdf_sup * volume); cap attempts at
        // 10000x the expected count before declaring the sampler unusable.
        double vol = 1.0;
        for (int k = 0; k < d; ++k) vol *= (f->support.hi[k] - f->support.lo[k]);
        long cap = static_cast<long>(10000.0 * std::max(1.0, f->pdf_sup * vol));
        Point x(d);
        for (long att = 0; att < cap; ++att) {
            for (int k = 0; k < d; ++k)
                x[k] = rng.uniform(f->support.lo[k], f->support.hi[k]);
            double u = rng.uniform();
            if (u * f->pdf_sup <= f->pdf(x.data())) {
                std::copy(x.begin(), x.end(), out);
                return;
            }
        }
        fail_sampler("rejection sampler acceptance rate below 1e-4");
    }
    const Mixture& mix = std::get<Mixture>(mu.v);
    double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = mix.parts.size() - 1;
    for (std::size_t i = 0; i < mix.parts.size(); ++i) {
        acc += mix.weights[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    draw_one(*mix.parts[pick], rng, out);
}

} // namespace

DiscreteMeasure sample(const Measure& mu, std::size_t n, Rng& rng) {
    if (n == 0) fail_invalid("cannot sample zero points");
    const int d = mu.dim();
    DiscreteMeasure out;
    out.dim = d;
    out.xs.resize(n * d);
    out.ws.assign(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        draw_one(mu, rng, out.xs.data() + i * d);
    return out;
}

// --- pushforward ----------------------------------------------------------------

Measure pushforward(const Measure& mu, const std::function<Point(const Point&)>& f,
                    int out_dim, std::size_t surrogate_n, std::uint64_t seed) {
    if (out_dim <= 0) fail_invalid("pushforward target dimension must be positive");

    auto map_discrete = [&](const DiscreteMeasure& dm) {
        std::vector<double> xs;
        xs.reserve(dm.size() * out_dim);
        for (std::size_t i = 0; i < dm.size(); ++i) {
            Point y = f(dm.point(i));
            if (static_cast<int>(y.size()) != out_dim)
                fail_invalid("pushforward map returned wrong dimension");
            xs.insert(xs.end(), y.begin(), y.end());
        }
        return make_discrete(out_dim, std::move(xs), dm.ws);
    };

    if (auto* dm = std::get_if<DiscreteMeasure>(&mu.v))
        return Measure{map_discrete(*dm)};
    if (std::holds_alternative<DensityMeasure>(mu.v)) {
        Rng rng(seed);
        DiscreteMeasure surrogate = sample(mu, surrogate_n, rng);
        return Measure{map_discrete(surrogate)};
    }
    const Mixture& mix = std::get<Mixture>(mu.v);
    Mixture out;
    out.weights = mix.weights;
    for (std::size_t i = 0; i < mix.parts.size(); ++i) {
        Measure part = pushforward(*mix.parts[i], f, out_dim, surrogate_n, seed + 1 + i);
        out.parts.push_back(std::make_shared<Measure>(std::move(part)));
    }
    return Measure{std::move(out)};
}

// --- support --------------------------------------------------------------------

Box support_box(const Measure& mu) {
    if (auto* dm = std::get_if<DiscreteMeasure>(&mu.v)) {
        Box b;
        b.lo.assign(dm->dim, HUGE_VAL);
        b.hi.assign(dm->dim, -HUGE_VAL);
        for (std::size_t i = 0; i < dm->size(); ++i)
            for (int k = 0; k < dm->dim; ++k) {
                b.lo[k] = std::min(b.lo[k], dm->x(i)[k]);
                b.hi[k] = std::max(b.hi[k], dm->x(i)[k]);
            }
        return b;
    }
    if (auto* f = std::get_if<DensityMeasure>(&mu.v)) return f->support;
    const Mixture& mix = std::get<Mixture>(mu.v);
    Box b = support_box(*mix.parts.front());
    for (std::size_t i = 1; i < mix.parts.size(); ++i)
        b = Box::hull(b, support_box(*mix.parts[i]));
    return b;
}

double support_radius(const Measure& mu) {
    Box b = support_box(mu);
    double s = 0.0;
    for (std::size_t k = 0; k < b.lo.size(); ++k) {
        double m = std::max(std::abs(b.lo[k]), std::abs(b.hi[k]));
        s += m * m;
    }
    return std::sqrt(s);
}

} // namespace wquant
