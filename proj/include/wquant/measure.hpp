#ifndef WQUANT_MEASURE_HPP
#define WQUANT_MEASURE_HPP

#include "wquant/common.hpp"
#include "wquant/rng.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wquant {

struct Atom {
    Point x;
    double w = 0.0;
};

struct QuadratureSpec {
    enum class Kind { tensor_gauss, monte_carlo };
    Kind kind = Kind::tensor_gauss;
    int nodes_per_axis = 64;       // tensor_gauss
    long mc_samples = 100000;      // monte_carlo
    std::uint64_t seed = 777;      // monte_carlo

    // Default policy: tensor quadrature up to d = 2, Monte Carlo above.
    static QuadratureSpec default_for_dim(int d) {
        QuadratureSpec q;
        if (d >= 3) q.kind = Kind::monte_carlo;
        return q;
    }
};

// Finitely supported measure. Locations are flat row-major (n x d); weights
// are strictly positive and sum to the stated total (1 for probability
// measures). Construction merges exactly-coincident atoms, drops weights
// below 1e-15 and renormalizes.
struct DiscreteMeasure {
    int dim = 0;
    std::vector<double> xs; // n * dim
    std::vector<double> ws; // n

    std::size_t size() const { return ws.size(); }
    const double* x(std::size_t i) const { return xs.data() + i * dim; }
    Point point(std::size_t i) const {
        return Point(x(i), x(i) + dim);
    }
    double total_mass() const {
        double s = 0.0;
        for (double w : ws) s += w;
        return s;
    }
};

// Normalized density w.r.t. Lebesgue measure with bounded support box.
// `pdf` must already integrate to ~1 over `support`; `pdf_sup` is an upper
// bound for sup pdf (required by the rejection sampler).
struct DensityMeasure {
    int dim = 0;
    std::function<double(const double*)> pdf;
    Box support;
    double pdf_sup = 0.0;
    QuadratureSpec quad;
    std::string label; // e.g. "uniform_cube", "gaussian"
};

struct Measure;

struct Mixture {
    std::vector<double> weights; // positive, sum to 1
    std::vector<std::shared_ptr<const Measure>> parts;
};

struct Measure {
    std::variant<DiscreteMeasure, DensityMeasure, Mixture> v;

    int dim() const;
    bool is_discrete() const { return std::holds_alternative<DiscreteMeasure>(v); }
    const DiscreteMeasure& as_discrete() const { return std::get<DiscreteMeasure>(v); }
};

// --- constructors -----------------------------------------------------------

// Merges coincident atoms, drops near-zero weights, renormalizes to 1.
DiscreteMeasure make_discrete(int dim, std::vector<double> xs, std::vector<double> ws);
DiscreteMeasure make_discrete(const std::vector<Atom>& atoms);

Measure make_uniform_cube(int dim, double side = 1.0, Point center = {});
Measure make_gaussian(int dim, double sigma, Point mean = {}, double trunc_sigmas = 8.0);
Measure make_atoms(const std::vector<Atom>& atoms);
Measure make_mixture(std::vector<double> weights, std::vector<Measure> parts);

// Uniform (w.r.t. arc length) measure on a circular arc in R^2, realized as
// a deterministic midpoint discretization with `resolution` equally weighted
// atoms. The surrogate is the measure: all downstream quantities are exact
// for it.
Measure make_circle_arc(Point center, double radius, double theta0, double theta1,
                        int resolution = 16384);

// --- operations --------------------------------------------------------------

// p-th moment about the origin: integral of |x|^p. Discrete and mixture
// parts are exact sums; density parts use the measure's quadrature spec.
double moment(const Measure& mu, double p);

// n i.i.d. draws as an equally weighted discrete measure (atoms are NOT
// merged: the empirical measure keeps one atom per draw unless coincident).
DiscreteMeasure sample(const Measure& mu, std::size_t n, Rng& rng);

// Pushforward under x -> f(x) (mapping into R^out_dim). Exact relocation
// for discrete parts; density parts are first replaced by a sampled
// surrogate of `surrogate_n` points drawn with `seed`.
Measure pushforward(const Measure& mu, const std::function<Point(const Point&)>& f,
                    int out_dim, std::size_t surrogate_n = 1000,
                    std::uint64_t seed = 2024);

// Tight axis-aligned bounding box of the support.
Box support_box(const Measure& mu);

// max |x| over the support box corners (radius of a ball containing the support).
double support_radius(const Measure& mu);

// Integral of g over a density's support box using its quadrature spec.
double density_integral(const DensityMeasure& f,
                        const std::function<double(const double*)>& g);

} // namespace wquant

#endif
