#ifndef WQUANT_HARNESS_HPP
#define WQUANT_HARNESS_HPP

#include "wquant/ot.hpp"
#include "wquant/quantize.hpp"
#include "wquant/tail.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

// Experiment drivers: parameter sweeps that quantize a measure, evaluate the
// exact transport distance next to the coupling and theoretical bounds, and
// emit deterministic reports (CSV rows, slope fits, SVG plots).

namespace wquant {

// Run f(0), ..., f(n-1), each call writing only its own result slot. jobs <= 1
// runs inline; otherwise a fixed thread pool pulls indices from a shared
// counter. Output depends only on the index, never on the schedule, so any
// job count produces identical results. The first exception is rethrown
// after the pool drains.
void parallel_for_index(std::size_t n, int jobs,
                        const std::function<void(std::size_t)>& f);

// Reduce a measure to atoms with its own quadrature spec (densities: tensor
// Gauss-Legendre over the support box or seeded Monte Carlo), ignoring any
// quantization scheme. Used wherever a scheme-independent base is needed.
DiscreteMeasure flatten_measure(const Measure& mu,
                                std::size_t max_atoms = 200000);

// W_p via the cheapest exact solver: the quantile sweep in one dimension,
// the LP otherwise. Returns NaN when the pair-count cap would be exceeded
// (caller decides whether a bound-only row is acceptable).
double measure_distance(const DiscreteMeasure& a, const DiscreteMeasure& b,
                        double p, std::size_t pair_cap = 10000000);

// ---------------------------------------------------------------- sweep rows

struct SweepRow {
    double parameter = 0.0; // h for h-sweeps, N for budget sweeps
    double measured = std::numeric_limits<double>::quiet_NaN(); // NaN = bound-only
    double coupling = 0.0;
    double theoretical = 0.0;
    long terms = 0;
    std::uint64_t seed = 0;
    bool bound_only = false;
    bool term_ok = true; // cell count within the stated budget (informational)
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0; // max |log y - fit(log x)| over used rows
    int used = 0;
    bool degenerate = true; // fewer than 3 usable rows, or no spread in x
};

// Least squares of log y on log x over rows with positive finite x and y.
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct SweepReport {
    std::string label;
    std::vector<SweepRow> rows;
    SlopeFit fit;
    bool bounds_pass = true; // every row: measured <= coupling + 1e-8
                             //        and coupling <= theoretical + 1e-9
};

// Fixed schema: parameter,measured_wp,coupling_bound,theoretical_bound,terms,seed
// with %.17g floats ("nan" for bound-only measured entries).
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Log-log plot of measured and bound columns with axis ticks and a legend.
// Self-contained SVG text, deterministic byte for byte.
std::string sweep_svg(const SweepReport& rep);

// ------------------------------------------------------------------- configs

struct SweepConfig {
    Measure measure;
    std::optional<Lattice> lattice;
    ApproximantMode mode = ApproximantMode::dirac;
    double p = 2.0;
    std::vector<double> hs;     // run_h_sweep
    std::vector<long> budgets;  // run_nterm_sweep
    double ball_radius = -1.0;  // <= 0: use the support radius
    std::uint64_t seed = 1;
    DiscretizeOptions disc;
    int jobs = 1;
    std::size_t lp_pair_cap = 10000000;
};

// W_p(mu, mu_h) for each h, against the coupling cost and diam(V_0) * h.
SweepReport run_h_sweep(const SweepConfig& cfg);

// For each term budget N: h = choose_h_for_budget, quantize, and compare
// against 3 * diam(V_0) * count^(1/d) * N^(-1/d). `term_ok` records whether
// the realized cell count stayed within N.
SweepReport run_nterm_sweep(const SweepConfig& cfg);

struct NonuniformConfig {
    Measure measure;
    std::string generator = "jittered_grid"; // or "random_uniform"
    std::vector<long> site_counts;
    int trials = 10;      // seeds per site count
    double jitter = 0.25; // jitter amplitude as a fraction of the grid spacing
    double p = 2.0;
    std::uint64_t seed = 2;
    DiscretizeOptions disc;
    int jobs = 1;
};

struct NonuniformTrial {
    long n_sites = 0;
    std::uint64_t seed = 0;
    double mesh_upper = 0.0; // certified mesh norm over the support ball
    double mesh_lower = 0.0;
    double separation = 0.0;
    double measured = 0.0;
    double coupling = 0.0;
    double bound = 0.0;         // 2 * mesh_upper
    double scaling_const = 0.0; // mesh_upper * N^(1/d)
    bool pass = false;          // measured <= bound + 1e-8
};

struct NonuniformReport {
    std::vector<NonuniformTrial> trials;
    bool all_pass = true;
};

NonuniformReport run_nonuniform(const NonuniformConfig& cfg);

struct TailConfig {
    Measure measure;
    std::optional<Lattice> lattice;
    std::vector<double> hs;
    double R = 1.0;
    double p = 2.0;
    double epsilon = 0.1;
    double q = 2.0;
    std::uint64_t seed = 3;
    DiscretizeOptions disc;
    int jobs = 1;
};

struct TailRow {
    double h = 0.0;
    double measured = 0.0; // W_p(base, quantized projection)
    double coupling = 0.0; // cell coupling of the projected measure
    double bound = 0.0;    // diam(V_0) * h + truncation error
    long terms = 0;
    bool pass = false;
};

struct TailReport {
    double trunc = 0.0; // truncation_error(base, R, p)
    std::vector<TailRow> rows;
    std::vector<double> r_grid;     // informational truncation scan
    std::vector<double> trunc_scan; // nonincreasing along r_grid
    bool all_pass = true;
};

// Truncate-then-quantize pipeline: project the base onto B_R, quantize the
// projection at each h, and check measured <= diam(V_0) * h + truncation.
TailReport run_tail_experiment(const TailConfig& cfg);

struct BaselineConfig {
    Measure measure;
    std::vector<long> budgets;
    double p = 2.0;
    std::size_t lloyd_samples = 100000;
    int lloyd_iters = 50;
    int empirical_seeds = 20;
    std::uint64_t seed = 4;
    int jobs = 1;
};

struct BaselineRow {
    long budget = 0;
    double h = 0.0;        // scale picked by choose_h_for_budget
    double lattice_w = 0.0;
    double lloyd_w = 0.0;
    double empirical_w = 0.0; // mean over seeds
    long lattice_terms = 0;
    double lloyd_vs_lattice = 0.0; // |lattice - lloyd| / lloyd
};

struct BaselineReport {
    std::vector<BaselineRow> rows;
};

// Equal-budget comparison: scaled-lattice quantizer vs Lloyd (seeded k-means
// on a sampled cloud) vs the empirical measure averaged over seeds.
BaselineReport run_baselines(const BaselineConfig& cfg);

// ---------------------------------------------------------------- acceptance

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // one-line outcome summary
};

struct AcceptanceResult {
    std::vector<CriterionResult> criteria;
    std::string csv; // report.csv body (rows from the sweep-style criteria)
    bool all_pass = false;
};

// The full self-check suite. Deterministic for any job count; the final
// criterion re-runs the row-producing checks with a different job count and
// compares the CSV byte for byte.
AcceptanceResult run_acceptance(int jobs);

} // namespace wquant

#endif
