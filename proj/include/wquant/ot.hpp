#ifndef WQUANT_OT_HPP
#define WQUANT_OT_HPP

#include "wquant/common.hpp"
#include "wquant/measure.hpp"

#include <vector>

namespace wquant {

struct PlanEntry {
    std::size_t i = 0; // source atom index
    std::size_t j = 0; // target atom index
    double mass = 0.0;
};

struct TransportPlan {
    std::vector<PlanEntry> entries; // at most n + m - 1 (a basic solution)
    double cost = 0.0;              // sum of mass * |x_i - y_j|^p
};

struct WassersteinResult {
    double value = 0.0; // W_p = cost^(1/p)
    TransportPlan plan;
    double dual_gap = 0.0; // certified duality gap (absolute)
};

// Exact W_p between two finitely supported measures via the sorted quantile
// coupling; valid in dimension 1 only. O(n log n).
double wasserstein_1d(const DiscreteMeasure& a, const DiscreteMeasure& b, double p);

// Exact W_p via the transportation network simplex. Every solve is
// certified: primal feasibility, complementary slackness and a duality gap
// below 1e-9 * (1 + cost), else the solver reports failure rather than
// returning an uncertified value. Requires |a| * |b| <= 1e7 entries.
WassersteinResult wasserstein_lp(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                 double p);

// Independent oracle for small instances: minimum over all permutation
// matchings (equal counts <= 8 with uniform weights) or over all basic
// feasible solutions of the transport polytope (|a| + |b| <= 10).
double wasserstein_bruteforce(const DiscreteMeasure& a, const DiscreteMeasure& b,
                              double p);

struct MetricReport {
    bool pass = true;
    double max_symmetry_gap = 0.0;      // |W(a,b) - W(b,a)|
    double max_triangle_violation = 0.0; // max over triples of W(a,c)-W(a,b)-W(b,c)
    int identity_failures = 0;           // W==0 must hold iff the measures coincide
};

// Checks metric axioms of W_p over a list of measures (all pairs and triples).
MetricReport metric_check(const std::vector<DiscreteMeasure>& measures, double p,
                          double tol = 1e-8);

} // namespace wquant

#endif
