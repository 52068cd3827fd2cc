#include "wquant/ot.hpp"

#include <algorithm>
#include <numeric>

namespace wquant {

// Quantile (monotone) coupling between sorted atom lists. For costs |x-y|^p
// with p >= 1 this coupling is optimal on the line, so the sweep below is an
// exact W_p evaluation.
double wasserstein_1d(const DiscreteMeasure& a, const DiscreteMeasure& b, double p) {
    if (a.dim != 1 || b.dim != 1) fail_invalid("wasserstein_1d requires dimension 1");
    if (!(p >= 1.0)) fail_invalid("wasserstein_1d requires p >= 1");

    auto sorted_order = [](const DiscreteMeasure& m) {
        std::vector<std::size_t> ord(m.size());
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(), [&](std::size_t u, std::size_t v) {
            return m.xs[u] < m.xs[v];
        });
        return ord;
    };
    std::vector<std::size_t> oa = sorted_order(a);
    std::vector<std::size_t> ob = sorted_order(b);

    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = a.ws[oa[0]], rb = b.ws[ob[0]];
    while (true) {
        double f = std::min(ra, rb);
        if (f > 0.0) {
            double diff = std::abs(a.xs[oa[i]] - b.xs[ob[j]]);
            double c;
            if (p == 1.0) c = diff;
            else if (p == 2.0) c = diff * diff;
            else if (p == 3.0) c = diff * diff * diff;
            else c = std::pow(diff, p);
            cost += f * c;
        }
        ra -= f;
        rb -= f;
        bool a_done = (i + 1 == oa.size());
        bool b_done = (j + 1 == ob.size());
        if (ra <= 0.0 && !a_done) {
            ++i;
            ra = a.ws[oa[i]];
        } else if (rb <= 0.0 && !b_done) {
            ++j;
            rb = b.ws[ob[j]];
        } else if (a_done && b_done) {
            break;
        } else if (a_done) {
            ++j;
            rb = b.ws[ob[j]];
        } else {
            ++i;
            ra = a.ws[oa[i]];
        }
    }
    return std::pow(cost, 1.0 / p);
}

} // namespace wquant
