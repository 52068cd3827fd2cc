#ifndef WQUANT_QUAD_HPP
#define WQUANT_QUAD_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace wquant {

// Gauss-Legendre nodes and weights on [-1, 1], computed once per order by
// Newton iteration on the Legendre recurrence and cached.
struct GaussRule {
    std::vector<double> x, w;
};

inline const GaussRule& gauss_legendre(int n) {
    static std::vector<GaussRule> cache(129);
    if (n < 1) n = 1;
    if (n > 128) n = 128;
    GaussRule& r = cache[n];
    if (!r.x.empty()) return r;

    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess for the i-th root.
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                // one clean-up iteration after convergence
                p0 = 1.0; p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (t * p1 - p0) / (t * t - 1.0);
                break;
            }
        }
        r.x[i] = -t;
        r.x[n - 1 - i] = t;
        r.w[i] = 2.0 / ((1.0 - t * t) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

// Odometer over a d-dimensional index grid with per-axis sizes `sizes`.
// Returns false when the sweep is complete.
inline bool advance_index(std::vector<int>& idx, const std::vector<int>& sizes) {
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
        if (++idx[k] < sizes[k]) return true;
        idx[k] = 0;
    }
    return false;
}

} // namespace wquant

#endif
