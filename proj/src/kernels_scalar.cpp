#include "wquant/kernels.hpp"

#include <cmath>

// Reference kernels. Compiled with contraction disabled (see CMakeLists) so
// the AVX2 variants can reproduce the same per-element rounding.

namespace wquant::kernels::detail {

namespace {

void k_nearest_site(const double* pts, std::size_t n,
                    const double* sites, std::size_t m, std::size_t d,
                    std::int32_t* out_idx, double* out_sq) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = pts + i * d;
        double best = HUGE_VAL;
        std::int32_t arg = -1;
        for (std::size_t j = 0; j < m; ++j) {
            const double* s = sites + j * d;
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                double t = x[k] - s[k];
                acc += t * t;
            }
            if (acc < best) { // strict: first (lowest) index wins ties
                best = acc;
                arg = static_cast<std::int32_t>(j);
            }
        }
        out_idx[i] = arg;
        out_sq[i] = best;
    }
}

double pow_sq(double sq, double p) {
    if (p == 2.0) return sq;
    double r = std::sqrt(sq);
    if (p == 1.0) return r;
    if (p == 3.0) return r * sq;
    return std::pow(r, p);
}

void k_cost_matrix(const double* xs, std::size_t n,
                   const double* ys, std::size_t m, std::size_t d,
                   double p, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = xs + i * d;
        double* row = out + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double* y = ys + j * d;
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                double t = x[k] - y[k];
                acc += t * t;
            }
            row[j] = pow_sq(acc, p);
        }
    }
}

double k_weighted_pow_dist(const double* xs, const double* ws, std::size_t n,
                           const double* c, std::size_t d, double p) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = xs + i * d;
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double t = x[k] - c[k];
            acc += t * t;
        }
        total += ws[i] * pow_sq(acc, p);
    }
    return total;
}

double k_weighted_pow_dist_pairs(const double* xs, const double* ys,
                                 const double* ws, std::size_t n,
                                 std::size_t d, double p) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = xs + i * d;
        const double* y = ys + i * d;
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double t = x[k] - y[k];
            acc += t * t;
        }
        total += ws[i] * pow_sq(acc, p);
    }
    return total;
}

void k_min_reduced_cost(const double* cost, const double* pi_snk,
                        double pi_src, std::size_t len,
                        double* best, std::size_t* arg) {
    double b = HUGE_VAL;
    std::size_t a = 0;
    for (std::size_t j = 0; j < len; ++j) {
        double rc = cost[j] - pi_src + pi_snk[j];
        if (rc < b) {
            b = rc;
            a = j;
        }
    }
    *best = b;
    *arg = a;
}

} // namespace

const Impl& scalar_impl() {
    static const Impl impl = {
        k_nearest_site,
        k_cost_matrix,
        k_weighted_pow_dist,
        k_weighted_pow_dist_pairs,
        k_min_reduced_cost,
    };
    return impl;
}

} // namespace wquant::kernels::detail
