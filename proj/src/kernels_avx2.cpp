#include "wquant/kernels.hpp"

#include <cmath>
#include <vector>

// AVX2 kernels. Vectorization runs across points (or matrix columns) with
// coordinates transposed into contiguous per-dimension arrays, so lanes hold
// four consecutive elements and the per-element arithmetic is the same
// mul-then-add sequence as the scalar reference. Tie-breaking in the argmin
// kernels reproduces the reference exactly (lowest index wins).

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
#define WQUANT_X86 1
#else
#define WQUANT_X86 0
#endif

#if WQUANT_X86
#include <immintrin.h>
#endif

namespace wquant::kernels::detail {

#if WQUANT_X86

namespace {

// Transpose an n x d row-major array into d contiguous rows of length n.
void transpose(const double* a, std::size_t n, std::size_t d, double* out) {
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < n; ++i)
            out[k * n + i] = a[i * d + k];
}

__attribute__((target("avx2")))
void k_nearest_site(const double* pts, std::size_t n,
                    const double* sites, std::size_t m, std::size_t d,
                    std::int32_t* out_idx, double* out_sq) {
    std::vector<double> tp(n * d);
    transpose(pts, n, d, tp.data());

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d best = _mm256_set1_pd(HUGE_VAL);
        __m256d arg = _mm256_set1_pd(-1.0);
        for (std::size_t j = 0; j < m; ++j) {
            const double* s = sites + j * d;
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t k = 0; k < d; ++k) {
                __m256d x = _mm256_loadu_pd(tp.data() + k * n + i);
                __m256d t = _mm256_sub_pd(x, _mm256_set1_pd(s[k]));
                acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
            }
            __m256d lt = _mm256_cmp_pd(acc, best, _CMP_LT_OQ);
            best = _mm256_blendv_pd(best, acc, lt);
            arg = _mm256_blendv_pd(arg, _mm256_set1_pd(double(j)), lt);
        }
        alignas(32) double b[4], a[4];
        _mm256_store_pd(b, best);
        _mm256_store_pd(a, arg);
        for (int l = 0; l < 4; ++l) {
            out_sq[i + l] = b[l];
            out_idx[i + l] = static_cast<std::int32_t>(a[l]);
        }
    }
    if (i < n)
        scalar_impl().nearest_site(pts + i * d, n - i, sites, m, d,
                                   out_idx + i, out_sq + i);
}

__attribute__((target("avx2")))
void k_cost_matrix(const double* xs, std::size_t n,
                   const double* ys, std::size_t m, std::size_t d,
                   double p, double* out) {
    std::vector<double> ty(m * d);
    transpose(ys, m, d, ty.data());

    for (std::size_t i = 0; i < n; ++i) {
        const double* x = xs + i * d;
        double* row = out + i * m;
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t k = 0; k < d; ++k) {
                __m256d y = _mm256_loadu_pd(ty.data() + k * m + j);
                __m256d t = _mm256_sub_pd(_mm256_set1_pd(x[k]), y);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
            }
            if (p == 1.0) {
                acc = _mm256_sqrt_pd(acc);
            } else if (p == 3.0) {
                acc = _mm256_mul_pd(_mm256_sqrt_pd(acc), acc);
            } else if (p != 2.0) {
                alignas(32) double v[4];
                _mm256_store_pd(v, acc);
                for (int l = 0; l < 4; ++l) v[l] = std::pow(std::sqrt(v[l]), p);
                acc = _mm256_load_pd(v);
            }
            _mm256_storeu_pd(row + j, acc);
        }
        for (; j < m; ++j) {
            const double* y = ys + j * d;
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                double t = x[k] - y[k];
                acc += t * t;
            }
            if (p == 2.0) row[j] = acc;
            else if (p == 1.0) row[j] = std::sqrt(acc);
            else if (p == 3.0) row[j] = std::sqrt(acc) * acc;
            else row[j] = std::pow(std::sqrt(acc), p);
        }
    }
}

__attribute__((target("avx2")))
double k_weighted_pow_dist(const double* xs, const double* ws, std::size_t n,
                           const double* c, std::size_t d, double p) {
    if (p != 1.0 && p != 2.0 && p != 3.0)
        return scalar_impl().weighted_pow_dist(xs, ws, n, c, d, p);

    std::vector<double> tx(n * d);
    transpose(xs, n, d, tx.data());

    __m256d sum = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < d; ++k) {
            __m256d x = _mm256_loadu_pd(tx.data() + k * n + i);
            __m256d t = _mm256_sub_pd(x, _mm256_set1_pd(c[k]));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
        }
        if (p == 1.0) acc = _mm256_sqrt_pd(acc);
        else if (p == 3.0) acc = _mm256_mul_pd(_mm256_sqrt_pd(acc), acc);
        __m256d w = _mm256_loadu_pd(ws + i);
        sum = _mm256_add_pd(sum, _mm256_mul_pd(w, acc));
    }
    alignas(32) double v[4];
    _mm256_store_pd(v, sum);
    double total = v[0] + v[1] + v[2] + v[3];
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double t = xs[i * d + k] - c[k];
            acc += t * t;
        }
        if (p == 1.0) acc = std::sqrt(acc);
        else if (p == 3.0) acc = std::sqrt(acc) * acc;
        total += ws[i] * acc;
    }
    return total;
}

__attribute__((target("avx2")))
double k_weighted_pow_dist_pairs(const double* xs, const double* ys,
                                 const double* ws, std::size_t n,
                                 std::size_t d, double p) {
    if (p != 1.0 && p != 2.0 && p != 3.0)
        return scalar_impl().weighted_pow_dist_pairs(xs, ys, ws, n, d, p);

    std::vector<double> tx(n * d), ty(n * d);
    transpose(xs, n, d, tx.data());
    transpose(ys, n, d, ty.data());

    __m256d sum = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < d; ++k) {
            __m256d x = _mm256_loadu_pd(tx.data() + k * n + i);
            __m256d y = _mm256_loadu_pd(ty.data() + k * n + i);
            __m256d t = _mm256_sub_pd(x, y);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
        }
        if (p == 1.0) acc = _mm256_sqrt_pd(acc);
        else if (p == 3.0) acc = _mm256_mul_pd(_mm256_sqrt_pd(acc), acc);
        __m256d w = _mm256_loadu_pd(ws + i);
        sum = _mm256_add_pd(sum, _mm256_mul_pd(w, acc));
    }
    alignas(32) double v[4];
    _mm256_store_pd(v, sum);
    double total = v[0] + v[1] + v[2] + v[3];
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double t = xs[i * d + k] - ys[i * d + k];
            acc += t * t;
        }
        if (p == 1.0) acc = std::sqrt(acc);
        else if (p == 3.0) acc = std::sqrt(acc) * acc;
        total += ws[i] * acc;
    }
    return total;
}

__attribute__((target("avx2")))
void k_min_reduced_cost(const double* cost, const double* pi_snk,
                        double pi_src, std::size_t len,
                        double* best, std::size_t* arg) {
    __m256d bestv = _mm256_set1_pd(HUGE_VAL);
    __m256d argv = _mm256_setzero_pd();
    const __m256d psrc = _mm256_set1_pd(pi_src);

    std::size_t j = 0;
    for (; j + 4 <= len; j += 4) {
        __m256d c = _mm256_loadu_pd(cost + j);
        __m256d s = _mm256_loadu_pd(pi_snk + j);
        __m256d rc = _mm256_add_pd(_mm256_sub_pd(c, psrc), s);
        __m256d lt = _mm256_cmp_pd(rc, bestv, _CMP_LT_OQ);
        bestv = _mm256_blendv_pd(bestv, rc, lt);
        argv = _mm256_blendv_pd(argv, _mm256_set1_pd(double(j)), lt);
    }
    alignas(32) double bv[4], av[4];
    _mm256_store_pd(bv, bestv);
    _mm256_store_pd(av, argv);

    double b = HUGE_VAL;
    std::size_t a = 0;
    // Lane l of block starting at av[l] holds element av[l] + l; among equal
    // minima pick the smallest index, matching the reference scan order.
    for (int l = 0; l < 4; ++l) {
        if (av[l] < 0) continue;
        std::size_t idx = static_cast<std::size_t>(av[l]) + l;
        if (bv[l] < b || (bv[l] == b && idx < a)) {
            b = bv[l];
            a = idx;
        }
    }
    for (; j < len; ++j) {
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

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

const Impl& avx2_impl() {
    static const Impl impl = {
        k_nearest_site,
        k_cost_matrix,
        k_weighted_pow_dist,
        k_weighted_pow_dist_pairs,
        k_min_reduced_cost,
    };
    return impl;
}

#else // !WQUANT_X86

bool avx2_supported() { return false; }

const Impl& avx2_impl() { return scalar_impl(); }

#endif

} // namespace wquant::kernels::detail
