#ifndef WQUANT_KERNELS_HPP
#define WQUANT_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <string>

// Data-parallel inner loops, provided as a scalar reference implementation
// plus an AVX2 variant selected at runtime. The two implementations are
// kept arithmetically step-equivalent where that is cheap (no FMA
// contraction, same per-element operation order), so nearest-neighbor
// results match the reference exactly and reductions agree to rounding.
//
// Selection: best available ISA by default, overridable with the
// WQUANT_KERNEL environment variable ("scalar" or "avx2") or force_isa().

namespace wquant::kernels {

enum class Isa { scalar, avx2 };

// The active implementation (resolved once, then cached).
Isa active_isa();
std::string isa_name();

// Force an implementation (throws if unavailable on this CPU). Intended for
// equivalence tests and benchmarking.
void force_isa(Isa isa);

// For each of the n query points (flat, n x d row-major), the index of the
// nearest of the m sites (flat, m x d) and the squared distance to it. Ties
// resolve to the lowest site index in every implementation.
void nearest_site(const double* pts, std::size_t n,
                  const double* sites, std::size_t m, std::size_t d,
                  std::int32_t* out_idx, double* out_sq);

// out[i*m + j] = |x_i - y_j|^p for the full n x m block.
void cost_matrix(const double* xs, std::size_t n,
                 const double* ys, std::size_t m, std::size_t d,
                 double p, double* out);

// sum_i w_i * |x_i - c|^p.
double weighted_pow_dist(const double* xs, const double* ws, std::size_t n,
                         const double* c, std::size_t d, double p);

// sum_i w_i * |x_i - y_i|^p over paired rows (both arrays n x d).
double weighted_pow_dist_pairs(const double* xs, const double* ys,
                               const double* ws, std::size_t n,
                               std::size_t d, double p);

// Argmin of reduced cost c[j] - pi_src + pi_snk[j] over j in [0, len);
// returns the minimum value in *best and its index in *arg. Used by the
// transport solver's pivot search over one row segment of the cost matrix.
void min_reduced_cost(const double* cost, const double* pi_snk,
                      double pi_src, std::size_t len,
                      double* best, std::size_t* arg);

namespace detail {
struct Impl {
    void (*nearest_site)(const double*, std::size_t, const double*, std::size_t,
                         std::size_t, std::int32_t*, double*);
    void (*cost_matrix)(const double*, std::size_t, const double*, std::size_t,
                        std::size_t, double, double*);
    double (*weighted_pow_dist)(const double*, const double*, std::size_t,
                                const double*, std::size_t, double);
    double (*weighted_pow_dist_pairs)(const double*, const double*, const double*,
                                      std::size_t, std::size_t, double);
    void (*min_reduced_cost)(const double*, const double*, double, std::size_t,
                             double*, std::size_t*);
};
const Impl& scalar_impl();
const Impl& avx2_impl(); // valid only if avx2_supported()
bool avx2_supported();
} // namespace detail

} // namespace wquant::kernels

#endif
