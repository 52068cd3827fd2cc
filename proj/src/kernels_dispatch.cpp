#include "wquant/kernels.hpp"

#include "wquant/common.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace wquant::kernels {

namespace {

std::atomic<const detail::Impl*> g_impl{nullptr};
std::atomic<Isa> g_isa{Isa::scalar};

Isa pick_default() {
    if (const char* env = std::getenv("WQUANT_KERNEL")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!detail::avx2_supported())
                fail_invalid("WQUANT_KERNEL=avx2 but this CPU has no AVX2");
            return Isa::avx2;
        }
        fail_invalid(std::string("unknown WQUANT_KERNEL value '") + env +
                     "' (expected scalar or avx2)");
    }
    return detail::avx2_supported() ? Isa::avx2 : Isa::scalar;
}

const detail::Impl* resolve() {
    const detail::Impl* impl = g_impl.load(std::memory_order_acquire);
    if (impl) return impl;
    Isa isa = pick_default();
    impl = (isa == Isa::avx2) ? &detail::avx2_impl() : &detail::scalar_impl();
    g_isa.store(isa, std::memory_order_relaxed);
    g_impl.store(impl, std::memory_order_release);
    return impl;
}

} // namespace

Isa active_isa() {
    resolve();
    return g_isa.load(std::memory_order_relaxed);
}

std::string isa_name() { return active_isa() == Isa::avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !detail::avx2_supported())
        fail_invalid("AVX2 kernels requested but unsupported on this CPU");
    g_isa.store(isa, std::memory_order_relaxed);
    g_impl.store(isa == Isa::avx2 ? &detail::avx2_impl() : &detail::scalar_impl(),
                 std::memory_order_release);
}

void nearest_site(const double* pts, std::size_t n,
                  const double* sites, std::size_t m, std::size_t d,
                  std::int32_t* out_idx, double* out_sq) {
    resolve()->nearest_site(pts, n, sites, m, d, out_idx, out_sq);
}

void cost_matrix(const double* xs, std::size_t n,
                 const double* ys, std::size_t m, std::size_t d,
                 double p, double* out) {
    resolve()->cost_matrix(xs, n, ys, m, d, p, out);
}

double weighted_pow_dist(const double* xs, const double* ws, std::size_t n,
                         const double* c, std::size_t d, double p) {
    return resolve()->weighted_pow_dist(xs, ws, n, c, d, p);
}

double weighted_pow_dist_pairs(const double* xs, const double* ys,
                               const double* ws, std::size_t n,
                               std::size_t d, double p) {
    return resolve()->weighted_pow_dist_pairs(xs, ys, ws, n, d, p);
}

void min_reduced_cost(const double* cost, const double* pi_snk,
                      double pi_src, std::size_t len,
                      double* best, std::size_t* arg) {
    resolve()->min_reduced_cost(cost, pi_snk, pi_src, len, best, arg);
}

} // namespace wquant::kernels
