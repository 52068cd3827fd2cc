#ifndef WQUANT_COMMON_HPP
#define WQUANT_COMMON_HPP

#include <cstddef>
#include <cstdio>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wquant {

// A point in R^d. Batches of points are stored flat, row-major (n x d),
// in plain double arrays so the hot kernels can run over them directly.
using Point = std::vector<double>;

struct Box {
    Point lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }

    Point center() const {
        Point c(lo.size());
        for (std::size_t k = 0; k < lo.size(); ++k) c[k] = 0.5 * (lo[k] + hi[k]);
        return c;
    }

    // Radius of the circumscribed ball around the box center.
    double circumradius() const {
        double s = 0.0;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            double h = 0.5 * (hi[k] - lo[k]);
            s += h * h;
        }
        return std::sqrt(s);
    }

    bool contains(const double* x) const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (x[k] < lo[k] || x[k] > hi[k]) return false;
        return true;
    }

    static Box hull(const Box& a, const Box& b) {
        Box r = a;
        for (std::size_t k = 0; k < r.lo.size(); ++k) {
            if (b.lo[k] < r.lo[k]) r.lo[k] = b.lo[k];
            if (b.hi[k] > r.hi[k]) r.hi[k] = b.hi[k];
        }
        return r;
    }
};

// Error taxonomy. Every failure the library can produce is an Error with a
// stable `kind` string so the CLI can map it to a message and exit code.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) { throw Error("invalid-input", msg); }
[[noreturn]] inline void fail_resource(const std::string& msg) { throw Error("resource-limit", msg); }
[[noreturn]] inline void fail_solver(const std::string& msg) { throw Error("solver-failure", msg); }
[[noreturn]] inline void fail_budget(const std::string& msg) { throw Error("budget-infeasible", msg); }
[[noreturn]] inline void fail_moment(const std::string& msg) { throw Error("moment-divergence", msg); }
[[noreturn]] inline void fail_sampler(const std::string& msg) { throw Error("sampler-inefficiency", msg); }

inline double sq_dist(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

inline double norm2(const double* a, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += a[k] * a[k];
    return std::sqrt(s);
}

// |v|^p from a squared norm; exact fast paths for the common exponents.
inline double pow_from_sq(double sq, double p) {
    if (p == 2.0) return sq;
    double r = std::sqrt(sq);
    if (p == 1.0) return r;
    if (p == 3.0) return r * sq;
    return std::pow(r, p);
}

// Fixed-format float printing. All reports and serialized artifacts funnel
// through this so that output is reproducible byte for byte.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_g(double v, int prec) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

} // namespace wquant

#endif
