#include "wquant/tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wquant {

namespace {

double pow_p(double v, double p) {
    if (p == 1.0) return v;
    if (p == 2.0) return v * v;
    if (p == 3.0) return v * v * v;
    return std::pow(v, p);
}

double root_p(double v, double p) {
    if (p == 1.0) return v;
    if (p == 2.0) return std::sqrt(v);
    return std::pow(v, 1.0 / p);
}

// surface area of the unit (d-1)-sphere, 2 pi^(d/2) / Gamma(d/2)
double unit_sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

// integral (|x| - R)_+^p over the measure, in p-th-power scale
double trunc_power(const Measure& mu, double R, double p) {
    if (const auto* dm = std::get_if<DiscreteMeasure>(&mu.v)) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dm->size(); ++i) {
            double r = norm2(dm->x(i), dm->dim);
            if (r > R) acc += dm->ws[i] * pow_p(r - R, p);
        }
        return acc;
    }
    if (const auto* f = std::get_if<DensityMeasure>(&mu.v)) {
        const int d = f->dim;
        return density_integral(*f, [d, R, p](const double* x) {
            double r = norm2(x, d);
            return r > R ? pow_p(r - R, p) : 0.0;
        });
    }
    const Mixture& mix = std::get<Mixture>(mu.v);
    double acc = 0.0;
    for (std::size_t i = 0; i < mix.parts.size(); ++i)
        acc += mix.weights[i] * trunc_power(*mix.parts[i], R, p);
    return acc;
}

// deterministic unit directions for the density envelope probes
std::vector<Point> probe_directions(int d) {
    std::vector<Point> dirs;
    if (d == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
    } else if (d == 2) {
        const int n = 128;
        for (int i = 0; i < n; ++i) {
            double t = 2.0 * M_PI * (i + 0.5) / n;
            dirs.push_back({std::cos(t), std::sin(t)});
        }
    } else if (d == 3) {
        // Fibonacci spiral on the sphere
        const int n = 256;
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / n;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double t = ga * i;
            dirs.push_back({r * std::cos(t), r * std::sin(t), z});
        }
    } else {
        Rng rng(99);
        for (int k = 0; k < d; ++k) {
            Point plus(d, 0.0), minus(d, 0.0);
            plus[k] = 1.0;
            minus[k] = -1.0;
            dirs.push_back(plus);
            dirs.push_back(minus);
        }
        for (int i = 0; i < 256; ++i) {
            Point u(d);
            double nrm = 0.0;
            while (nrm < 1e-12) {
                for (int k = 0; k < d; ++k) u[k] = rng.normal();
                nrm = norm2(u.data(), d);
            }
            for (int k = 0; k < d; ++k) u[k] /= nrm;
            dirs.push_back(u);
        }
    }
    return dirs;
}

} // namespace

Measure project_to_ball(const Measure& mu, double R) {
    if (!(R > 0.0)) fail_invalid("projection radius must be positive");
    const int d = mu.dim();
    auto clamp = [R](const Point& x) {
        double r = norm2(x.data(), (int)x.size());
        if (r <= R) return x;
        Point y = x;
        double s = R / r;
        for (double& v : y) v *= s;
        return y;
    };
    return pushforward(mu, clamp, d);
}

double truncation_error(const Measure& mu, double R, double p) {
    if (!(R > 0.0)) fail_invalid("truncation radius must be positive");
    if (!(p >= 1.0)) fail_invalid("truncation order p must be >= 1");
    double acc = trunc_power(mu, R, p);
    if (!std::isfinite(acc)) fail_moment("truncation cost is not finite");
    return root_p(acc, p);
}

TruncationReport check_decay_conditions(const DensityMeasure* density,
                                        const ShellMassSpec* shells,
                                        const DiscreteMeasure* atoms,
                                        const TailDecaySpec& spec) {
    if (!(spec.epsilon > 0.0)) fail_invalid("epsilon must be positive");
    if (!(spec.p >= 1.0)) fail_invalid("order p must be >= 1");
    if (!(spec.R > 0.0)) fail_invalid("truncation radius must be positive");
    if (!(spec.q > 1.0)) fail_invalid("atom decay exponent q must be > 1");

    TruncationReport rep;
    const double eps_p3 = pow_p(spec.epsilon, spec.p) / 3.0;

    // -- condition 1: pointwise density envelope, plus the AC tail cost -------
    if (density != nullptr) {
        const int d = density->dim;
        rep.sphere_constant =
            spec.sphere_constant > 0.0 ? spec.sphere_constant : unit_sphere_area(d);
        ConditionReport& c = rep.conditions[0];

        double r_max = 0.0;
        for (int k = 0; k < d; ++k) {
            double m = std::max(std::abs(density->support.lo[k]),
                                std::abs(density->support.hi[k]));
            r_max += m * m;
        }
        r_max = std::sqrt(r_max);

        if (r_max > spec.R) {
            const std::vector<Point> dirs = probe_directions(d);
            const int nr = 96;
            Point x(d);
            long probe = 0;
            for (int t = 0; t < nr; ++t) {
                double r = spec.R + (t + 0.5) * (r_max - spec.R) / nr;
                double thr = eps_p3 / (rep.sphere_constant *
                                       std::pow(r, spec.p + d + 1));
                for (const Point& u : dirs) {
                    for (int k = 0; k < d; ++k) x[k] = r * u[k];
                    double f = density->support.contains(x.data())
                                   ? density->pdf(x.data())
                                   : 0.0;
                    double margin = thr - f;
                    if (margin < c.worst_margin) {
                        c.worst_margin = margin;
                        c.offender = probe;
                    }
                    if (f > thr * (1.0 + 1e-12) + 1e-300) c.pass = false;
                    ++probe;
                }
            }
        }

        Measure wrapped{*density};
        rep.bound_ac = trunc_power(wrapped, spec.R, spec.p);
    } else {
        rep.sphere_constant =
            spec.sphere_constant > 0.0 ? spec.sphere_constant : 0.0;
    }

    // -- condition 2: shell masses, plus the SC tail cost ---------------------
    if (shells != nullptr) {
        ConditionReport& c = rep.conditions[1];
        const long j_min = (long)std::floor(spec.R);
        const double six_pi2 = 6.0 / (M_PI * M_PI);
        for (const auto& [j, mass] : shells->shell_masses) {
            if (mass < 0.0) fail_invalid("shell masses must be nonnegative");
            if (j < j_min) continue; // annulus (j, j+1] lies inside the ball
            const double reach = (double)j + 1.0 - spec.R; // sup of |x| - R on the shell
            const double thr = eps_p3 * six_pi2 / pow_p(reach, spec.p + 2.0);
            const double margin = thr - mass;
            if (margin < c.worst_margin) {
                c.worst_margin = margin;
                c.offender = j;
            }
            if (mass > thr * (1.0 + 1e-12) + 1e-300) c.pass = false;
            rep.bound_sc += mass * pow_p(reach, spec.p);
        }
    }

    // -- condition 3: atom decay, plus the exact atomic tail cost -------------
    if (atoms != nullptr) {
        ConditionReport& c = rep.conditions[2];
        const double zeta = std::riemann_zeta(spec.q);
        for (std::size_t i = 0; i < atoms->size(); ++i) {
            const double ck = atoms->ws[i];
            if (!(ck > 0.0)) fail_invalid("tail atom weights must be positive");
            const double r = norm2(atoms->x(i), atoms->dim);
            if (r <= spec.R) continue; // inside the ball: free of charge
            const long k = (long)i + 1;
            const double excess = r - spec.R;
            const double thr = eps_p3 / (pow_p(excess, spec.p) *
                                         std::pow((double)k, spec.q) * zeta);
            const double margin = thr - ck;
            if (margin < c.worst_margin) {
                c.worst_margin = margin;
                c.offender = k;
            }
            if (ck > thr * (1.0 + 1e-12) + 1e-300) c.pass = false;
            rep.bound_atomic += ck * pow_p(excess, spec.p);
        }
    }

    rep.conditions_pass =
        rep.conditions[0].pass && rep.conditions[1].pass && rep.conditions[2].pass;
    rep.total_bound = root_p(rep.bound_ac + rep.bound_sc + rep.bound_atomic, spec.p);
    if (!std::isfinite(rep.total_bound))
        fail_moment("tail cost bound is not finite");
    return rep;
}

} // namespace wquant
