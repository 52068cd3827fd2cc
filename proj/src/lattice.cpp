#include "wquant/lattice.hpp"

#include "wquant/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wquant {

namespace {

// --- small dense linear algebra (d <= 8) -------------------------------------

std::vector<double> mat_inverse(std::vector<double> a, int d) {
    std::vector<double> inv(d * d, 0.0);
    for (int i = 0; i < d; ++i) inv[i * d + i] = 1.0;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[r * d + col]) > std::abs(a[piv * d + col])) piv = r;
        if (std::abs(a[piv * d + col]) < 1e-12)
            fail_invalid("lattice basis is singular or badly conditioned");
        if (piv != col) {
            for (int c = 0; c < d; ++c) {
                std::swap(a[piv * d + c], a[col * d + c]);
                std::swap(inv[piv * d + c], inv[col * d + c]);
            }
        }
        double s =1.0 / a[col * d + col];
        for (int c = 0; c < d; ++c) {
            a[col * d + c] *= s;
            inv[col * d + c] *= s;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            double f = a[r * d + col];
            if (f == 0.0) continue;
            for (int c = 0; c < d; ++c) {
                a[r * d + c] -= f * a[col * d + c];
                inv[r * d + c] -= f * inv[col * d + c];
            }
        }
    }
    return inv;
}

// Solve a d x d system A x = b (Gaussian elimination with partial pivoting).
// Returns false if A is singular at the working tolerance.
bool solve_lin(std::vector<double> a, std::vector<double> b, int d, Point& out) {
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[r * d + col]) > std::abs(a[piv * d + col])) piv = r;
        if (std::abs(a[piv * d + col]) < 1e-10) return false;
        if (piv != col) {
            for (int c = 0; c < d; ++c) std::swap(a[piv * d + c], a[col * d + c]);
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < d; ++r) {
            double f = a[r * d + col] / a[col * d + col];
            if (f == 0.0) continue;
            for (int c = col; c < d; ++c) a[r * d + c] -= f * a[col * d + c];
            b[r] -= f * b[col];
        }
    }
    out.assign(d, 0.0);
    for (int r = d - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < d; ++c) acc -= a[r * d + c] * out[c];
        out[r] = acc / a[r * d + r];
    }
    return true;
}

// --- LLL size reduction (columns of B are the basis vectors) ------------------

void lll_reduce(std::vector<double>& B, int d) {
    auto col = [&](int j, int r) -> double& { return B[r * d + j]; };
    auto dot_cc = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (int r = 0; r < d; ++r) s += u[r] * v[r];
        return s;
    };
    auto get_col = [&](int j) {
        std::vector<double> v(d);
        for (int r = 0; r < d; ++r) v[r] = col(j, r);
        return v;
    };

    const double delta = 0.75;
    for (int iter = 0; iter < 1000; ++iter) {
        // Gram-Schmidt of the current columns.
        std::vector<std::vector<double>> gs(d);
        std::vector<std::vector<double>> mu(d, std::vector<double>(d, 0.0));
        std::vector<double> gs_norm2(d, 0.0);
        for (int i = 0; i < d; ++i) {
            gs[i] = get_col(i);
            for (int j = 0; j < i; ++j) {
                mu[i][j] = dot_cc(get_col(i), gs[j]) / gs_norm2[j];
                for (int r = 0; r < d; ++r) gs[i][r] -= mu[i][j] * gs[j][r];
            }
            gs_norm2[i] = dot_cc(gs[i], gs[i]);
            if (gs_norm2[i] < 1e-14) fail_invalid("lattice basis is singular");
        }

        // Size reduction.
        bool changed = false;
        for (int i = 1; i < d; ++i) {
            for (int j = i - 1; j >= 0; --j) {
                double m = dot_cc(get_col(i), gs[j]) / gs_norm2[j];
                long q = std::lround(m);
                if (q != 0) {
                    for (int r = 0; r < d; ++r) col(i, r) -= q * col(j, r);
                    changed = true;
                }
            }
        }
        if (changed) continue; // recompute Gram-Schmidt before the swap test

        // Lovasz condition.
        bool swapped = false;
        for (int i = 0; i + 1 < d; ++i) {
            double lhs = gs_norm2[i + 1] + mu[i + 1][i] * mu[i + 1][i] * gs_norm2[i];
            if (lhs < delta * gs_norm2[i]) {
                for (int r = 0; r < d; ++r) std::swap(col(i, r), col(i + 1, r));
                swapped = true;
                break;
            }
        }
        if (!swapped) return;
    }
    fail_solver("LLL reduction did not converge");
}

// --- Voronoi geometry ----------------------------------------------------------

// Candidate nonzero lattice vectors around the origin for relevance testing.
std::vector<std::pair<CellId, Point>> candidate_vectors(const Lattice& L, int reach) {
    std::vector<std::pair<CellId, Point>> cands;
    std::vector<int> sizes(L.dim, 2 * reach + 1), idx(L.dim, 0);
    do {
        CellId z(L.dim);
        bool zero = true;
        for (int k = 0; k < L.dim; ++k) {
            z[k] = idx[k] - reach;
            if (z[k] != 0) zero = false;
        }
        if (!zero) cands.emplace_back(z, L.site_of(1.0, z));
    } while (advance_index(idx, sizes));
    return cands;
}

// Facet-defining ("relevant") vectors: v is relevant iff 0 and v are the
// strict nearest lattice points to v/2.
std::vector<Point> relevant_vectors(const Lattice& L) {
    auto cands = candidate_vectors(L, 2);
    std::vector<Point> rel;
    const int d = L.dim;
    for (const auto& [z, v] : cands) {
        double vn2 = 0.0;
        for (int k = 0; k < d; ++k) vn2 += v[k] * v[k];
        double half2 = 0.25 * vn2; // |v/2 - 0|^2 == |v/2 - v|^2
        bool relevant = true;
        for (const auto& [z2, w] : cands) {
            if (&z2 == &z) continue;
            double dist2 = 0.0;
            for (int k = 0; k < d; ++k) {
                double t = 0.5 * v[k] - w[k];
                dist2 += t * t;
            }
            if (dist2 < half2 - 1e-12 * (1.0 + half2)) {
                relevant = false;
                break;
            }
            // A tie with some other point (e.g. v/2 itself a lattice point)
            // means v is not facet-defining either.
            if (dist2 <= half2 + 1e-12 * (1.0 + half2)) {
                bool is_v = true;
                for (int k = 0; k < d; ++k)
                    if (w[k] != v[k]) { is_v = false; break; }
                if (!is_v) {
                    relevant = false;
                    break;
                }
            }
        }
        if (relevant) rel.push_back(v);
    }
    return rel;
}

// Vertices of V_0: intersect d facet hyperplanes x . v = |v|^2 / 2 and keep
// points inside every half-space. Deduplicated, deterministically ordered.
std::vector<Point> cell_vertices_from_facets(const std::vector<Point>& rel, int d) {
    const std::size_t m = rel.size();
    if (m < static_cast<std::size_t>(d)) fail_solver("too few facets for a bounded cell");
    std::vector<double> norms2(m);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += rel[i][k] * rel[i][k];
        norms2[i] = s;
    }

    std::vector<Point> verts;
    std::vector<std::size_t> c(d);
    for (int k = 0; k < d; ++k) c[k] = k;
    while (true) {
        std::vector<double> A(d * d);
        std::vector<double> b(d);
        for (int r = 0; r < d; ++r) {
            for (int k = 0; k < d; ++k) A[r * d + k] = rel[c[r]][k];
            b[r] = 0.5 * norms2[c[r]];
        }
        Point x;
        if (solve_lin(A, b, d, x)) {
            bool inside = true;
            for (std::size_t i = 0; i < m && inside; ++i) {
                double dot = 0.0;
                for (int k = 0; k < d; ++k) dot += x[k] * rel[i][k];
                if (dot > 0.5 * norms2[i] + 1e-9) inside = false;
            }
            if (inside) verts.push_back(x);
        }
        // next combination
        int k = d - 1;
        while (k >= 0 && c[k] == m - static_cast<std::size_t>(d - k)) --k;
        if (k < 0) break;
        ++c[k];
        for (int j = k + 1; j < d; ++j) c[j] = c[j - 1] + 1;
    }
    if (verts.empty()) fail_solver("Voronoi vertex enumeration found no vertex");

    std::sort(verts.begin(), verts.end());
    std::vector<Point> uniq;
    for (const Point& v : verts) {
        if (!uniq.empty()) {
            double dd = sq_dist(v.data(), uniq.back().data(), d);
            if (dd < 1e-18) continue;
        }
        uniq.push_back(v);
    }
    return uniq;
}

VoronoiGeometry compute_geometry(const Lattice& L) {
    VoronoiGeometry g;
    switch (L.kind) {
    case LatticeKind::Zd: {
        g.covering_radius = 0.5 * std::sqrt(static_cast<double>(L.dim));
        g.relevant_vectors.reserve(2 * L.dim);
        for (int k = 0; k < L.dim; ++k) {
            Point e(L.dim, 0.0);
            e[k] = 1.0;
            g.relevant_vectors.push_back(e);
            e[k] = -1.0;
            g.relevant_vectors.push_back(e);
        }
        // cube corners (+-1/2, ..., +-1/2)
        std::vector<int> sizes(L.dim, 2), idx(L.dim, 0);
        do {
            Point v(L.dim);
            for (int k = 0; k < L.dim; ++k) v[k] = idx[k] ? 0.5 : -0.5;
            g.vertices.push_back(v);
        } while (advance_index(idx, sizes));
        std::sort(g.vertices.begin(), g.vertices.end());
        break;
    }
    case LatticeKind::A2: {
        g.covering_radius = 1.0 / std::sqrt(3.0);
        g.relevant_vectors = relevant_vectors(L);
        g.vertices = cell_vertices_from_facets(g.relevant_vectors, L.dim);
        break;
    }
    case LatticeKind::Dn: {
        // Deep holes: (1, 0, ..., 0) at distance 1 and (1/2, ..., 1/2) at
        // distance sqrt(n)/2; the covering radius is the larger of the two.
        g.covering_radius = std::max(1.0, 0.5 * std::sqrt(static_cast<double>(L.dim)));
        g.relevant_vectors = relevant_vectors(L);
        if (L.dim <= 4)
            g.vertices = cell_vertices_from_facets(g.relevant_vectors, L.dim);
        break;
    }
    case LatticeKind::general: {
        g.relevant_vectors = relevant_vectors(L);
        g.vertices = cell_vertices_from_facets(g.relevant_vectors, L.dim);
        double best = 0.0;
        for (const Point& v : g.vertices) {
            double n2 = 0.0;
            for (int k = 0; k < L.dim; ++k) n2 += v[k] * v[k];
            best = std::max(best, n2);
        }
        g.covering_radius = std::sqrt(best);
        break;
    }
    }
    // Voronoi cells of lattices are centrally symmetric convex bodies, so the
    // diameter is twice the circumradius.
    g.diameter = 2.0 * g.covering_radius;
    return g;
}

} // namespace

const char* lattice_kind_name(LatticeKind kind) {
    switch (kind) {
    case LatticeKind::Zd: return "Zd";
    case LatticeKind::Dn: return "Dn";
    case LatticeKind::A2: return "A2";
    case LatticeKind::general: return "general";
    }
    return "?";
}

Lattice make_lattice(LatticeKind kind, int dim, const std::vector<double>& basis) {
    Lattice L;
    L.kind = kind;
    L.dim = dim;
    switch (kind) {
    case LatticeKind::Zd:
        if (dim < 1 || dim > 8) fail_invalid("Zd lattice supports dim 1..8");
        L.basis.assign(dim * dim, 0.0);
        for (int k = 0; k < dim; ++k) L.basis[k * dim + k] = 1.0;
        break;
    case LatticeKind::Dn: {
        if (dim < 2 || dim > 8) fail_invalid("Dn lattice supports dim 2..8");
        // Columns: (-1,-1,0,...), (1,-1,0,...), then (0,...,1,-1,...) shifts.
        L.basis.assign(dim * dim, 0.0);
        L.basis[0 * dim + 0] = -1.0;
        L.basis[1 * dim + 0] = -1.0;
        L.basis[0 * dim + 1] = 1.0;
        L.basis[1 * dim + 1] = -1.0;
        for (int j = 2; j < dim; ++j) {
            L.basis[(j - 1) * dim + j] = 1.0;
            L.basis[j * dim + j] = -1.0;
        }
        break;
    }
    case LatticeKind::A2:
        if (dim != 2) fail_invalid("A2 lattice requires dim == 2");
        L.basis = {1.0, 0.5, 0.0, 0.5 * std::sqrt(3.0)};
        break;
    case LatticeKind::general: {
        if (dim < 1 || dim > 4) fail_invalid("general lattice supports dim 1..4");
        if (basis.size() != static_cast<std::size_t>(dim) * dim)
            fail_invalid("general lattice needs a d x d basis");
        for (double v : basis)
            if (!std::isfinite(v)) fail_invalid("basis contains a non-finite value");
        L.basis = basis;
        lll_reduce(L.basis, dim);
        break;
    }
    }
    L.inv = mat_inverse(L.basis, dim);
    L.geom = compute_geometry(L);
    return L;
}

namespace {

// Generic decode: Babai rounding plus an exhaustive offset search, expanding
// the search radius until the result is certified by the covering radius.
CellId decode_search(const Lattice& L, double h, const Point& x) {
    const int d = L.dim;
    std::vector<double> y(d, 0.0); // B^{-1} x / h
    for (int r = 0; r < d; ++r) {
        double acc = 0.0;
        for (int c = 0; c < d; ++c) acc += L.inv[r * d + c] * x[c];
        y[r] = acc / h;
    }
    std::vector<long> z0(d);
    for (int r = 0; r < d; ++r) z0[r] = std::lround(y[r]);

    const double cert = h * L.geom.covering_radius;
    const double cert2 = cert * cert * (1.0 + 1e-9) + 1e-300;

    for (int reach = 1; reach <= 3; ++reach) {
        double best = HUGE_VAL;
        CellId best_id;
        std::vector<int> sizes(d, 2 * reach + 1), idx(d, 0);
        CellId cand(d);
        do {
            for (int k = 0; k < d; ++k)
                cand[k] = static_cast<int>(z0[k]) + idx[k] - reach;
            Point s = L.site_of(h, cand);
            double dist2 = sq_dist(x.data(), s.data(), d);
            if (dist2 < best) {
                best = dist2;
                best_id = cand;
            } else if (dist2 == best && cand < best_id) {
                best_id = cand;
            }
        } while (advance_index(idx, sizes));
        if (best <= cert2) return best_id;
    }
    fail_solver("lattice decode search failed to certify a nearest point");
}

} // namespace

CellId decode(const Lattice& L, double h, const Point& x) {
    if (!(h > 0.0)) fail_invalid("lattice scale h must be positive");
    if (static_cast<int>(x.size()) != L.dim) fail_invalid("decode: point has wrong dimension");
    if (L.kind == LatticeKind::Zd) {
        CellId id(L.dim);
        for (int k = 0; k < L.dim; ++k) {
            // ceil(x/h - 1/2): nearest integer, exact halves resolve downward
            // so equidistant points go to the lexicographically smaller cell.
            id[k] = static_cast<int>(std::ceil(x[k] / h - 0.5));
        }
        return id;
    }
    return decode_search(L, h, x);
}

void decode_batch(const Lattice& L, double h, const double* xs, std::size_t n,
                  std::vector<CellId>& out) {
    out.resize(n);
    Point x(L.dim);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(xs + i * L.dim, xs + (i + 1) * L.dim, x.begin());
        out[i] = decode(L, h, x);
    }
}

long covering_count(const Lattice& L, double h, double R) {
    if (!(h > 0.0) || !(R >= 0.0)) fail_invalid("covering_count needs h > 0 and R >= 0");
    const int d = L.dim;
    const double reach = R + h * L.geom.covering_radius;
    const double tol = 1e-12 * (1.0 + reach);

    // Per-axis bounds: |lambda_k| = |row_k(B^{-1}) . s| <= ||row_k|| * reach / h.
    std::vector<long> lim(d);
    double est = 1.0;
    for (int r = 0; r < d; ++r) {
        double n2 = 0.0;
        for (int c = 0; c < d; ++c) n2 += L.inv[r * d + c] * L.inv[r * d + c];
        lim[r] = static_cast<long>(std::floor(std::sqrt(n2) * reach / h + 1e-9)) + 1;
        est *= 2.0 * lim[r] + 1.0;
    }
    if (est > 1e8) fail_resource("covering_count enumeration would exceed 1e8 cells");

    std::vector<int> sizes(d), idx(d, 0);
    for (int r = 0; r < d; ++r) sizes[r] = static_cast<int>(2 * lim[r] + 1);
    CellId id(d);
    long count = 0;
    do {
        for (int k = 0; k < d; ++k) id[k] = idx[k] - static_cast<int>(lim[k]);
        Point s = L.site_of(h, id);
        if (norm2(s.data(), d) <= reach + tol) ++count;
    } while (advance_index(idx, sizes));
    return count;
}

std::vector<CellId> cells_intersecting_box(const Lattice& L, double h, const Box& box) {
    if (!(h > 0.0)) fail_invalid("lattice scale h must be positive");
    const int d = L.dim;
    if (box.dim() != d) fail_invalid("box dimension mismatch");
    const double pad = h * L.geom.covering_radius;
    const double tol = 1e-12 * (1.0 + pad);

    // lambda bounds from the inflated box mapped through B^{-1}.
    std::vector<long> lo(d), hi(d);
    double est = 1.0;
    for (int r = 0; r < d; ++r) {
        double c = 0.0, spread = 0.0;
        for (int cc = 0; cc < d; ++cc) {
            double mid = 0.5 * (box.lo[cc] + box.hi[cc]);
            double halfw = 0.5 * (box.hi[cc] - box.lo[cc]) + pad;
            c += L.inv[r * d + cc] * mid;
            spread += std::abs(L.inv[r * d + cc]) * halfw;
        }
        lo[r] = static_cast<long>(std::floor((c - spread) / h - 1e-9));
        hi[r] = static_cast<long>(std::ceil((c + spread) / h + 1e-9));
        est *= static_cast<double>(hi[r] - lo[r] + 1);
    }
    if (est > 2e7) fail_resource("cell enumeration over the box would exceed 2e7 cells");

    std::vector<int> sizes(d), idx(d, 0);
    for (int r = 0; r < d; ++r) sizes[r] = static_cast<int>(hi[r] - lo[r] + 1);
    std::vector<CellId> cells;
    CellId id(d);
    do {
        for (int k = 0; k < d; ++k) id[k] = static_cast<int>(lo[k]) + idx[k];
        Point s = L.site_of(h, id);
        // Distance from the site to the box; the cell can only reach the box
        // if this is at most the scaled covering radius.
        double dist2 = 0.0;
        for (int k = 0; k < d; ++k) {
            double t = 0.0;
            if (s[k] < box.lo[k]) t = box.lo[k] - s[k];
            else if (s[k] > box.hi[k]) t = s[k] - box.hi[k];
            dist2 += t * t;
        }
        if (std::sqrt(dist2) <= pad + tol) cells.push_back(id);
    } while (advance_index(idx, sizes));
    std::sort(cells.begin(), cells.end());
    return cells;
}

} // namespace wquant
