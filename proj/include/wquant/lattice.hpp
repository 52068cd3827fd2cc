#ifndef WQUANT_LATTICE_HPP
#define WQUANT_LATTICE_HPP

#include "wquant/common.hpp"

#include <vector>

namespace wquant {

// Integer coordinates of a lattice cell: the cell of lattice point B*lambda.
using CellId = std::vector<int>;

struct VoronoiGeometry {
    double diameter = 0.0;        // diameter of the unit-scale cell V_0
    double covering_radius = 0.0; // circumradius of V_0 (cells are centrally
                                  // symmetric, so diameter = 2 * covering_radius)
    std::vector<Point> relevant_vectors; // facet-defining lattice vectors of V_0
    std::vector<Point> vertices;         // vertices of V_0 (unit scale)
};

enum class LatticeKind { Zd, Dn, A2, general };

// A full-rank lattice B * Z^d. `basis` and `inv` are row-major d x d; the
// columns of `basis` are the generator vectors. General bases are size-
// reduced (LLL) on construction, so `basis` may differ from the input by a
// unimodular transform. Geometry is computed once and cached here.
struct Lattice {
    LatticeKind kind = LatticeKind::Zd;
    int dim = 0;
    std::vector<double> basis; // row-major, columns generate the lattice
    std::vector<double> inv;   // basis^{-1}, row-major
    VoronoiGeometry geom;

    // site = h * B * lambda
    Point site_of(double h, const CellId& id) const {
        Point s(dim, 0.0);
        for (int r = 0; r < dim; ++r) {
            double acc = 0.0;
            for (int c = 0; c < dim; ++c) acc += basis[r * dim + c] * id[c];
            s[r] = h * acc;
        }
        return s;
    }
};

// kind == Zd: identity basis, any dim in [1, 8].
// kind == Dn: even-coordinate-sum sublattice of Z^dim, dim in [2, 8].
// kind == A2: hexagonal lattice, dim must be 2 (basis fixed).
// kind == general: caller-supplied nonsingular basis, dim in [1, 4].
Lattice make_lattice(LatticeKind kind, int dim,
                     const std::vector<double>& basis = {});

// Nearest lattice point of h * L to x, as integer coordinates. Among
// equidistant candidates the lexicographically smallest coordinate vector
// wins, which makes the induced cell partition disjoint (half-open cells).
CellId decode(const Lattice& L, double h, const Point& x);

// Batch decode for flat row-major points.
void decode_batch(const Lattice& L, double h, const double* xs, std::size_t n,
                  std::vector<CellId>& out);

// Number of lattice sites lambda with |h * B * lambda| <= R + h * covering_radius.
// The cells of these sites cover the ball B_R, so the count is a certified
// upper bound for the number of scaled cells needed to cover it.
long covering_count(const Lattice& L, double h, double R);

// A superset of the cells whose Voronoi region meets the box: every cell
// whose site lies within h * covering_radius of the box. Ordered
// lexicographically by cell id.
std::vector<CellId> cells_intersecting_box(const Lattice& L, double h, const Box& box);

const char* lattice_kind_name(LatticeKind kind);

} // namespace wquant

#endif
