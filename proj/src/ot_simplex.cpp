#include "wquant/ot.hpp"

#include "wquant/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

// Transportation network simplex on the dense bipartite graph, specialized
// for optimal transport between discrete measures. Design notes:
//
//  * Initial basis: northwest-corner staircase (always a spanning tree, no
//    artificial arcs needed). On 1-d inputs with sorted atoms it is already
//    optimal, so those solves reduce to a single verification sweep. For
//    balanced positive marginals the staircase is strongly feasible: zero
//    flow only appears on arcs pointing at the root.
//  * Entering arc: block search over the arc list (vectorized reduced-cost
//    scan), falling back to first-eligible (Bland) if degeneracy stalls
//    progress.
//  * Leaving arc: last blocking arc met when the pivot cycle is traversed
//    from the apex along the entering arc's orientation, which keeps every
//    basis strongly feasible, so degenerate plateaus terminate without any
//    cycling (equal-mass inputs produce a lot of them).
//  * Tree representation: parent/pred plus doubly linked child lists; pivots
//    re-root the smaller detached subtree and patch potentials along it.
//  * Certification: tree flows are recomputed exactly from the marginals,
//    then primal feasibility, complementary slackness and the duality gap
//    are checked. A solve that cannot be certified is an error, never a
//    silently wrong value.

namespace wquant {

namespace {

class TransportSimplex {
public:
    TransportSimplex(const std::vector<double>& a, const std::vector<double>& b,
                     const std::vector<double>& cost)
        : n_(a.size()), m_(b.size()), V_(n_ + m_), a_(a), b_(b), c_(cost) {}

    // Solves and certifies; fills plan/primal/gap.
    void solve(TransportPlan& plan, double& gap) {
        cmax_ = 0.0;
        for (double c : c_) cmax_ = std::max(cmax_, std::abs(c));
        eps_ = 1e-12 * (1.0 + cmax_);

        build_initial_tree();
        compute_potentials_full();

        const std::size_t E = n_ * m_;
        const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(double(E))));
        std::size_t cursor = 0;
        long degen_run = 0;
        bool bland = false;
        // Termination is guaranteed (strongly feasible bases; Bland fallback),
        // so the cap only exists to turn a solver bug into an error instead of
        // a hang. Heavily tied marginals legitimately need pivots on the order
        // of the arc count, hence the 2E headroom.
        const long pivot_cap = 1000000 + 2L * static_cast<long>(E);
        long pivots = 0;

        while (true) {
            std::size_t enter = SIZE_MAX;
            if (!bland) {
                enter = find_entering_block(cursor, block);
            } else {
                enter = find_entering_first();
            }
            if (enter == SIZE_MAX) break; // optimal

            double theta = pivot(enter, bland);
            if (++pivots > pivot_cap)
                fail_solver("transport simplex exceeded its pivot budget");
            if (theta <= 0.0) {
                if (++degen_run > 4 * static_cast<long>(V_)) bland = true;
            } else {
                degen_run = 0;
            }
        }

        certify(plan, gap);
    }

private:
    std::size_t n_, m_, V_;
    const std::vector<double>& a_;
    const std::vector<double>& b_;
    const std::vector<double>& c_; // n x m, row-major
    double cmax_ = 0.0, eps_ = 0.0;

    // Tree arrays (node u in [0, V): sources first, then sinks).
    std::vector<int> parent_, depth_;
    std::vector<std::size_t> pred_; // arc id i*m+j of the edge to parent
    std::vector<double> flow_;      // flow on the pred arc
    std::vector<int> child_, sib_next_, sib_prev_;
    std::vector<double> pi_;

    static constexpr int kNone = -1;

    std::size_t arc_id(std::size_t i, std::size_t j) const { return i * m_ + j; }
    std::size_t arc_src(std::size_t e) const { return e / m_; }
    std::size_t arc_snk(std::size_t e) const { return n_ + e % m_; }

    void link_child(int u, int v) { // attach v under u
        sib_prev_[v] = kNone;
        sib_next_[v] = child_[u];
        if (child_[u] != kNone) sib_prev_[child_[u]] = v;
        child_[u] = v;
        parent_[v] = u;
    }

    void cut_child(int v) {
        int u = parent_[v];
        if (u == kNone) return;
        if (sib_prev_[v] != kNone) sib_next_[sib_prev_[v]] = sib_next_[v];
        else child_[u] = sib_next_[v];
        if (sib_next_[v] != kNone) sib_prev_[sib_next_[v]] = sib_prev_[v];
        parent_[v] = kNone;
        sib_prev_[v] = sib_next_[v] = kNone;
    }

    void build_initial_tree() {
        parent_.assign(V_, kNone);
        depth_.assign(V_, 0);
        pred_.assign(V_, 0);
        flow_.assign(V_, 0.0);
        child_.assign(V_, kNone);
        sib_next_.assign(V_, kNone);
        sib_prev_.assign(V_, kNone);
        pi_.assign(V_, 0.0);

        // Northwest-corner staircase: arcs alternate row/column advances, so
        // consecutive arcs share a node and the arc set is a path (a tree).
        std::size_t i = 0, j = 0;
        double ra = a_[0], rb = b_[0];
        int prev_node = 0; // walk starts at source 0 (the root)
        while (true) {
            double f = std::max(std::min(ra, rb), 0.0);
            std::size_t e = arc_id(i, j);
            int src = static_cast<int>(i), snk = static_cast<int>(n_ + j);
            // One endpoint is already in the tree (prev_node); the other is new.
            int child = (src == prev_node) ? snk : src;
            int par = (child == snk) ? src : snk;
            link_child(par, child);
            pred_[child] = e;
            flow_[child] = f;
            depth_[child] = depth_[par] + 1;

            ra -= f;
            rb -= f;
            if (i + 1 == n_ && j + 1 == m_) break;
            // Advance the exhausted side, pinned to the grid edge so rounding
            // residue in ra/rb can never walk past the last row or column.
            if (i + 1 < n_ && (j + 1 == m_ || ra <= rb)) {
                ++i;
                ra = a_[i];
                prev_node = snk; // next arc shares this sink
            } else {
                ++j;
                rb = b_[j];
                prev_node = src; // next arc shares this source
            }
        }
    }

    void compute_potentials_full() {
        // DFS from the root (node 0): pi[snk] = pi[src] - c on tree arcs.
        pi_[0] = 0.0;
        std::vector<int> stack = {0};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = child_[u]; v != kNone; v = sib_next_[v]) {
                std::size_t e = pred_[v];
                if (static_cast<std::size_t>(v) >= n_) // v is the sink of e
                    pi_[v] = pi_[arc_src(e)] - c_[e];
                else // v is the source of e
                    pi_[v] = pi_[arc_snk(e)] + c_[e];
                stack.push_back(v);
            }
        }
    }

    double reduced_cost(std::size_t e) const {
        return c_[e] - pi_[arc_src(e)] + pi_[arc_snk(e)];
    }

    // Rolling block search: scan whole rows from the cursor until at least
    // `block` arcs were examined; return the most negative reduced cost seen.
    std::size_t find_entering_block(std::size_t& cursor_row, std::size_t block) {
        std::size_t best_arc = SIZE_MAX;
        double best = -eps_;
        std::size_t scanned = 0;
        for (std::size_t step = 0; step < n_; ++step) {
            std::size_t i = (cursor_row + step) % n_;
            double row_best;
            std::size_t row_arg;
            kernels::min_reduced_cost(c_.data() + i * m_, pi_.data() + n_,
                                      pi_[i], m_, &row_best, &row_arg);
            if (row_best < best) {
                best = row_best;
                best_arc = arc_id(i, row_arg);
            }
            scanned += m_;
            if (scanned >= block && best_arc != SIZE_MAX) {
                cursor_row = (i + 1) % n_;
                return best_arc;
            }
        }
        return best_arc;
    }

    std::size_t find_entering_first() {
        for (std::size_t e = 0; e < n_ * m_; ++e)
            if (reduced_cost(e) < -eps_) return e;
        return SIZE_MAX;
    }

    // Apply one pivot with entering arc e; returns theta (flow moved).
    double pivot(std::size_t e, bool bland) {
        const int s = static_cast<int>(arc_src(e));
        const int t = static_cast<int>(arc_snk(e));
        const double rc = reduced_cost(e);

        // Walk both endpoints to their common ancestor, recording the path.
        int u = s, v = t;
        std::vector<int> path_s, path_t; // nodes whose pred arc lies on the cycle
        while (u != v) {
            if (depth_[u] >= depth_[v]) {
                path_s.push_back(u);
                u = parent_[u];
            } else {
                path_t.push_back(v);
                v = parent_[v];
            }
        }

        // Flow changes around the cycle when theta enters on s -> t.
        // Conservation at t: the tree arc delivering into t loses theta, so a
        // sink on the t-side walk has delta -1 and the source above it +1.
        // Mirrored on the s-side: s ships theta more on the entering arc, so
        // its own pred arc loses theta (source: -1) and the sink above gains.
        auto delta_of = [&](int node, bool s_side) {
            bool node_is_source = static_cast<std::size_t>(node) < n_;
            if (s_side) return node_is_source ? -1.0 : +1.0;
            return node_is_source ? +1.0 : -1.0;
        };

        // Leaving arc: minimum flow among against-arcs. Ties are broken by the
        // last blocking arc met when the cycle is traversed from the apex along
        // the entering arc's orientation (apex -> s, then t -> apex).  The
        // northwest-corner start is strongly feasible for balanced positive
        // marginals, and this rule keeps every basis strongly feasible, so
        // degenerate runs cannot cycle or stall.  Bland mode swaps in the
        // smallest-arc-id tie break that its termination argument needs.
        double theta = HUGE_VAL;
        int out_node = kNone; // node whose pred arc leaves the basis
        bool out_on_s_side = false;
        for (int w : path_s)
            if (delta_of(w, true) < 0.0) theta = std::min(theta, flow_[w]);
        for (int w : path_t)
            if (delta_of(w, false) < 0.0) theta = std::min(theta, flow_[w]);
        if (theta == HUGE_VAL)
            fail_solver("transport pivot found an unbounded cycle");
        if (!bland) {
            for (auto it = path_s.rbegin(); it != path_s.rend(); ++it)
                if (delta_of(*it, true) < 0.0 && flow_[*it] == theta) {
                    out_node = *it;
                    out_on_s_side = true;
                }
            for (int w : path_t)
                if (delta_of(w, false) < 0.0 && flow_[w] == theta) {
                    out_node = w;
                    out_on_s_side = false;
                }
        } else {
            auto consider = [&](int w, bool s_side) {
                if (delta_of(w, s_side) >= 0.0 || flow_[w] != theta) return;
                if (out_node == kNone || pred_[w] < pred_[out_node]) {
                    out_node = w;
                    out_on_s_side = s_side;
                }
            };
            for (int w : path_s) consider(w, true);
            for (int w : path_t) consider(w, false);
        }

        for (int w : path_s) flow_[w] += delta_of(w, true) * theta;
        for (int w : path_t) flow_[w] += delta_of(w, false) * theta;

        // Detach the subtree under out_node; it contains s or t.
        int q = out_on_s_side ? s : t;
        cut_child(out_node);

        // Re-root the detached subtree at q by reversing the parent chain
        // q -> ... -> out_node: save each link's arc data, detach every chain
        // node, then relink with parent/child roles swapped. The three phases
        // must not interleave or a link would clobber a parent pointer that a
        // later cut still needs.
        std::vector<int> chain;
        for (int w = q; w != kNone; w = (w == out_node) ? kNone : parent_[w])
            chain.push_back(w);
        std::vector<std::size_t> chain_pred(chain.size());
        std::vector<double> chain_flow(chain.size());
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            chain_pred[k] = pred_[chain[k]];
            chain_flow[k] = flow_[chain[k]];
        }
        for (std::size_t k = 0; k + 1 < chain.size(); ++k)
            cut_child(chain[k]);
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            link_child(chain[k], chain[k + 1]);
            pred_[chain[k + 1]] = chain_pred[k];
            flow_[chain[k + 1]] = chain_flow[k];
        }

        // Attach q under the other endpoint of the entering arc.
        int anchor = out_on_s_side ? t : s;
        link_child(anchor, q);
        pred_[q] = e;
        flow_[q] = theta;

        // Fix depths and potentials across the re-rooted subtree. Shifting
        // pi by delta restores zero reduced cost on the entering arc.
        double delta = out_on_s_side ? +rc : -rc;
        std::vector<int> stack = {q};
        depth_[q] = depth_[anchor] + 1;
        pi_[q] += delta;
        while (!stack.empty()) {
            int w = stack.back();
            stack.pop_back();
            for (int ch = child_[w]; ch != kNone; ch = sib_next_[ch]) {
                depth_[ch] = depth_[w] + 1;
                pi_[ch] += delta;
                stack.push_back(ch);
            }
        }
        return theta;
    }

    // Recompute tree flows exactly from the marginals (leaf elimination in
    // depth order), then verify feasibility, complementary slackness and the
    // duality gap.
    void certify(TransportPlan& plan, double& gap) {
        std::vector<int> order(V_);
        for (std::size_t u = 0; u < V_; ++u) order[u] = static_cast<int>(u);
        std::sort(order.begin(), order.end(),
                  [&](int x, int y) { return depth_[x] > depth_[y]; });

        std::vector<double> resid(V_);
        for (std::size_t i = 0; i < n_; ++i) resid[i] = a_[i];
        for (std::size_t j = 0; j < m_; ++j) resid[n_ + j] = -b_[j];

        const double feas_tol = 1e-9;
        for (int u : order) {
            if (parent_[u] == kNone) break; // root reached (depth 0 sorts last)
            double f = (static_cast<std::size_t>(u) < n_) ? resid[u] : -resid[u];
            if (f < -feas_tol)
                fail_solver("transport basis is primal infeasible after pivoting");
            flow_[u] = std::max(f, 0.0);
            resid[u] = 0.0;
            int par = parent_[u];
            if (static_cast<std::size_t>(par) < n_) resid[par] -= flow_[u];
            else resid[par] += flow_[u];
        }
        if (std::abs(resid[0]) > 1e-9)
            fail_solver("transport marginals do not balance");

        // Complementary slackness / dual feasibility.
        const double dual_tol = 1e-9 * (1.0 + cmax_);
        for (std::size_t u = 0; u < V_; ++u) {
            if (parent_[u] == kNone) continue;
            if (std::abs(reduced_cost(pred_[u])) > dual_tol)
                fail_solver("basic arc with nonzero reduced cost");
        }
        for (std::size_t e = 0; e < n_ * m_; ++e)
            if (reduced_cost(e) < -dual_tol)
                fail_solver("dual infeasible arc after optimality was declared");

        double primal = 0.0;
        plan.entries.clear();
        for (std::size_t u = 0; u < V_; ++u) {
            if (parent_[u] == kNone || flow_[u] <= 0.0) continue;
            std::size_t e = pred_[u];
            primal += flow_[u] * c_[e];
            plan.entries.push_back({arc_src(e), arc_snk(e) - n_, flow_[u]});
        }
        std::sort(plan.entries.begin(), plan.entries.end(),
                  [](const PlanEntry& x, const PlanEntry& y) {
                      return x.i != y.i ? x.i < y.i : x.j < y.j;
                  });
        plan.cost = primal;

        double dual = 0.0;
        for (std::size_t i = 0; i < n_; ++i) dual += a_[i] * pi_[i];
        for (std::size_t j = 0; j < m_; ++j) dual -= b_[j] * pi_[n_ + j];
        gap = primal - dual;
        if (!(std::abs(gap) <= 1e-9 * (1.0 + std::abs(primal))))
            fail_solver("duality gap exceeds certification tolerance");
    }
};

} // namespace

WassersteinResult wasserstein_lp(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                 double p) {
    if (a.dim != b.dim) fail_invalid("measures live in different dimensions");
    if (!(p >= 1.0)) fail_invalid("wasserstein_lp requires p >= 1");
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 || m == 0) fail_invalid("empty measure");
    if (static_cast<double>(n) * static_cast<double>(m) > 1e7)
        fail_resource("transport problem exceeds 1e7 source-target pairs");

    std::vector<double> cost(n * m);
    kernels::cost_matrix(a.xs.data(), n, b.xs.data(), m, a.dim, p, cost.data());

    WassersteinResult res;
    TransportSimplex simplex(a.ws, b.ws, cost);
    simplex.solve(res.plan, res.dual_gap);
    res.value = std::pow(res.plan.cost, 1.0 / p);
    return res;
}

MetricReport metric_check(const std::vector<DiscreteMeasure>& measures, double p,
                          double tol) {
    MetricReport rep;
    const std::size_t n = measures.size();
    if (n < 2) return rep;

    auto equal_measures = [](const DiscreteMeasure& x, const DiscreteMeasure& y) {
        return x.dim == y.dim && x.xs == y.xs && x.ws == y.ws;
    };

    std::vector<std::vector<double>> W(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            W[i][j] = wasserstein_lp(measures[i], measures[j], p).value;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double g = std::abs(W[i][j] - W[j][i]);
            rep.max_symmetry_gap = std::max(rep.max_symmetry_gap, g);
            if (g > tol) rep.pass = false;
            bool zero = std::min(W[i][j], W[j][i]) <= tol;
            if (zero != equal_measures(measures[i], measures[j])) {
                ++rep.identity_failures;
                rep.pass = false;
            }
        }
        // W(mu, mu) through the solver must vanish.
        double self = wasserstein_lp(measures[i], measures[i], p).value;
        if (self > tol) {
            ++rep.identity_failures;
            rep.pass = false;
        }
    }

    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z) {
                if (x == y || y == z || x == z) continue;
                double viol = W[x][z] - W[x][y] - W[y][z];
                rep.max_triangle_violation = std::max(rep.max_triangle_violation, viol);
                if (viol > tol) rep.pass = false;
            }
    return rep;
}

} // namespace wquant
