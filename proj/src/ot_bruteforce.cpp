#include "wquant/ot.hpp"

#include "wquant/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wquant {

namespace {

// Flows on a spanning tree of the bipartite transport graph are uniquely
// determined by the marginals (leaf elimination). Returns false if any flow
// is meaningfully negative (infeasible basis).
bool tree_flows(const std::vector<std::pair<int, int>>& arcs, // (i, j)
                const std::vector<double>& a, const std::vector<double>& b,
                std::vector<double>& flow) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    const int V = n + m;
    const int E = static_cast<int>(arcs.size());

    std::vector<std::vector<int>> inc(V);
    for (int e = 0; e < E; ++e) {
        inc[arcs[e].first].push_back(e);
        inc[n + arcs[e].second].push_back(e);
    }

    std::vector<double> resid(V);
    for (int i = 0; i < n; ++i) resid[i] = a[i];
    for (int j = 0; j < m; ++j) resid[n + j] = -b[j];

    std::vector<int> deg(V);
    for (int v = 0; v < V; ++v) deg[v] = static_cast<int>(inc[v].size());
    std::vector<char> arc_done(E, 0), node_done(V, 0);
    std::vector<int> stack;
    for (int v = 0; v < V; ++v)
        if (deg[v] == 1) stack.push_back(v);

    flow.assign(E, 0.0);
    int processed = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (node_done[v]) continue;
        int live = -1;
        for (int e : inc[v])
            if (!arc_done[e]) { live = e; break; }
        if (live < 0) { node_done[v] = 1; continue; }
        // flow oriented source -> sink
        double f = (v < n) ? resid[v] : -resid[v];
        flow[live] = f;
        int other = (v < n) ? n + arcs[live].second : arcs[live].first;
        // shipping f settles v and shifts the balance of the far endpoint
        resid[v] = 0.0;
        if (other < n) resid[other] -= f;
        else resid[other] += f;
        arc_done[live] = 1;
        node_done[v] = 1;
        ++processed;
        if (--deg[other] == 1 && !node_done[other]) stack.push_back(other);
    }
    if (processed != E) return false; // not a tree (cycle or disconnected)
    for (double f : flow)
        if (f < -1e-12) return false;
    return true;
}

} // namespace

double wasserstein_bruteforce(const DiscreteMeasure& a, const DiscreteMeasure& b,
                              double p) {
    if (a.dim != b.dim) fail_invalid("measures live in different dimensions");
    if (!(p >= 1.0)) fail_invalid("bruteforce requires p >= 1");
    const std::size_t n = a.size(), m = b.size();

    bool uniform = (n == m) && n <= 8;
    if (uniform) {
        for (double w : a.ws) uniform = uniform && std::abs(w - 1.0 / n) < 1e-12;
        for (double w : b.ws) uniform = uniform && std::abs(w - 1.0 / n) < 1e-12;
    }

    std::vector<double> cost(n * m);
    kernels::cost_matrix(a.xs.data(), n, b.xs.data(), m, a.dim, p, cost.data());

    if (uniform) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = HUGE_VAL;
        do {
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i) c += cost[i * m + perm[i]];
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return std::pow(best / n, 1.0 / p);
    }

    if (n + m > 10)
        fail_invalid("bruteforce needs uniform equal counts <= 8 or total support <= 10");

    // Every vertex of the transport polytope is supported on a spanning tree
    // of the complete bipartite graph; enumerate all (n + m - 1)-subsets of
    // arcs, keep the feasible trees, and take the best objective.
    const int E = static_cast<int>(n * m);
    const int T = static_cast<int>(n + m - 1);
    std::vector<int> comb(T);
    std::iota(comb.begin(), comb.end(), 0);
    double best = HUGE_VAL;
    std::vector<std::pair<int, int>> arcs(T);
    std::vector<double> flow;
    while (true) {
        for (int t = 0; t < T; ++t)
            arcs[t] = {comb[t] / static_cast<int>(m), comb[t] % static_cast<int>(m)};
        if (tree_flows(arcs, a.ws, b.ws, flow)) {
            double c = 0.0;
            for (int t = 0; t < T; ++t)
                c += std::max(flow[t], 0.0) * cost[comb[t]];
            best = std::min(best, c);
        }
        int k = T - 1;
        while (k >= 0 && comb[k] == E - (T - k)) --k;
        if (k < 0) break;
        ++comb[k];
        for (int j = k + 1; j < T; ++j) comb[j] = comb[j - 1] + 1;
    }
    if (best == HUGE_VAL) fail_solver("no feasible basis found in bruteforce enumeration");
    return std::pow(best, 1.0 / p);
}

} // namespace wquant
