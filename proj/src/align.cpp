#include "relfix/align.hpp"

#include <algorithm>
#include <cmath>

#include "relfix/ordergraph.hpp"

namespace relfix {
namespace align {

TaggedGraph TaggedGraph::from_axis_graph(const AxisGraph& g) {
    TaggedGraph out;
    out.nodes = g.nodes();
    for (const auto& [e, m] : g.edges()) out.edges[e] = EdgeOrigin::Model;
    return out;
}

bool TaggedGraph::acyclic() const {
    int n = static_cast<int>(nodes.size());
    std::vector<std::vector<int>> adj(n);
    std::vector<int> indeg(n, 0);
    for (const auto& [e, o] : edges) {
        adj[e.first].push_back(e.second);
        ++indeg[e.second];
    }
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    int seen = 0;
    while (!ready.empty()) {
        int u = ready.back();
        ready.pop_back();
        ++seen;
        for (int v : adj[u])
            if (--indeg[v] == 0) ready.push_back(v);
    }
    return seen == n;
}

namespace {

AxisGraph to_axis_graph(const TaggedGraph& g) {
    AxisGraph out(g.nodes, Axis::Time);
    for (const auto& [e, o] : g.edges) out.add_edge(e.first, e.second, 1);
    return out;
}

}  // namespace

void apply_transitivity(TaggedGraph& g) {
    if (!g.acyclic()) throw DomainError("apply_transitivity: graph has a cycle");
    int n = static_cast<int>(g.nodes.size());
    // Boolean reachability closure; materialize new edges as Transitive.
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (const auto& [e, o] : g.edges) reach[e.first][e.second] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (!reach[i][k]) continue;
            for (int j = 0; j < n; ++j)
                if (reach[k][j]) reach[i][j] = 1;
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (reach[i][j] && i != j && !g.edges.count({i, j}))
                g.edges[{i, j}] = EdgeOrigin::Transitive;
}

void correct_reverse_edges(TaggedGraph& g,
                           const std::vector<std::pair<int, int>>& reverse_edges,
                           const std::vector<int>& tau) {
    for (const auto& e : reverse_edges) {
        auto it = g.edges.find(e);
        if (it == g.edges.end()) continue;
        int u = e.first, v = e.second;
        bool tau_agrees = tau[u] < tau[v];
        if (tau_agrees) continue;
        EdgeOrigin origin = it->second;
        g.edges.erase(it);
        if (!g.edges.count({v, u})) g.edges[{v, u}] = origin;
    }
}

AlignmentTrace run_alignment(const TaggedGraph& graph, const std::vector<int>& tau) {
    int n = static_cast<int>(graph.nodes.size());
    if (static_cast<int>(tau.size()) != n)
        throw DomainError("run_alignment: tau does not cover all nodes");
    // tau rank -> node, for locating true-position neighbors.
    std::vector<int> tau_node(n + 1, -1);
    for (int v = 0; v < n; ++v) tau_node[tau[v]] = v;

    AlignmentTrace trace;
    TaggedGraph g = graph;

    auto tau_contradicted = [&]() {
        for (const auto& [e, o] : g.edges)
            if (tau[e.first] > tau[e.second]) return true;
        return false;
    };

    for (int iter = 0; iter < n; ++iter) {
        NodeOrdering pi = node_ordering(to_axis_graph(g));
        std::vector<std::pair<int, int>> reverse;
        for (const auto& [e, m] : pi.reverse_edges) reverse.push_back(e);
        // A consistent-but-wrong graph shows no reverse edges; keep going
        // until nothing contradicts tau either, so fact edges can surface
        // the wrong edges as cycles.
        if (reverse.empty() && g.acyclic() && !tau_contradicted()) break;
        ++trace.iterations;

        correct_reverse_edges(g, reverse, tau);
        // Correction only flips tau-disagreeing reverse edges; the mix of
        // kept pi-forward edges and tau-forward edges can still hold a cycle.
        // Re-run ordering + correction until acyclic before closing.
        int guard = n;
        while (!g.acyclic() && guard-- > 0) {
            NodeOrdering p2 = node_ordering(to_axis_graph(g));
            std::vector<std::pair<int, int>> r2;
            for (const auto& [e, m] : p2.reverse_edges) r2.push_back(e);
            correct_reverse_edges(g, r2, tau);
        }
        if (!g.acyclic()) {
            // Last resort: orient every remaining tau-disagreeing edge.
            std::vector<std::pair<int, int>> all;
            for (const auto& [e, o] : g.edges)
                if (tau[e.first] > tau[e.second]) all.push_back(e);
            correct_reverse_edges(g, all, tau);
        }
        apply_transitivity(g);

        // Fact edge at the most displaced node: link v* to its tau-neighbor
        // on the displacement side, oriented by tau. If that edge already
        // exists, fall through to the next candidate so each iteration makes
        // progress.
        std::vector<int> by_disp(n);
        for (int v = 0; v < n; ++v) by_disp[v] = v;
        std::sort(by_disp.begin(), by_disp.end(), [&](int a, int b) {
            int da = std::abs(pi.rank[a] - tau[a]), db = std::abs(pi.rank[b] - tau[b]);
            if (da != db) return da > db;
            return a < b;
        });
        bool added = false;
        for (int v : by_disp) {
            if (added) break;
            int d = pi.rank[v] - tau[v];
            if (d == 0) continue;
            for (int side : {d > 0 ? 1 : -1, d > 0 ? -1 : 1}) {
                int neighbor_rank = tau[v] + side;
                if (neighbor_rank < 1 || neighbor_rank > n) continue;
                int u = tau_node[neighbor_rank];
                std::pair<int, int> e =
                    tau[v] < tau[u] ? std::make_pair(v, u) : std::make_pair(u, v);
                if (g.edges.count(e)) continue;
                g.edges[e] = EdgeOrigin::GroundTruth;
                // The fact edge can close a cycle with a wrong model edge;
                // leave that for next iteration's correction.
                if (g.acyclic()) apply_transitivity(g);
                added = true;
                break;
            }
        }
    }

    for (const auto& [e, o] : g.edges) {
        switch (o) {
            case EdgeOrigin::Model: ++trace.model_edges_kept; break;
            case EdgeOrigin::Transitive: ++trace.transitive_edges_added; break;
            case EdgeOrigin::GroundTruth: ++trace.gt_edges_added; break;
        }
    }
    trace.final_graph = std::move(g);
    return trace;
}

}  // namespace align
}  // namespace relfix
