#include "relfix/ordergraph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>

namespace relfix {

namespace {

std::vector<std::vector<int>> adjacency(const AxisGraph& g) {
    std::vector<std::vector<int>> adj(g.num_nodes());
    for (const auto& [e, m] : g.edges()) adj[e.first].push_back(e.second);
    return adj;
}

}  // namespace

SccDecomposition tarjan_scc(const AxisGraph& graph) {
    int n = graph.num_nodes();
    auto adj = adjacency(graph);

    std::vector<int> index(n, -1), lowlink(n, 0), on_stack(n, 0);
    std::vector<int> scc_stack;
    std::vector<std::vector<int>> sccs;
    int next_index = 0;

    // Explicit DFS stack: (node, next child position).
    struct Frame {
        int v;
        size_t child;
    };
    std::vector<Frame> dfs;

    for (int start = 0; start < n; ++start) {
        if (index[start] != -1) continue;
        dfs.push_back({start, 0});
        index[start] = lowlink[start] = next_index++;
        scc_stack.push_back(start);
        on_stack[start] = 1;
        while (!dfs.empty()) {
            Frame& f = dfs.back();
            int v = f.v;
            if (f.child < adj[v].size()) {
                int w = adj[v][f.child++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    scc_stack.push_back(w);
                    on_stack[w] = 1;
                    dfs.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                dfs.pop_back();
                if (!dfs.empty())
                    lowlink[dfs.back().v] = std::min(lowlink[dfs.back().v], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    std::vector<int> comp;
                    int w;
                    do {
                        w = scc_stack.back();
                        scc_stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                    } while (w != v);
                    std::sort(comp.begin(), comp.end());
                    sccs.push_back(std::move(comp));
                }
            }
        }
    }

    // Tarjan pops sinks first; reverse for topological order.
    std::reverse(sccs.begin(), sccs.end());

    SccDecomposition out;
    out.components = std::move(sccs);
    out.component_of.assign(n, -1);
    for (int c = 0; c < static_cast<int>(out.components.size()); ++c)
        for (int v : out.components[c]) out.component_of[v] = c;
    out.condensation_succ.resize(out.components.size());
    for (const auto& [e, m] : graph.edges()) {
        int a = out.component_of[e.first], b = out.component_of[e.second];
        if (a != b) out.condensation_succ[a].insert(b);
    }
    return out;
}

NodeOrdering node_ordering(const AxisGraph& graph) {
    int n = graph.num_nodes();
    auto scc = tarjan_scc(graph);
    auto deg = graph.in_degrees();

    // Reference position: ascending in-degree, ties by ascending node id
    // (node indices are id-sorted already).
    std::vector<int> by_ref(n);
    std::iota(by_ref.begin(), by_ref.end(), 0);
    std::stable_sort(by_ref.begin(), by_ref.end(),
                     [&](int a, int b) { return deg[a] < deg[b]; });
    std::vector<int> ref_pos(n);
    for (int i = 0; i < n; ++i) ref_pos[by_ref[i]] = i;

    int ncomp = static_cast<int>(scc.components.size());

    // Topological sort of the condensation, preferring the component whose
    // best member comes first in the reference order.
    std::vector<int> comp_key(ncomp);
    for (int c = 0; c < ncomp; ++c) {
        int best = n;
        for (int v : scc.components[c]) best = std::min(best, ref_pos[v]);
        comp_key[c] = best;
    }
    std::vector<int> indeg(ncomp, 0);
    for (int c = 0; c < ncomp; ++c)
        for (int s : scc.condensation_succ[c]) ++indeg[s];
    using QItem = std::pair<int, int>;  // (key, component)
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> ready;
    for (int c = 0; c < ncomp; ++c)
        if (indeg[c] == 0) ready.push({comp_key[c], c});
    std::vector<int> comp_order;
    while (!ready.empty()) {
        int c = ready.top().second;
        ready.pop();
        comp_order.push_back(c);
        for (int s : scc.condensation_succ[c])
            if (--indeg[s] == 0) ready.push({comp_key[s], s});
    }

    NodeOrdering out;
    out.rank.assign(n, 0);
    int t = 1;
    for (int c : comp_order) {
        const auto& members = scc.components[c];
        std::set<int> remaining(members.begin(), members.end());
        // Root: minimal member in the reference order.
        int root = *std::min_element(members.begin(), members.end(),
                                     [&](int a, int b) { return ref_pos[a] < ref_pos[b]; });
        std::set<int> visited;
        out.rank[root] = t++;
        visited.insert(root);
        remaining.erase(root);
        while (!remaining.empty()) {
            // Candidates reachable by one edge from the visited set.
            int pick = -1;
            for (int v : remaining) {
                bool reachable = false;
                for (int u : visited)
                    if (graph.multiplicity(u, v) > 0) {
                        reachable = true;
                        break;
                    }
                if (reachable && (pick == -1 || ref_pos[v] < ref_pos[pick])) pick = v;
            }
            // Strong connectivity guarantees a candidate exists.
            out.rank[pick] = t++;
            visited.insert(pick);
            remaining.erase(pick);
        }
    }

    for (const auto& [e, m] : graph.edges())
        if (out.rank[e.first] > out.rank[e.second]) out.reverse_edges[e] = m;
    return out;
}

FixResult fix_to_simply_ordered(const AxisGraph& graph, FixMode mode) {
    NodeOrdering ord = node_ordering(graph);
    AxisGraph fixed(graph.nodes(), graph.axis());
    for (const auto& [e, m] : graph.edges()) {
        if (ord.rank[e.first] < ord.rank[e.second]) {
            fixed.add_edge(e.first, e.second, m);
        } else if (mode == FixMode::Reverse) {
            fixed.add_edge(e.second, e.first, m);
        }
        // Remove mode: reverse edges dropped
    }
    NodeOrdering fixed_ord;
    fixed_ord.rank = ord.rank;
    for (const auto& [e, m] : fixed.edges())
        if (fixed_ord.rank[e.first] > fixed_ord.rank[e.second]) fixed_ord.reverse_edges[e] = m;
    return {std::move(fixed), std::move(fixed_ord)};
}

long long min_feedback_edges_exact(const AxisGraph& graph) {
    int n = graph.num_nodes();
    if (n > 8) throw DomainError("min_feedback_edges_exact: N > 8");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = -1;
    do {
        std::vector<int> pos(n);
        for (int i = 0; i < n; ++i) pos[perm[i]] = i;
        long long viol = 0;
        for (const auto& [e, m] : graph.edges())
            if (pos[e.first] > pos[e.second]) viol += m;
        if (best < 0 || viol < best) best = viol;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best < 0 ? 0 : best;
}

std::string condensation_dot(const AxisGraph& graph) {
    auto scc = tarjan_scc(graph);
    std::ostringstream os;
    os << "digraph condensation {\n";
    for (size_t c = 0; c < scc.components.size(); ++c) {
        os << "  c" << c << " [label=\"";
        for (size_t i = 0; i < scc.components[c].size(); ++i) {
            if (i) os << ",";
            os << graph.node_name(scc.components[c][i]);
        }
        os << "\"];\n";
    }
    for (size_t c = 0; c < scc.components.size(); ++c)
        for (int s : scc.condensation_succ[c]) os << "  c" << c << " -> c" << s << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace relfix
