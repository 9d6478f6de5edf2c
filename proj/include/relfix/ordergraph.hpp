#pragma once

#include "relfix/relmodel.hpp"

namespace relfix {

// Components are listed in a topological order of the condensation: every
// cross-component edge goes from an earlier to a later component.
struct SccDecomposition {
    std::vector<std::vector<int>> components;       // node indices
    std::vector<int> component_of;                  // node -> component index
    std::vector<std::set<int>> condensation_succ;   // component -> successor components
};

// Iterative Tarjan (explicit stack); no recursion-depth limit.
SccDecomposition tarjan_scc(const AxisGraph& graph);

// The node-ordering repair: process SCCs in topological order; within each
// SCC grow a visited set from a root, always taking the candidate minimal in
// the reference order (ascending in-degree counting multiplicity, ties by
// ascending node id). Edges pointing back into the visited set become the
// reverse edges.
NodeOrdering node_ordering(const AxisGraph& graph);

enum class FixMode { Remove, Reverse };

struct FixResult {
    AxisGraph graph;
    NodeOrdering ordering;  // ordering of the repaired graph (zero reverse edges)
};

// Remove deletes reverse edges; Reverse flips them. Either way the output has
// zero reverse edges under the returned ordering.
FixResult fix_to_simply_ordered(const AxisGraph& graph, FixMode mode);

// Exhaustive minimum over all node permutations of the order-violating slot
// count (with multiplicity). Test oracle only; N <= 8 enforced.
long long min_feedback_edges_exact(const AxisGraph& graph);

// DOT export of the condensation, for debugging.
std::string condensation_dot(const AxisGraph& graph);

}  // namespace relfix
