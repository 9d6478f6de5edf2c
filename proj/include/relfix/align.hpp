#pragma once

#include "relfix/relmodel.hpp"

namespace relfix {
namespace align {

enum class EdgeOrigin { Model, Transitive, GroundTruth };

// Simple digraph (no multiplicity) with per-edge origin tags; alignment
// operates on collapsed edges.
struct TaggedGraph {
    std::vector<std::string> nodes;
    std::map<std::pair<int, int>, EdgeOrigin> edges;

    static TaggedGraph from_axis_graph(const AxisGraph& g);
    bool acyclic() const;
};

struct AlignmentTrace {
    int iterations = 0;
    long long gt_edges_added = 0;         // Table-8 style x_gt
    long long transitive_edges_added = 0; // x_trans
    long long model_edges_kept = 0;       // x_model (kept + corrected)
    TaggedGraph final_graph;

    long long total_edges() const {
        return gt_edges_added + transitive_edges_added + model_edges_kept;
    }
};

// Transitive closure; added edges tagged Transitive. Requires an acyclic
// input (call after reverse-edge correction).
void apply_transitivity(TaggedGraph& g);

// Reorient every listed reverse edge to agree with the true ordering tau
// (tau[v] is the true rank of node v). Origins are preserved.
void correct_reverse_edges(TaggedGraph& g,
                           const std::vector<std::pair<int, int>>& reverse_edges,
                           const std::vector<int>& tau);

// Iterative consistent alignment: repair toward tau using reverse-edge
// correction, transitive closure, and one ground-truth fact edge per
// iteration at the most displaced node. Iteration cap = N.
AlignmentTrace run_alignment(const TaggedGraph& graph, const std::vector<int>& tau);

}  // namespace align
}  // namespace relfix
