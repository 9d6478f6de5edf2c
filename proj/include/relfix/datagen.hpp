#pragma once

#include "relfix/kinship.hpp"
#include "relfix/relmodel.hpp"

namespace relfix {

struct Dataset {
    std::string name;
    Domain domain = Domain::Temporal;
    std::vector<std::string> objects;
    // Ground truth, when present, covers every object.
    std::map<std::string, double> dates;                       // temporal: YYYYMMDD
    std::map<std::string, std::array<double, 2>> coords;       // spatial: (x, y)
    std::vector<RelationAssertion> seeds;                      // kinship: 10 seed facts

    bool has_ground_truth() const;
    void validate() const;
};

Dataset load_dataset(const std::string& path);
void write_dataset(const std::string& path, const Dataset& d);

// 20 objects; x and y are independent seeded permutations of {-10..9}.
Dataset gen_plane(uint64_t seed);

struct KinshipGen {
    Dataset dataset;  // 11 objects + the 10 seed assertions
    kinship::KinshipTree tree;
};

// A 4-generation, 11-person tree: one top couple, two second-generation
// couples, 4 third-generation siblings split between them, one
// fourth-generation daughter. The 10 emitted seeds uniquely determine every
// gender and edge (checked by closure; rejection-sampled, cap 1000).
KinshipGen gen_kinship_tree(uint64_t seed);

// The fixed reference instance.
KinshipGen fixed_kinship_instance();

// Context regimes over a dataset with ground truth. All three spatial
// regimes reconstruct identical absolute positions and hence the same full
// pairwise closure.
Context emit_context(const Dataset& dataset, ContextRegime regime);

// Ground-truth node ordering on one axis (rank 1 = earliest / westmost /
// southmost), aligned with `objects` order of the returned names.
NodeOrdering ground_truth_ordering(const Dataset& d, Axis axis,
                                   const std::vector<std::string>& node_order);

// Full pairwise ground-truth assertion set for one domain.
std::vector<RelationAssertion> ground_truth_assertions(const Dataset& d);

}  // namespace relfix
