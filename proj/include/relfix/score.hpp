#pragma once

#include "relfix/relmodel.hpp"

namespace relfix {

enum class ScoreMode { EditToConsistency, ErrorRate };
enum class ScoreReference { GraphOrder, EbmOrder, GroundTruth };

struct InconsistencyReport {
    std::string dataset;
    Axis axis = Axis::Time;
    int n_objects = 0;
    long long denominator = 0;
    long long violating_edges = 0;  // slots, with multiplicity
    ScoreMode mode = ScoreMode::EditToConsistency;
    ScoreReference reference = ScoreReference::GraphOrder;

    double score() const {
        return denominator == 0 ? 0.0
                                : static_cast<double>(violating_edges) / denominator;
    }
    double percent() const { return 100.0 * score(); }
};

// Eq-style percent rendering: two decimals.
std::string format_percent(double percent);

// Edit-to-consistency branch: reverse-edge slots over N(N-1)/2. The reference
// order may come from the graph method or from the EBM; scores above 100% are
// legitimate on dense multigraphs.
InconsistencyReport score_no_context(const AxisGraph& graph, const NodeOrdering& reference_order,
                                     ScoreReference reference = ScoreReference::GraphOrder);

// Error-rate branch: assertions contradicting the full-context closure over
// the number of evaluated ordered pairs. `denominator_override` replaces the
// default N(N-1) when only a subset of pairs was queried.
InconsistencyReport score_with_ground_truth(const std::vector<RelationAssertion>& assertions,
                                            const Context& context, int n_objects,
                                            long long denominator_override = -1);

// Sample Pearson correlation; throws on length < 2 or zero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

std::string report_csv_header();
std::string report_csv_row(const InconsistencyReport& r);

}  // namespace relfix
