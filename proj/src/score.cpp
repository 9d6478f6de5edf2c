#include "relfix/score.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace relfix {

std::string format_percent(double percent) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", percent);
    return buf;
}

InconsistencyReport score_no_context(const AxisGraph& graph, const NodeOrdering& reference_order,
                                     ScoreReference reference) {
    int n = graph.num_nodes();
    if (static_cast<int>(reference_order.rank.size()) != n)
        throw DomainError("score_no_context: ordering does not cover all nodes");
    InconsistencyReport r;
    r.axis = graph.axis();
    r.n_objects = n;
    r.mode = ScoreMode::EditToConsistency;
    r.reference = reference;
    r.denominator = static_cast<long long>(n) * (n - 1) / 2;
    for (const auto& [e, m] : graph.edges())
        if (reference_order.rank[e.first] > reference_order.rank[e.second])
            r.violating_edges += m;
    return r;
}

InconsistencyReport score_with_ground_truth(const std::vector<RelationAssertion>& assertions,
                                            const Context& context, int n_objects,
                                            long long denominator_override) {
    if (context.mode != ContextMode::Full)
        throw DomainError("score_with_ground_truth: context is not full");
    std::map<std::pair<std::string, std::string>, std::string> truth;
    for (const auto& c : context.assertions) truth[{c.subject, c.object}] = c.label.label;

    InconsistencyReport r;
    r.n_objects = n_objects;
    r.mode = ScoreMode::ErrorRate;
    r.reference = ScoreReference::GroundTruth;
    r.denominator = denominator_override >= 0
                        ? denominator_override
                        : static_cast<long long>(n_objects) * (n_objects - 1);
    for (const auto& a : assertions) {
        auto it = truth.find({a.subject, a.object});
        if (it == truth.end()) continue;  // pair not determined by the closure
        if (it->second != a.label.label) ++r.violating_edges;
    }
    return r;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw DomainError("pearson: length mismatch");
    size_t n = xs.size();
    if (n < 2) throw DomainError("pearson: need at least 2 points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DomainError("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::string report_csv_header() {
    return "dataset,axis,n_objects,mode,reference,violating_edges,denominator,percent";
}

std::string report_csv_row(const InconsistencyReport& r) {
    std::ostringstream os;
    os << r.dataset << "," << to_string(r.axis) << "," << r.n_objects << ","
       << (r.mode == ScoreMode::EditToConsistency ? "edit_to_consistency" : "error_rate") << ","
       << (r.reference == ScoreReference::GraphOrder  ? "graph"
           : r.reference == ScoreReference::EbmOrder ? "ebm"
                                                      : "ground_truth")
       << "," << r.violating_edges << "," << r.denominator << "," << format_percent(r.percent());
    return os.str();
}

}  // namespace relfix
