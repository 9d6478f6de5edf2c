#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relfix {

enum class Domain { Temporal, Spatial, Kinship };
enum class Source { Model, GroundTruth, Synthetic };
enum class Axis { Time, X, Y, KinshipGeneration };

std::string to_string(Domain d);
std::string to_string(Source s);
std::string to_string(Axis a);
Domain domain_from_string(const std::string& s);
Source source_from_string(const std::string& s);
Axis axis_from_string(const std::string& s);

// Exact identity: NFC is assumed for ASCII object names; we strip surrounding
// whitespace so file round-trips cannot split identities.
std::string normalize_object_id(const std::string& raw);

// Closed label vocabularies per domain.
const std::vector<std::string>& temporal_labels();
const std::vector<std::string>& spatial_labels();
const std::vector<std::string>& kinship_labels();  // the 31-item list
bool label_in_domain(Domain d, const std::string& label);

struct RelationLabel {
    Domain domain;
    std::string label;  // lowercase, from the domain vocabulary
};

struct RelationAssertion {
    std::string subject;
    std::string object;
    RelationLabel label;
    std::string raw_text;
    Source source = Source::Model;
    std::string dataset;
    std::optional<Axis> axis_hint;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Directed multigraph over object ids encoding one total-order dimension.
// Edge (i -> j) means "i precedes j" (earlier, further west, further south,
// older generation).
//
// Note on the spatial convention: we read "A northeast of B" as A lying east
// and north of B, i.e. B precedes A on both axes. See decompose_spatial.
class AxisGraph {
public:
    AxisGraph() = default;
    AxisGraph(std::vector<std::string> nodes, Axis axis);

    Axis axis() const { return axis_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::string& node_name(int idx) const { return nodes_.at(idx); }
    int node_index(const std::string& id) const;  // -1 if absent

    // Self-loops are rejected; multiplicity accumulates.
    void add_edge(int from, int to, int multiplicity = 1);
    void add_edge(const std::string& from, const std::string& to, int multiplicity = 1);

    int multiplicity(int from, int to) const;
    const std::map<std::pair<int, int>, int>& edges() const { return edges_; }
    // Total edge slots, counting multiplicity.
    long long total_multiplicity() const;

    // In-degree counting multiplicity (the repair reference order).
    std::vector<long long> in_degrees() const;

    bool weakly_connected() const;

private:
    std::vector<std::string> nodes_;  // sorted, unique
    std::map<std::string, int> index_;
    std::map<std::pair<int, int>, int> edges_;
    Axis axis_ = Axis::Time;
};

// Bijection rank: node index -> 1..N plus the reverse-edge multiset it
// induces on the graph it was computed from.
struct NodeOrdering {
    std::vector<int> rank;                           // rank[node] in 1..N
    std::map<std::pair<int, int>, int> reverse_edges;  // (u,v) with rank[u] > rank[v]

    long long reverse_multiplicity() const {
        long long n = 0;
        for (const auto& [e, m] : reverse_edges) n += m;
        return n;
    }
};

enum class ContextMode { Empty, Full, Partial };
enum class ContextRegime { None, XYPos, CenterRel, OrderedRel, Seeds };

// Trusted ground-truth context C. For spatial regimes the statement lines
// carry the exact prompt text and `positions` are the absolute coordinates
// reconstructed from those statements (not copied from the dataset), so the
// information-equivalence of the three regimes is checkable.
struct Context {
    ContextMode mode = ContextMode::Empty;
    ContextRegime regime = ContextRegime::None;
    std::vector<std::string> lines;
    std::map<std::string, std::array<double, 2>> positions;
    std::vector<RelationAssertion> assertions;  // full pairwise closure when mode == Full
};

// One compass assertion fixes both axes at once.
struct SpatialEdges {
    std::pair<std::string, std::string> x_edge;  // (west, east)
    std::pair<std::string, std::string> y_edge;  // (south, north)
};

// "A northeast of B" => B precedes A on X and on Y.
SpatialEdges decompose_spatial(const RelationAssertion& a);

// Reconstruct the compass label of (subject, object) given which endpoint
// precedes on each axis. subject_first_x == true means subject is further west.
std::string recompose_spatial(bool subject_first_x, bool subject_first_y);

// "A before B" => (A -> B).
std::pair<std::string, std::string> temporal_edge(const RelationAssertion& a);

// Generation delta implied by a kinship label: +1 means the subject is one
// generation above the object. 0 for same-generation labels (no axis edge).
int kinship_generation_delta(const std::string& label);

struct BuildStats {
    int accepted = 0;
    int dropped_self_loops = 0;
};

// Pure fold over assertions. Declared objects become nodes even when never
// mentioned. Assertions whose subject equals object are dropped, counted in
// stats. Mixed domains are rejected.
AxisGraph build_axis_graph(const std::vector<RelationAssertion>& assertions, Axis axis,
                           const std::vector<std::string>& declared_objects,
                           BuildStats* stats = nullptr);

// Assertion interchange format: one JSON record per line.
std::string assertion_to_jsonl(const RelationAssertion& a);
RelationAssertion assertion_from_jsonl(const std::string& line);
std::vector<RelationAssertion> read_assertions(const std::string& path);
void write_assertions(const std::string& path, const std::vector<RelationAssertion>& as);

}  // namespace relfix
