#include "relfix/relmodel.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace relfix {

using nlohmann::json;

std::string to_string(Domain d) {
    switch (d) {
        case Domain::Temporal: return "temporal";
        case Domain::Spatial: return "spatial";
        case Domain::Kinship: return "kinship";
    }
    throw DomainError("bad domain enum");
}

std::string to_string(Source s) {
    switch (s) {
        case Source::Model: return "model";
        case Source::GroundTruth: return "ground_truth";
        case Source::Synthetic: return "synthetic";
    }
    throw DomainError("bad source enum");
}

std::string to_string(Axis a) {
    switch (a) {
        case Axis::Time: return "time";
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::KinshipGeneration: return "generation";
    }
    throw DomainError("bad axis enum");
}

Domain domain_from_string(const std::string& s) {
    if (s == "temporal") return Domain::Temporal;
    if (s == "spatial") return Domain::Spatial;
    if (s == "kinship") return Domain::Kinship;
    throw DomainError("unknown domain: " + s);
}

Source source_from_string(const std::string& s) {
    if (s == "model") return Source::Model;
    if (s == "ground_truth") return Source::GroundTruth;
    if (s == "synthetic") return Source::Synthetic;
    throw DomainError("unknown source: " + s);
}

Axis axis_from_string(const std::string& s) {
    if (s == "time") return Axis::Time;
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "generation") return Axis::KinshipGeneration;
    throw DomainError("unknown axis: " + s);
}

std::string normalize_object_id(const std::string& raw) {
    size_t b = raw.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = raw.find_last_not_of(" \t\r\n");
    return raw.substr(b, e - b + 1);
}

const std::vector<std::string>& temporal_labels() {
    static const std::vector<std::string> v = {"before", "after"};
    return v;
}

const std::vector<std::string>& spatial_labels() {
    static const std::vector<std::string> v = {"northeast", "northwest", "southeast",
                                               "southwest"};
    return v;
}

const std::vector<std::string>& kinship_labels() {
    static const std::vector<std::string> v = {
        "husband",        "wife",           "father",           "mother",
        "son",            "daughter",       "brother",          "sister",
        "uncle",          "aunt",           "cousin",           "niece",
        "nephew",         "grandpa",        "grandma",          "grandson",
        "granddaughter",  "brother-in-law", "sister-in-law",    "father-in-law",
        "mother-in-law",  "son-in-law",     "daughter-in-law",  "aunt-in-law",
        "uncle-in-law",   "niece-in-law",   "nephew-in-law",    "great-grandpa",
        "great-grandma",  "great-grandson", "great-granddaughter"};
    return v;
}

bool label_in_domain(Domain d, const std::string& label) {
    const auto& v = d == Domain::Temporal   ? temporal_labels()
                    : d == Domain::Spatial ? spatial_labels()
                                           : kinship_labels();
    return std::find(v.begin(), v.end(), label) != v.end();
}

AxisGraph::AxisGraph(std::vector<std::string> nodes, Axis axis) : axis_(axis) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    nodes_ = std::move(nodes);
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) index_[nodes_[i]] = i;
}

int AxisGraph::node_index(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

void AxisGraph::add_edge(int from, int to, int multiplicity) {
    if (from == to) throw DomainError("self-loop edge rejected");
    if (from < 0 || to < 0 || from >= num_nodes() || to >= num_nodes())
        throw DomainError("edge endpoint out of range");
    if (multiplicity < 1) throw DomainError("edge multiplicity must be >= 1");
    edges_[{from, to}] += multiplicity;
}

void AxisGraph::add_edge(const std::string& from, const std::string& to, int multiplicity) {
    int f = node_index(from), t = node_index(to);
    if (f < 0 || t < 0) throw DomainError("edge endpoint not a node: " + from + "/" + to);
    add_edge(f, t, multiplicity);
}

int AxisGraph::multiplicity(int from, int to) const {
    auto it = edges_.find({from, to});
    return it == edges_.end() ? 0 : it->second;
}

long long AxisGraph::total_multiplicity() const {
    long long n = 0;
    for (const auto& [e, m] : edges_) n += m;
    return n;
}

std::vector<long long> AxisGraph::in_degrees() const {
    std::vector<long long> deg(num_nodes(), 0);
    for (const auto& [e, m] : edges_) deg[e.second] += m;
    return deg;
}

bool AxisGraph::weakly_connected() const {
    int n = num_nodes();
    if (n <= 1) return true;
    std::vector<std::vector<int>> adj(n);
    for (const auto& [e, m] : edges_) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count == n;
}

SpatialEdges decompose_spatial(const RelationAssertion& a) {
    if (a.label.domain != Domain::Spatial || !label_in_domain(Domain::Spatial, a.label.label))
        throw DomainError("decompose_spatial: not a compass label: " + a.label.label);
    const std::string& l = a.label.label;
    bool subject_east = (l == "northeast" || l == "southeast");
    bool subject_north = (l == "northeast" || l == "northwest");
    SpatialEdges out;
    out.x_edge = subject_east ? std::make_pair(a.object, a.subject)
                              : std::make_pair(a.subject, a.object);
    out.y_edge = subject_north ? std::make_pair(a.object, a.subject)
                               : std::make_pair(a.subject, a.object);
    return out;
}

std::string recompose_spatial(bool subject_first_x, bool subject_first_y) {
    if (subject_first_x)  // subject further west
        return subject_first_y ? "southwest" : "northwest";
    return subject_first_y ? "southeast" : "northeast";
}

std::pair<std::string, std::string> temporal_edge(const RelationAssertion& a) {
    if (a.label.domain != Domain::Temporal || !label_in_domain(Domain::Temporal, a.label.label))
        throw DomainError("temporal_edge: not a temporal label: " + a.label.label);
    if (a.label.label == "before") return {a.subject, a.object};
    return {a.object, a.subject};
}

int kinship_generation_delta(const std::string& label) {
    if (label == "father" || label == "mother" || label == "uncle" || label == "aunt" ||
        label == "uncle-in-law" || label == "aunt-in-law" || label == "father-in-law" ||
        label == "mother-in-law")
        return 1;
    if (label == "grandpa" || label == "grandma") return 2;
    if (label == "great-grandpa" || label == "great-grandma") return 3;
    if (label == "son" || label == "daughter" || label == "nephew" || label == "niece" ||
        label == "nephew-in-law" || label == "niece-in-law" || label == "son-in-law" ||
        label == "daughter-in-law")
        return -1;
    if (label == "grandson" || label == "granddaughter") return -2;
    if (label == "great-grandson" || label == "great-granddaughter") return -3;
    return 0;  // husband, wife, brother, sister, cousin, *-in-law same generation
}

AxisGraph build_axis_graph(const std::vector<RelationAssertion>& assertions, Axis axis,
                           const std::vector<std::string>& declared_objects,
                           BuildStats* stats) {
    std::vector<std::string> nodes;
    for (const auto& o : declared_objects) nodes.push_back(normalize_object_id(o));
    std::optional<Domain> domain;
    for (const auto& a : assertions) {
        if (domain && *domain != a.label.domain)
            throw DomainError("build_axis_graph: mixed domains in assertion list");
        domain = a.label.domain;
        nodes.push_back(normalize_object_id(a.subject));
        nodes.push_back(normalize_object_id(a.object));
    }
    AxisGraph g(nodes, axis);
    BuildStats local;
    for (const auto& a : assertions) {
        std::string s = normalize_object_id(a.subject);
        std::string o = normalize_object_id(a.object);
        if (s == o) {
            ++local.dropped_self_loops;
            continue;
        }
        switch (a.label.domain) {
            case Domain::Temporal: {
                if (axis != Axis::Time) throw DomainError("temporal assertion on non-time axis");
                auto e = temporal_edge(a);
                g.add_edge(normalize_object_id(e.first), normalize_object_id(e.second));
                break;
            }
            case Domain::Spatial: {
                if (axis != Axis::X && axis != Axis::Y)
                    throw DomainError("spatial assertion on non-spatial axis");
                auto se = decompose_spatial(a);
                auto& e = (axis == Axis::X) ? se.x_edge : se.y_edge;
                g.add_edge(normalize_object_id(e.first), normalize_object_id(e.second));
                break;
            }
            case Domain::Kinship: {
                if (axis != Axis::KinshipGeneration)
                    throw DomainError("kinship assertion on non-generation axis");
                int d = kinship_generation_delta(a.label.label);
                if (d > 0)
                    g.add_edge(s, o);
                else if (d < 0)
                    g.add_edge(o, s);
                // same-generation labels carry no order information
                break;
            }
        }
        ++local.accepted;
    }
    if (stats) *stats = local;
    return g;
}

std::string assertion_to_jsonl(const RelationAssertion& a) {
    json j;
    j["subject"] = a.subject;
    j["object"] = a.object;
    j["label"] = a.label.label;
    j["domain"] = to_string(a.label.domain);
    j["raw_text"] = a.raw_text;
    j["source"] = to_string(a.source);
    j["dataset"] = a.dataset;
    if (a.axis_hint) j["axis_hint"] = to_string(*a.axis_hint);
    return j.dump();
}

RelationAssertion assertion_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    RelationAssertion a;
    a.subject = normalize_object_id(j.at("subject").get<std::string>());
    a.object = normalize_object_id(j.at("object").get<std::string>());
    a.label.domain = domain_from_string(j.at("domain").get<std::string>());
    a.label.label = j.at("label").get<std::string>();
    a.raw_text = j.value("raw_text", "");
    a.source = source_from_string(j.value("source", std::string("model")));
    a.dataset = j.value("dataset", "");
    if (j.contains("axis_hint")) a.axis_hint = axis_from_string(j["axis_hint"].get<std::string>());
    if (!label_in_domain(a.label.domain, a.label.label))
        throw DomainError("label out of vocabulary: " + a.label.label);
    return a;
}

std::vector<RelationAssertion> read_assertions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open assertion file: " + path);
    std::vector<RelationAssertion> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(assertion_from_jsonl(line));
    }
    return out;
}

void write_assertions(const std::string& path, const std::vector<RelationAssertion>& as) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write assertion file: " + path);
    for (const auto& a : as) out << assertion_to_jsonl(a) << "\n";
}

}  // namespace relfix
