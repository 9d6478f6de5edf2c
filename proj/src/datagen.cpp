#include "relfix/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace relfix {

using nlohmann::json;

bool Dataset::has_ground_truth() const {
    switch (domain) {
        case Domain::Temporal: return !dates.empty();
        case Domain::Spatial: return !coords.empty();
        case Domain::Kinship: return !seeds.empty();
    }
    return false;
}

void Dataset::validate() const {
    std::set<std::string> seen(objects.begin(), objects.end());
    if (seen.size() != objects.size()) throw DomainError("dataset has duplicate objects");
    for (const auto& o : objects)
        if (o.empty()) throw DomainError("dataset has empty object id");
    if (domain == Domain::Temporal && !dates.empty())
        for (const auto& o : objects)
            if (!dates.count(o)) throw DomainError("missing date for " + o);
    if (domain == Domain::Spatial && !coords.empty())
        for (const auto& o : objects)
            if (!coords.count(o)) throw DomainError("missing coordinates for " + o);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open dataset: " + path);
    json j = json::parse(in);
    Dataset d;
    d.name = j.at("name").get<std::string>();
    d.domain = domain_from_string(j.at("domain").get<std::string>());
    for (const auto& o : j.at("objects")) d.objects.push_back(normalize_object_id(o));
    if (j.contains("ground_truth")) {
        const json& gt = j["ground_truth"];
        if (gt.contains("dates"))
            for (auto it = gt["dates"].begin(); it != gt["dates"].end(); ++it)
                d.dates[normalize_object_id(it.key())] = it.value().get<double>();
        if (gt.contains("coords"))
            for (auto it = gt["coords"].begin(); it != gt["coords"].end(); ++it)
                d.coords[normalize_object_id(it.key())] = {it.value()[0].get<double>(),
                                                           it.value()[1].get<double>()};
        if (gt.contains("seeds"))
            for (const auto& s : gt["seeds"])
                d.seeds.push_back(assertion_from_jsonl(s.dump()));
    }
    d.validate();
    return d;
}

void write_dataset(const std::string& path, const Dataset& d) {
    json j;
    j["name"] = d.name;
    j["domain"] = to_string(d.domain);
    j["objects"] = d.objects;
    json gt = json::object();
    if (!d.dates.empty()) {
        json m = json::object();
        for (const auto& [k, v] : d.dates) m[k] = v;
        gt["dates"] = m;
    }
    if (!d.coords.empty()) {
        json m = json::object();
        for (const auto& [k, v] : d.coords) m[k] = json::array({v[0], v[1]});
        gt["coords"] = m;
    }
    if (!d.seeds.empty()) {
        json arr = json::array();
        for (const auto& s : d.seeds) arr.push_back(json::parse(assertion_to_jsonl(s)));
        gt["seeds"] = arr;
    }
    if (!gt.empty()) j["ground_truth"] = gt;
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write dataset: " + path);
    out << j.dump(2) << "\n";
}

Dataset gen_plane(uint64_t seed) {
    Dataset d;
    d.name = "plane";
    d.domain = Domain::Spatial;
    std::mt19937_64 rng(seed);
    std::vector<int> xs(20), ys(20);
    std::iota(xs.begin(), xs.end(), -10);
    std::iota(ys.begin(), ys.end(), -10);
    std::shuffle(xs.begin(), xs.end(), rng);
    std::shuffle(ys.begin(), ys.end(), rng);
    for (int i = 0; i < 20; ++i) {
        std::string name = "Object_" + std::to_string(i);
        d.objects.push_back(name);
        d.coords[name] = {static_cast<double>(xs[i]), static_cast<double>(ys[i])};
    }
    return d;
}

namespace {

KinshipGen build_kinship(const std::vector<std::string>& ids, int couple1_children,
                         std::mt19937_64& rng) {
    // Layout of the 11 ids:
    //   0,1   top couple (0 male)
    //   2,3   their children; 4,5 the married-in spouses (2&4, 3&5 couples)
    //   6..9  grandchildren: first `couple1_children` under (2,4), rest under (3,5)
    //   10    fourth-generation daughter
    KinshipGen out;
    kinship::KinshipTree& t = out.tree;
    auto male = kinship::Gender::Male;
    auto female = kinship::Gender::Female;

    t.set_gender(ids[0], male);
    t.set_gender(ids[1], female);
    t.add_spouse_edge(ids[0], ids[1]);
    std::bernoulli_distribution coin(0.5);
    for (int c : {2, 3}) {
        t.set_gender(ids[c], coin(rng) ? male : female);
        t.set_gender(ids[c + 2], t.gender(ids[c]) == male ? female : male);
        t.add_parent_edge(ids[0], ids[c]);
        t.add_parent_edge(ids[1], ids[c]);
        t.add_spouse_edge(ids[c], ids[c + 2]);
    }
    std::vector<int> g3(4);
    std::iota(g3.begin(), g3.end(), 6);
    for (int i = 0; i < 4; ++i) {
        int child = g3[i];
        int p = i < couple1_children ? 2 : 3;
        t.set_gender(ids[child], coin(rng) ? male : female);
        t.add_parent_edge(ids[p], ids[child]);
        t.add_parent_edge(ids[p + 2], ids[child]);
    }
    // The fourth-generation daughter needs a female grandchild as her mother.
    std::vector<int> girls;
    for (int c : g3)
        if (t.gender(ids[c]) == female) girls.push_back(c);
    if (girls.empty()) {
        girls.push_back(g3[std::uniform_int_distribution<int>(0, 3)(rng)]);
        // Regender; caller's uniqueness check still validates the result.
        t = kinship::KinshipTree();
        return build_kinship(ids, couple1_children, rng);
    }
    int mother = girls[std::uniform_int_distribution<int>(0, (int)girls.size() - 1)(rng)];
    t.set_gender(ids[10], female);
    t.add_parent_edge(ids[mother], ids[10]);
    t.close();

    auto child_label = [&](int c) {
        return t.gender(ids[c]) == male ? "son" : "daughter";
    };
    auto parent_label = [&](int p) {
        return t.gender(ids[p]) == male ? "father" : "mother";
    };
    auto mk = [&](const std::string& s, const std::string& l, const std::string& o) {
        RelationAssertion a;
        a.subject = s;
        a.object = o;
        a.label = {Domain::Kinship, l};
        a.source = Source::Synthetic;
        a.dataset = "kinship";
        return a;
    };
    std::vector<RelationAssertion> seeds;
    seeds.push_back(mk(ids[0], "husband", ids[1]));
    // Anchor the two second-generation children to a random top parent.
    seeds.push_back(mk(ids[2], child_label(2), ids[coin(rng) ? 0 : 1]));
    seeds.push_back(mk(ids[3], child_label(3), ids[coin(rng) ? 0 : 1]));
    // Per couple: one grandchild anchored to both sides, establishing the
    // marriage through co-parenthood.
    int z1 = g3[0], z2 = g3[couple1_children];
    seeds.push_back(mk(ids[z1], child_label(z1), ids[4]));
    seeds.push_back(mk(ids[2], parent_label(2), ids[z1]));
    seeds.push_back(mk(ids[z2], child_label(z2), ids[5]));
    seeds.push_back(mk(ids[3], parent_label(3), ids[z2]));
    // Remaining grandchildren: one parent seed each.
    for (int c : g3) {
        if (c == z1 || c == z2) continue;
        int p = (c - 6 < couple1_children ? 2 : 3) + (coin(rng) ? 0 : 2);
        seeds.push_back(mk(ids[c], child_label(c), ids[p]));
    }
    seeds.push_back(mk(ids[10], "daughter", ids[mother]));

    std::shuffle(seeds.begin(), seeds.end(), rng);
    out.dataset.name = "kinship";
    out.dataset.domain = Domain::Kinship;
    out.dataset.objects.assign(ids.begin(), ids.end());
    std::sort(out.dataset.objects.begin(), out.dataset.objects.end());
    out.dataset.seeds = seeds;
    return out;
}

bool seeds_determine_tree(const KinshipGen& gen) {
    kinship::KinshipTree derived;
    try {
        for (const auto& s : gen.dataset.seeds) derived.apply_seed(s);
        derived.close();
    } catch (const kinship::InconsistentSeeds&) {
        return false;
    }
    if (derived.persons().size() != gen.tree.persons().size()) return false;
    for (const auto& [id, p] : gen.tree.persons()) {
        auto it = derived.persons().find(id);
        if (it == derived.persons().end()) return false;
        if (it->second.gender != p.gender || it->second.gender == kinship::Gender::Unknown)
            return false;
        if (it->second.generation != p.generation) return false;
    }
    if (derived.parent_edges() != gen.tree.parent_edges()) return false;
    for (const auto& [id, p] : gen.tree.persons())
        if (derived.spouse(id) != gen.tree.spouse(id)) return false;
    return true;
}

}  // namespace

KinshipGen gen_kinship_tree(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::string> pool = {"A", "B", "C", "D", "E", "F", "G", "W", "X", "Y", "Z"};
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::string> ids = pool;
        std::shuffle(ids.begin(), ids.end(), rng);
        int couple1_children = std::uniform_int_distribution<int>(1, 3)(rng);
        KinshipGen gen = build_kinship(ids, couple1_children, rng);
        if (seeds_determine_tree(gen)) return gen;
    }
    throw DomainError("gen_kinship_tree: no unique seed set found in 1000 attempts");
}

KinshipGen fixed_kinship_instance() {
    KinshipGen out;
    out.tree = kinship::fixed_tree();
    out.dataset.name = "kinship";
    out.dataset.domain = Domain::Kinship;
    for (const auto& [id, p] : out.tree.persons()) out.dataset.objects.push_back(id);
    out.dataset.seeds = kinship::fixed_seeds();
    return out;
}

namespace {

std::string offset_line(const std::string& from, const std::string& to, double dx, double dy) {
    std::ostringstream os;
    os << from << " to " << to << " is " << (dx >= 0 ? "east" : "west") << " ("
       << std::llabs(std::llround(dx)) << " units) and " << (dy >= 0 ? "north" : "south") << " ("
       << std::llabs(std::llround(dy)) << " units).";
    return os.str();
}

void closure_from_positions(Context& ctx, const Dataset& d) {
    for (const auto& a : d.objects)
        for (const auto& b : d.objects) {
            if (a == b) continue;
            const auto& pa = ctx.positions.at(a);
            const auto& pb = ctx.positions.at(b);
            RelationAssertion r;
            r.subject = a;
            r.object = b;
            r.label = {Domain::Spatial, recompose_spatial(pa[0] < pb[0], pa[1] < pb[1])};
            r.source = Source::GroundTruth;
            r.dataset = d.name;
            ctx.assertions.push_back(r);
        }
}

void closure_from_dates(Context& ctx, const Dataset& d) {
    for (const auto& a : d.objects)
        for (const auto& b : d.objects) {
            if (a == b) continue;
            RelationAssertion r;
            r.subject = a;
            r.object = b;
            r.label = {Domain::Temporal, d.dates.at(a) < d.dates.at(b) ? "before" : "after"};
            r.source = Source::GroundTruth;
            r.dataset = d.name;
            ctx.assertions.push_back(r);
        }
}

}  // namespace

Context emit_context(const Dataset& dataset, ContextRegime regime) {
    if (!dataset.has_ground_truth()) throw DomainError("emit_context: missing ground truth");
    Context ctx;
    ctx.mode = ContextMode::Full;
    ctx.regime = regime;
    if (dataset.domain == Domain::Temporal) {
        for (const auto& o : dataset.objects) {
            std::ostringstream os;
            os << o << " is dated " << std::llround(dataset.dates.at(o)) << ".";
            ctx.lines.push_back(os.str());
        }
        closure_from_dates(ctx, dataset);
        return ctx;
    }
    if (dataset.domain == Domain::Kinship) {
        kinship::KinshipTree t;
        for (const auto& s : dataset.seeds) t.apply_seed(s);
        t.close();
        return kinship::closure_context(t, dataset.name);
    }

    const auto& objs = dataset.objects;
    switch (regime) {
        case ContextRegime::XYPos: {
            for (const auto& o : objs) {
                const auto& c = dataset.coords.at(o);
                std::ostringstream os;
                os << o << " is at (" << std::llround(c[0]) << ", " << std::llround(c[1]) << ").";
                ctx.lines.push_back(os.str());
                ctx.positions[o] = c;
            }
            break;
        }
        case ContextRegime::CenterRel: {
            const auto& center = dataset.coords.at(objs[0]);
            ctx.positions[objs[0]] = center;
            for (size_t i = 1; i < objs.size(); ++i) {
                const auto& c = dataset.coords.at(objs[i]);
                double dx = c[0] - center[0], dy = c[1] - center[1];
                ctx.lines.push_back(offset_line(objs[i], objs[0], dx, dy));
                // Reconstruct from the offsets, not the raw coordinates.
                ctx.positions[objs[i]] = {center[0] + dx, center[1] + dy};
            }
            break;
        }
        case ContextRegime::OrderedRel: {
            ctx.positions[objs[0]] = dataset.coords.at(objs[0]);
            for (size_t k = 0; k + 1 < objs.size(); ++k) {
                const auto& a = dataset.coords.at(objs[k]);
                const auto& b = dataset.coords.at(objs[k + 1]);
                double dx = b[0] - a[0], dy = b[1] - a[1];
                ctx.lines.push_back(offset_line(objs[k + 1], objs[k], dx, dy));
                const auto& prev = ctx.positions.at(objs[k]);
                ctx.positions[objs[k + 1]] = {prev[0] + dx, prev[1] + dy};
            }
            break;
        }
        default:
            throw DomainError("emit_context: regime not applicable to spatial data");
    }
    closure_from_positions(ctx, dataset);
    return ctx;
}

NodeOrdering ground_truth_ordering(const Dataset& d, Axis axis,
                                   const std::vector<std::string>& node_order) {
    auto key = [&](const std::string& o) -> double {
        switch (axis) {
            case Axis::Time: return d.dates.at(o);
            case Axis::X: return d.coords.at(o)[0];
            case Axis::Y: return d.coords.at(o)[1];
            default: throw DomainError("ground_truth_ordering: unsupported axis");
        }
    };
    int n = static_cast<int>(node_order.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        double ka = key(node_order[a]), kb = key(node_order[b]);
        if (ka != kb) return ka < kb;
        return node_order[a] < node_order[b];
    });
    NodeOrdering out;
    out.rank.assign(n, 0);
    for (int i = 0; i < n; ++i) out.rank[idx[i]] = i + 1;
    return out;
}

std::vector<RelationAssertion> ground_truth_assertions(const Dataset& d) {
    Context ctx = emit_context(
        d, d.domain == Domain::Spatial ? ContextRegime::XYPos : ContextRegime::None);
    return ctx.assertions;
}

}  // namespace relfix
