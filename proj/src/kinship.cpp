#include "relfix/kinship.hpp"

#include <algorithm>
#include <sstream>

namespace relfix {
namespace kinship {

void KinshipTree::ensure_person(const std::string& id) {
    auto it = persons_.find(id);
    if (it == persons_.end()) persons_[id] = Person{id, Gender::Unknown, -1};
}

Gender KinshipTree::gender(const std::string& id) const {
    auto it = persons_.find(id);
    return it == persons_.end() ? Gender::Unknown : it->second.gender;
}

int KinshipTree::generation(const std::string& id) const {
    auto it = persons_.find(id);
    return it == persons_.end() ? -1 : it->second.generation;
}

std::vector<std::string> KinshipTree::parents(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [p, c] : parent_edges_)
        if (c == id) out.push_back(p);
    return out;
}

std::vector<std::string> KinshipTree::children(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [p, c] : parent_edges_)
        if (p == id) out.push_back(c);
    return out;
}

std::optional<std::string> KinshipTree::spouse(const std::string& id) const {
    auto it = spouse_.find(id);
    if (it == spouse_.end()) return std::nullopt;
    return it->second;
}

void KinshipTree::set_gender(const std::string& id, Gender g) {
    ensure_person(id);
    Person& p = persons_[id];
    if (p.gender != Gender::Unknown && p.gender != g)
        throw InconsistentSeeds("gender clash for " + id);
    p.gender = g;
}

void KinshipTree::add_parent_edge(const std::string& parent, const std::string& child) {
    ensure_person(parent);
    ensure_person(child);
    if (parent == child) throw InconsistentSeeds("person cannot be their own parent");
    if (parent_edges_.count({parent, child})) return;
    auto ps = parents(child);
    if (std::find(ps.begin(), ps.end(), parent) == ps.end() && ps.size() >= 2)
        throw InconsistentSeeds("third parent for " + child);
    parent_edges_.insert({parent, child});
}

void KinshipTree::add_spouse_edge(const std::string& a, const std::string& b) {
    ensure_person(a);
    ensure_person(b);
    if (a == b) throw InconsistentSeeds("person cannot marry themselves");
    auto sa = spouse(a), sb = spouse(b);
    if ((sa && *sa != b) || (sb && *sb != a))
        throw InconsistentSeeds("second spouse for " + a + "/" + b);
    spouse_[a] = b;
    spouse_[b] = a;
}

void KinshipTree::apply_seed(const RelationAssertion& assertion) {
    const std::string& l = assertion.label.label;
    const std::string& s = assertion.subject;
    const std::string& o = assertion.object;
    if (s == o) throw InconsistentSeeds("seed subject equals object");
    if (l == "father") {
        add_parent_edge(s, o);
        set_gender(s, Gender::Male);
    } else if (l == "mother") {
        add_parent_edge(s, o);
        set_gender(s, Gender::Female);
    } else if (l == "son") {
        add_parent_edge(o, s);
        set_gender(s, Gender::Male);
    } else if (l == "daughter") {
        add_parent_edge(o, s);
        set_gender(s, Gender::Female);
    } else if (l == "husband") {
        add_spouse_edge(s, o);
        set_gender(s, Gender::Male);
        set_gender(o, Gender::Female);
    } else if (l == "wife") {
        add_spouse_edge(s, o);
        set_gender(s, Gender::Female);
        set_gender(o, Gender::Male);
    } else {
        throw InconsistentSeeds("not a seed label: " + l);
    }
}

void KinshipTree::close() {
    bool changed = true;
    while (changed) {
        changed = false;
        // Co-parents are spouses.
        std::map<std::string, std::vector<std::string>> by_child;
        for (const auto& [p, c] : parent_edges_) by_child[c].push_back(p);
        for (const auto& [c, ps] : by_child) {
            if (ps.size() == 2 && !spouse(ps[0])) {
                add_spouse_edge(ps[0], ps[1]);
                changed = true;
            }
        }
        // Spouses have opposite genders.
        for (const auto& [a, b] : spouse_) {
            Gender ga = gender(a), gb = gender(b);
            if (ga != Gender::Unknown && gb == Gender::Unknown) {
                set_gender(b, ga == Gender::Male ? Gender::Female : Gender::Male);
                changed = true;
            }
            if (ga != Gender::Unknown && gb != Gender::Unknown && ga == gb)
                throw InconsistentSeeds("same-gender spouse pair " + a + "/" + b);
        }
        // A child of one spouse is a child of both (no half-siblings).
        std::vector<std::pair<std::string, std::string>> to_add;
        for (const auto& [p, c] : parent_edges_) {
            auto sp = spouse(p);
            if (sp && !parent_edges_.count({*sp, c})) to_add.push_back({*sp, c});
        }
        for (const auto& e : to_add) {
            add_parent_edge(e.first, e.second);
            changed = true;
        }
    }
    // Generations: roots (no parents, or married to a root side) anchor 0.
    // Propagate parent->child (+1) and spouse (=) over the undirected mix.
    for (auto& [id, p] : persons_) p.generation = -1;
    // Pick the person(s) with no parents reachable upward the farthest.
    // Simple BFS relaxation from every parentless person at level 0, spouses
    // equal, children one below; take max to settle married-in roots.
    bool moved = true;
    for (auto& [id, p] : persons_)
        if (parents(id).empty()) p.generation = 0;
    int guard = static_cast<int>(persons_.size() + parent_edges_.size()) + 4;
    while (moved) {
        if (--guard < 0) throw InconsistentSeeds("cyclic ancestry");
        moved = false;
        for (const auto& [pe_p, pe_c] : parent_edges_) {
            int gp = persons_[pe_p].generation;
            if (gp >= 0 && persons_[pe_c].generation < gp + 1) {
                persons_[pe_c].generation = gp + 1;
                moved = true;
            }
        }
        for (const auto& [a, b] : spouse_) {
            int ga = persons_[a].generation, gb = persons_[b].generation;
            int m = std::max(ga, gb);
            if (ga < m) {
                persons_[a].generation = m;
                moved = true;
            }
            if (gb < m) {
                persons_[b].generation = m;
                moved = true;
            }
        }
    }
}

namespace {

bool is_parent(const KinshipTree& t, const std::string& a, const std::string& b) {
    return t.parent_edges().count({a, b}) > 0;
}

// Ancestor distance a above b, 0 if not an ancestor (max depth 3).
int ancestor_distance(const KinshipTree& t, const std::string& a, const std::string& b) {
    std::vector<std::string> frontier = {b};
    for (int d = 1; d <= 3; ++d) {
        std::vector<std::string> next;
        for (const auto& x : frontier)
            for (const auto& p : t.parents(x)) {
                if (p == a) return d;
                next.push_back(p);
            }
        frontier = std::move(next);
    }
    return 0;
}

bool are_siblings(const KinshipTree& t, const std::string& a, const std::string& b) {
    if (a == b) return false;
    for (const auto& p : t.parents(a))
        if (is_parent(t, p, b)) return true;
    return false;
}

std::string gendered(const KinshipTree& t, const std::string& who, const std::string& male,
                     const std::string& female) {
    return t.gender(who) == Gender::Male ? male : female;
}

}  // namespace

std::optional<std::string> derive_relation(const KinshipTree& tree, const std::string& a,
                                           const std::string& b) {
    if (a == b) throw DomainError("derive_relation: subject equals object");
    if (!tree.persons().count(a) || !tree.persons().count(b))
        throw DomainError("derive_relation: unknown person");

    auto sp_a = tree.spouse(a);
    auto sp_b = tree.spouse(b);
    if (sp_a && *sp_a == b) return gendered(tree, a, "husband", "wife");

    // Blood line.
    if (int d = ancestor_distance(tree, a, b); d > 0) {
        if (d == 1) return gendered(tree, a, "father", "mother");
        if (d == 2) return gendered(tree, a, "grandpa", "grandma");
        return gendered(tree, a, "great-grandpa", "great-grandma");
    }
    if (int d = ancestor_distance(tree, b, a); d > 0) {
        if (d == 1) return gendered(tree, a, "son", "daughter");
        if (d == 2) return gendered(tree, a, "grandson", "granddaughter");
        return gendered(tree, a, "great-grandson", "great-granddaughter");
    }
    if (are_siblings(tree, a, b)) return gendered(tree, a, "brother", "sister");
    // a is sibling of a parent of b -> uncle/aunt.
    for (const auto& p : tree.parents(b))
        if (are_siblings(tree, a, p)) return gendered(tree, a, "uncle", "aunt");
    // b is sibling of a parent of a -> a is nephew/niece.
    for (const auto& p : tree.parents(a))
        if (are_siblings(tree, b, p)) return gendered(tree, a, "nephew", "niece");
    // First cousins: some parent of a is a sibling of some parent of b.
    for (const auto& pa : tree.parents(a))
        for (const auto& pb : tree.parents(b))
            if (are_siblings(tree, pa, pb)) return "cousin";

    // In-laws: exactly one marriage hop.
    if (sp_b) {
        if (is_parent(tree, a, *sp_b)) return gendered(tree, a, "father-in-law", "mother-in-law");
        if (are_siblings(tree, a, *sp_b))
            return gendered(tree, a, "brother-in-law", "sister-in-law");
    }
    if (sp_a) {
        if (is_parent(tree, b, *sp_a)) return gendered(tree, a, "son-in-law", "daughter-in-law");
        if (are_siblings(tree, *sp_a, b))
            return gendered(tree, a, "brother-in-law", "sister-in-law");
        // a's spouse is a blood uncle/aunt of b -> a is uncle-in-law/aunt-in-law.
        for (const auto& p : tree.parents(b))
            if (are_siblings(tree, *sp_a, p)) return gendered(tree, a, "uncle-in-law", "aunt-in-law");
    }
    if (sp_b) {
        // a is a blood nephew/niece of b's spouse -> a is nephew-in-law/niece-in-law.
        for (const auto& p : tree.parents(a))
            if (are_siblings(tree, *sp_b, p))
                return gendered(tree, a, "nephew-in-law", "niece-in-law");
    }
    return std::nullopt;
}

std::map<std::pair<std::string, std::string>, std::string> full_closure(const KinshipTree& tree) {
    std::map<std::pair<std::string, std::string>, std::string> out;
    for (const auto& [ida, pa] : tree.persons())
        for (const auto& [idb, pb] : tree.persons()) {
            if (ida == idb) continue;
            if (auto rel = derive_relation(tree, ida, idb)) out[{ida, idb}] = *rel;
        }
    return out;
}

Context closure_context(const KinshipTree& tree, const std::string& dataset_name) {
    Context ctx;
    ctx.mode = ContextMode::Full;
    ctx.regime = ContextRegime::Seeds;
    for (const auto& [pair, label] : full_closure(tree)) {
        RelationAssertion a;
        a.subject = pair.first;
        a.object = pair.second;
        a.label = {Domain::Kinship, label};
        a.source = Source::GroundTruth;
        a.dataset = dataset_name;
        ctx.assertions.push_back(a);
        ctx.lines.push_back(pair.first + " is the " + label + " of " + pair.second + ".");
    }
    return ctx;
}

Gender label_subject_gender(const std::string& label) {
    static const std::set<std::string> male = {
        "husband", "father", "son",      "brother",       "uncle",         "nephew",
        "grandpa", "grandson", "brother-in-law", "father-in-law", "son-in-law",
        "uncle-in-law", "nephew-in-law", "great-grandpa", "great-grandson"};
    static const std::set<std::string> female = {
        "wife",    "mother",  "daughter", "sister",        "aunt",           "niece",
        "grandma", "granddaughter", "sister-in-law", "mother-in-law", "daughter-in-law",
        "aunt-in-law", "niece-in-law", "great-grandma", "great-granddaughter"};
    if (male.count(label)) return Gender::Male;
    if (female.count(label)) return Gender::Female;
    return Gender::Unknown;  // cousin
}

AnswerCheck check_answers(const std::vector<RelationAssertion>& assertions,
                          const std::map<std::pair<std::string, std::string>, std::string>& closure,
                          int n_objects, long long denominator_override) {
    AnswerCheck out;
    out.report.n_objects = n_objects;
    out.report.mode = ScoreMode::ErrorRate;
    out.report.reference = ScoreReference::GroundTruth;
    out.report.axis = Axis::KinshipGeneration;
    out.report.denominator =
        denominator_override >= 0 ? denominator_override : static_cast<long long>(closure.size());
    std::map<std::string, std::set<int>> claimed_gender;  // 0 male, 1 female
    for (const auto& a : assertions) {
        auto it = closure.find({a.subject, a.object});
        if (it != closure.end() && it->second != a.label.label) ++out.report.violating_edges;
        Gender g = label_subject_gender(a.label.label);
        if (g != Gender::Unknown) claimed_gender[a.subject].insert(g == Gender::Male ? 0 : 1);
    }
    for (const auto& [person, gs] : claimed_gender)
        if (gs.size() > 1) out.gender_contradictions.push_back(person);
    return out;
}

KinshipTree fixed_tree() {
    KinshipTree t;
    for (const auto& s : fixed_seeds()) t.apply_seed(s);
    t.close();
    return t;
}

std::vector<RelationAssertion> fixed_seeds() {
    auto mk = [](const std::string& s, const std::string& l, const std::string& o) {
        RelationAssertion a;
        a.subject = s;
        a.object = o;
        a.label = {Domain::Kinship, l};
        a.source = Source::GroundTruth;
        a.dataset = "kinship";
        return a;
    };
    return {
        mk("Z", "son", "Y"),      mk("C", "son", "E"),    mk("A", "daughter", "F"),
        mk("D", "father", "B"),   mk("X", "daughter", "A"), mk("C", "father", "Z"),
        mk("E", "husband", "F"),  mk("B", "son", "A"),    mk("W", "daughter", "D"),
        mk("G", "daughter", "X"),
    };
}

std::string closure_csv(
    const std::map<std::pair<std::string, std::string>, std::string>& closure) {
    std::ostringstream os;
    os << "subject,object,relation\n";
    for (const auto& [pair, label] : closure)
        os << pair.first << "," << pair.second << "," << label << "\n";
    return os.str();
}

}  // namespace kinship
}  // namespace relfix
