#include <filesystem>
#include <set>

#include "doctest.h"
#include "relfix/datagen.hpp"

using namespace relfix;

namespace {
const std::string kData = RELFIX_DATA_DIR;
}

TEST_CASE("shipped real-world datasets match the expected sizes") {
    struct Row {
        const char* file;
        Domain domain;
        size_t size;
    };
    const Row rows[] = {
        {"art.json", Domain::Temporal, 20},       {"ancient.json", Domain::Temporal, 20},
        {"recent.json", Domain::Temporal, 20},    {"us_city.json", Domain::Spatial, 20},
        {"us_state.json", Domain::Spatial, 51},
    };
    for (const Row& r : rows) {
        CAPTURE(r.file);
        Dataset d = load_dataset(kData + "/" + r.file);
        d.validate();
        CHECK(d.domain == r.domain);
        CHECK(d.objects.size() == r.size);
        CHECK(d.has_ground_truth());
        // Distinct values per axis so every ground-truth order is total.
        if (r.domain == Domain::Temporal) {
            std::set<double> dates;
            for (const auto& o : d.objects) dates.insert(d.dates.at(o));
            CHECK(dates.size() == r.size);
        } else {
            std::set<double> xs, ys;
            for (const auto& o : d.objects) {
                xs.insert(d.coords.at(o)[0]);
                ys.insert(d.coords.at(o)[1]);
            }
            CHECK(xs.size() == r.size);
            CHECK(ys.size() == r.size);
        }
    }
}

TEST_CASE("dataset file round trip") {
    namespace fs = std::filesystem;
    Dataset d = load_dataset(kData + "/us_city.json");
    fs::path p = fs::temp_directory_path() / "relfix_test_dataset.json";
    write_dataset(p.string(), d);
    Dataset back = load_dataset(p.string());
    CHECK(back.name == d.name);
    CHECK(back.domain == d.domain);
    CHECK(back.objects == d.objects);
    CHECK(back.coords == d.coords);
    fs::remove(p);
    CHECK_THROWS_AS(load_dataset("/nonexistent/x.json"), DomainError);
}

TEST_CASE("gen_plane produces two permutations of -10..9") {
    for (uint64_t seed : {0ull, 1ull, 42ull, 999ull}) {
        Dataset d = gen_plane(seed);
        CHECK(d.domain == Domain::Spatial);
        REQUIRE(d.objects.size() == 20);
        CHECK(d.objects.front() == "Object_0");
        CHECK(d.objects.back() == "Object_19");
        std::multiset<double> xs, ys, want;
        for (int v = -10; v <= 9; ++v) want.insert(v);
        for (const auto& o : d.objects) {
            xs.insert(d.coords.at(o)[0]);
            ys.insert(d.coords.at(o)[1]);
        }
        CHECK(xs == want);
        CHECK(ys == want);
    }
    // Determinism and seed sensitivity.
    CHECK(gen_plane(7).coords == gen_plane(7).coords);
    CHECK(gen_plane(7).coords != gen_plane(8).coords);
}

TEST_CASE("gen_kinship_tree emits 11 persons and 10 determining seeds") {
    for (uint64_t seed : {0ull, 3ull, 17ull, 123ull, 2026ull}) {
        CAPTURE(seed);
        KinshipGen gen = gen_kinship_tree(seed);
        CHECK(gen.dataset.domain == Domain::Kinship);
        CHECK(gen.dataset.objects.size() == 11);
        CHECK(gen.dataset.seeds.size() == 10);
        CHECK(gen.tree.persons().size() == 11);

        // The emitted seeds alone rebuild the full tree: same genders, same
        // parent edges, same closure.
        kinship::KinshipTree derived;
        for (const auto& s : gen.dataset.seeds) derived.apply_seed(s);
        derived.close();
        CHECK(derived.parent_edges() == gen.tree.parent_edges());
        for (const auto& [id, p] : gen.tree.persons()) {
            CAPTURE(id);
            CHECK(derived.gender(id) == p.gender);
        }
        CHECK(kinship::full_closure(derived) == kinship::full_closure(gen.tree));

        // 4 generations.
        int max_gen = 0;
        for (const auto& [id, p] : gen.tree.persons()) max_gen = std::max(max_gen, p.generation);
        CHECK(max_gen == 3);
    }
    CHECK(gen_kinship_tree(9).dataset.seeds.size() == 10);
}

TEST_CASE("fixed kinship instance matches the hand-built tree") {
    KinshipGen gen = fixed_kinship_instance();
    CHECK(gen.dataset.objects.size() == 11);
    CHECK(gen.dataset.seeds.size() == 10);
    CHECK(kinship::full_closure(gen.tree).size() == 102);
}

TEST_CASE("temporal context emits one dated line per object and the closure") {
    Dataset d = load_dataset(kData + "/art.json");
    Context ctx = emit_context(d, ContextRegime::None);
    CHECK(ctx.mode == ContextMode::Full);
    CHECK(ctx.lines.size() == 20);
    CHECK(ctx.assertions.size() == 20 * 19);
}

TEST_CASE("spatial context regimes are information equivalent") {
    Dataset d = gen_plane(31);
    Context xy = emit_context(d, ContextRegime::XYPos);
    Context center = emit_context(d, ContextRegime::CenterRel);
    Context ordered = emit_context(d, ContextRegime::OrderedRel);

    CHECK(xy.lines.size() == 20);
    CHECK(center.lines.size() == 19);
    CHECK(ordered.lines.size() == 19);

    // Reconstructed positions equal ground truth exactly (integer offsets).
    for (const auto& o : d.objects) {
        CHECK(center.positions.at(o) == d.coords.at(o));
        CHECK(ordered.positions.at(o) == d.coords.at(o));
    }

    auto closure_set = [](const Context& c) {
        std::set<std::string> s;
        for (const auto& a : c.assertions) s.insert(a.subject + "|" + a.label.label + "|" + a.object);
        return s;
    };
    auto base = closure_set(xy);
    CHECK(base.size() == 20 * 19);
    CHECK(closure_set(center) == base);
    CHECK(closure_set(ordered) == base);

    // The offset statement format.
    bool found = false;
    for (const auto& l : center.lines)
        if (l.find(" units) and ") != std::string::npos &&
            (l.find("east (") != std::string::npos || l.find("west (") != std::string::npos))
            found = true;
    CHECK(found);

    CHECK_THROWS_AS(emit_context(Dataset{}, ContextRegime::XYPos), DomainError);
}

TEST_CASE("ground_truth_ordering ranks by the axis value") {
    Dataset d = load_dataset(kData + "/us_city.json");
    NodeOrdering ox = ground_truth_ordering(d, Axis::X, d.objects);
    NodeOrdering oy = ground_truth_ordering(d, Axis::Y, d.objects);
    for (size_t i = 0; i < d.objects.size(); ++i)
        for (size_t j = 0; j < d.objects.size(); ++j) {
            if (i == j) continue;
            if (d.coords.at(d.objects[i])[0] < d.coords.at(d.objects[j])[0])
                CHECK(ox.rank[i] < ox.rank[j]);
            if (d.coords.at(d.objects[i])[1] < d.coords.at(d.objects[j])[1])
                CHECK(oy.rank[i] < oy.rank[j]);
        }

    Dataset art = load_dataset(kData + "/art.json");
    NodeOrdering ot = ground_truth_ordering(art, Axis::Time, art.objects);
    for (size_t i = 0; i + 1 < art.objects.size(); ++i)
        for (size_t j = i + 1; j < art.objects.size(); ++j)
            if (art.dates.at(art.objects[i]) < art.dates.at(art.objects[j]))
                CHECK(ot.rank[i] < ot.rank[j]);
}

TEST_CASE("ground_truth_assertions covers every ordered pair") {
    Dataset d = gen_plane(4);
    auto as = ground_truth_assertions(d);
    CHECK(as.size() == 20 * 19);
    for (const auto& a : as) {
        CHECK(a.source == Source::GroundTruth);
        const auto& pa = d.coords.at(a.subject);
        const auto& pb = d.coords.at(a.object);
        CHECK(a.label.label == recompose_spatial(pa[0] < pb[0], pa[1] < pb[1]));
    }
}
