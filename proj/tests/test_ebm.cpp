#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "relfix/ebm.hpp"

using namespace relfix;

namespace {

std::vector<std::string> make_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    return names;
}

std::vector<ebm::Constraint> random_relations(int n, int count, std::mt19937_64& rng) {
    std::vector<ebm::Constraint> rel;
    for (int k = 0; k < count; ++k) {
        int i = static_cast<int>(rng() % n);
        int j = static_cast<int>(rng() % n);
        if (i == j) continue;
        rel.push_back({i, j, 1 + static_cast<int>(rng() % 3)});
    }
    return rel;
}

}  // namespace

TEST_CASE("relation energy is the hinge") {
    CHECK(ebm::relation_energy(0.0, 2.0) == 0.0);
    CHECK(ebm::relation_energy(0.0, 0.5) == doctest::Approx(0.5));
    CHECK(ebm::relation_energy(1.0, 0.0) == doctest::Approx(2.0));
    CHECK(ebm::relation_energy(0.0, 1.0) == 0.0);  // exactly at the kink
}

TEST_CASE("parallel kernels match the serial references bit-for-bit") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 5 + static_cast<int>(rng() % 300);
        std::vector<double> coords(n);
        for (double& x : coords) x = unif(rng);
        auto rel = random_relations(n, 4 * n, rng);
        CHECK(ebm::total_energy(coords, rel) == ebm::total_energy_serial(coords, rel));
        CHECK(ebm::gradient_counts(coords, rel) == ebm::gradient_counts_serial(coords, rel));
    }
}

TEST_CASE("gradient counts match central finite differences away from kinks") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const double h = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 1000; ++trial) {
        int n = 4 + static_cast<int>(rng() % 12);
        std::vector<double> coords(n);
        for (double& x : coords) x = unif(rng);
        auto rel = random_relations(n, 3 * n, rng);
        auto grad = ebm::gradient_counts_serial(coords, rel);
        for (int i = 0; i < n; ++i) {
            // Skip coordinates with any constraint near its kink.
            bool near_kink = false;
            for (const auto& r : rel)
                if ((r.pred == i || r.succ == i) &&
                    std::fabs(1.0 + coords[r.pred] - coords[r.succ]) < 1e-3)
                    near_kink = true;
            if (near_kink) continue;
            std::vector<double> up = coords, dn = coords;
            up[i] += h;
            dn[i] -= h;
            double fd = (ebm::total_energy_serial(up, rel) - ebm::total_energy_serial(dn, rel)) /
                        (2 * h);
            CHECK(std::fabs(fd - static_cast<double>(grad[i])) < 1e-4);
            ++checked;
        }
    }
    CHECK(checked >= 1000);
}

TEST_CASE("initialization is deterministic and applies the correction rule") {
    auto rel = std::vector<ebm::Constraint>{{0, 1, 1}, {1, 2, 1}};
    ebm::EbmState a = ebm::initialize(make_names(3), rel, 7, 0.01);
    ebm::EbmState b = ebm::initialize(make_names(3), rel, 7, 0.01);
    CHECK(a.coords == b.coords);
    ebm::EbmState c = ebm::initialize(make_names(3), rel, 8, 0.01);
    CHECK(a.coords != c.coords);
    CHECK(a.coords.size() == 3);
    CHECK(a.eta == 0.01);
}

TEST_CASE("gradient step moves against the counts") {
    ebm::EbmState s;
    s.node_names = make_names(2);
    s.coords = {0.5, 0.0};  // violates 0 < 1
    s.relations = {{0, 1, 1}};
    s.eta = 0.01;
    double e0 = ebm::total_energy(s);
    ebm::gradient_step(s);
    CHECK(s.coords[0] == doctest::Approx(0.49));
    CHECK(s.coords[1] == doctest::Approx(0.01));
    CHECK(ebm::total_energy(s) < e0);
}

TEST_CASE("satisfiable chain reaches zero energy with the right order") {
    const int n = 51;
    std::vector<ebm::Constraint> rel;
    for (int i = 0; i + 1 < n; ++i) rel.push_back({i, i + 1, 1});
    ebm::EbmRun run = ebm::run_ebm(make_names(n), rel, 5);
    CHECK(run.final_energy == 0.0);
    for (int i = 0; i + 1 < n; ++i) CHECK(run.ordering.rank[i] < run.ordering.rank[i + 1]);
    CHECK(run.ordering.reverse_multiplicity() == 0);
}

TEST_CASE("energy trace is recorded and run is deterministic") {
    std::mt19937_64 rng(303);
    auto rel = random_relations(12, 40, rng);
    ebm::EbmRun a = ebm::run_ebm(make_names(12), rel, 9);
    ebm::EbmRun b = ebm::run_ebm(make_names(12), rel, 9);
    CHECK(a.state.coords == b.state.coords);
    CHECK(a.iterations == b.iterations);
    CHECK(a.state.energy_trace == b.state.energy_trace);
    CHECK_FALSE(a.state.energy_trace.empty());
}

TEST_CASE("ordering_from_coords breaks ties by node id") {
    std::vector<double> coords = {0.5, 0.5, 0.1};
    NodeOrdering ord = ebm::ordering_from_coords(make_names(3), coords, {});
    CHECK(ord.rank == std::vector<int>{2, 3, 1});
}

TEST_CASE("constraints_from_graph carries multiplicities") {
    AxisGraph g({"a", "b", "c"}, Axis::Time);
    g.add_edge("a", "b", 2);
    g.add_edge("c", "b", 1);
    auto rel = ebm::constraints_from_graph(g);
    REQUIRE(rel.size() == 2);
    CHECK(rel[0].multiplicity + rel[1].multiplicity == 3);
}

TEST_CASE("pairwise_error_rate counts misordered pairs") {
    std::vector<int> truth = {1, 2, 3, 4};
    CHECK(ebm::pairwise_error_rate(truth, truth) == 0.0);
    std::vector<int> swapped = {2, 1, 3, 4};
    CHECK(ebm::pairwise_error_rate(swapped, truth) == doctest::Approx(1.0 / 6.0));
    std::vector<int> reversed = {4, 3, 2, 1};
    CHECK(ebm::pairwise_error_rate(reversed, truth) == doctest::Approx(1.0));
}

TEST_CASE("noise sweep is deterministic and exact at ratio zero") {
    auto curve = ebm::noise_sweep(make_names(15), {0.0, 0.1}, 4, 77);
    auto again = ebm::noise_sweep(make_names(15), {0.0, 0.1}, 4, 77);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].mean_error_rate == 0.0);
    CHECK(curve[0].ratio == 0.0);
    for (size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].ratio == again[i].ratio);
        CHECK(curve[i].mean_error_rate == again[i].mean_error_rate);
    }
}
