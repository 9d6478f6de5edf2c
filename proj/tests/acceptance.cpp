// Acceptance suite: one pass/fail line per criterion; exit nonzero on any
// failure. Each criterion carries its own runtime budget.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

#include "relfix/align.hpp"
#include "relfix/datagen.hpp"
#include "relfix/ebm.hpp"
#include "relfix/kinship.hpp"
#include "relfix/llmclient.hpp"
#include "relfix/ordergraph.hpp"
#include "relfix/promptparse.hpp"
#include "relfix/score.hpp"

using namespace relfix;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

struct Criterion {
    const char* name;
    double budget_s;
    Clock::time_point start = Clock::now();
    bool ok = true;
    std::string detail;

    explicit Criterion(const char* n, double budget) : name(n), budget_s(budget) {}
    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
    void finish() {
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (secs > budget_s) {
            ok = false;
            if (detail.empty()) detail = "over time budget";
        }
        std::printf("%-4s %-55s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", name, secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++failures;
    }
};

std::vector<std::string> make_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    return names;
}

AxisGraph random_multigraph(int n, double density, std::mt19937_64& rng) {
    AxisGraph g(make_names(n), Axis::Time);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (unif(rng) < density) g.add_edge(i, j, 1 + static_cast<int>(rng() % 3));
        }
    return g;
}

void criterion1() {
    Criterion c("1 simply-ordered repair over 1000 multigraphs", 10.0);
    std::mt19937_64 rng(1001);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 3 + static_cast<int>(rng() % 10);  // 3..12
        double density = 0.1 + 0.8 * (trial % 100) / 99.0;
        AxisGraph g = random_multigraph(n, density, rng);
        FixResult rev = fix_to_simply_ordered(g, FixMode::Reverse);
        c.require(rev.ordering.reverse_multiplicity() == 0, "Reverse left reverse edges");
        c.require(node_ordering(rev.graph).reverse_multiplicity() == 0,
                  "repaired graph not simply ordered");
        if (g.weakly_connected()) {
            FixResult rem = fix_to_simply_ordered(g, FixMode::Remove);
            c.require(rem.ordering.reverse_multiplicity() == 0, "Remove left reverse edges");
            c.require(rem.graph.weakly_connected(), "Remove broke weak connectivity");
        }
        if (!c.ok) break;
    }
    c.finish();
}

void criterion2() {
    Criterion c("2 heuristic upper-bounds exact minimum feedback", 60.0);
    std::mt19937_64 rng(1002);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 3 + static_cast<int>(rng() % 5);  // 3..7
        AxisGraph g = random_multigraph(n, 0.15 + 0.1 * (trial % 7), rng);
        long long exact = min_feedback_edges_exact(g);
        long long heuristic = node_ordering(g).reverse_multiplicity();
        c.require(heuristic >= exact, "heuristic below exact minimum");
        c.require((heuristic == 0) == (exact == 0), "zero-score mismatch with acyclicity");
        if (!c.ok) break;
    }
    c.finish();
}

void criterion3() {
    Criterion c("3 score fixtures: 10.00%, 10.00%, >100%", 5.0);
    {
        AxisGraph g(make_names(5), Axis::Time);
        for (int i = 0; i + 1 < 5; ++i) g.add_edge(i, i + 1);
        g.add_edge(4, 0);
        InconsistencyReport r = score_no_context(g, node_ordering(g));
        c.require(format_percent(r.percent()) == "10.00", "N=5 one-reverse fixture != 10.00");
        c.require(r.denominator == 10 && r.violating_edges == 1, "N=5 fixture counts wrong");
    }
    {
        std::vector<std::string> objs = make_names(5);
        Context ctx;
        ctx.mode = ContextMode::Full;
        std::vector<RelationAssertion> answers;
        int wrong = 0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (i == j) continue;
                RelationAssertion t;
                t.subject = objs[i];
                t.object = objs[j];
                t.label = {Domain::Temporal, i < j ? "before" : "after"};
                ctx.assertions.push_back(t);
                RelationAssertion ans = t;
                if (wrong < 2 && i == 0) {
                    ans.label.label = ans.label.label == "before" ? "after" : "before";
                    ++wrong;
                }
                answers.push_back(ans);
            }
        InconsistencyReport r = score_with_ground_truth(answers, ctx, 5);
        c.require(format_percent(r.percent()) == "10.00", "2-of-20 error fixture != 10.00");
        c.require(r.denominator == 20 && r.violating_edges == 2, "error fixture counts wrong");
    }
    {
        AxisGraph g(make_names(2), Axis::Time);
        g.add_edge(0, 1, 3);
        g.add_edge(1, 0, 3);
        InconsistencyReport r = score_no_context(g, node_ordering(g));
        c.require(r.percent() > 100.0, "contradictory double edge not above 100%");
        c.require(format_percent(r.percent()) == "300.00", "double-edge fixture != 300.00");
    }
    c.finish();
}

void criterion4() {
    Criterion c("4 EBM gradients, monotone energy, satisfiable chains", 60.0);
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const double h = 1e-6;
    int checked = 0;
    while (checked < 1000 && c.ok) {
        int n = 4 + static_cast<int>(rng() % 12);
        std::vector<double> coords(n);
        for (double& x : coords) x = unif(rng);
        std::vector<ebm::Constraint> rel;
        for (int k = 0; k < 3 * n; ++k) {
            int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
            if (i != j) rel.push_back({i, j, 1 + static_cast<int>(rng() % 2)});
        }
        auto grad = ebm::gradient_counts(coords, rel);
        for (int i = 0; i < n && checked < 1000; ++i) {
            bool near_kink = false;
            for (const auto& r : rel)
                if ((r.pred == i || r.succ == i) &&
                    std::fabs(1.0 + coords[r.pred] - coords[r.succ]) < 1e-3)
                    near_kink = true;
            if (near_kink) continue;
            std::vector<double> up = coords, dn = coords;
            up[i] += h;
            dn[i] -= h;
            double fd =
                (ebm::total_energy(up, rel) - ebm::total_energy(dn, rel)) / (2 * h);
            c.require(std::fabs(fd - static_cast<double>(grad[i])) < 1e-4,
                      "finite-difference gradient mismatch");
            ++checked;
        }
    }
    c.require(checked >= 1000, "too few gradient checkpoints");

    for (int inst = 0; inst < 100 && c.ok; ++inst) {
        int n = 5 + static_cast<int>(rng() % 20);
        std::vector<ebm::Constraint> rel;
        for (int k = 0; k < 4 * n; ++k) {
            int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
            if (i != j) rel.push_back({i, j, 1});
        }
        ebm::EbmRun run = ebm::run_ebm(make_names(n), rel, 5000 + inst);
        for (size_t k = 1; k < run.state.energy_trace.size(); ++k)
            c.require(run.state.energy_trace[k].second <=
                          run.state.energy_trace[k - 1].second + 1e-9,
                      "energy increased across an iteration");
    }

    for (int n : {10, 25, 51}) {
        std::vector<ebm::Constraint> chain;
        for (int i = 0; i + 1 < n; ++i) chain.push_back({i, i + 1, 1});
        ebm::EbmRun run = ebm::run_ebm(make_names(n), chain, n);
        c.require(run.final_energy == 0.0, "satisfiable chain did not reach zero energy");
    }
    c.finish();
}

std::vector<ebm::SweepPoint> g_sweep;  // shared between criteria 5 and the CSV check

void criterion5() {
    Criterion c("5 noise-recovery curve: zero at 0, monotone, R^2>=0.8", 300.0);
    std::vector<double> ratios = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    g_sweep = ebm::noise_sweep(make_names(51), ratios, 20, 20260823);
    c.require(g_sweep.size() == ratios.size(), "sweep size mismatch");
    c.require(g_sweep[0].mean_error_rate == 0.0, "ratio-0 error not exactly zero");
    for (size_t i = 1; i < g_sweep.size(); ++i)
        c.require(g_sweep[i].mean_error_rate >= g_sweep[i - 1].mean_error_rate,
                  "mean error not non-decreasing");
    // Least-squares fit error ~ a + b*ratio.
    double n = static_cast<double>(g_sweep.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : g_sweep) {
        sx += p.ratio;
        sy += p.mean_error_rate;
        sxx += p.ratio * p.ratio;
        sxy += p.ratio * p.mean_error_rate;
        syy += p.mean_error_rate * p.mean_error_rate;
    }
    double sxx_c = sxx - sx * sx / n, sxy_c = sxy - sx * sy / n, syy_c = syy - sy * sy / n;
    double r2 = syy_c > 0 ? (sxy_c * sxy_c) / (sxx_c * syy_c) : 1.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "R^2=%.3f", r2);
    c.require(r2 >= 0.8, std::string("linear fit weak: ") + buf);
    c.finish();
}

void criterion6() {
    Criterion c("6 graph-vs-EBM score correlation r>=0.9", 300.0);
    std::mt19937_64 rng(1006);
    std::vector<std::string> names = make_names(20);
    std::vector<double> graph_scores, ebm_scores;
    for (int level = 0; level < 12; ++level) {
        double ratio = 0.45 * level / 11.0;
        for (int t = 0; t < 3; ++t) {
            std::vector<ebm::Constraint> rel;
            for (int i = 0; i < 20; ++i)
                for (int j = i + 1; j < 20; ++j) rel.push_back({i, j, 1});
            std::vector<size_t> idx(rel.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            size_t flips = static_cast<size_t>(ratio * rel.size() + 0.5);
            for (size_t k = 0; k < flips; ++k) std::swap(rel[idx[k]].pred, rel[idx[k]].succ);
            AxisGraph g(names, Axis::Time);
            for (const auto& r : rel) g.add_edge(r.pred, r.succ, r.multiplicity);
            graph_scores.push_back(score_no_context(g, node_ordering(g)).percent());
            ebm::EbmRun run = ebm::run_ebm(names, rel, rng());
            ebm_scores.push_back(
                score_no_context(g, run.ordering, ScoreReference::EbmOrder).percent());
        }
    }
    double r = pearson(graph_scores, ebm_scores);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "r=%.3f", r);
    c.require(r >= 0.9, std::string("correlation too low: ") + buf);
    c.finish();
}

void criterion7() {
    Criterion c("7 kinship closure on the fixed 10-seed instance", 5.0);
    kinship::KinshipTree t;
    auto seeds = kinship::fixed_seeds();
    for (const auto& s : seeds) t.apply_seed(s);
    t.close();
    auto closure = kinship::full_closure(t);
    c.require(closure.size() == 102, "closure does not label 102 ordered pairs");
    auto expect = [&](const char* a, const char* b, const char* label) {
        auto r = kinship::derive_relation(t, a, b);
        c.require(r.has_value() && *r == label,
                  std::string("spot check failed: ") + a + "->" + b);
    };
    expect("E", "Z", "grandpa");
    expect("F", "A", "mother");
    expect("C", "Z", "father");
    expect("Z", "E", "grandson");
    expect("E", "G", "great-grandpa");
    for (const auto& [pair, label] : closure) {
        auto rev = closure.find({pair.second, pair.first});
        c.require(rev != closure.end(), "duality: converse pair missing");
        if (rev != closure.end())
            c.require(kinship_generation_delta(label) ==
                          -kinship_generation_delta(rev->second),
                      "duality: generation deltas not opposite");
        kinship::Gender g = kinship::label_subject_gender(label);
        if (g != kinship::Gender::Unknown)
            c.require(g == t.gender(pair.first), "single-gender invariant violated");
    }
    std::mt19937_64 rng(1007);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(seeds.begin(), seeds.end(), rng);
        kinship::KinshipTree t2;
        for (const auto& s : seeds) t2.apply_seed(s);
        t2.close();
        c.require(kinship::full_closure(t2) == closure, "closure not seed-order invariant");
    }
    c.finish();
}

void criterion8() {
    Criterion c("8 alignment: cap, agreement with tau, gt-edge budget", 120.0);
    std::mt19937_64 rng(1008);
    long long total_gt = 0, total_initial_rev = 0;
    for (int trial = 0; trial < 500 && c.ok; ++trial) {
        int n = 6 + static_cast<int>(rng() % 46);  // 6..51
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
        std::shuffle(pairs.begin(), pairs.end(), rng);
        int flips = 1 + static_cast<int>(rng() % std::max<size_t>(1, pairs.size() / 5));
        align::TaggedGraph g;
        g.nodes = make_names(n);
        for (size_t k = 0; k < pairs.size(); ++k) {
            auto [i, j] = pairs[k];
            if (static_cast<int>(k) < flips)
                g.edges[{j, i}] = align::EdgeOrigin::Model;
            else
                g.edges[{i, j}] = align::EdgeOrigin::Model;
        }
        std::vector<int> tau(n);
        std::iota(tau.begin(), tau.end(), 1);
        AxisGraph ag(g.nodes, Axis::Time);
        for (const auto& [e, o] : g.edges) ag.add_edge(e.first, e.second, 1);
        total_initial_rev += node_ordering(ag).reverse_multiplicity();

        align::AlignmentTrace trace = align::run_alignment(g, tau);
        c.require(trace.iterations <= n, "iteration cap exceeded");
        for (const auto& [e, o] : trace.final_graph.edges)
            c.require(tau[e.first] < tau[e.second], "final graph disagrees with tau");
        total_gt += trace.gt_edges_added;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "gt=%lld initial_rev=%lld", total_gt, total_initial_rev);
    c.require(total_gt <= 1.25 * static_cast<double>(total_initial_rev),
              std::string("gt-edge budget exceeded: ") + buf);
    c.finish();
}

void criterion9() {
    Criterion c("9 parse/replay pipeline round trip and cache stability", 60.0);
    Dataset d = gen_plane(9);
    auto truth = ground_truth_assertions(d);
    std::map<std::pair<std::string, std::string>, std::string> label_of;
    for (const auto& a : truth) label_of[{a.subject, a.object}] = a.label.label;

    auto tasks = make_tasks(d, nullptr, TemplateId::SpatialCompare);
    c.require(tasks.size() == 380, "expected 380 jobs for 20 objects");
    std::vector<RelationAssertion> parsed;
    for (const auto& t : tasks) {
        std::string raw = "## Answer:\n" + t.pair.first + " is \\boxed{" +
                          label_of.at(t.pair) + "} of " + t.pair.second + ".";
        ParseResult r = parse_response(raw, t);
        c.require(r.assertion.has_value(), "parse lost a synthetic response");
        if (r.assertion) parsed.push_back(*r.assertion);
    }
    c.require(parsed.size() == tasks.size(), "label loss in round trip");
    Context ctx = emit_context(d, ContextRegime::XYPos);
    InconsistencyReport rep = score_with_ground_truth(parsed, ctx, 20);
    c.require(rep.violating_edges == 0, "ground-truth replay not error free");
    AxisGraph gx = build_axis_graph(parsed, Axis::X, d.objects);
    c.require(node_ordering(gx).reverse_multiplicity() == 0,
              "consistent replay produced reverse edges");

    // Warm-cache determinism without a network: pre-seed the cache by hand,
    // then run the batch twice against an unreachable endpoint.
    namespace fs = std::filesystem;
    llm::ClientConfig cfg;
    cfg.endpoint_url = "http://127.0.0.1:9/v1/chat/completions";  // discard port
    cfg.api_key_env = "";
    cfg.model_name = "replay-model";
    cfg.cache_dir = (fs::temp_directory_path() / "relfix_acceptance_cache").string();
    fs::remove_all(cfg.cache_dir);
    fs::create_directories(cfg.cache_dir);
    std::vector<llm::QueryJob> jobs;
    for (int i = 0; i < 25; ++i)
        jobs.push_back({"t" + std::to_string(i), "prompt " + std::to_string(i)});
    for (const auto& j : jobs) {
        std::ofstream out(fs::path(cfg.cache_dir) / (llm::cache_key(cfg, j.prompt) + ".json"));
        out << "{\"content\":\"cached answer for " << j.task_id << "\"}\n";
    }
    auto jobs1 = jobs;
    auto jobs2 = jobs;
    llm::BatchStats s1 = llm::run_batch(jobs1, cfg);
    llm::BatchStats s2 = llm::run_batch(jobs2, cfg);
    c.require(s1.cache_hits == 25 && s2.cache_hits == 25, "warm cache missed");
    c.require(s1.network_calls == 0 && s2.network_calls == 0, "warm run touched the network");
    for (size_t i = 0; i < jobs1.size(); ++i)
        c.require(jobs1[i].response == jobs2[i].response && jobs1[i].from_cache,
                  "warm reruns not byte-identical");
    fs::remove_all(cfg.cache_dir);
    c.finish();
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
