#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "relfix/align.hpp"
#include "relfix/datagen.hpp"
#include "relfix/ebm.hpp"
#include "relfix/kinship.hpp"
#include "relfix/llmclient.hpp"
#include "relfix/ordergraph.hpp"
#include "relfix/promptparse.hpp"
#include "relfix/reportviz.hpp"
#include "relfix/score.hpp"

using namespace relfix;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write: " + path);
    out << content;
}

ContextRegime regime_from_flag(const std::string& s) {
    if (s == "none") return ContextRegime::None;
    if (s == "xypos") return ContextRegime::XYPos;
    if (s == "center") return ContextRegime::CenterRel;
    if (s == "ordered") return ContextRegime::OrderedRel;
    if (s == "seeds") return ContextRegime::Seeds;
    throw DomainError("unknown context regime: " + s);
}

std::vector<Axis> dataset_axes(const Dataset& d) {
    switch (d.domain) {
        case Domain::Temporal: return {Axis::Time};
        case Domain::Spatial: return {Axis::X, Axis::Y};
        case Domain::Kinship: return {Axis::KinshipGeneration};
    }
    return {};
}

json ordering_json(const AxisGraph& g, const NodeOrdering& ord) {
    json j;
    json ranks = json::object();
    for (int i = 0; i < g.num_nodes(); ++i) ranks[g.node_name(i)] = ord.rank[i];
    j["ordering"] = ranks;
    json rev = json::array();
    for (const auto& [e, m] : ord.reverse_edges)
        rev.push_back({{"from", g.node_name(e.first)},
                       {"to", g.node_name(e.second)},
                       {"multiplicity", m}});
    j["reverse_edges"] = rev;
    return j;
}

json graph_json(const AxisGraph& g) {
    json edges = json::array();
    for (const auto& [e, m] : g.edges())
        edges.push_back({{"from", g.node_name(e.first)},
                         {"to", g.node_name(e.second)},
                         {"multiplicity", m}});
    return {{"axis", to_string(g.axis())}, {"nodes", g.nodes()}, {"edges", edges}};
}

std::vector<double> parse_ratio_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// Corrupt a ground-truth full-order assertion set: flip `ratio` of the
// pairwise temporal edges.
std::vector<ebm::Constraint> corrupted_constraints(int n, double ratio, std::mt19937_64& rng) {
    std::vector<ebm::Constraint> rel;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) rel.push_back({i, j, 1});
    std::vector<size_t> idx(rel.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    size_t flips = static_cast<size_t>(ratio * rel.size() + 0.5);
    for (size_t k = 0; k < flips; ++k) std::swap(rel[idx[k]].pred, rel[idx[k]].succ);
    return rel;
}

AxisGraph graph_from_constraints(const std::vector<std::string>& names,
                                 const std::vector<ebm::Constraint>& rel) {
    AxisGraph g(names, Axis::Time);
    for (const auto& r : rel)
        g.add_edge(g.node_index(names[r.pred]), g.node_index(names[r.succ]), r.multiplicity);
    return g;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relfix: measure and repair inconsistency in pairwise relation assertions"};
    app.require_subcommand(1);

    uint64_t seed = 0;
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();

    // gen-data
    auto* gen_data = app.add_subcommand("gen-data", "generate a synthetic dataset");
    std::string gd_kind = "plane", gd_out = "dataset.json";
    gen_data->add_option("--dataset", gd_kind, "plane|kinship|kinship-fixed")->required();
    gen_data->add_option("--out", gd_out, "output dataset file");

    // gen-prompts
    auto* gen_prompts = app.add_subcommand("gen-prompts", "render prompts for all ordered pairs");
    std::string gp_dataset, gp_out = "prompts.jsonl", gp_template = "temporal_compare",
                gp_regime = "none";
    gen_prompts->add_option("--dataset", gp_dataset, "dataset file")->required();
    gen_prompts->add_option("--template", gp_template,
                            "temporal_compare|spatial_compare|spatial_with_context|kinship_infer|"
                            "inconsistency_detect");
    gen_prompts->add_option("--context-regime", gp_regime, "none|xypos|center|ordered|seeds");
    gen_prompts->add_option("--out", gp_out, "output JSONL");

    // query
    auto* query = app.add_subcommand("query", "send prompts to a chat-completion endpoint");
    std::string q_prompts, q_config, q_out = "responses.jsonl";
    query->add_option("--prompts", q_prompts, "prompts JSONL")->required();
    query->add_option("--config", q_config, "client config JSON")->required();
    query->add_option("--out", q_out, "output JSONL of {task_id, raw}");

    // parse
    auto* parse = app.add_subcommand("parse", "parse boxed answers into assertions");
    std::string p_dataset, p_responses, p_out = "assertions.jsonl",
                p_template = "temporal_compare", p_regime = "none";
    parse->add_option("--dataset", p_dataset, "dataset file")->required();
    parse->add_option("--responses", p_responses, "responses JSONL")->required();
    parse->add_option("--template", p_template, "template id");
    parse->add_option("--context-regime", p_regime, "context regime used when rendering");
    parse->add_option("--out", p_out, "output assertions JSONL");

    // score
    auto* score_cmd = app.add_subcommand("score", "inconsistency reports per axis");
    std::string s_dataset, s_assertions, s_out = "report.csv", s_regime = "none";
    long long s_denominator = -1;
    score_cmd->add_option("--dataset", s_dataset, "dataset file")->required();
    score_cmd->add_option("--assertions", s_assertions, "assertions JSONL")->required();
    score_cmd->add_option("--context-regime", s_regime,
                          "none = edit-to-consistency; else error rate vs the regime closure");
    score_cmd->add_option("--denominator", s_denominator, "override evaluated-pair count");
    score_cmd->add_option("--out", s_out, "output CSV");

    // fix-graph
    auto* fix_graph = app.add_subcommand("fix-graph", "graph repair to a simply-ordered graph");
    std::string fg_dataset, fg_assertions, fg_axis = "time", fg_mode = "reverse",
                fg_out = "fixed.json", fg_dot;
    fix_graph->add_option("--dataset", fg_dataset, "dataset file")->required();
    fix_graph->add_option("--assertions", fg_assertions, "assertions JSONL")->required();
    fix_graph->add_option("--axis", fg_axis, "time|x|y|generation");
    fix_graph->add_option("--mode", fg_mode, "remove|reverse");
    fix_graph->add_option("--out", fg_out, "output JSON");
    fix_graph->add_option("--dot", fg_dot, "optional condensation DOT file");

    // fix-ebm
    auto* fix_ebm = app.add_subcommand("fix-ebm", "energy-based fixing");
    std::string fe_dataset, fe_assertions, fe_axis = "time", fe_out = "ebm.json";
    double fe_eta = 0.01, fe_tol = 1e-9;
    int fe_max_iters = 5000;
    fix_ebm->add_option("--dataset", fe_dataset, "dataset file")->required();
    fix_ebm->add_option("--assertions", fe_assertions, "assertions JSONL")->required();
    fix_ebm->add_option("--axis", fe_axis, "time|x|y|generation");
    fix_ebm->add_option("--eta", fe_eta, "learning rate")->capture_default_str();
    fix_ebm->add_option("--max-iters", fe_max_iters, "iteration cap")->capture_default_str();
    fix_ebm->add_option("--tol", fe_tol, "convergence tolerance")->capture_default_str();
    fix_ebm->add_option("--out", fe_out, "output JSON (trace CSV written alongside)");

    // kinship-closure
    auto* kinship_cmd = app.add_subcommand("kinship-closure", "full relation matrix from seeds");
    std::string k_dataset, k_out = "closure.csv";
    kinship_cmd->add_option("--dataset", k_dataset, "kinship dataset file")->required();
    kinship_cmd->add_option("--out", k_out, "output CSV");

    // align
    auto* align_cmd = app.add_subcommand("align", "iterative consistent alignment toward truth");
    std::string al_dataset, al_assertions, al_axis = "time", al_out = "alignment.csv";
    align_cmd->add_option("--dataset", al_dataset, "dataset file with ground truth")->required();
    align_cmd->add_option("--assertions", al_assertions, "assertions JSONL")->required();
    align_cmd->add_option("--axis", al_axis, "time|x|y");
    align_cmd->add_option("--out", al_out, "output CSV");

    // noise-sweep
    auto* sweep_cmd = app.add_subcommand("noise-sweep", "EBM recovery vs reversal ratio");
    std::string sw_ratios = "0,0.05,0.1,0.15,0.2,0.25,0.3", sw_out = "sweep";
    int sw_n = 51, sw_trials = 20;
    double sw_eta = 0.01, sw_tol = 1e-9;
    int sw_max_iters = 5000;
    sweep_cmd->add_option("--n", sw_n, "number of objects")->capture_default_str();
    sweep_cmd->add_option("--ratios", sw_ratios, "comma-separated reversal ratios");
    sweep_cmd->add_option("--trials", sw_trials, "trials per ratio")->capture_default_str();
    sweep_cmd->add_option("--eta", sw_eta, "learning rate")->capture_default_str();
    sweep_cmd->add_option("--max-iters", sw_max_iters, "iteration cap")->capture_default_str();
    sweep_cmd->add_option("--tol", sw_tol, "convergence tolerance")->capture_default_str();
    sweep_cmd->add_option("--out", sw_out, "output prefix (.csv and .svg)");

    // reconstruct-map
    auto* recon_cmd = app.add_subcommand("reconstruct-map", "rank-grid map from fixed orders");
    std::string rm_dataset, rm_assertions, rm_out = "map";
    recon_cmd->add_option("--dataset", rm_dataset, "spatial dataset file")->required();
    recon_cmd->add_option("--assertions", rm_assertions, "assertions JSONL")->required();
    recon_cmd->add_option("--out", rm_out, "output prefix (.csv and .svg)");

    // validate-correlation
    auto* corr_cmd = app.add_subcommand(
        "validate-correlation", "graph-vs-EBM score correlation across noise levels");
    int vc_n = 20, vc_levels = 10, vc_trials = 3;
    std::string vc_out = "correlation.csv";
    corr_cmd->add_option("--n", vc_n, "number of objects")->capture_default_str();
    corr_cmd->add_option("--levels", vc_levels, "number of noise levels")->capture_default_str();
    corr_cmd->add_option("--trials", vc_trials, "instances per level")->capture_default_str();
    corr_cmd->add_option("--out", vc_out, "output CSV");

    for (auto* sc : app.get_subcommands([](CLI::App*) { return true; })) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen_data) {
            Dataset d;
            if (gd_kind == "plane") {
                d = gen_plane(seed);
            } else if (gd_kind == "kinship") {
                d = gen_kinship_tree(seed).dataset;
            } else if (gd_kind == "kinship-fixed") {
                d = fixed_kinship_instance().dataset;
            } else {
                std::cerr << "unknown dataset kind: " << gd_kind << "\n";
                return kExitUsage;
            }
            write_dataset(gd_out, d);
        } else if (*gen_prompts) {
            Dataset d = load_dataset(gp_dataset);
            Context ctx;
            const Context* ctxp = nullptr;
            ContextRegime regime = regime_from_flag(gp_regime);
            if (regime != ContextRegime::None) {
                ctx = emit_context(d, regime);
                ctxp = &ctx;
            }
            auto tasks = make_tasks(d, ctxp, template_from_string(gp_template));
            std::ofstream out(gp_out);
            for (const auto& t : tasks) {
                json j;
                j["task_id"] = t.task_id();
                j["pair"] = {t.pair.first, t.pair.second};
                j["prompt"] = render_prompt(t);
                out << j.dump() << "\n";
            }
        } else if (*query) {
            llm::ClientConfig cfg = llm::load_config(q_config);
            std::vector<llm::QueryJob> jobs;
            std::ifstream in(q_prompts);
            if (!in) throw DomainError("cannot open prompts: " + q_prompts);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                json j = json::parse(line);
                jobs.push_back({j.at("task_id").get<std::string>(),
                                j.at("prompt").get<std::string>()});
            }
            auto stats = llm::run_batch(jobs, cfg);
            std::ofstream out(q_out);
            for (const auto& job : jobs) {
                if (job.status != llm::JobStatus::Done) continue;
                json j;
                j["task_id"] = job.task_id;
                j["raw"] = job.response;
                out << j.dump() << "\n";
            }
            std::cerr << "done=" << stats.done << " failed=" << stats.failed
                      << " cache_hits=" << stats.cache_hits << "\n";
        } else if (*parse) {
            Dataset d = load_dataset(p_dataset);
            Context ctx;
            const Context* ctxp = nullptr;
            ContextRegime regime = regime_from_flag(p_regime);
            if (regime != ContextRegime::None) {
                ctx = emit_context(d, regime);
                ctxp = &ctx;
            }
            auto tasks = make_tasks(d, ctxp, template_from_string(p_template));
            std::map<std::string, const PromptTask*> by_id;
            for (const auto& t : tasks) by_id[t.task_id()] = &t;
            std::ifstream in(p_responses);
            if (!in) throw DomainError("cannot open responses: " + p_responses);
            std::ofstream out(p_out);
            IngestionStats stats;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                json j = json::parse(line);
                auto it = by_id.find(j.at("task_id").get<std::string>());
                if (it == by_id.end()) continue;
                auto res = parse_response(j.at("raw").get<std::string>(), *it->second);
                if (res.assertion) {
                    ++stats.parsed;
                    if (res.reversed_pair) ++stats.reversed_pairs;
                    out << assertion_to_jsonl(*res.assertion) << "\n";
                } else if (res.inconsistent_flag) {
                    ++stats.inconsistent_flags;
                } else if (res.failure == ParseFailure::NoBoxedAnswer) {
                    ++stats.no_boxed_answer;
                } else {
                    ++stats.label_out_of_vocabulary;
                }
            }
            std::cerr << "parsed=" << stats.parsed << " no_boxed=" << stats.no_boxed_answer
                      << " out_of_vocab=" << stats.label_out_of_vocabulary
                      << " reversed=" << stats.reversed_pairs
                      << " inconsistent_flags=" << stats.inconsistent_flags << "\n";
        } else if (*score_cmd) {
            Dataset d = load_dataset(s_dataset);
            auto assertions = read_assertions(s_assertions);
            std::ostringstream os;
            os << report_csv_header() << "\n";
            ContextRegime regime = regime_from_flag(s_regime);
            if (regime == ContextRegime::None) {
                for (Axis axis : dataset_axes(d)) {
                    AxisGraph g = build_axis_graph(assertions, axis, d.objects);
                    auto rep = score_no_context(g, node_ordering(g));
                    rep.dataset = d.name;
                    os << report_csv_row(rep) << "\n";
                }
            } else {
                Context ctx = emit_context(d, regime);
                auto rep = score_with_ground_truth(assertions, ctx,
                                                   static_cast<int>(d.objects.size()),
                                                   s_denominator);
                rep.dataset = d.name;
                rep.axis = dataset_axes(d).front();
                os << report_csv_row(rep) << "\n";
            }
            write_file(s_out, os.str());
            std::cout << os.str();
        } else if (*fix_graph) {
            Dataset d = load_dataset(fg_dataset);
            auto assertions = read_assertions(fg_assertions);
            AxisGraph g = build_axis_graph(assertions, axis_from_string(fg_axis), d.objects);
            FixMode mode = fg_mode == "remove" ? FixMode::Remove : FixMode::Reverse;
            NodeOrdering ord = node_ordering(g);
            auto fixed = fix_to_simply_ordered(g, mode);
            json j = ordering_json(g, ord);
            j["repaired_graph"] = graph_json(fixed.graph);
            write_file(fg_out, j.dump(2) + "\n");
            if (!fg_dot.empty()) write_file(fg_dot, condensation_dot(g));
        } else if (*fix_ebm) {
            Dataset d = load_dataset(fe_dataset);
            auto assertions = read_assertions(fe_assertions);
            AxisGraph g = build_axis_graph(assertions, axis_from_string(fe_axis), d.objects);
            ebm::EbmParams params;
            params.eta = fe_eta;
            params.max_iters = fe_max_iters;
            params.tol = fe_tol;
            auto run = ebm::run_ebm(g.nodes(), ebm::constraints_from_graph(g), seed, params);
            json j;
            json coords = json::object();
            for (int i = 0; i < g.num_nodes(); ++i) coords[g.node_name(i)] = run.state.coords[i];
            j["final_coords"] = coords;
            json ranks = json::object();
            for (int i = 0; i < g.num_nodes(); ++i) ranks[g.node_name(i)] = run.ordering.rank[i];
            j["ordering"] = ranks;
            j["iterations"] = run.iterations;
            j["final_energy"] = run.final_energy;
            write_file(fe_out, j.dump(2) + "\n");
            write_file(fe_out + ".trace.csv", viz::energy_trace_csv(run.state.energy_trace));
        } else if (*kinship_cmd) {
            Dataset d = load_dataset(k_dataset);
            if (d.domain != Domain::Kinship || d.seeds.empty()) {
                std::cerr << "dataset has no kinship seeds\n";
                return kExitData;
            }
            kinship::KinshipTree t;
            for (const auto& s : d.seeds) t.apply_seed(s);
            t.close();
            write_file(k_out, kinship::closure_csv(kinship::full_closure(t)));
        } else if (*align_cmd) {
            Dataset d = load_dataset(al_dataset);
            auto assertions = read_assertions(al_assertions);
            Axis axis = axis_from_string(al_axis);
            AxisGraph g = build_axis_graph(assertions, axis, d.objects);
            NodeOrdering tau = ground_truth_ordering(d, axis, g.nodes());
            auto trace = align::run_alignment(align::TaggedGraph::from_axis_graph(g), tau.rank);
            std::ostringstream os;
            os << "axis,iterations,gt_edges,trans_edges,model_edges,total_edges\n"
               << to_string(axis) << "," << trace.iterations << "," << trace.gt_edges_added << ","
               << trace.transitive_edges_added << "," << trace.model_edges_kept << ","
               << trace.total_edges() << "\n";
            write_file(al_out, os.str());
            std::cout << os.str();
        } else if (*sweep_cmd) {
            std::vector<std::string> names;
            for (int i = 0; i < sw_n; ++i) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "N%03d", i);
                names.push_back(buf);
            }
            ebm::EbmParams params;
            params.eta = sw_eta;
            params.max_iters = sw_max_iters;
            params.tol = sw_tol;
            auto curve =
                ebm::noise_sweep(names, parse_ratio_list(sw_ratios), sw_trials, seed, params);
            write_file(sw_out + ".csv", viz::sweep_csv(curve));
            write_file(sw_out + ".svg",
                       viz::sweep_svg(curve, "EBM recovery error vs reversal ratio"));
        } else if (*recon_cmd) {
            Dataset d = load_dataset(rm_dataset);
            if (d.domain != Domain::Spatial) {
                std::cerr << "reconstruct-map needs a spatial dataset\n";
                return kExitData;
            }
            auto assertions = read_assertions(rm_assertions);
            AxisGraph gx = build_axis_graph(assertions, Axis::X, d.objects);
            AxisGraph gy = build_axis_graph(assertions, Axis::Y, d.objects);
            auto fx = fix_to_simply_ordered(gx, FixMode::Reverse);
            auto fy = fix_to_simply_ordered(gy, FixMode::Reverse);
            auto recon = viz::reconstruct_map(gx.nodes(), fx.ordering, fy.ordering);
            write_file(rm_out + ".csv", viz::map_csv(recon));
            write_file(rm_out + ".svg", viz::map_svg(recon, d.name + " (reconstructed)"));
            if (d.has_ground_truth()) {
                auto ref = viz::reconstruct_map(gx.nodes(),
                                                ground_truth_ordering(d, Axis::X, gx.nodes()),
                                                ground_truth_ordering(d, Axis::Y, gy.nodes()));
                write_file(rm_out + ".reference.svg", viz::map_svg(ref, d.name + " (reference)"));
                auto cmp = viz::compare_maps(recon, ref);
                std::cout << "spearman_x=" << cmp.spearman_x << " spearman_y=" << cmp.spearman_y
                          << "\n";
            }
        } else if (*corr_cmd) {
            std::vector<std::string> names;
            for (int i = 0; i < vc_n; ++i) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "N%03d", i);
                names.push_back(buf);
            }
            std::mt19937_64 rng(seed);
            std::vector<double> graph_scores, ebm_scores;
            std::ostringstream os;
            os << "level,ratio,graph_score,ebm_score\n";
            if (vc_levels < 2) {
                std::cerr << "need at least 2 noise levels\n";
                return kExitUsage;
            }
            for (int level = 0; level < vc_levels; ++level) {
                double ratio = 0.45 * level / (vc_levels - 1);
                for (int t = 0; t < vc_trials; ++t) {
                    auto rel = corrupted_constraints(vc_n, ratio, rng);
                    AxisGraph g = graph_from_constraints(names, rel);
                    double gs = score_no_context(g, node_ordering(g)).percent();
                    auto run = ebm::run_ebm(names, rel, rng());
                    double es =
                        score_no_context(g, run.ordering, ScoreReference::EbmOrder).percent();
                    graph_scores.push_back(gs);
                    ebm_scores.push_back(es);
                    os << level << "," << ratio << "," << format_percent(gs) << ","
                       << format_percent(es) << "\n";
                }
            }
            double r = pearson(graph_scores, ebm_scores);
            os << "pearson_r," << r << ",,\n";
            write_file(vc_out, os.str());
            std::cout << "pearson_r=" << r << "\n";
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
