#include "relfix/ebm.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace relfix {
namespace ebm {

double relation_energy(double x_pred, double x_succ) {
    double v = 1.0 + (x_pred - x_succ);
    return v > 0.0 ? v : 0.0;
}

namespace {
constexpr size_t kChunk = 1024;
}

double total_energy_serial(const std::vector<double>& coords,
                           const std::vector<Constraint>& relations) {
    // Same fixed-chunk combination order as the parallel kernel, so the two
    // agree bit-for-bit.
    size_t n = relations.size();
    double total = 0.0;
    for (size_t lo = 0; lo < n; lo += kChunk) {
        size_t hi = std::min(n, lo + kChunk);
        double e = 0.0;
        for (size_t i = lo; i < hi; ++i)
            e += relations[i].multiplicity *
                 relation_energy(coords[relations[i].pred], coords[relations[i].succ]);
        total += e;
    }
    return total;
}

std::vector<long long> gradient_counts_serial(const std::vector<double>& coords,
                                              const std::vector<Constraint>& relations) {
    std::vector<long long> g(coords.size(), 0);
    for (const auto& r : relations) {
        // Subgradient 0 at the kink: active only when energy > 0 strictly.
        if (1.0 + coords[r.pred] - coords[r.succ] > 0.0) {
            g[r.pred] += r.multiplicity;
            g[r.succ] -= r.multiplicity;
        }
    }
    return g;
}

double total_energy(const std::vector<double>& coords,
                    const std::vector<Constraint>& relations) {
    size_t n = relations.size();
    size_t nchunks = (n + kChunk - 1) / kChunk;
    if (nchunks <= 1) return total_energy_serial(coords, relations);
    std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        double e = 0.0;
        for (size_t i = lo; i < hi; ++i)
            e += relations[i].multiplicity *
                 relation_energy(coords[relations[i].pred], coords[relations[i].succ]);
        partial[c] = e;
    }
    // Fixed combination order: result independent of thread count.
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

std::vector<long long> gradient_counts(const std::vector<double>& coords,
                                       const std::vector<Constraint>& relations) {
    size_t nn = coords.size();
    std::vector<long long> g(nn, 0);
    if (relations.size() < 2 * kChunk) return gradient_counts_serial(coords, relations);
#pragma omp parallel
    {
        std::vector<long long> local(nn, 0);
#pragma omp for schedule(static) nowait
        for (long long i = 0; i < static_cast<long long>(relations.size()); ++i) {
            const auto& r = relations[i];
            if (1.0 + coords[r.pred] - coords[r.succ] > 0.0) {
                local[r.pred] += r.multiplicity;
                local[r.succ] -= r.multiplicity;
            }
        }
#pragma omp critical
        for (size_t k = 0; k < nn; ++k) g[k] += local[k];
    }
    return g;
}

double total_energy(const EbmState& state) { return total_energy(state.coords, state.relations); }

EbmState initialize(const std::vector<std::string>& node_names,
                    const std::vector<Constraint>& relations, uint64_t seed, double eta) {
    EbmState s;
    s.node_names = node_names;
    s.relations = relations;
    s.eta = eta;
    s.coords.assign(node_names.size(), 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<char> placed(node_names.size(), 0);
    for (size_t k = 0; k < node_names.size(); ++k) {
        double xk = uni(rng);
        // One correction pass, in relation order.
        for (const auto& r : relations) {
            size_t p = static_cast<size_t>(r.pred), q = static_cast<size_t>(r.succ);
            if (p == k && placed[q]) {
                if (xk > s.coords[q]) xk = 1.5 * s.coords[q] - 0.5 * xk;
            } else if (q == k && placed[p]) {
                if (s.coords[p] > xk) xk = 1.5 * s.coords[p] - 0.5 * xk;
            }
        }
        s.coords[k] = xk;
        placed[k] = 1;
    }
    return s;
}

void gradient_step(EbmState& state) {
    auto g = gradient_counts(state.coords, state.relations);
    for (size_t i = 0; i < state.coords.size(); ++i)
        state.coords[i] -= state.eta * static_cast<double>(g[i]);
}

NodeOrdering ordering_from_coords(const std::vector<std::string>& node_names,
                                  const std::vector<double>& coords,
                                  const std::vector<Constraint>& relations) {
    int n = static_cast<int>(node_names.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (coords[a] != coords[b]) return coords[a] < coords[b];
        return node_names[a] < node_names[b];
    });
    NodeOrdering out;
    out.rank.assign(n, 0);
    for (int i = 0; i < n; ++i) out.rank[order[i]] = i + 1;
    for (const auto& r : relations)
        if (out.rank[r.pred] > out.rank[r.succ])
            out.reverse_edges[{r.pred, r.succ}] += r.multiplicity;
    return out;
}

EbmRun run_ebm(const std::vector<std::string>& node_names,
               const std::vector<Constraint>& relations, uint64_t seed,
               const EbmParams& params) {
    if (params.max_iters < 1) throw DomainError("run_ebm: max_iters must be >= 1");
    EbmRun run;
    run.state = initialize(node_names, relations, seed, params.eta);
    double prev = total_energy(run.state);
    run.state.energy_trace.push_back({0, prev});
    // Subgradient iterates are not individually monotone (a fixed step can
    // overshoot a hinge kink), so per the usual subgradient-method convention
    // the trace records the best energy seen so far and the best iterate is
    // the result.
    double best = prev;
    std::vector<double> best_coords = run.state.coords;
    int stall = 0;
    int it = 0;
    for (it = 1; it <= params.max_iters; ++it) {
        gradient_step(run.state);
        double e = total_energy(run.state);
        if (e < best) {
            best = e;
            best_coords = run.state.coords;
        }
        run.state.energy_trace.push_back({it, best});
        if (prev - best < params.tol) {
            if (++stall >= params.patience) break;
        } else {
            stall = 0;
        }
        prev = best;
    }
    run.iterations = std::min(it, params.max_iters);
    run.state.coords = std::move(best_coords);
    run.final_energy = best;
    run.ordering = ordering_from_coords(node_names, run.state.coords, relations);
    return run;
}

std::vector<Constraint> constraints_from_graph(const AxisGraph& graph) {
    std::vector<Constraint> out;
    for (const auto& [e, m] : graph.edges()) out.push_back({e.first, e.second, m});
    return out;
}

double pairwise_error_rate(const std::vector<int>& recovered_rank,
                           const std::vector<int>& true_rank) {
    int n = static_cast<int>(true_rank.size());
    long long total = static_cast<long long>(n) * (n - 1) / 2;
    if (total == 0) return 0.0;
    long long wrong = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool truth = true_rank[i] < true_rank[j];
            bool rec = recovered_rank[i] < recovered_rank[j];
            if (truth != rec) ++wrong;
        }
    return static_cast<double>(wrong) / total;
}

std::vector<SweepPoint> noise_sweep(const std::vector<std::string>& ground_truth_order,
                                    const std::vector<double>& ratios, int trials,
                                    uint64_t seed, const EbmParams& params) {
    int n = static_cast<int>(ground_truth_order.size());
    // Truth: node k (in given order) has rank k+1; full pairwise constraints.
    std::vector<int> true_rank(n);
    std::iota(true_rank.begin(), true_rank.end(), 1);
    std::vector<Constraint> base;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) base.push_back({i, j, 1});

    std::vector<SweepPoint> curve(ratios.size());
    for (size_t ri = 0; ri < ratios.size(); ++ri) {
        double ratio = ratios[ri];
        std::vector<double> errors(trials, 0.0);
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < trials; ++t) {
            uint64_t trial_seed = seed + 1000003ull * ri + 17ull * t + 1;
            std::mt19937_64 rng(trial_seed);
            auto rel = base;
            size_t flips = static_cast<size_t>(ratio * rel.size() + 0.5);
            std::vector<size_t> idx(rel.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (size_t k = 0; k < flips; ++k) std::swap(rel[idx[k]].pred, rel[idx[k]].succ);
            auto run = run_ebm(ground_truth_order, rel, trial_seed ^ 0x9e3779b97f4a7c15ull,
                               params);
            errors[t] = pairwise_error_rate(run.ordering.rank, true_rank);
        }
        double mean = 0.0;
        for (double e : errors) mean += e;
        curve[ri] = {ratio, trials > 0 ? mean / trials : 0.0};
    }
    return curve;
}

}  // namespace ebm
}  // namespace relfix
