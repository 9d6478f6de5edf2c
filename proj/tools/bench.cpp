// Timing comparison of the serial reference EBM kernels against the OpenMP
// ones, plus a full-run comparison. Prints a small table; exits nonzero if
// the two implementations ever disagree.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "relfix/ebm.hpp"

using namespace relfix;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Instance {
    std::vector<double> coords;
    std::vector<ebm::Constraint> relations;
};

Instance make_instance(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Instance inst;
    inst.coords.resize(n);
    for (double& x : inst.coords) x = unif(rng);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (rng() % 5 == 0) continue;  // drop some pairs
            if (rng() % 4 == 0)
                inst.relations.push_back({j, i, 1});
            else
                inst.relations.push_back({i, j, 1});
        }
    return inst;
}

}  // namespace

int main() {
    const int reps = 50;
    bool mismatch = false;
    std::printf("%-8s %-12s %12s %12s %8s\n", "n", "kernel", "serial_ms", "omp_ms", "speedup");
    for (int n : {64, 256, 512, 1024}) {
        Instance inst = make_instance(n, 42 + n);

        double e_serial = 0.0, e_omp = 0.0;
        auto t0 = Clock::now();
        for (int r = 0; r < reps; ++r) e_serial = ebm::total_energy_serial(inst.coords, inst.relations);
        double ts = ms_since(t0);
        t0 = Clock::now();
        for (int r = 0; r < reps; ++r) e_omp = ebm::total_energy(inst.coords, inst.relations);
        double tp = ms_since(t0);
        if (e_serial != e_omp) {
            std::printf("ENERGY MISMATCH n=%d serial=%.17g omp=%.17g\n", n, e_serial, e_omp);
            mismatch = true;
        }
        std::printf("%-8d %-12s %12.3f %12.3f %7.2fx\n", n, "energy", ts, tp, ts / tp);

        std::vector<long long> g_serial, g_omp;
        t0 = Clock::now();
        for (int r = 0; r < reps; ++r) g_serial = ebm::gradient_counts_serial(inst.coords, inst.relations);
        ts = ms_since(t0);
        t0 = Clock::now();
        for (int r = 0; r < reps; ++r) g_omp = ebm::gradient_counts(inst.coords, inst.relations);
        tp = ms_since(t0);
        if (g_serial != g_omp) {
            std::printf("GRADIENT MISMATCH n=%d\n", n);
            mismatch = true;
        }
        std::printf("%-8d %-12s %12.3f %12.3f %7.2fx\n", n, "gradient", ts, tp, ts / tp);
    }

    // End-to-end run on a mid-size instance, for context.
    {
        std::vector<std::string> names;
        for (int i = 0; i < 256; ++i) names.push_back("N" + std::to_string(i));
        Instance inst = make_instance(256, 7);
        auto t0 = Clock::now();
        auto run = ebm::run_ebm(names, inst.relations, 7);
        std::printf("full run: n=256 iters=%d energy=%.6g wall=%.1fms\n", run.iterations,
                    run.final_energy, ms_since(t0));
    }
    return mismatch ? 1 : 0;
}
