// Timing comparison of the serial reference paths against the OpenMP
// kernels (Monte-Carlo inclusion estimation and scenario simulation).
// Both paths must produce identical results; the consistency checks here
// mirror the unit tests.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "eor/metrics.hpp"
#include "eor/policies.hpp"
#include "eor/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace eor;

namespace {

double seconds(void (*fn)(Execution), Execution exec) {
    auto t0 = std::chrono::steady_clock::now();
    fn(exec);
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

std::uint64_t g_checksum_serial = 0, g_checksum_parallel = 0;

void benchInclusion(Execution exec) {
    CandidatePool pool = matchedPool(sampleBeta(1.0 / 20, 1.0 / 20, 40, 11),
                                     Distribution::beta(5, 5), 12);
    PolicySpec ts{PolicyKind::TS};
    InclusionEstimate incl = inclusionEstimate(ts, pool, 20000, 99, exec);
    std::uint64_t checksum = 0;
    for (std::size_t k = 1; k <= pool.size(); ++k) checksum += incl.rowCountSum(k);
    (exec == Execution::Serial ? g_checksum_serial : g_checksum_parallel) = checksum;
}

double g_table_serial = 0, g_table_parallel = 0;

void benchScenario(Execution exec) {
    ScenarioRunOptions options;
    options.runs = 40;
    options.exec = exec;
    std::vector<PolicySpec> specs{{PolicyKind::EOR}, {PolicyKind::PRP}, {PolicyKind::TS}};
    auto table = scenarioRun(ScenarioLevel::High, 3, specs, options);
    double sum = 0;
    for (const auto& row : table) sum += row.unfairness_mean + row.effectiveness_mean;
    (exec == Execution::Serial ? g_table_serial : g_table_parallel) = sum;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif
    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]", "speedup");

    double s1 = seconds(benchInclusion, Execution::Serial);
    double p1 = seconds(benchInclusion, Execution::Parallel);
    std::printf("%-28s %10.3f %10.3f %8.2fx\n", "inclusion d=20000 n~70", s1, p1, s1 / p1);
    if (g_checksum_serial != g_checksum_parallel) {
        std::fprintf(stderr, "FAIL: inclusion checksums differ\n");
        return 1;
    }

    double s2 = seconds(benchScenario, Execution::Serial);
    double p2 = seconds(benchScenario, Execution::Parallel);
    std::printf("%-28s %10.3f %10.3f %8.2fx\n", "scenario 40 runs x 3 pol", s2, p2, s2 / p2);
    if (g_table_serial != g_table_parallel) {
        std::fprintf(stderr, "FAIL: scenario tables differ\n");
        return 1;
    }
    std::printf("serial/parallel results identical\n");
    return 0;
}
