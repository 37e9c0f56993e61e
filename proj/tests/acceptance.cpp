// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Numeric tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "eor/metrics.hpp"
#include "eor/optim.hpp"
#include "eor/policies.hpp"
#include "eor/rng.hpp"
#include "eor/synth.hpp"
#include "helpers.hpp"

using namespace eor;
using namespace eor::test;

namespace {

int g_failures = 0;

struct Criterion {
    int number;
    std::string summary;
    double budget_seconds;  // 0: no wall-clock budget
    bool ok = true;
    std::string detail;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Criterion(int num, std::string text, double budget = 0.0)
        : number(num), summary(std::move(text)), budget_seconds(budget) {}

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }

    ~Criterion() {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        if (ok && budget_seconds > 0.0 && secs > budget_seconds) {
            ok = false;
            detail = "exceeded the " + std::to_string(budget_seconds) + "s budget";
        }
        if (ok) {
            std::printf("[PASS] criterion %2d: %s (%.1fs)\n", number, summary.c_str(), secs);
        } else {
            std::printf("[FAIL] criterion %2d: %s (%.1fs) -- %s\n", number, summary.c_str(),
                        secs, detail.c_str());
            ++g_failures;
        }
        std::fflush(stdout);
    }
};

double rawObjective(const CandidatePool& pool, const Ranking& r, std::size_t k) {
    double s = 0.0;
    for (std::size_t pos = 0; pos < k; ++pos) s += pool.prob(r[pos]);
    return s;
}

void criterion1() {
    Criterion c(1, "worked-example exactness (delta, selected relevance, fractions)", 1.0);
    CandidatePool pool = runningExamplePool();
    Ranking eor = eorRanking(pool);
    Ranking dp = dpRanking(pool);
    Ranking prp = prpRanking(pool);

    c.require(std::fabs(std::fabs(deltaSigned(pool, eor, 4)) - 0.15) <= 1e-9,
              "EOR |delta_4| != 0.15");
    c.require(std::fabs(std::fabs(deltaSigned(pool, dp, 4)) - 0.50) <= 1e-9,
              "DP |delta_4| != 0.50");
    c.require(std::fabs(std::fabs(deltaSigned(pool, prp, 4)) - 0.825) <= 1e-9,
              "PRP |delta_4| != 0.825");

    c.require(std::fabs(rawObjective(pool, eor, 4) - 3.0) <= 1e-9, "EOR selects != 3.0");
    c.require(std::fabs(rawObjective(pool, dp, 4) - 3.2) <= 1e-9, "DP selects != 3.2");
    c.require(std::fabs(rawObjective(pool, prp, 4) - 3.3) <= 1e-9, "PRP selects != 3.3");

    DeltaTrace trace = deltaTrace(pool, eor);
    c.require(std::fabs(trace.group_fraction[0][3] - 1.8 / 4.0) <= 1e-9,
              "EOR fraction A != 1.8/4");
    c.require(std::fabs(trace.group_fraction[1][3] - 1.2 / 4.0) <= 1e-9,
              "EOR fraction B != 1.2/4");
}

void criterion2() {
    Criterion c(2, "FA*IR appendix example (EOR 0.1333, FS 0.5333 / 0.9333, minima)", 1.0);
    CandidatePool pool = fairstarExamplePool();
    c.require(std::fabs(deltaMulti(pool, eorRanking(pool), 4) - 0.1333) <= 1e-3,
              "EOR delta_4 not 0.1333");
    c.require(std::fabs(deltaMulti(pool, fairstarRanking(pool, 1, 0.1), 4) - 0.5333) <= 1e-3,
              "FS(protected=B) delta_4 not 0.5333");
    c.require(std::fabs(deltaMulti(pool, fairstarRanking(pool, 0, 0.1), 4) - 0.9333) <= 1e-3,
              "FS(protected=A) delta_4 not 0.9333");
    c.require(fairstarMinima(4, 0.5, 0.1)[3] == 1, "fairstarMinima(4,0.5,0.1) != 1");
}

void criterion3() {
    Criterion c(3, "a-priori delta_max bound holds on 1500 random pools (2 and 3-5 groups)", 30.0);
    Rng rng(30003);
    int violations = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        CandidatePool pool = randomPool(rng, 2, 200);
        if (deltaTrace(pool, eorRanking(pool)).maxAbsDelta() > deltaMaxBound(pool) + 1e-12)
            ++violations;
    }
    for (int rep = 0; rep < 500; ++rep) {
        int groups = 3 + static_cast<int>(rng.nextBounded(3));  // G in {3,4,5}
        CandidatePool pool = randomPool(rng, groups, 200);
        DeltaTrace trace = deltaTrace(pool, eorRanking(pool));
        double bound = deltaMaxBound(pool);
        for (double d : trace.delta)
            if (d > bound + 1e-12) {
                ++violations;
                break;
            }
    }
    c.require(violations == 0, std::to_string(violations) + " bound violations");
}

void criterion4() {
    Criterion c(4, "duality certificates: sandwich, dual feasibility, phi*delta gap", 120.0);
    Rng rng(40004);
    int bad_sandwich = 0, bad_duals = 0, bad_gap = 0, bad_zero = 0;
    for (int rep = 0; rep < 300; ++rep) {
        CandidatePool pool = randomPool(rng, 2, 16);
        Ranking eor = eorRanking(pool);
        double total_nrel = 0.0;
        for (const auto& s : groupStats(pool)) total_nrel += s.n_rel;
        for (std::size_t k = 1; k <= pool.size(); ++k) {
            DualCertificate cert = dualCertificate(pool, eor, k);
            // (b) constructed duals: nonnegative, lambda'=0 off the
            // selected set, dual constraints feasible at 1e-9.
            CertificateReport report = verifyCertificate(cert, pool, k);
            if (!report.feasible) ++bad_duals;

            // (a) LP >= ILP >= EOR within 1e-9, brute force as the oracle.
            double lp_raw = cert.lp_objective * total_nrel;
            double ilp_raw =
                ilpTopK(pool, k, cert.delta, IlpMethod::Exhaustive).objective;
            double eor_raw = rawObjective(pool, eor, k);
            if (!(lp_raw >= ilp_raw - 1e-9 && ilp_raw >= eor_raw - 1e-9)) ++bad_sandwich;

            // (c) cost(EOR) - cost(ILP) <= phi * delta + 1e-9.
            double cost_gap = (ilp_raw - eor_raw) / total_nrel;
            if (!(cost_gap <= cert.bound + 1e-9)) ++bad_gap;

            // (d) delta = 0 prefixes are exactly ILP-optimal.
            if (cert.delta <= 1e-12 && std::fabs(ilp_raw - eor_raw) / total_nrel > 1e-9)
                ++bad_zero;
        }
    }
    c.require(bad_sandwich == 0, std::to_string(bad_sandwich) + " sandwich violations");
    c.require(bad_duals == 0, std::to_string(bad_duals) + " infeasible certificates");
    c.require(bad_gap == 0, std::to_string(bad_gap) + " phi*delta violations");
    c.require(bad_zero == 0, std::to_string(bad_zero) + " delta=0 optimality violations");
}

void criterion5() {
    Criterion c(5, "zero-delta prefixes never cost more than the uniform lottery", 10.0);
    Rng rng(50005);
    int violations = 0;
    long zero_prefixes = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        // Mirrored pools guarantee interior delta=0 prefixes; the rest are
        // fully random (their zero prefixes sit at k = n).
        CandidatePool pool = [&]() {
            if (rep % 2 == 0) {
                std::vector<double> probs;
                std::size_t half = 2 + rng.nextBounded(60);
                for (std::size_t i = 0; i < half; ++i)
                    probs.push_back(0.02 + 0.96 * rng.nextUnit());
                return poolFromGroupProbs({probs, probs});
            }
            return randomPool(rng, 2, 120);
        }();
        Ranking eor = eorRanking(pool);
        DeltaTrace trace = deltaTrace(pool, eor);
        const double n = static_cast<double>(pool.size());
        for (std::size_t k = 1; k <= pool.size(); ++k) {
            if (std::fabs(trace.delta[k - 1]) > 1e-12) continue;
            ++zero_prefixes;
            double uniform_cost = 1.0 - static_cast<double>(k) / n;
            if (trace.total_cost[k - 1] > uniform_cost + 1e-12) ++violations;
            for (int g = 0; g < pool.groupCount(); ++g)
                if (trace.group_cost[g][k - 1] > uniform_cost + 1e-12) ++violations;
        }
    }
    c.require(zero_prefixes > 1000, "too few delta=0 prefixes exercised");
    c.require(violations == 0, std::to_string(violations) + " cost violations");
}

void criterion6() {
    Criterion c(6, "simulation-table reproduction (100 runs per disparity level)", 300.0);
    std::vector<PolicySpec> specs{{PolicyKind::EOR}, {PolicyKind::PRP}, {PolicyKind::Uniform}};
    ScenarioRunOptions options;
    options.runs = 100;
    options.exec = Execution::Parallel;

    auto high = scenarioRun(ScenarioLevel::High, 3, specs, options);
    auto medium = scenarioRun(ScenarioLevel::Medium, 3, specs, options);
    auto low = scenarioRun(ScenarioLevel::Low, 3, specs, options);

    auto within = [](double got, double center, double tol) {
        return std::fabs(got - center) <= tol;
    };
    c.require(within(high[0].unfairness_mean, 1.07, 0.15),
              "EOR high unfairness " + std::to_string(high[0].unfairness_mean));
    c.require(within(medium[0].unfairness_mean, 1.02, 0.15),
              "EOR medium unfairness " + std::to_string(medium[0].unfairness_mean));
    c.require(within(low[0].unfairness_mean, 1.02, 0.15),
              "EOR low unfairness " + std::to_string(low[0].unfairness_mean));
    c.require(within(high[1].unfairness_mean, 15.41, 0.2 * 15.41),
              "PRP high unfairness " + std::to_string(high[1].unfairness_mean));
    c.require(within(high[0].effectiveness_mean, 10.44, 0.1 * 10.44),
              "EOR high effectiveness " + std::to_string(high[0].effectiveness_mean));
    c.require(high[2].effectiveness_mean == 0.0 && high[2].effectiveness_se == 0.0,
              "uniform effectiveness not exactly 0");
}

void criterion7() {
    Criterion c(7, "exposure LP: doubly stochastic, proportional, A-heavier on the example", 60.0);
    Rng rng(70007);
    int bad = 0;
    for (int rep = 0; rep < 50; ++rep) {
        // Same-size groups with a shared prob range keep the equality
        // constraint satisfiable.
        std::size_t half = 5 + rng.nextBounded(6);  // n <= 20
        std::vector<std::vector<double>> probs(2);
        for (int g = 0; g < 2; ++g)
            for (std::size_t i = 0; i < half; ++i)
                probs[g].push_back(0.15 + 0.8 * rng.nextUnit());
        CandidatePool pool = poolFromGroupProbs(probs);
        DoublyStochasticRanking sigma = exposureLP(pool);
        if (!sigma.exposure_feasible) {
            ++bad;
            continue;
        }
        for (std::size_t i = 0; i < sigma.n && bad == 0; ++i) {
            double row = 0.0, col = 0.0;
            for (std::size_t j = 0; j < sigma.n; ++j) {
                row += sigma.at(i, j);
                col += sigma.at(j, i);
            }
            if (std::fabs(row - 1.0) > 1e-7 || std::fabs(col - 1.0) > 1e-7) ++bad;
        }
        auto stats = groupStats(pool);
        auto exposure = sigma.groupExposure(pool);
        double r0 = exposure[0] / (stats[0].n_rel / stats[0].size);
        double r1 = exposure[1] / (stats[1].n_rel / stats[1].size);
        if (std::fabs(r0 - r1) > 1e-6) ++bad;
    }
    c.require(bad == 0, std::to_string(bad) + " exposure-LP violations");

    CandidatePool example = runningExamplePool();
    DoublyStochasticRanking sigma = exposureLP(example);
    auto stats = groupStats(example);
    double rel_a = 0.0, rel_b = 0.0;
    for (std::size_t i = 0; i < example.size(); ++i) {
        double incl = sigma.prefixInclusion(4, i);
        (example.group(i) == 0 ? rel_a : rel_b) += incl * example.prob(i);
    }
    c.require(1.0 - rel_a / stats[0].n_rel > 1.0 - rel_b / stats[1].n_rel,
              "running example: group A does not bear the higher cost");
}

void criterion8() {
    Criterion c(8, "rank aggregation: PRP passthrough or >= 0.95 ratio / best-effort flag", 30.0);
    Rng rng(80008);
    int checked_pass = 0;
    for (int rep = 0; rep < 150; ++rep) {
        CandidatePool pool = randomPool(rng, 2, 40);
        Ranking prp = prpRanking(pool);
        std::vector<double> v = positionWeights(pool.size());
        auto stats = groupStats(pool);
        std::vector<double> e(2, 0.0);
        for (std::size_t j = 0; j < prp.size(); ++j)
            e[pool.group(prp[j])] += v[j];
        for (int g = 0; g < 2; ++g) e[g] /= static_cast<double>(stats[g].size);
        double prp_ratio = std::min(e[0], e[1]) / std::max(e[0], e[1]);

        auto res = rankAggregationExposure(pool, 0.95);
        if (prp_ratio >= 0.95) {
            ++checked_pass;
            c.require(res.ranking.order == prp.order, "RA changed an already-fair PRP");
            c.require(res.satisfied, "RA flag wrong on fair PRP");
        } else {
            c.require(res.satisfied == (res.achieved_ratio >= 0.95),
                      "best-effort flag inconsistent with the achieved ratio");
            c.require(res.achieved_ratio >= prp_ratio - 1e-12, "RA worsened the ratio");
        }
    }
    c.require(checked_pass > 0, "no pool exercised the PRP passthrough branch");
}

void criterion9() {
    Criterion c(9, "Monte-Carlo inclusion contracts (exact row sums, k/n accuracy)", 30.0);
    CandidatePool pool = runningExamplePool();
    PolicySpec uniform{PolicyKind::Uniform};
    InclusionEstimate incl = inclusionEstimate(uniform, pool, 10000, 90009,
                                               Execution::Parallel);
    double max_err = 0.0;
    bool sums_ok = true;
    for (std::size_t k = 1; k <= pool.size(); ++k) {
        if (incl.rowCountSum(k) != k * 10000ull) sums_ok = false;
        for (std::size_t i = 0; i < pool.size(); ++i)
            max_err = std::max(max_err, std::fabs(incl.value(k, i) -
                                                  static_cast<double>(k) / 25.0));
    }
    c.require(sums_ok, "row count sums not exactly k*d");
    c.require(max_err < 0.02, "uniform inclusion error " + std::to_string(max_err));
}

void criterion10() {
    Criterion c(10, "scale: EOR on n=10^6 under 5 s with the a-priori bound intact");
    Rng rng(1000010);
    std::vector<std::vector<double>> probs(2);
    probs[0].reserve(550000);
    probs[1].reserve(450000);
    for (std::size_t i = 0; i < 550000; ++i) probs[0].push_back(0.01 + 0.98 * rng.nextUnit());
    for (std::size_t i = 0; i < 450000; ++i) probs[1].push_back(0.01 + 0.98 * rng.nextUnit());
    CandidatePool pool = poolFromGroupProbs(probs);

    auto t0 = std::chrono::steady_clock::now();
    Ranking eor = eorRanking(pool);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 5.0, "eorRanking took " + std::to_string(secs) + " s");

    DeltaTrace trace = deltaTrace(pool, eor);
    c.require(trace.maxAbsDelta() <= deltaMaxBound(pool) + 1e-12,
              "delta trace exceeds the a-priori bound");
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
    criterion10();
    if (g_failures == 0) {
        std::printf("acceptance: all 10 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
