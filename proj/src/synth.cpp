#include "eor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eor/metrics.hpp"
#include "eor/optim.hpp"
#include "eor/rng.hpp"

namespace eor {

namespace {

constexpr double kClamp = 1e-12;
constexpr long kMatchRetryBudget = 1000000;

double clampProb(double p) { return std::clamp(p, kClamp, 1.0 - kClamp); }

}  // namespace

std::vector<double> sampleBeta(double alpha, double beta, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw BadParams("Beta shapes must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = clampProb(rng.nextBeta(alpha, beta));
    return out;
}

std::vector<double> samplePowerlaw(double eta, std::size_t n, std::uint64_t seed) {
    if (!(eta > 0.0)) throw BadParams("Powerlaw eta must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = clampProb(std::pow(rng.nextUnit(), 1.0 / eta));
    return out;
}

double sampleFrom(const Distribution& dist, Rng& rng) {
    switch (dist.kind) {
        case Distribution::Kind::Beta: return clampProb(rng.nextBeta(dist.a, dist.b));
        case Distribution::Kind::Powerlaw:
            if (!(dist.a > 0.0)) throw BadParams("Powerlaw eta must be positive");
            return clampProb(std::pow(rng.nextUnit(), 1.0 / dist.a));
        case Distribution::Kind::PointMass: return clampProb(dist.a);
    }
    throw BadParams("unknown distribution");
}

CandidatePool matchedPool(const std::vector<double>& fixed_a, const Distribution& dist_b,
                          std::uint64_t seed) {
    KahanAccumulator nrel_a_acc;
    for (double p : fixed_a) nrel_a_acc.add(p);
    const double nrel_a = nrel_a_acc.value();
    if (!(nrel_a > 1.0)) throw BadParams("matched pool needs nRel(A) > 1");

    Rng rng(seed);
    std::vector<double> b;
    KahanAccumulator nrel_b;
    long retries = 0;
    while (nrel_b.value() < nrel_a - 1.0) {
        double p = sampleFrom(dist_b, rng);
        if (nrel_b.value() + p > nrel_a + 1.0) {
            if (++retries > kMatchRetryBudget)
                throw MatchFailure("could not match nRel(B) to nRel(A) within 10^6 redraws");
            continue;  // overshoot past +1: reject and redraw
        }
        nrel_b.add(p);
        b.push_back(p);
    }
    return poolFromGroupProbs({fixed_a, b});
}

ScenarioLevel scenarioLevelFromName(const std::string& name) {
    if (name == "high") return ScenarioLevel::High;
    if (name == "medium") return ScenarioLevel::Medium;
    if (name == "low") return ScenarioLevel::Low;
    throw CsvError("unknown scenario level '" + name + "' (use high|medium|low)");
}

std::string scenarioLevelName(ScenarioLevel level) {
    switch (level) {
        case ScenarioLevel::High: return "high";
        case ScenarioLevel::Medium: return "medium";
        case ScenarioLevel::Low: return "low";
    }
    return "?";
}

Distribution scenarioDistribution(ScenarioLevel level) {
    switch (level) {
        case ScenarioLevel::High: return Distribution::beta(5.0, 5.0);
        case ScenarioLevel::Medium: return Distribution::beta(0.5, 0.5);
        case ScenarioLevel::Low: return Distribution::beta(1.0 / 20.0, 1.0 / 20.0);
    }
    throw BadParams("unknown scenario level");
}

namespace {
// Stream tags for deriving independent seeds.
constexpr std::uint64_t kStreamGroupA = 0xA0;
constexpr std::uint64_t kStreamRunBase = 0xB000;
constexpr std::uint64_t kStreamPoolB = 1;
constexpr std::uint64_t kStreamSamples = 2;
constexpr std::uint64_t kStreamInclusion = 3;
}  // namespace

Scenario makeScenario(ScenarioLevel level, std::uint64_t seed, std::size_t group_a_size) {
    Scenario s;
    s.level = level;
    s.seed = seed;
    s.dist_b = scenarioDistribution(level);
    // Independent of the level: the same seed keeps group A identical
    // across the high/medium/low settings.
    s.group_a_probs = sampleBeta(1.0 / 20.0, 1.0 / 20.0, group_a_size,
                                 mixSeed(seed, kStreamGroupA));
    return s;
}

CandidatePool scenarioPool(const Scenario& scenario, int run) {
    std::uint64_t run_seed = mixSeed(scenario.seed, kStreamRunBase + static_cast<std::uint64_t>(run));
    // The level participates in the pool stream so that per-run B draws
    // differ between levels even under a shared base seed.
    run_seed = mixSeed(run_seed, static_cast<std::uint64_t>(scenario.level) + 17);
    return matchedPool(scenario.group_a_probs, scenario.dist_b, mixSeed(run_seed, kStreamPoolB));
}

namespace {

struct RunMetrics {
    double unfairness = 0.0;
    double effectiveness = 0.0;
};

RunMetrics evaluatePolicy(const PolicySpec& spec, const CandidatePool& pool,
                          std::uint64_t run_seed, const ScenarioRunOptions& options) {
    RunMetrics out;
    switch (spec.kind) {
        case PolicyKind::EOR:
        case PolicyKind::PRP:
        case PolicyKind::DP:
        case PolicyKind::PRR:
        case PolicyKind::FairStar:
        case PolicyKind::RA: {
            Ranking ranking;
            if (spec.kind == PolicyKind::EOR) ranking = eorRanking(pool);
            else if (spec.kind == PolicyKind::PRP) ranking = prpRanking(pool);
            else if (spec.kind == PolicyKind::DP) ranking = dpRanking(pool);
            else if (spec.kind == PolicyKind::PRR)
                ranking = prrRanking(pool, spec.protected_group).ranking;
            else if (spec.kind == PolicyKind::FairStar)
                ranking = fairstarRanking(pool, spec.protected_group, spec.alpha);
            else ranking = rankAggregationExposure(pool, spec.threshold).ranking;
            DeltaTrace trace = deltaTrace(pool, ranking);
            out.unfairness = unfairnessAUC(trace);
            out.effectiveness = effectiveness(trace);
            return out;
        }
        case PolicyKind::Uniform:
        case PolicyKind::TS: {
            // Unfairness: expectation of the |delta| curve over sampled
            // rankings (the per-sample AUCs averaged).
            std::uint64_t sample_seed = mixSeed(run_seed, kStreamSamples);
            std::vector<double> aucs(options.stochastic_samples);
            for (int s = 0; s < options.stochastic_samples; ++s) {
                Ranking r = sampleStochastic(spec, pool,
                                             mixSeed(sample_seed, static_cast<std::uint64_t>(s)));
                aucs[s] = unfairnessAUC(deltaTrace(pool, r));
            }
            out.unfairness = mean(aucs);
            if (spec.kind == PolicyKind::Uniform) {
                out.effectiveness = 0.0;  // exact closed-form cost 1 - k/n
            } else {
                InclusionEstimate incl =
                    inclusionEstimate(spec, pool, options.inclusion_samples,
                                      mixSeed(run_seed, kStreamInclusion));
                out.effectiveness = effectiveness(pool, incl);
            }
            return out;
        }
        case PolicyKind::Exp: {
            DoublyStochasticRanking sigma = exposureLP(pool);
            auto stats = groupStats(pool);
            double total_nrel = 0.0;
            for (const auto& s : stats) total_nrel += s.n_rel;
            const std::size_t n = pool.size();
            // Per-prefix inclusion = cumulative position columns of Sigma.
            std::vector<double> incl(n, 0.0);
            KahanAccumulator unfair, effect;
            std::vector<KahanAccumulator> group_rel(pool.groupCount());
            KahanAccumulator total_rel;
            for (std::size_t k = 1; k <= n; ++k) {
                for (std::size_t i = 0; i < n; ++i) {
                    double add = sigma.at(i, k - 1);
                    if (add == 0.0) continue;
                    group_rel[pool.group(i)].add(add * pool.prob(i));
                    total_rel.add(add * pool.prob(i));
                }
                double lo = 2.0, hi = -1.0;
                for (int g = 0; g < pool.groupCount(); ++g) {
                    double f = group_rel[g].value() / stats[g].n_rel;
                    lo = std::min(lo, f);
                    hi = std::max(hi, f);
                }
                unfair.add(hi - lo);
                double cost = 1.0 - total_rel.value() / total_nrel;
                effect.add((1.0 - static_cast<double>(k) / static_cast<double>(n)) - cost);
            }
            out.unfairness = unfair.value();
            out.effectiveness = effect.value();
            return out;
        }
    }
    throw BadParams("unknown policy");
}

}  // namespace

std::vector<PolicySummary> scenarioRun(ScenarioLevel level, std::uint64_t seed,
                                       const std::vector<PolicySpec>& policies,
                                       const ScenarioRunOptions& options) {
    if (options.runs < 1) throw BadParams("need at least one run");
    Scenario scenario = makeScenario(level, seed);

    const std::size_t n_pol = policies.size();
    std::vector<std::vector<double>> unfair(n_pol, std::vector<double>(options.runs));
    std::vector<std::vector<double>> effect(n_pol, std::vector<double>(options.runs));

    std::exception_ptr first_error;
    auto runOne = [&](int run) {
        CandidatePool pool = scenarioPool(scenario, run);
        std::uint64_t run_seed = mixSeed(scenario.seed, kStreamRunBase + static_cast<std::uint64_t>(run));
        for (std::size_t p = 0; p < n_pol; ++p) {
            RunMetrics m = evaluatePolicy(policies[p], pool, mixSeed(run_seed, p), options);
            unfair[p][run] = m.unfairness;
            effect[p][run] = m.effectiveness;
        }
    };

    if (options.exec == Execution::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int run = 0; run < options.runs; ++run) {
            try {
                runOne(run);
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!first_error) first_error = std::current_exception();
            }
        }
    } else {
        for (int run = 0; run < options.runs; ++run) runOne(run);
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<PolicySummary> table(n_pol);
    for (std::size_t p = 0; p < n_pol; ++p) {
        table[p].policy = policies[p].kind;
        table[p].unfairness_mean = mean(unfair[p]);
        table[p].unfairness_se = standardError(unfair[p]);
        table[p].effectiveness_mean = mean(effect[p]);
        table[p].effectiveness_se = standardError(effect[p]);
    }
    return table;
}

}  // namespace eor
