#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eor/core.hpp"
#include "eor/numeric.hpp"
#include "eor/policies.hpp"

namespace eor {

struct Distribution {
    enum class Kind { Beta, Powerlaw, PointMass } kind = Kind::Beta;
    double a = 1.0;  // Beta alpha / Powerlaw eta / point-mass value
    double b = 1.0;  // Beta beta

    static Distribution beta(double alpha, double beta) {
        return {Kind::Beta, alpha, beta};
    }
    static Distribution powerlaw(double eta) { return {Kind::Powerlaw, eta, 0.0}; }
    static Distribution pointMass(double value) { return {Kind::PointMass, value, 0.0}; }
};

// n i.i.d. Beta(alpha, beta) draws, clamped to [1e-12, 1 - 1e-12].
std::vector<double> sampleBeta(double alpha, double beta, std::size_t n, std::uint64_t seed);

// n i.i.d. draws with density proportional to p^(eta-1) on [0,1]
// (inverse CDF: u^(1/eta)).
std::vector<double> samplePowerlaw(double eta, std::size_t n, std::uint64_t seed);

double sampleFrom(const Distribution& dist, class Rng& rng);

// Group A fixed; group B grows by i.i.d. draws from dist_b until
// |nRel(B) - nRel(A)| <= 1. A draw that would overshoot past +1 is
// rejected and redrawn (at most 10^6 retries).
CandidatePool matchedPool(const std::vector<double>& fixed_a, const Distribution& dist_b,
                          std::uint64_t seed);

enum class ScenarioLevel { High, Medium, Low };
ScenarioLevel scenarioLevelFromName(const std::string& name);
std::string scenarioLevelName(ScenarioLevel level);

// Group-B distribution of the disparate-uncertainty scenario:
// Beta(5,5) / Beta(1/2,1/2) / Beta(1/20,1/20) for high / medium / low.
Distribution scenarioDistribution(ScenarioLevel level);

struct Scenario {
    std::vector<double> group_a_probs;  // drawn once per seed and reused
    Distribution dist_b;
    ScenarioLevel level = ScenarioLevel::High;
    std::uint64_t seed = 0;
};

// Group A: 30 draws from Beta(1/20, 1/20), shared across levels and runs
// for a given seed.
Scenario makeScenario(ScenarioLevel level, std::uint64_t seed,
                      std::size_t group_a_size = 30);

CandidatePool scenarioPool(const Scenario& scenario, int run);

struct PolicySummary {
    PolicyKind policy = PolicyKind::EOR;
    double unfairness_mean = 0.0;
    double unfairness_se = 0.0;
    double effectiveness_mean = 0.0;
    double effectiveness_se = 0.0;
};

struct ScenarioRunOptions {
    int runs = 100;
    // Expectation of the delta curve for stochastic policies.
    int stochastic_samples = 100;
    // Monte-Carlo samples behind the cost terms of stochastic policies.
    std::uint32_t inclusion_samples = 1000;
    Execution exec = Execution::Serial;
};

// Mean +- standard error of unfairness and effectiveness per policy over
// independent runs. Parallel execution gives bit-identical results.
std::vector<PolicySummary> scenarioRun(ScenarioLevel level, std::uint64_t seed,
                                       const std::vector<PolicySpec>& policies,
                                       const ScenarioRunOptions& options = {});

}  // namespace eor
