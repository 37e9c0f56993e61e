#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eor/core.hpp"
#include "eor/numeric.hpp"

namespace eor {

enum class PolicyKind { EOR, PRP, DP, PRR, Uniform, TS, FairStar, Exp, RA };

bool isStochastic(PolicyKind kind);
std::string policyName(PolicyKind kind);
PolicyKind policyFromName(const std::string& name);  // CsvError on unknown

struct PolicySpec {
    PolicyKind kind = PolicyKind::EOR;
    int protected_group = 1;      // PRR / FA*IR
    double alpha = 0.1;           // FA*IR significance level
    double threshold = 0.95;      // RA exposure ratio target
    std::uint64_t seed = 0;       // stochastic kinds
};

// Per-group PRP queues: each group's candidates sorted by prob descending
// (stable within equal probs), with a head cursor.
class GroupQueues {
public:
    explicit GroupQueues(const CandidatePool& pool);

    bool exhausted(int g) const { return cursor_[g] >= queue_[g].size(); }
    std::uint32_t head(int g) const { return queue_[g][cursor_[g]]; }
    void pop(int g) { cursor_[g]++; }
    const std::vector<std::uint32_t>& queue(int g) const { return queue_[g]; }
    std::size_t remaining(int g) const { return queue_[g].size() - cursor_[g]; }

private:
    std::vector<std::vector<std::uint32_t>> queue_;
    std::vector<std::size_t> cursor_;
};

// Probability Ranking Principle: sort by prob descending, stable ties.
Ranking prpRanking(const CandidatePool& pool);

// Algorithm that greedily appends the group head minimising the per-prefix
// spread of accumulated relevance fractions (signed |delta| for two groups,
// max-min for G groups). Within-group order is the PRP order. Ties go to
// the group with the smaller accumulated fraction, then the smaller index.
Ranking eorRanking(const CandidatePool& pool);

// Same merge skeleton driven by size proportions S(g|sigma_k)/S(g).
Ranking dpRanking(const CandidatePool& pool);

// Proportional Rooney-rule: PRP order modified minimally so that the
// protected-group share satisfies S(B|sigma_k)/k >= S(B)/n at every k.
struct PrrResult {
    Ranking ranking;
    bool quota_infeasible = false;  // protected queue ran dry while binding
};
PrrResult prrRanking(const CandidatePool& pool, int protected_group);

// Uniformly random permutation (Fisher-Yates under the seeded generator).
Ranking uniformSample(const CandidatePool& pool, std::uint64_t seed);

// Closed-form P(i in sigma_k) = k/n of the uniform policy.
double uniformInclusionExact(std::size_t n, std::size_t k);

// Thompson sampling: draw r_i ~ Bernoulli(p_i), rank all r=1 before all
// r=0, shuffle uniformly within each block.
Ranking tsSample(const CandidatePool& pool, std::uint64_t seed);

// FA*IR minimum protected counts: for each k in 1..k_max the smallest m
// with BinomialCDF(m; k, p) > alpha (uncorrected test).
std::vector<int> fairstarMinima(int k_max, double p, double alpha);

// PRP subject to the per-prefix protected-count minima with
// p = S(protected)/n.
Ranking fairstarRanking(const CandidatePool& pool, int protected_group, double alpha);

// Monte-Carlo inclusion estimate for a stochastic policy; replicate s uses
// seed mixSeed(base_seed, s). Parallel execution merges integer counts and
// is bit-identical to serial.
InclusionEstimate inclusionEstimate(const PolicySpec& policy, const CandidatePool& pool,
                                    std::uint32_t d, std::uint64_t base_seed,
                                    Execution exec = Execution::Serial);

// Among m samples of a stochastic policy, the ranking whose sum_k |delta|
// is the lower median.
Ranking medianDeltaSample(const PolicySpec& policy, const CandidatePool& pool, int m,
                          std::uint64_t seed);

// One sample from a stochastic policy (Uniform or TS).
Ranking sampleStochastic(const PolicySpec& policy, const CandidatePool& pool,
                         std::uint64_t seed);

}  // namespace eor
