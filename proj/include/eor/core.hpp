#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eor/errors.hpp"

namespace eor {

// Whether relevance terms (nRel and friends) are computed from the
// calibrated probabilities or from the true binary labels. Label mode is
// an explicit evaluation choice, never inferred from the data.
enum class Mode { Probs, Labels };

struct Candidate {
    std::string id;
    int group = 0;
    double prob = 0.0;
    std::optional<int> label;
};

// Immutable candidate pool. Construction validates: probabilities in
// [0,1], unique ids, valid group indices, at least two groups, no empty
// group, and nRel(g) > kRelevanceEps for every group (the fairness
// formulas all divide by nRel). Label-mode degeneracy is only detectable
// when label-mode stats are requested.
class CandidatePool {
public:
    static constexpr double kRelevanceEps = 1e-9;

    CandidatePool(std::vector<Candidate> candidates,
                  std::vector<std::string> group_names);

    std::size_t size() const { return probs_.size(); }
    int groupCount() const { return static_cast<int>(group_names_.size()); }
    bool hasLabels() const { return !labels_.empty(); }

    const std::string& id(std::size_t i) const { return ids_[i]; }
    int group(std::size_t i) const { return groups_[i]; }
    double prob(std::size_t i) const { return probs_[i]; }
    int label(std::size_t i) const;

    // p_i in prob mode, r_i in label mode (MissingLabels if absent).
    double relevance(std::size_t i, Mode mode) const;

    const std::vector<std::string>& groupNames() const { return group_names_; }
    const std::vector<double>& probs() const { return probs_; }
    const std::vector<int>& groups() const { return groups_; }

private:
    std::vector<std::string> ids_;
    std::vector<int> groups_;
    std::vector<double> probs_;
    std::vector<std::int8_t> labels_;  // empty when the pool has no labels
    std::vector<std::string> group_names_;
};

// Convenience constructor used by the synthetic generators and tests:
// one prob vector per group, ids assigned as <groupname>_<index>.
CandidatePool poolFromGroupProbs(const std::vector<std::vector<double>>& probs_per_group,
                                 std::vector<std::string> group_names = {});

struct GroupStats {
    std::size_t size = 0;  // S(g)
    double n_rel = 0.0;    // nRel(g)
};

// Per-group S(g) and nRel(g). Throws EmptyGroup / DegenerateRelevance.
std::vector<GroupStats> groupStats(const CandidatePool& pool, Mode mode = Mode::Probs);

// A permutation of candidate indices, full or prefix.
struct Ranking {
    std::vector<std::uint32_t> order;

    Ranking() = default;
    explicit Ranking(std::vector<std::uint32_t> o) : order(std::move(o)) {}

    std::size_t size() const { return order.size(); }
    std::uint32_t operator[](std::size_t i) const { return order[i]; }
    auto begin() const { return order.begin(); }
    auto end() const { return order.end(); }
};

// Throws PoolError if the ranking contains duplicates or out-of-range
// indices; if require_full, it must be a full permutation of the pool.
void validateRanking(const CandidatePool& pool, const Ranking& ranking,
                     bool require_full = false);

// Signed two-group criterion at prefix k:
//   nRel(A|sigma_k)/nRel(A) - nRel(B|sigma_k)/nRel(B),
// group 0 minus group 1, computed with compensated sums.
double deltaSigned(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                   Mode mode = Mode::Probs);

// Multi-group criterion: max_g fraction - min_g fraction (>= 0). Equals
// |deltaSigned| when G = 2.
double deltaMulti(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                  Mode mode = Mode::Probs);

// Per-prefix trace of a full ranking: delta (signed when G = 2,
// max-min otherwise), accumulated relevance fractions, group costs and
// total cost, for k = 1..n (index k-1).
struct DeltaTrace {
    std::size_t n = 0;
    int group_count = 0;
    std::vector<double> delta;
    std::vector<std::vector<double>> group_fraction;  // [g][k-1]
    std::vector<std::vector<double>> group_cost;      // [g][k-1]
    std::vector<double> total_cost;

    double maxAbsDelta() const;
};

DeltaTrace deltaTrace(const CandidatePool& pool, const Ranking& ranking,
                      Mode mode = Mode::Probs);

// Marginal inclusion probabilities P(i in sigma_k | pi) for a stochastic
// policy, estimated from `sampleCount` sampled rankings. Counts are kept
// as integers so the row-sum identity sum_i incl[k][i] = k is exact.
// Immutable once built; construct via fromPositionHistogram.
class InclusionEstimate {
public:
    // hist[pos * n + i] = number of samples placing candidate i at
    // 0-based position pos. Cumulated over positions internally.
    static InclusionEstimate fromPositionHistogram(std::size_t n, std::uint32_t sample_count,
                                                   std::vector<std::uint32_t> hist);

    std::size_t n() const { return n_; }
    std::uint32_t sampleCount() const { return d_; }

    // P(i in top k), k in 1..n.
    double value(std::size_t k, std::size_t i) const {
        return static_cast<double>(counts_[(k - 1) * n_ + i]) / static_cast<double>(d_);
    }
    std::uint32_t count(std::size_t k, std::size_t i) const {
        return counts_[(k - 1) * n_ + i];
    }

    // Exact integer row sum; equals k * sampleCount() by construction.
    std::uint64_t rowCountSum(std::size_t k) const;

private:
    InclusionEstimate(std::size_t n, std::uint32_t d, std::vector<std::uint32_t> counts)
        : n_(n), d_(d), counts_(std::move(counts)) {}

    std::size_t n_;
    std::uint32_t d_;
    std::vector<std::uint32_t> counts_;  // [k-1][i], cumulative over k
};

// Group cost 1 - nRel(g|sigma_k)/nRel(g) for a deterministic prefix.
double groupCost(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                 int group, Mode mode = Mode::Probs);
// Same under estimated inclusion probabilities.
double groupCost(const CandidatePool& pool, const InclusionEstimate& incl, std::size_t k,
                 int group, Mode mode = Mode::Probs);

// Total cost to the principal: sum_i (1 - P(i in sigma_k)) rel_i / sum_g nRel(g).
double totalCost(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                 Mode mode = Mode::Probs);
double totalCost(const CandidatePool& pool, const InclusionEstimate& incl, std::size_t k,
                 Mode mode = Mode::Probs);

// Multi-group criterion under estimated inclusion probabilities.
double deltaMulti(const CandidatePool& pool, const InclusionEstimate& incl, std::size_t k,
                  Mode mode = Mode::Probs);

// Cost to one candidate: r * (1 - P(i in sigma_k)).
inline double candidateCost(double inclusion_prob, int relevant) {
    return relevant ? (1.0 - inclusion_prob) : 0.0;
}

// Beta-Bernoulli posterior mean (prior_a + successes)/(prior_a + prior_b + trials).
double posteriorPredictiveMean(long successes, long trials, double prior_a, double prior_b);

}  // namespace eor
