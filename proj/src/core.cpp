#include "eor/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "eor/numeric.hpp"

namespace eor {

double standardError(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean(xs);
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = xs[i] - m;
        sq[i] = d * d;
    }
    double var = pairwiseSum(sq) / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

CandidatePool::CandidatePool(std::vector<Candidate> candidates,
                             std::vector<std::string> group_names)
    : group_names_(std::move(group_names)) {
    if (group_names_.size() < 2)
        throw WrongGroupCount("a pool needs at least two groups, got " +
                              std::to_string(group_names_.size()));
    const int g_count = static_cast<int>(group_names_.size());

    ids_.reserve(candidates.size());
    groups_.reserve(candidates.size());
    probs_.reserve(candidates.size());

    bool any_label = false, all_label = true;
    for (const Candidate& c : candidates) {
        if (c.label.has_value()) any_label = true; else all_label = false;
    }
    if (any_label && !all_label)
        throw PoolError("labels must be present for all candidates or none");
    if (any_label) labels_.reserve(candidates.size());

    std::unordered_set<std::string> seen;
    for (Candidate& c : candidates) {
        if (!(c.prob >= 0.0 && c.prob <= 1.0))
            throw PoolError("probability out of [0,1] for id '" + c.id + "'");
        if (c.group < 0 || c.group >= g_count)
            throw PoolError("group index out of range for id '" + c.id + "'");
        if (!seen.insert(c.id).second)
            throw PoolError("duplicate candidate id '" + c.id + "'");
        if (any_label) {
            int l = *c.label;
            if (l != 0 && l != 1)
                throw PoolError("label must be 0 or 1 for id '" + c.id + "'");
            labels_.push_back(static_cast<std::int8_t>(l));
        }
        ids_.push_back(std::move(c.id));
        groups_.push_back(c.group);
        probs_.push_back(c.prob);
    }

    // Fairness preconditions are hard construction errors: every formula
    // downstream divides by nRel(g).
    std::vector<std::size_t> sizes(group_names_.size(), 0);
    std::vector<KahanAccumulator> nrel(group_names_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        sizes[groups_[i]]++;
        nrel[groups_[i]].add(probs_[i]);
    }
    for (std::size_t g = 0; g < group_names_.size(); ++g) {
        if (sizes[g] == 0)
            throw EmptyGroup("group '" + group_names_[g] + "' has no candidates");
        if (nrel[g].value() <= kRelevanceEps)
            throw DegenerateRelevance("group '" + group_names_[g] +
                                      "' has nRel <= 1e-9; fairness terms are undefined");
    }
}

int CandidatePool::label(std::size_t i) const {
    if (labels_.empty()) throw MissingLabels("pool has no labels");
    return labels_[i];
}

double CandidatePool::relevance(std::size_t i, Mode mode) const {
    return mode == Mode::Probs ? probs_[i] : static_cast<double>(label(i));
}

CandidatePool poolFromGroupProbs(const std::vector<std::vector<double>>& probs_per_group,
                                 std::vector<std::string> group_names) {
    if (group_names.empty()) {
        for (std::size_t g = 0; g < probs_per_group.size(); ++g)
            group_names.push_back(std::string(1, static_cast<char>('A' + g)));
    }
    std::vector<Candidate> cands;
    for (std::size_t g = 0; g < probs_per_group.size(); ++g) {
        for (std::size_t i = 0; i < probs_per_group[g].size(); ++i) {
            Candidate c;
            c.id = group_names[g] + "_" + std::to_string(i);
            c.group = static_cast<int>(g);
            c.prob = probs_per_group[g][i];
            cands.push_back(std::move(c));
        }
    }
    return CandidatePool(std::move(cands), std::move(group_names));
}

std::vector<GroupStats> groupStats(const CandidatePool& pool, Mode mode) {
    std::vector<GroupStats> stats(pool.groupCount());
    std::vector<KahanAccumulator> nrel(pool.groupCount());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        stats[pool.group(i)].size++;
        nrel[pool.group(i)].add(pool.relevance(i, mode));
    }
    for (int g = 0; g < pool.groupCount(); ++g) {
        if (stats[g].size == 0)
            throw EmptyGroup("group '" + pool.groupNames()[g] + "' has no candidates");
        stats[g].n_rel = nrel[g].value();
        if (stats[g].n_rel <= CandidatePool::kRelevanceEps)
            throw DegenerateRelevance("group '" + pool.groupNames()[g] + "' has nRel <= 1e-9" +
                                      (mode == Mode::Labels ? " in label mode" : ""));
    }
    return stats;
}

void validateRanking(const CandidatePool& pool, const Ranking& ranking, bool require_full) {
    if (require_full && ranking.size() != pool.size())
        throw PoolError("ranking is not a full permutation");
    std::vector<bool> seen(pool.size(), false);
    for (std::uint32_t idx : ranking) {
        if (idx >= pool.size()) throw PoolError("ranking index out of range");
        if (seen[idx]) throw PoolError("duplicate index in ranking");
        seen[idx] = true;
    }
}

namespace {

std::vector<double> groupRelevanceTotals(const CandidatePool& pool, Mode mode) {
    auto stats = groupStats(pool, mode);
    std::vector<double> nrel(stats.size());
    for (std::size_t g = 0; g < stats.size(); ++g) nrel[g] = stats[g].n_rel;
    return nrel;
}

}  // namespace

double deltaSigned(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                   Mode mode) {
    if (pool.groupCount() != 2)
        throw WrongGroupCount("signed delta is defined for exactly two groups");
    if (k > ranking.size()) throw PoolError("prefix k exceeds ranking length");
    auto nrel = groupRelevanceTotals(pool, mode);
    KahanAccumulator acc_a, acc_b;
    for (std::size_t pos = 0; pos < k; ++pos) {
        std::uint32_t i = ranking[pos];
        (pool.group(i) == 0 ? acc_a : acc_b).add(pool.relevance(i, mode));
    }
    return acc_a.value() / nrel[0] - acc_b.value() / nrel[1];
}

double deltaMulti(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                  Mode mode) {
    if (pool.groupCount() < 2)
        throw WrongGroupCount("delta needs at least two groups");
    if (k > ranking.size()) throw PoolError("prefix k exceeds ranking length");
    auto nrel = groupRelevanceTotals(pool, mode);
    std::vector<KahanAccumulator> acc(pool.groupCount());
    for (std::size_t pos = 0; pos < k; ++pos) {
        std::uint32_t i = ranking[pos];
        acc[pool.group(i)].add(pool.relevance(i, mode));
    }
    double lo = 2.0, hi = -1.0;
    for (int g = 0; g < pool.groupCount(); ++g) {
        double f = acc[g].value() / nrel[g];
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    return hi - lo;
}

double DeltaTrace::maxAbsDelta() const {
    double m = 0.0;
    for (double d : delta) m = std::max(m, std::fabs(d));
    return m;
}

DeltaTrace deltaTrace(const CandidatePool& pool, const Ranking& ranking, Mode mode) {
    validateRanking(pool, ranking, /*require_full=*/true);
    const std::size_t n = pool.size();
    const int g_count = pool.groupCount();
    auto nrel = groupRelevanceTotals(pool, mode);
    double total_nrel = 0.0;
    for (double v : nrel) total_nrel += v;

    DeltaTrace trace;
    trace.n = n;
    trace.group_count = g_count;
    trace.delta.resize(n);
    trace.total_cost.resize(n);
    trace.group_fraction.assign(g_count, std::vector<double>(n));
    trace.group_cost.assign(g_count, std::vector<double>(n));

    std::vector<KahanAccumulator> acc(g_count);
    KahanAccumulator acc_total;
    std::vector<double> frac(g_count, 0.0);
    for (std::size_t pos = 0; pos < n; ++pos) {
        std::uint32_t i = ranking[pos];
        double rel = pool.relevance(i, mode);
        acc[pool.group(i)].add(rel);
        acc_total.add(rel);
        double lo = 2.0, hi = -1.0;
        for (int g = 0; g < g_count; ++g) {
            frac[g] = acc[g].value() / nrel[g];
            trace.group_fraction[g][pos] = frac[g];
            trace.group_cost[g][pos] = 1.0 - frac[g];
            lo = std::min(lo, frac[g]);
            hi = std::max(hi, frac[g]);
        }
        trace.delta[pos] = (g_count == 2) ? frac[0] - frac[1] : hi - lo;
        trace.total_cost[pos] = 1.0 - acc_total.value() / total_nrel;
    }
    return trace;
}

InclusionEstimate InclusionEstimate::fromPositionHistogram(std::size_t n, std::uint32_t d,
                                                           std::vector<std::uint32_t> hist) {
    if (hist.size() != n * n) throw PoolError("position histogram has wrong shape");
    // A candidate at position pos is in every top-k with k > pos.
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) hist[k * n + i] += hist[(k - 1) * n + i];
    return InclusionEstimate(n, d, std::move(hist));
}

std::uint64_t InclusionEstimate::rowCountSum(std::size_t k) const {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < n_; ++i) sum += counts_[(k - 1) * n_ + i];
    return sum;
}

double groupCost(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                 int group, Mode mode) {
    if (group < 0 || group >= pool.groupCount()) throw PoolError("invalid group");
    auto nrel = groupRelevanceTotals(pool, mode);
    KahanAccumulator acc;
    for (std::size_t pos = 0; pos < k; ++pos) {
        std::uint32_t i = ranking[pos];
        if (pool.group(i) == group) acc.add(pool.relevance(i, mode));
    }
    return 1.0 - acc.value() / nrel[group];
}

double groupCost(const CandidatePool& pool, const InclusionEstimate& incl, std::size_t k,
                 int group, Mode mode) {
    if (group < 0 || group >= pool.groupCount()) throw PoolError("invalid group");
    if (k == 0) return 1.0;  // empty prefix: nobody included
    auto nrel = groupRelevanceTotals(pool, mode);
    KahanAccumulator acc;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (pool.group(i) == group) acc.add(incl.value(k, i) * pool.relevance(i, mode));
    return 1.0 - acc.value() / nrel[group];
}

double totalCost(const CandidatePool& pool, const Ranking& ranking, std::size_t k,
                 Mode mode) {
    auto nrel = groupRelevanceTotals(pool, mode);
    double total_nrel = 0.0;
    for (double v : nrel) total_nrel += v;
    KahanAccumulator acc;
    for (std::size_t pos = 0; pos < k; ++pos) acc.add(pool.relevance(ranking[pos], mode));
    return 1.0 - acc.value() / total_nrel;
}

double totalCost(const CandidatePool& pool, const InclusionEstimate& incl, std::size_t k,
                 Mode mode) {
    if (k == 0) return 1.0;
    auto nrel = groupRelevanceTotals(pool, mode);
    double total_nrel = 0.0;
    for (double v : nrel) total_nrel += v;
    KahanAccumulator acc;
    for (std::size_t i = 0; i < pool.size(); ++i)
        acc.add(incl.value(k, i) * pool.relevance(i, mode));
    return 1.0 - acc.value() / total_nrel;
}

double deltaMulti(const CandidatePool& pool, const InclusionEstimate& incl, std::size_t k,
                  Mode mode) {
    if (k == 0) return 0.0;
    auto nrel = groupRelevanceTotals(pool, mode);
    std::vector<KahanAccumulator> acc(pool.groupCount());
    for (std::size_t i = 0; i < pool.size(); ++i)
        acc[pool.group(i)].add(incl.value(k, i) * pool.relevance(i, mode));
    double lo = 2.0, hi = -1.0;
    for (int g = 0; g < pool.groupCount(); ++g) {
        double f = acc[g].value() / nrel[g];
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    return hi - lo;
}

double posteriorPredictiveMean(long successes, long trials, double prior_a, double prior_b) {
    if (!(prior_a > 0.0) || !(prior_b > 0.0))
        throw InvalidPrior("Beta prior parameters must be positive");
    if (successes < 0 || trials < 0 || successes > trials)
        throw InvalidPrior("need 0 <= successes <= trials");
    return (prior_a + static_cast<double>(successes)) /
           (prior_a + prior_b + static_cast<double>(trials));
}

}  // namespace eor
