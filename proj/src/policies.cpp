#include "eor/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eor/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eor {

bool isStochastic(PolicyKind kind) {
    return kind == PolicyKind::Uniform || kind == PolicyKind::TS;
}

std::string policyName(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::EOR: return "eor";
        case PolicyKind::PRP: return "prp";
        case PolicyKind::DP: return "dp";
        case PolicyKind::PRR: return "prr";
        case PolicyKind::Uniform: return "uniform";
        case PolicyKind::TS: return "ts";
        case PolicyKind::FairStar: return "fairstar";
        case PolicyKind::Exp: return "exp";
        case PolicyKind::RA: return "ra";
    }
    return "?";
}

PolicyKind policyFromName(const std::string& name) {
    for (PolicyKind k : {PolicyKind::EOR, PolicyKind::PRP, PolicyKind::DP, PolicyKind::PRR,
                         PolicyKind::Uniform, PolicyKind::TS, PolicyKind::FairStar,
                         PolicyKind::Exp, PolicyKind::RA}) {
        if (policyName(k) == name) return k;
    }
    throw CsvError("unknown policy '" + name + "'");
}

GroupQueues::GroupQueues(const CandidatePool& pool)
    : queue_(pool.groupCount()), cursor_(pool.groupCount(), 0) {
    for (std::size_t i = 0; i < pool.size(); ++i)
        queue_[pool.group(i)].push_back(static_cast<std::uint32_t>(i));
    for (auto& q : queue_) {
        std::stable_sort(q.begin(), q.end(), [&](std::uint32_t a, std::uint32_t b) {
            return pool.prob(a) > pool.prob(b);
        });
    }
}

Ranking prpRanking(const CandidatePool& pool) {
    std::vector<std::uint32_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return pool.prob(a) > pool.prob(b);
    });
    return Ranking(std::move(order));
}

namespace {

// Shared greedy merge for EOR and DP. Each group contributes weight
// w_i / norm[g] to its accumulated fraction; at every prefix the head that
// minimises (max fraction - min fraction) is appended. For G = 2 this is
// exactly minimising |signed delta|.
Ranking greedyBalancedMerge(const CandidatePool& pool,
                            const std::vector<double>& weights,
                            const std::vector<double>& norms) {
    const int g_count = pool.groupCount();
    GroupQueues queues(pool);

    std::vector<KahanAccumulator> acc(g_count);
    std::vector<double> frac(g_count, 0.0);
    std::vector<std::uint32_t> order;
    order.reserve(pool.size());

    for (std::size_t step = 0; step < pool.size(); ++step) {
        // Top-2 max/min of the current fractions so that "max/min with one
        // entry replaced" is O(1) per candidate group.
        int max1 = -1, max2 = -1, min1 = -1, min2 = -1;
        for (int g = 0; g < g_count; ++g) {
            if (max1 < 0 || frac[g] > frac[max1]) { max2 = max1; max1 = g; }
            else if (max2 < 0 || frac[g] > frac[max2]) { max2 = g; }
            if (min1 < 0 || frac[g] < frac[min1]) { min2 = min1; min1 = g; }
            else if (min2 < 0 || frac[g] < frac[min2]) { min2 = g; }
        }

        int best = -1;
        double best_delta = 0.0;
        for (int g = 0; g < g_count; ++g) {
            if (queues.exhausted(g)) continue;
            double nf = frac[g] + weights[queues.head(g)] / norms[g];
            // max/min over the other groups' fractions and the raised one;
            // G >= 2 guarantees max2/min2 exist.
            double hi = std::max(nf, g == max1 ? frac[max2] : frac[max1]);
            double lo = std::min(nf, g == min1 ? frac[min2] : frac[min1]);
            double delta = hi - lo;
            if (best < 0 || delta < best_delta ||
                (delta == best_delta &&
                 (frac[g] < frac[best] || (frac[g] == frac[best] && g < best)))) {
                best = g;
                best_delta = delta;
            }
        }

        std::uint32_t idx = queues.head(best);
        queues.pop(best);
        acc[best].add(weights[idx]);
        frac[best] = acc[best].value() / norms[best];
        order.push_back(idx);
    }
    return Ranking(std::move(order));
}

}  // namespace

Ranking eorRanking(const CandidatePool& pool) {
    auto stats = groupStats(pool);
    std::vector<double> norms(stats.size());
    for (std::size_t g = 0; g < stats.size(); ++g) norms[g] = stats[g].n_rel;
    return greedyBalancedMerge(pool, pool.probs(), norms);
}

Ranking dpRanking(const CandidatePool& pool) {
    auto stats = groupStats(pool);
    std::vector<double> ones(pool.size(), 1.0);
    std::vector<double> norms(stats.size());
    for (std::size_t g = 0; g < stats.size(); ++g) norms[g] = static_cast<double>(stats[g].size);
    return greedyBalancedMerge(pool, ones, norms);
}

PrrResult prrRanking(const CandidatePool& pool, int protected_group) {
    if (pool.groupCount() != 2)
        throw WrongGroupCount("proportional Rooney-rule is defined for two groups");
    if (protected_group != 0 && protected_group != 1)
        throw PoolError("invalid protected group");
    auto stats = groupStats(pool);
    const std::uint64_t s_prot = stats[protected_group].size;
    const std::uint64_t n = pool.size();
    GroupQueues queues(pool);
    const int other = 1 - protected_group;

    PrrResult result;
    result.ranking.order.reserve(n);
    std::uint64_t count_prot = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
        // Utility-greedy head unless S(prot|sigma_k) >= k*S(prot)/n forces
        // the protected head; comparison in exact integer arithmetic.
        int pick;
        if (queues.exhausted(protected_group)) {
            pick = other;
            if (count_prot * n < s_prot * k) result.quota_infeasible = true;
        } else if (queues.exhausted(other)) {
            pick = protected_group;
        } else {
            bool other_first =
                pool.prob(queues.head(other)) > pool.prob(queues.head(protected_group)) ||
                (pool.prob(queues.head(other)) == pool.prob(queues.head(protected_group)) &&
                 queues.head(other) < queues.head(protected_group));
            // Take the utility-greedy head unless that breaks the quota.
            pick = (other_first && count_prot * n >= s_prot * k) ? other : protected_group;
        }
        if (pick == protected_group) count_prot++;
        result.ranking.order.push_back(queues.head(pick));
        queues.pop(pick);
    }
    return result;
}

Ranking uniformSample(const CandidatePool& pool, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint32_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0u);
    shuffleInPlace(order, rng);
    return Ranking(std::move(order));
}

double uniformInclusionExact(std::size_t n, std::size_t k) {
    if (k > n) throw PoolError("k exceeds n");
    if (n == 0) return 0.0;
    return static_cast<double>(k) / static_cast<double>(n);
}

Ranking tsSample(const CandidatePool& pool, std::uint64_t seed) {
    Rng rng(seed);
    // Bernoulli draws in candidate index order, then a uniform shuffle of
    // each relevance block, relevant block first.
    std::vector<std::uint32_t> relevant, rest;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (rng.nextBernoulli(pool.prob(i))) relevant.push_back(static_cast<std::uint32_t>(i));
        else rest.push_back(static_cast<std::uint32_t>(i));
    }
    shuffleInPlace(relevant, rng);
    shuffleInPlace(rest, rng);
    relevant.insert(relevant.end(), rest.begin(), rest.end());
    return Ranking(std::move(relevant));
}

namespace {

double logBinomPmf(int k, int m, double p) {
    return std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0) +
           m * std::log(p) + (k - m) * std::log1p(-p);
}

}  // namespace

std::vector<int> fairstarMinima(int k_max, double p, double alpha) {
    if (!(p > 0.0 && p < 1.0)) throw BadParams("FA*IR proportion must be in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadParams("FA*IR alpha must be in (0,1)");
    std::vector<int> minima(k_max);
    for (int k = 1; k <= k_max; ++k) {
        double cdf = 0.0;
        int m = 0;
        for (; m <= k; ++m) {
            cdf += std::exp(logBinomPmf(k, m, p));
            if (cdf > alpha) break;
        }
        minima[k - 1] = std::min(m, k);
    }
    return minima;
}

Ranking fairstarRanking(const CandidatePool& pool, int protected_group, double alpha) {
    if (pool.groupCount() != 2)
        throw WrongGroupCount("FA*IR ranking is defined for two groups");
    if (protected_group != 0 && protected_group != 1)
        throw PoolError("invalid protected group");
    auto stats = groupStats(pool);
    const std::size_t n = pool.size();
    const double p = static_cast<double>(stats[protected_group].size) / static_cast<double>(n);
    auto minima = fairstarMinima(static_cast<int>(n), p, alpha);

    GroupQueues queues(pool);
    const int other = 1 - protected_group;
    Ranking out;
    out.order.reserve(n);
    int count_prot = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        int pick;
        if (queues.exhausted(protected_group)) pick = other;
        else if (queues.exhausted(other)) pick = protected_group;
        else if (count_prot < minima[k - 1]) pick = protected_group;  // quota binds
        else {
            // PRP-best overall, stable on equal probs
            double pp = pool.prob(queues.head(protected_group));
            double po = pool.prob(queues.head(other));
            if (po > pp || (po == pp && queues.head(other) < queues.head(protected_group)))
                pick = other;
            else
                pick = protected_group;
        }
        if (pick == protected_group) count_prot++;
        out.order.push_back(queues.head(pick));
        queues.pop(pick);
    }
    return out;
}

Ranking sampleStochastic(const PolicySpec& policy, const CandidatePool& pool,
                         std::uint64_t seed) {
    switch (policy.kind) {
        case PolicyKind::Uniform: return uniformSample(pool, seed);
        case PolicyKind::TS: return tsSample(pool, seed);
        default: throw NotStochastic("policy '" + policyName(policy.kind) + "' is deterministic");
    }
}

InclusionEstimate inclusionEstimate(const PolicySpec& policy, const CandidatePool& pool,
                                    std::uint32_t d, std::uint64_t base_seed, Execution exec) {
    if (!isStochastic(policy.kind))
        throw NotStochastic("inclusion estimation needs a stochastic policy; deterministic "
                            "inclusion is the 0/1 indicator");
    if (d < 1) throw BadParams("need at least one Monte Carlo sample");
    const std::size_t n = pool.size();
    std::vector<std::uint32_t> hist(n * n, 0);

    if (exec == Execution::Parallel) {
#ifdef _OPENMP
        std::vector<std::vector<std::uint32_t>> partial;
#pragma omp parallel
        {
#pragma omp single
            partial.assign(static_cast<std::size_t>(omp_get_num_threads()),
                           std::vector<std::uint32_t>());
            auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
            local.assign(n * n, 0);
#pragma omp for schedule(static)
            for (long s = 0; s < static_cast<long>(d); ++s) {
                Ranking r = sampleStochastic(policy, pool,
                                             mixSeed(base_seed, static_cast<std::uint64_t>(s)));
                for (std::size_t pos = 0; pos < n; ++pos) local[pos * n + r[pos]]++;
            }
        }
        // Integer merge: bit-identical to the serial path.
        for (const auto& local : partial)
            for (std::size_t j = 0; j < hist.size(); ++j) hist[j] += local[j];
        return InclusionEstimate::fromPositionHistogram(n, d, std::move(hist));
#endif
    }
    for (std::uint32_t s = 0; s < d; ++s) {
        Ranking r = sampleStochastic(policy, pool, mixSeed(base_seed, s));
        for (std::size_t pos = 0; pos < n; ++pos) hist[pos * n + r[pos]]++;
    }
    return InclusionEstimate::fromPositionHistogram(n, d, std::move(hist));
}

Ranking medianDeltaSample(const PolicySpec& policy, const CandidatePool& pool, int m,
                          std::uint64_t seed) {
    if (!isStochastic(policy.kind))
        throw NotStochastic("median-delta sampling needs a stochastic policy");
    if (m < 1) throw BadParams("need at least one sample");
    std::vector<Ranking> samples;
    std::vector<std::pair<double, int>> scored;
    samples.reserve(m);
    for (int s = 0; s < m; ++s) {
        samples.push_back(sampleStochastic(policy, pool, mixSeed(seed, s)));
        DeltaTrace trace = deltaTrace(pool, samples.back());
        KahanAccumulator auc;
        for (double dlt : trace.delta) auc.add(std::fabs(dlt));
        scored.emplace_back(auc.value(), s);
    }
    std::sort(scored.begin(), scored.end());
    return samples[scored[static_cast<std::size_t>((m - 1) / 2)].second];
}

}  // namespace eor
