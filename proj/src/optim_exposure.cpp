#include <algorithm>
#include <cmath>
#include <limits>

#include "eor/numeric.hpp"
#include "eor/optim.hpp"
#include "eor/policies.hpp"

namespace eor {

std::vector<double> positionWeights(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = 1.0 / std::log2(static_cast<double>(j) + 2.0);
    return v;
}

double DoublyStochasticRanking::prefixInclusion(std::size_t k, std::size_t i) const {
    KahanAccumulator acc;
    for (std::size_t j = 0; j < k; ++j) acc.add(at(i, j));
    return acc.value();
}

std::vector<double> DoublyStochasticRanking::groupExposure(const CandidatePool& pool) const {
    std::vector<KahanAccumulator> acc(pool.groupCount());
    std::vector<std::size_t> sizes(pool.groupCount(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        sizes[pool.group(i)]++;
        for (std::size_t j = 0; j < n; ++j) acc[pool.group(i)].add(at(i, j) * weights[j]);
    }
    std::vector<double> exposure(pool.groupCount());
    for (int g = 0; g < pool.groupCount(); ++g)
        exposure[g] = acc[g].value() / static_cast<double>(sizes[g]);
    return exposure;
}

DoublyStochasticRanking exposureLP(const CandidatePool& pool) {
    const std::size_t n = pool.size();
    if (n > 100) throw TooLarge("exposure LP is dense in n^2 variables; n <= 100");
    auto stats = groupStats(pool);
    const int g_count = pool.groupCount();
    const std::size_t pairs = static_cast<std::size_t>(g_count) * (g_count - 1) / 2;
    std::vector<double> v = positionWeights(n);

    // Variables: x[i*n + j] = P(candidate i occupies position j), then one
    // slack pair (s+, s-) per exposure constraint.
    const std::size_t nx = n * n;
    const std::size_t nvars = nx + 2 * pairs;
    LinearProgram lp;
    lp.objective.assign(nvars, 0.0);
    lp.lower.assign(nvars, 0.0);
    // Row/column sums pin the matrix entries to [0,1]; no explicit uppers.
    lp.upper.assign(nvars, std::numeric_limits<double>::infinity());

    for (std::size_t i = 0; i < n; ++i) {  // each candidate fully assigned
        LpConstraint row;
        row.coeffs.assign(nvars, 0.0);
        for (std::size_t j = 0; j < n; ++j) row.coeffs[i * n + j] = 1.0;
        row.rel = Relation::Equal;
        row.rhs = 1.0;
        lp.constraints.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < n; ++j) {  // each position fully occupied
        LpConstraint col;
        col.coeffs.assign(nvars, 0.0);
        for (std::size_t i = 0; i < n; ++i) col.coeffs[i * n + j] = 1.0;
        col.rel = Relation::Equal;
        col.rhs = 1.0;
        lp.constraints.push_back(std::move(col));
    }
    // (1_g/nRel(g) - 1_h/nRel(h)) Sigma v + s+ - s- = 0 per unordered pair.
    std::size_t pair_idx = 0;
    for (int g = 0; g < g_count; ++g) {
        for (int h = g + 1; h < g_count; ++h, ++pair_idx) {
            LpConstraint pair;
            pair.coeffs.assign(nvars, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double coef = 0.0;
                if (pool.group(i) == g) coef = 1.0 / stats[g].n_rel;
                else if (pool.group(i) == h) coef = -1.0 / stats[h].n_rel;
                if (coef == 0.0) continue;
                for (std::size_t j = 0; j < n; ++j) pair.coeffs[i * n + j] = coef * v[j];
            }
            pair.coeffs[nx + 2 * pair_idx] = 1.0;
            pair.coeffs[nx + 2 * pair_idx + 1] = -1.0;
            pair.rel = Relation::Equal;
            pair.rhs = 0.0;
            lp.constraints.push_back(std::move(pair));
        }
    }

    // Stage 1: smallest total violation achievable.
    for (std::size_t p = 0; p < 2 * pairs; ++p) lp.objective[nx + p] = -1.0;
    LPSolution stage1 = simplexSolve(lp);
    if (stage1.status != LpStatus::Optimal)
        throw NumericalFailure("exposure LP stage 1 did not solve");
    double min_violation = std::max(0.0, -stage1.objective_value);

    // Stage 2: maximize utility holding the violation at its minimum.
    for (std::size_t p = 0; p < 2 * pairs; ++p) lp.objective[nx + p] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.objective[i * n + j] = pool.prob(i) * v[j];
    LpConstraint cap;
    cap.coeffs.assign(nvars, 0.0);
    for (std::size_t p = 0; p < 2 * pairs; ++p) cap.coeffs[nx + p] = 1.0;
    cap.rel = Relation::LessEq;
    cap.rhs = min_violation + 1e-9;
    lp.constraints.push_back(std::move(cap));

    LPSolution sol = simplexSolve(lp);
    if (sol.status != LpStatus::Optimal)
        throw NumericalFailure("exposure LP stage 2 did not solve");

    DoublyStochasticRanking result;
    result.n = n;
    result.weights = std::move(v);
    result.matrix.resize(nx);
    for (std::size_t idx = 0; idx < nx; ++idx)
        result.matrix[idx] = std::clamp(sol.x[idx], 0.0, 1.0);
    double util = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            util += pool.prob(i) * result.weights[j] * result.matrix[i * n + j];
    result.objective = util;
    result.exposure_violation = min_violation;
    result.exposure_feasible = min_violation <= 1e-7;
    return result;
}

namespace {

std::vector<double> rankingExposure(const CandidatePool& pool, const Ranking& ranking,
                                    const std::vector<double>& v,
                                    const std::vector<std::size_t>& sizes) {
    std::vector<KahanAccumulator> acc(pool.groupCount());
    for (std::size_t j = 0; j < ranking.size(); ++j)
        acc[pool.group(ranking[j])].add(v[j]);
    std::vector<double> exposure(pool.groupCount());
    for (int g = 0; g < pool.groupCount(); ++g)
        exposure[g] = acc[g].value() / static_cast<double>(sizes[g]);
    return exposure;
}

double exposureRatio(const std::vector<double>& e) {
    double lo = *std::min_element(e.begin(), e.end());
    double hi = *std::max_element(e.begin(), e.end());
    return hi > 0.0 ? lo / hi : 1.0;
}

}  // namespace

RankAggregationResult rankAggregationExposure(const CandidatePool& pool, double threshold) {
    if (!(threshold <= 1.0)) throw BadParams("exposure threshold must be <= 1");
    auto stats = groupStats(pool);
    std::vector<std::size_t> sizes(stats.size());
    for (std::size_t g = 0; g < stats.size(); ++g) sizes[g] = stats[g].size;
    const std::size_t n = pool.size();
    std::vector<double> v = positionWeights(n);

    RankAggregationResult result;
    result.ranking = prpRanking(pool);
    std::vector<double> exposure = rankingExposure(pool, result.ranking, v, sizes);

    const std::size_t max_swaps = 4 * n * n + 16;
    for (std::size_t iter = 0; iter < max_swaps; ++iter) {
        double ratio = exposureRatio(exposure);
        if (ratio >= threshold) break;
        int over = 0, under = 0;
        for (int g = 1; g < pool.groupCount(); ++g) {
            if (exposure[g] > exposure[over]) over = g;
            if (exposure[g] < exposure[under]) under = g;
        }
        // Highest-positioned adjacent (over, under) pair whose swap
        // improves the ratio; a swap that overshoots is not productive
        // and would make the loop oscillate.
        bool swapped = false;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (pool.group(result.ranking[j]) != over ||
                pool.group(result.ranking[j + 1]) != under)
                continue;
            double shift = v[j] - v[j + 1];
            std::vector<double> next = exposure;
            next[over] -= shift / static_cast<double>(sizes[over]);
            next[under] += shift / static_cast<double>(sizes[under]);
            if (exposureRatio(next) > ratio + 1e-15) {
                std::swap(result.ranking.order[j], result.ranking.order[j + 1]);
                exposure = std::move(next);
                swapped = true;
                break;
            }
        }
        if (!swapped) break;  // no productive swap left
    }

    exposure = rankingExposure(pool, result.ranking, v, sizes);
    result.achieved_ratio = exposureRatio(exposure);
    result.satisfied = result.achieved_ratio >= threshold;
    return result;
}

}  // namespace eor
