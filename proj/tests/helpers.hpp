#pragma once

#include <vector>

#include "eor/core.hpp"
#include "eor/rng.hpp"

namespace eor::test {

// 25-candidate medical-trial example: group A has sharp probabilities,
// group B flat ones; both have nRel = 4.
inline CandidatePool runningExamplePool() {
    std::vector<double> a = {0.9, 0.9, 0.8, 0.7, 0.1};
    a.insert(a.end(), 12, 0.05);
    std::vector<double> b = {0.6, 0.6, 0.6, 0.5, 0.5, 0.4, 0.4, 0.4};
    return poolFromGroupProbs({a, b});
}

// Cost-optimality-gap illustration pool: nRel(A)=4 S(A)=15, nRel(B)=4 S(B)=31.
inline CandidatePool certificateFigurePool() {
    std::vector<double> a = {1.0, 0.6, 0.5, 0.5, 0.4};
    a.insert(a.end(), 10, 0.1);
    std::vector<double> b = {1.0};
    b.insert(b.end(), 30, 0.1);
    return poolFromGroupProbs({a, b});
}

// Worked FA*IR comparison pool: A = [0.7 x4, 0.1 x2], B = [0.5 x6].
inline CandidatePool fairstarExamplePool() {
    std::vector<double> a = {0.7, 0.7, 0.7, 0.7, 0.1, 0.1};
    std::vector<double> b(6, 0.5);
    return poolFromGroupProbs({a, b});
}

// Random G-group pool with sizes >= min_per_group and uniform probs in
// (lo, hi); candidates per group contiguous, group order A, B, C, ...
inline CandidatePool randomPool(Rng& rng, int groups, std::size_t max_n,
                                std::size_t min_per_group = 1, double lo = 0.02,
                                double hi = 0.98) {
    std::vector<std::vector<double>> probs(groups);
    std::size_t extra = max_n > min_per_group * groups
                            ? rng.nextBounded(max_n - min_per_group * groups + 1)
                            : 0;
    for (int g = 0; g < groups; ++g)
        for (std::size_t i = 0; i < min_per_group; ++i)
            probs[g].push_back(lo + (hi - lo) * rng.nextUnit());
    for (std::size_t i = 0; i < extra; ++i)
        probs[rng.nextBounded(groups)].push_back(lo + (hi - lo) * rng.nextUnit());
    return poolFromGroupProbs(probs);
}

}  // namespace eor::test
