#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eor {

// Kahan compensated accumulator. Long prefix sums of small probabilities
// are the core arithmetic of the delta criterion; plain summation drifts
// past the documented 1e-12 equality tolerance on large pools.
class KahanAccumulator {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Pairwise (cascade) summation. Used when merging per-replicate or per-run
// results so the total does not depend on execution schedule.
inline double pairwiseSum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        KahanAccumulator acc;
        for (double x : xs) acc.add(x);
        return acc.value();
    }
    std::size_t half = xs.size() / 2;
    return pairwiseSum(xs.first(half)) + pairwiseSum(xs.subspan(half));
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return pairwiseSum(xs) / static_cast<double>(xs.size());
}

// Standard error of the mean (sample stddev / sqrt(n)); 0 for n < 2.
double standardError(std::span<const double> xs);

enum class Execution { Serial, Parallel };

}  // namespace eor
