#pragma once

#include <cstdint>
#include <vector>

namespace eor {

// SplitMix64 (Steele, Lea & Flood): 64-bit state advanced by the golden
// gamma, output run through the murmur-style finalizer. Every stochastic
// component of the library draws from this generator so that results are
// reproducible across platforms; nothing here depends on <random>
// distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t nextU64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random mantissa bits.
    double nextUnit() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

    // Bernoulli by threshold on a 53-bit uniform.
    bool nextBernoulli(double p) { return nextUnit() < p; }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t nextBounded(std::uint64_t bound) {
        if (bound == 0) return 0;
        std::uint64_t threshold = (0ull - bound) % bound;
        for (;;) {
            std::uint64_t r = nextU64();
            if (r >= threshold) return r % bound;
        }
    }

    // Box-Muller; both uniforms drawn fresh each call.
    double nextGaussian();

    // Marsaglia-Tsang for shape >= 1, boosted by u^(1/shape) below 1.
    double nextGamma(double shape);

    double nextBeta(double alpha, double beta);

private:
    std::uint64_t state_;
};

// Derives an independent stream seed for replicate/run `stream` of a base
// seed. Mixing uses the SplitMix64 finalizer so neighbouring streams are
// uncorrelated.
std::uint64_t mixSeed(std::uint64_t base, std::uint64_t stream);

// Fisher-Yates shuffle under the given generator.
template <typename T>
void shuffleInPlace(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.nextBounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace eor
