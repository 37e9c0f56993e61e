#include "eor/rng.hpp"

#include <cmath>

#include "eor/errors.hpp"

namespace eor {

namespace {

std::uint64_t finalizeMix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mixSeed(std::uint64_t base, std::uint64_t stream) {
    return finalizeMix(base + (stream + 1) * 0x9E3779B97F4A7C15ull);
}

double Rng::nextGaussian() {
    double u1 = 1.0 - nextUnit();  // (0,1], keeps log finite
    double u2 = nextUnit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::nextGamma(double shape) {
    if (!(shape > 0.0)) throw BadParams("gamma shape must be positive");
    if (shape < 1.0) {
        // Boost: Gamma(a) = Gamma(a+1) * U^(1/a)
        double u = 1.0 - nextUnit();
        return nextGamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia & Tsang (2000)
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = nextGaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = 1.0 - nextUnit();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::nextBeta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw BadParams("beta shapes must be positive");
    double x = nextGamma(alpha);
    double y = nextGamma(beta);
    double s = x + y;
    if (s <= 0.0) return 0.5;  // both gammas underflowed; shapes ~ 0
    return x / s;
}

}  // namespace eor
