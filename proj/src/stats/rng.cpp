#include "netobs/stats/rng.hpp"

#include <cmath>

#include "netobs/stats/special.hpp"

namespace netobs::stats {

double Rng::uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    // Inverse CDF keeps draws identical across platforms; uniform() never
    // returns 0 or 1 after the shift below.
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    return normal_quantile(u);
}

double Rng::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

double Rng::lognormal(double mu, double sigma) {
    return std::exp(mu + sigma * normal());
}

double Rng::gamma(double shape, double scale) {
    // Marsaglia-Tsang squeeze; shape < 1 boosted via the power trick.
    if (shape < 1.0) {
        double u = uniform();
        if (u <= 0.0) u = 0x1.0p-53;
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        if (u <= 0.0) u = 0x1.0p-53;
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

std::uint64_t Rng::derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over (base, index); decorrelates consecutive
    // indices so parallel sub-runs have independent streams.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace netobs::stats
