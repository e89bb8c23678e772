#pragma once

#include <cstdint>
#include <random>

namespace netobs::stats {

/// Seedable random source used everywhere traces must be reproducible.
///
/// The engine is std::mt19937_64; all distribution sampling is done by
/// our own transforms (inverse-CDF normal, Marsaglia-Tsang gamma) so that
/// identical seeds give identical draws regardless of standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal draw (inverse-CDF transform).
    double normal();

    double normal(double mean, double stddev);

    /// Log-normal with given log-space parameters.
    double lognormal(double mu, double sigma);

    /// Gamma(shape k > 0, scale theta > 0).
    double gamma(double shape, double scale);

    /// Derive an independent stream for sub-task i (for parallel suites).
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace netobs::stats
