#ifndef SUBSEL_RNG_HPP
#define SUBSEL_RNG_HPP

#include <cstdint>
#include <vector>

namespace subsel {

/// Seeded xoshiro256++ generator with deterministic substream derivation.
///
/// Every random quantity in the toolkit flows from a master seed through
/// named substreams (Rng::substream), so runs are reproducible and
/// replications can execute concurrently without sharing state.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Derives an independent child generator. The pair (a, b) names the
    /// stream; identical (seed, a, b) yields an identical child.
    Rng substream(std::uint64_t a, std::uint64_t b = 0) const;

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in {0, ..., n-1}; n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    bool bernoulli(double p);

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    /// Gamma(shape, scale=1) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape);

    /// Chi-squared with nu > 0 degrees of freedom.
    double chi_squared(double nu);

    /// In-place Fisher-Yates shuffle of indices 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::uint64_t state_[4];
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
    std::uint64_t seed_;
};

} // namespace subsel

#endif
