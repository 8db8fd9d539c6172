#pragma once

#include <cstdint>
#include <random>

namespace persfit {

/// Splits a base seed into independent per-item streams (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Seeded generator with fully specified output: mt19937_64 plus local
/// uniform / Box-Muller transforms, so sequences are identical across
/// platforms and standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one spare kept per pair.
    double normal();
    double normal(double sigma) { return sigma * normal(); }

    /// Normal(0, sigma) restricted to [lo, hi] by rejection.
    double truncated_normal(double sigma, double lo, double hi);

    /// Uniform index in [0, n).
    std::int64_t index(std::int64_t n);

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace persfit
