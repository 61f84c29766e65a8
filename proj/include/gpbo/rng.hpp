#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gpbo {

/// Deterministic random stream identified by (seed, stream).
///
/// Every random decision in the library flows through one of these. Streams
/// are derived rather than shared so that results do not depend on the order
/// in which independent components consume randomness.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
  }

  /// Child stream; does not advance this one.
  Rng derive(std::uint64_t tag) const { return Rng(seed_ ^ (tag * 0x9e3779b97f4a7c15ULL), stream_ + tag + 1); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

  double laplace(double scale) {
    // Inverse CDF on u in (-1/2, 1/2).
    double u = uniform() - 0.5;
    while (u == -0.5) u = uniform() - 0.5;
    return u < 0 ? scale * std::log1p(2.0 * u) : -scale * std::log1p(-2.0 * u);
  }

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace gpbo
