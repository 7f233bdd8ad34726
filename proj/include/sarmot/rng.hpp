#pragma once

#include <cstdint>
#include <string_view>

namespace sarmot {

/// xoshiro256** seeded through splitmix64. Portable: the same seed gives the
/// same stream on every platform, including the derived distributions below
/// (std:: distributions are implementation-defined, so they are not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for one entity, e.g. derive("target", 3).
  Rng derive(std::string_view tag, std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller (no cached second value).
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  /// Knuth multiplication method; intended for small means.
  int poisson(double mean);

 private:
  Rng() = default;
  std::uint64_t seed_ = 0;
  std::uint64_t s_[4] = {};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace sarmot
