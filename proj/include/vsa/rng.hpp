#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace vsa {

/// SplitMix64 finalizer; used only to derive well-separated child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the `stream`-th child of `seed`. Pure function, so a trial's
/// randomness depends only on (seed, trial index) and never on scheduling.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632BE59BD9B4E019ULL));
}

/// Seedable, splittable generator. Wraps mt19937_64 so it can be handed to
/// <random> and <algorithm> facilities directly.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent generator for sub-stream `stream`; does not advance *this.
  Rng child(std::uint64_t stream) const { return Rng(child_seed(seed_, stream)); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  int sign() { return (engine_() >> 63) ? 1 : -1; }

  std::complex<double> phasor() {
    return std::polar(1.0, 2.0 * std::numbers::pi * uniform());
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace vsa
