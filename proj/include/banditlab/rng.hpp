#pragma once

#include <cstdint>
#include <stdexcept>

namespace banditlab {

// Inverse of the standard normal CDF, evaluated with the Acklam rational
// approximation (|relative error| < 1.2e-9). Uses only +,-,*,/ and
// sqrt/log, so sequences are reproducible wherever those are correctly
// rounded. p must lie in (0,1).
double inverse_normal_cdf(double p);

// Counter-based splitmix64 stream. State advances by a fixed Weyl constant
// and each output is a bijective mix of the state, so streams never repeat
// within 2^64 draws and identical seeds give identical sequences across
// runs and platforms. Deliberately not std::mt19937 + std::normal_distribution:
// the standard leaves normal_distribution's draw order unspecified, which
// would break byte-identical replay.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : state_(seed), seed_(seed) {}

  // Child stream i is seeded with the i-th output of a splitmix64 sequence
  // seeded by master_seed: mix(master_seed + (i+1)*WEYL). Injective in i,
  // so distinct indices always get distinct, well-separated seeds.
  static RngStream derive(std::uint64_t master_seed, std::uint64_t index) {
    return RngStream(mix(master_seed + (index + 1) * kWeyl));
  }

  std::uint64_t next_u64() {
    state_ += kWeyl;
    return mix(state_);
  }

  // Uniform on the open interval (0,1): 53-bit mantissa, offset by half a
  // step so 0 and 1 are unreachable (inverse_normal_cdf needs that).
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0,n). Lemire multiply-shift; bias is O(n/2^64),
  // far below anything observable here (n is an arm count).
  std::uint32_t uniform_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // N(mu, sigma^2) via inverse-CDF transform: exactly one uniform draw per
  // sample. sigma == 0 short-circuits to mu and consumes no draw.
  double normal(double mu, double sigma) {
    if (sigma == 0.0) return mu;
    return mu + sigma * inverse_normal_cdf(uniform01());
  }

  double standard_normal() { return inverse_normal_cdf(uniform01()); }

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t seed_;
};

// Reward distribution of one arm. sigma == 0 means a point mass at mu.
struct NormalParams {
  double mu = 0.0;
  double sigma = 0.0;

  void validate() const;
};

// Draws one reward; validates params (non-finite mu/sigma or sigma < 0 throw).
double sample_normal(RngStream& rng, const NormalParams& params);

}  // namespace banditlab
