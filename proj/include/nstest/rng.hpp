#pragma once

#include <cstdint>

#include "nstest/gaussian.hpp"

namespace nstest {

// Splittable random stream: a SplitMix64 walk whose start state is a
// nonlinear hash of (seed, stream). Distinct stream indices give
// statistically independent sequences, so an m-sample run keyed by
// (seed, base + i) replays identically no matter how samples are sharded
// across workers.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(mix(seed ^ 0x9e3779b97f4a7c15ull) ^
               mix(stream * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull)) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on the open interval (0,1); endpoints are never produced, so the
  // inverse-CDF transform below is total.
  double next_uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via inverse CDF: keeps the draw-index -> sample map
  // deterministic (no rejection).
  double next_normal() { return std_normal_quantile(next_uniform()); }

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent sub-seed (one per trial, per shard, ...) from a
// master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return RandomStream::mix(seed + 0xd1b54a32d192ed03ull * (index + 1));
}

}  // namespace nstest
