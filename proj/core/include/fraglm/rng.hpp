#pragma once

#include <cstdint>

namespace fraglm {

// Counter-based generator: the SplitMix64 output function applied to a keyed
// counter. Streams never overlap because every (seed, stream, purpose)
// triple hashes to its own key, which makes parallel and serial Monte Carlo
// runs produce identical draws.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t purpose) {
    std::uint64_t k = mix(seed + 0x9E3779B97F4A7C15ULL);
    k = mix(k + 0x9E3779B97F4A7C15ULL * (stream + 1));
    k = mix(k + 0x9E3779B97F4A7C15ULL * (purpose + 1));
    return k;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes two uniforms per value.
  double next_gaussian();

  // Uniform on [-sqrt(3), sqrt(3)] (unit variance).
  double next_uniform_sym3();

 private:
  std::uint64_t state_;
};

// Purpose tags for stream splitting inside the simulation harness.
enum class RngPurpose : std::uint64_t { scores = 1, model_noise = 2, obs_noise = 3, mask = 4 };

}  // namespace fraglm
