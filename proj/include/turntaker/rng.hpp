#pragma once

#include <cmath>
#include <cstdint>

namespace turntaker {

/// Counter-based random stream (splitmix64). A stream is keyed by
/// (master seed, stream index), so ensembles can hand replication r the
/// stream (seed, r) and get the same draws no matter which thread runs it
/// or in which order.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream)
      : state_(mix(mix(master_seed) ^ (stream + kGamma))) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Consumes two uniforms per call.
  double next_normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace turntaker
