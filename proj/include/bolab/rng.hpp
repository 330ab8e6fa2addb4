#pragma once

#include <cstdint>
#include <utility>

namespace bolab {

/// Counter-based Gaussian generator: the pair at (stream, index) is a pure
/// function of (seed, stream, index), so parallel generation is deterministic
/// and order-independent.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  /// Two independent standard normals (Box-Muller on counter-mixed uniforms).
  std::pair<double, double> normal_pair(uint64_t stream, uint64_t index) const;

  /// Uniform in [0, 1).
  double uniform(uint64_t stream, uint64_t index) const;

 private:
  uint64_t seed_;
};

}  // namespace bolab
