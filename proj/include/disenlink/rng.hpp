#pragma once

#include <cstdint>
#include <vector>

namespace disenlink {

/// Deterministic 64-bit generator (splitmix64). Every random draw in the
/// library funnels through this type, so a run is reproducible from a single
/// seed independent of the platform's standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit();

  /// Uniform integer in [0, n). Requires n > 0.
  int64_t next_below(int64_t n);

  double next_uniform(double lo, double hi);

  /// Standard normal via Box-Muller.
  double next_normal();

  /// Fisher-Yates shuffle with this generator.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(static_cast<int64_t>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Derives an independent stream seed from (base, stream). Used to give
  /// each epoch / repetition / parameter its own reproducible stream.
  static uint64_t derive(uint64_t base, uint64_t stream);

 private:
  uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace disenlink
