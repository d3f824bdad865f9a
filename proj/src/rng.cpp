#include "disenlink/rng.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace disenlink {

namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

uint64_t splitmix(uint64_t& state) {
  uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed) : state_(seed) {
  // Warm up so nearby seeds diverge immediately.
  splitmix(state_);
}

uint64_t Rng::next_u64() { return splitmix(state_); }

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int64_t Rng::next_below(int64_t n) {
  assert(n > 0);
  const uint64_t un = static_cast<uint64_t>(n);
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % un;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<int64_t>(x % un);
}

double Rng::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

double Rng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = 1.0 - next_unit();  // (0, 1]
  double u2 = next_unit();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

uint64_t Rng::derive(uint64_t base, uint64_t stream) {
  uint64_t state = base ^ (stream * 0xd1342543de82ef95ull + kGolden);
  splitmix(state);
  return splitmix(state);
}

}  // namespace disenlink
