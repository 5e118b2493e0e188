#pragma once

// Counter-based random generator: every consumer derives an explicit
// substream from (seed, stream index), so sampling order never affects
// results and parallel workers cannot collide.

#include <cstdint>
#include <cmath>

namespace hypercc {

namespace detail {
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(detail::mix64(seed ^ 0x9E3779B97F4A7C15ull)) {}

  static Rng substream(uint64_t seed, uint64_t stream) {
    Rng r(seed);
    r.state_ = detail::mix64(r.state_ + 0x9E3779B97F4A7C15ull * (stream + 1));
    return r;
  }
  static Rng substream(uint64_t seed, uint64_t hi, uint64_t lo) {
    Rng r(seed);
    r.state_ = detail::mix64(r.state_ + 0x9E3779B97F4A7C15ull * (hi + 1));
    r.state_ = detail::mix64(r.state_ + 0xD1B54A32D192ED03ull * (lo + 1));
    return r;
  }

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return detail::mix64(state_);
  }

  // uniform in (0, 1]; never 0, safe under log().
  double uniform01() {
    return (double((next_u64() >> 11)) + 1.0) * (1.0 / 9007199254740992.0);
  }

  bool bernoulli(double p) { return uniform01() <= p; }

  int rademacher() { return (next_u64() & 1) ? 1 : -1; }

  // Box-Muller; one spare cached per stream.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hypercc
