#pragma once

#include <cmath>
#include <cstdint>

namespace tssa {

// Deterministic 64-bit generator (splitmix64).  Used instead of <random>
// engines/distributions so that seeded runs produce identical streams on
// every platform and sweep output stays byte-stable across worker counts.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Uniform on the open interval (lo, hi).
  double uniform_open(double lo, double hi) {
    double u = uniform01();
    while (u == 0.0) u = uniform01();
    return lo + (hi - lo) * u;
  }

  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Independent stream for sample `index` of a seeded run.  Workers can pick
// up any index in any order and still reproduce the serial output.
inline SplitMix64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mixer(seed ^ (0xd1342543de82ef95ull * (index + 1)));
  mixer.next();
  return SplitMix64(mixer.next());
}

}  // namespace tssa
