#pragma once

#include <cmath>
#include <cstdint>

namespace s2k {

// Deterministic random generator used everywhere the library needs
// randomness. splitmix64 core with explicit uniform / normal transforms,
// so streams are bit-identical across platforms and standard-library
// versions (std::normal_distribution makes no such promise).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo bias is negligible for the small n
  // used here (n << 2^32).
  int uniform_int(int n) { return int(next_u64() % std::uint64_t(n)); }

  // Standard normal via Box-Muller; caches the second member of the pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derives an independent stream, e.g. one per dataset sample, so work
  // can be distributed without changing the drawn values.
  Rng fork(std::uint64_t stream) const {
    Rng inner(state_ ^ (0x632be59bd9b4e019ull * (stream + 1)));
    inner.next_u64();
    return inner;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace s2k
