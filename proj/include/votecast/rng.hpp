#pragma once

#include <cstdint>
#include <cmath>

namespace votecast {

/// Small, portable, splittable generator (splitmix64 core). Same seed gives
/// the same stream on every platform, which the determinism contracts rely on.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Derive an independent stream for a sub-task (e.g. one tree).
  static Rng split(std::uint64_t seed, std::uint64_t stream) {
    Rng mixer(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    return Rng(mixer.next());
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace votecast
