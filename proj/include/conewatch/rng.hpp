#pragma once

#include <cmath>
#include <cstdint>

#include "conewatch/common.hpp"

namespace conewatch {

/// SplitMix64 generator (Steele/Lea/Flood). All randomness in the library flows
/// through this so that results are reproducible across platforms and thread
/// counts; std::random distributions are implementation-defined and never used.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53 random mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0,1); rejects exact zeros so log() and radius scaling stay finite.
  double next_open01() {
    double u;
    do {
      u = next_double();
    } while (u == 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Standard normal via Box-Muller on our own uniforms (deterministic everywhere).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_open01();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  VectorXd gaussian_vector(int n) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  VectorXd unit_vector(int n) {
    VectorXd v;
    double nrm = 0.0;
    do {
      v = gaussian_vector(n);
      nrm = v.norm();
    } while (nrm < 1e-300);
    return v / nrm;
  }

  VectorXd uniform_in_box(const Box& box) {
    VectorXd x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i], box.hi[i]);
    return x;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Per-item seed for splittable parallel work: the index-th output of a
/// SplitMix64 stream seeded with master. Item k can be recomputed in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace conewatch
