// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mmhp {

/// SplitMix64 output mix; used both as a standalone mixer and to derive
/// per-trial seeds from (master seed, trial index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mixSeed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

/// Deterministic random stream with explicit inverse-CDF transforms so the
/// draw sequence depends only on the engine, not on library internals.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (one value per pair of uniforms;
  /// the spare is kept for the next call).
  double normal() {
    if (haveSpare_) {
      haveSpare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) {
      u1 = uniform01();
    }
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    haveSpare_ = true;
    return r * std::cos(theta);
  }

  /// Zero-mean Laplacian with the given standard deviation.
  double laplace(double stddev) {
    const double scale = stddev / std::sqrt(2.0);
    double u = uniform01() - 0.5;
    while (u == -0.5) { // log1p(-1) below would diverge
      u = uniform01() - 0.5;
    }
    return -scale * (u < 0.0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
  }

  /// Circularly-symmetric complex Gaussian, unit variance.
  std::complex<double> complexGaussian() {
    const double re = normal();
    const double im = normal();
    return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool haveSpare_ = false;
};

} // namespace mmhp
