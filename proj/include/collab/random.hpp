#pragma once

// Portable random variates. The engine is std::mt19937_64, whose output
// sequence the standard fixes; the std:: distributions are not portable, so
// the variates below are computed by hand from raw engine output.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace collab::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for an independent stream, e.g. one per academic.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller, one variate per call.
  double normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Marsaglia-Tsang; shapes below one use the boost u^(1/shape).
  double gamma(double shape) {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_open0(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open0();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Beta parameterized by mean and concentration (alpha + beta). Means at
  // or beyond the bounds return the bound.
  double beta_mean(double mean, double concentration) {
    if (mean <= 0.0) return 0.0;
    if (mean >= 1.0) return 1.0;
    const double x = gamma(mean * concentration);
    const double y = gamma((1.0 - mean) * concentration);
    return x + y > 0.0 ? x / (x + y) : mean;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace collab::rng
