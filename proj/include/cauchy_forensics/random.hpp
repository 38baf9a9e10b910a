#pragma once

// Seeded generator with fully specified output. std::mt19937_64 itself is
// bit-exact across standard libraries; the distribution adaptors in <random>
// are not, so uniform and normal draws are derived here.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cauchy_forensics {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
      return static_cast<std::int64_t>(engine_());
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
    std::uint64_t draw = engine_();
    while (draw >= limit) {
      draw = engine_();
    }
    return lo + static_cast<std::int64_t>(draw % span);
  }

  /// Box-Muller; both variates of a pair are used.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Cauchy(0,1) as the ratio of two independent standard normals.
  double normal_ratio() {
    const double num = normal();
    double den = normal();
    while (den == 0.0) {
      den = normal();
    }
    return num / den;
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace cauchy_forensics
