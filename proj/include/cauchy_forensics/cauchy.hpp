#pragma once

// Cauchy law with location alpha and scale gamma:
//   f(x) = gamma / (pi * ((x - alpha)^2 + gamma^2))
//   F(x) = 1/2 + atan((x - alpha) / gamma) / pi
// Mean and variance do not exist; the mean of n iid draws is again
// Cauchy(alpha, gamma), which is what location_interval_prob relies on.

#include <cmath>
#include <numbers>
#include <string>

#include "cauchy_forensics/errors.hpp"

namespace cauchy_forensics {

class CauchyParams {
public:
  CauchyParams(double location, double scale) : location_(location), scale_(scale) {
    if (!std::isfinite(location) || !std::isfinite(scale)) {
      throw DomainError("Cauchy parameters must be finite");
    }
    if (!(scale > 0.0)) {
      throw DomainError("Cauchy scale must be > 0, got " + std::to_string(scale));
    }
  }

  static CauchyParams standard() { return {0.0, 1.0}; }

  double location() const { return location_; }
  double scale() const { return scale_; }

  friend bool operator==(const CauchyParams&, const CauchyParams&) = default;

private:
  double location_;
  double scale_;
};

inline double pdf(double x, const CauchyParams& p) {
  const double d = x - p.location();
  const double g = p.scale();
  return std::numbers::inv_pi * g / (d * d + g * g);
}

inline double cdf(double x, const CauchyParams& p) {
  return 0.5 + std::numbers::inv_pi * std::atan((x - p.location()) / p.scale());
}

inline double quantile(double u, const CauchyParams& p) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("Cauchy quantile requires 0 < u < 1, got " + std::to_string(u));
  }
  return p.location() + p.scale() * std::tan(std::numbers::pi * (u - 0.5));
}

/// P{alpha in [lo, hi]} when the observed sample mean is treated as a single
/// Cauchy(alpha, scale) draw and inverted: the mass that Cauchy(sample_mean,
/// scale) puts on [lo, hi].
inline double location_interval_prob(double lo, double hi, double sample_mean, double scale) {
  if (!(lo < hi)) {
    throw DomainError("interval requires lo < hi");
  }
  if (!std::isfinite(sample_mean)) {
    throw DomainError("sample mean must be finite");
  }
  const CauchyParams centred(sample_mean, scale);
  return cdf(hi, centred) - cdf(lo, centred);
}

} // namespace cauchy_forensics
