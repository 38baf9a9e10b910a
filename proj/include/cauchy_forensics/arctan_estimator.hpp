#pragma once

// Arctangent regression for Cauchy (location, scale).
//
// Inverting the Cauchy CDF gives x = alpha + gamma * tan(pi * (F(x) - 1/2)),
// a straight line in t = tan(pi * (u - 1/2)). Assigning the i-th order
// statistic the plotting position u_i = i / (n + 1) and regressing the sorted
// values on t_i by ordinary least squares yields alpha-hat (intercept) and
// gamma-hat (slope). Positions near 0 and 1 explode under the tangent, so the
// extreme order statistics are rejected first; the survivors keep the
// positions they had in the untrimmed sample.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cauchy_forensics/cauchy.hpp"
#include "cauchy_forensics/errors.hpp"

namespace cauchy_forensics {

/// Fewest order statistics a fit will accept after rejection.
inline constexpr std::size_t kMinRetained = 4;

/// Sorted sample after extreme-value rejection.
struct RatioSample {
  std::vector<double> values;  // ascending, survivors only
  std::size_t rejected_low = 0;
  std::size_t rejected_high = 0;

  std::size_t n() const { return values.size(); }
  std::size_t original_size() const { return values.size() + rejected_low + rejected_high; }
};

struct EstimateRow {
  std::size_t rejected_total = 0;
  std::size_t rejected_low = 0;
  std::size_t rejected_high = 0;
  double location_hat = 0.0;
  double scale_hat = 0.0;

  friend bool operator==(const EstimateRow&, const EstimateRow&) = default;
};

inline std::vector<double> plotting_positions(std::size_t n) {
  if (n == 0) {
    throw DomainError("plotting positions need n >= 1");
  }
  std::vector<double> u(n);
  const double denom = static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = static_cast<double>(i + 1) / denom;
  }
  return u;
}

inline std::vector<double> tangent_transform(std::span<const double> u) {
  std::vector<double> t;
  t.reserve(u.size());
  for (double ui : u) {
    if (!(ui > 0.0 && ui < 1.0)) {
      throw DomainError("tangent transform requires positions strictly inside (0,1)");
    }
    t.push_back(std::tan(std::numbers::pi * (ui - 0.5)));
  }
  return t;
}

/// Drops `total_to_reject` extreme order statistics: ceil(k/2) from the top,
/// floor(k/2) from the bottom. Inflated turnout pushes ratios to the high
/// side, so an odd count removes the largest value first.
inline RatioSample reject_extremes(std::span<const double> sorted_values, std::size_t total_to_reject) {
  const std::size_t len = sorted_values.size();
  if (total_to_reject >= len || len - total_to_reject < kMinRetained) {
    throw DomainError("rejecting " + std::to_string(total_to_reject) + " of " + std::to_string(len) +
                      " values leaves fewer than " + std::to_string(kMinRetained));
  }
  if (!std::is_sorted(sorted_values.begin(), sorted_values.end())) {
    throw DomainError("reject_extremes expects ascending values");
  }
  RatioSample s;
  s.rejected_high = (total_to_reject + 1) / 2;
  s.rejected_low = total_to_reject / 2;
  s.values.assign(sorted_values.begin() + static_cast<std::ptrdiff_t>(s.rejected_low),
                  sorted_values.end() - static_cast<std::ptrdiff_t>(s.rejected_high));
  return s;
}

namespace detail {

struct LineFit {
  double intercept;
  double slope;
  double rss;
};

// OLS of y on x with centred sums.
inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double x_bar = 0.0;
  double y_bar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x_bar += x[i];
    y_bar += y[i];
  }
  x_bar /= n;
  y_bar /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - x_bar;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_bar);
  }
  if (!(sxx > 0.0)) {
    throw EstimationError("degenerate design: all tangent positions identical");
  }
  const double slope = sxy / sxx;
  const double intercept = y_bar - slope * x_bar;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    rss += r * r;
  }
  return {intercept, slope, rss};
}

// Tangent positions of the survivors, ranked within the untrimmed sample.
inline std::vector<double> surviving_tangents(const RatioSample& s) {
  const auto all = plotting_positions(s.original_size());
  const auto first = all.begin() + static_cast<std::ptrdiff_t>(s.rejected_low);
  const std::vector<double> kept(first, first + static_cast<std::ptrdiff_t>(s.n()));
  return tangent_transform(kept);
}

} // namespace detail

/// Residual sum of squares of the fitted line; exact-model samples give ~0.
inline double arctan_residual_ss(const RatioSample& s, const CauchyParams& p) {
  const auto t = detail::surviving_tangents(s);
  double rss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = s.values[i] - (p.location() + p.scale() * t[i]);
    rss += r * r;
  }
  return rss;
}

inline CauchyParams fit_arctan_regression(const RatioSample& s) {
  if (s.n() < kMinRetained) {
    throw DomainError("arctan regression needs at least " + std::to_string(kMinRetained) + " values");
  }
  if (!std::is_sorted(s.values.begin(), s.values.end())) {
    throw DomainError("arctan regression expects ascending values");
  }
  const auto t = detail::surviving_tangents(s);
  const auto line = detail::least_squares(t, s.values);
  if (!(line.slope > 0.0)) {
    throw EstimationError("non-positive scale estimate " + std::to_string(line.slope) +
                          " (data grossly non-Cauchy or over-trimmed)");
  }
  return {line.intercept, line.slope};
}

/// One fit per rejection level, in input order.
inline std::vector<EstimateRow> rejection_sweep(std::span<const double> sorted_values,
                                                std::span<const std::size_t> rejection_levels) {
  std::vector<EstimateRow> rows;
  rows.reserve(rejection_levels.size());
  for (std::size_t level : rejection_levels) {
    try {
      const auto s = reject_extremes(sorted_values, level);
      const auto p = fit_arctan_regression(s);
      rows.push_back({level, s.rejected_low, s.rejected_high, p.location(), p.scale()});
    } catch (const Error&) {
      detail::rethrow_with_prefix("rejection level " + std::to_string(level) + ": ");
    }
  }
  return rows;
}

namespace detail {

// Hyndman-Fan type 6: h = (n + 1) p, linear between neighbouring order
// statistics, clamped to the sample range. Matches the i/(n+1) positions.
inline double weibull_quantile(std::span<const double> sorted, double p) {
  const auto n = sorted.size();
  double h = static_cast<double>(n + 1) * p;
  h = std::clamp(h, 1.0, static_cast<double>(n));
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo >= n) {
    return sorted[n - 1];
  }
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

} // namespace detail

/// Median and half-interquartile range. Independent of the regression path;
/// used to cross-check it.
inline CauchyParams quantile_oracle(std::span<const double> sorted_values) {
  if (sorted_values.size() < kMinRetained) {
    throw DomainError("quantile oracle needs at least " + std::to_string(kMinRetained) + " values");
  }
  if (!std::is_sorted(sorted_values.begin(), sorted_values.end())) {
    throw DomainError("quantile oracle expects ascending values");
  }
  const double median = detail::weibull_quantile(sorted_values, 0.5);
  const double q1 = detail::weibull_quantile(sorted_values, 0.25);
  const double q3 = detail::weibull_quantile(sorted_values, 0.75);
  const double half_iqr = 0.5 * (q3 - q1);
  if (!(half_iqr > 0.0)) {
    throw EstimationError("quantile oracle: zero interquartile range");
  }
  return {median, half_iqr};
}

} // namespace cauchy_forensics
