#pragma once

// Election pipeline: reference statistics over non-suspect constituencies,
// indicator normalization, per-constituency ratio of normalized turnout to
// normalized against-all share, rejection sweep of arctan-regression
// estimates, and interval probabilities for the location parameter.
//
// Under the null model both normalized indicators are independent N(0,1),
// so their ratio is Cauchy(0,1). Estimates far from (0,1) point at
// manipulation of one or both indicators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cauchy_forensics/arctan_estimator.hpp"
#include "cauchy_forensics/cauchy.hpp"
#include "cauchy_forensics/errors.hpp"

namespace cauchy_forensics {

struct ConstituencyRecord {
  std::string region;
  std::string constituency_id;
  std::int64_t registered_voters = 0;
  std::int64_t ballots_cast = 0;
  std::int64_t votes_against_all = 0;
  std::int64_t invalid_ballots = 0;
  // Insertion-ordered so CSV round trips keep column order.
  std::vector<std::pair<std::string, std::int64_t>> candidate_votes;

  friend bool operator==(const ConstituencyRecord&, const ConstituencyRecord&) = default;
};

/// Throws DataError when the record breaks a structural invariant. Turnout
/// above 100% is legal (and flagged elsewhere): falsified returns contain it.
inline void validate_record(const ConstituencyRecord& r) {
  const std::string who = "constituency '" + r.constituency_id + "': ";
  if (r.registered_voters <= 0) {
    throw DataError(who + "registered_voters must be > 0");
  }
  if (r.ballots_cast < 0 || r.votes_against_all < 0 || r.invalid_ballots < 0) {
    throw DataError(who + "counts must be non-negative");
  }
  if (r.ballots_cast < r.votes_against_all + r.invalid_ballots) {
    throw DataError(who + "ballots_cast < votes_against_all + invalid_ballots");
  }
  for (const auto& [label, votes] : r.candidate_votes) {
    if (votes < 0) {
      throw DataError(who + "negative vote count for '" + label + "'");
    }
  }
}

inline bool turnout_exceeds_registered(const ConstituencyRecord& r) {
  return r.ballots_cast > r.registered_voters;
}

enum class VarianceDivisor { SampleNMinus1, PopulationN };
enum class AgainstAllBasis { BallotsCast, RegisteredVoters };

struct PipelineOptions {
  VarianceDivisor variance_divisor = VarianceDivisor::SampleNMinus1;
  AgainstAllBasis against_all_basis = AgainstAllBasis::BallotsCast;
  // |z| of the against-all indicator below which a ratio is excluded.
  double degenerate_z = 1e-9;
};

inline double turnout_pct(const ConstituencyRecord& r) {
  return 100.0 * static_cast<double>(r.ballots_cast) / static_cast<double>(r.registered_voters);
}

inline double against_all_pct(const ConstituencyRecord& r, AgainstAllBasis basis = AgainstAllBasis::BallotsCast) {
  const auto denom = basis == AgainstAllBasis::BallotsCast ? r.ballots_cast : r.registered_voters;
  if (denom == 0) {
    return 0.0;
  }
  return 100.0 * static_cast<double>(r.votes_against_all) / static_cast<double>(denom);
}

struct IndicatorStats {
  double mean = 0.0;
  double variance = 0.0;  // percent^2
  double sigma = 0.0;

  friend bool operator==(const IndicatorStats&, const IndicatorStats&) = default;
};

struct ReferenceStats {
  IndicatorStats turnout;
  IndicatorStats against_all;
  std::vector<std::string> excluded_regions;
  std::size_t n_used = 0;
  PipelineOptions options;
};

namespace detail {

inline bool contains(std::span<const std::string> labels, const std::string& label) {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

inline IndicatorStats describe(std::span<const double> xs, VarianceDivisor divisor) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= n;
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  const double variance = ss / (divisor == VarianceDivisor::SampleNMinus1 ? n - 1.0 : n);
  return {mean, variance, std::sqrt(variance)};
}

} // namespace detail

/// Unweighted per-constituency mean/variance of both indicators over every
/// record whose region is not excluded.
inline ReferenceStats compute_reference_stats(std::span<const ConstituencyRecord> records,
                                              std::span<const std::string> excluded_regions,
                                              const PipelineOptions& options = {}) {
  std::vector<double> turnout;
  std::vector<double> against;
  for (const auto& r : records) {
    if (detail::contains(excluded_regions, r.region)) {
      continue;
    }
    turnout.push_back(turnout_pct(r));
    against.push_back(against_all_pct(r, options.against_all_basis));
  }
  if (turnout.size() < 2) {
    throw DataError("reference statistics need at least 2 included records, got " +
                    std::to_string(turnout.size()));
  }
  ReferenceStats stats;
  stats.turnout = detail::describe(turnout, options.variance_divisor);
  stats.against_all = detail::describe(against, options.variance_divisor);
  stats.excluded_regions.assign(excluded_regions.begin(), excluded_regions.end());
  stats.n_used = turnout.size();
  stats.options = options;
  return stats;
}

inline double normalize_indicator(double value, const IndicatorStats& stats) {
  if (!(stats.sigma > 0.0)) {
    throw DataError("degenerate reference: sigma is zero");
  }
  return (value - stats.mean) / stats.sigma;
}

struct RatioEntry {
  std::string region;
  std::string constituency_id;
  double z_turnout = 0.0;
  double z_against_all = 0.0;
  double ratio = 0.0;
};

struct RatioSeries {
  std::vector<RatioEntry> entries;  // input order, degenerate denominators removed
  std::vector<std::string> flags;
};

inline RatioSeries ratio_series(std::span<const ConstituencyRecord> records, const ReferenceStats& stats) {
  if (records.empty()) {
    throw DataError("ratio series needs at least one record");
  }
  RatioSeries out;
  for (const auto& r : records) {
    const double zt = normalize_indicator(turnout_pct(r), stats.turnout);
    const double za = normalize_indicator(against_all_pct(r, stats.options.against_all_basis), stats.against_all);
    if (std::abs(za) < stats.options.degenerate_z) {
      out.flags.push_back("degenerate denominator: " + r.constituency_id + " excluded from ratio sample");
      continue;
    }
    out.entries.push_back({r.region, r.constituency_id, zt, za, zt / za});
  }
  if (out.entries.empty()) {
    throw DataError("every ratio denominator is degenerate (" + std::to_string(records.size()) + " records)");
  }
  return out;
}

struct IntervalProbability {
  double lo = 0.0;
  double hi = 0.0;
  double scale = 1.0;
  double probability = 0.0;
};

struct AnalysisRequest {
  std::vector<std::string> suspect_regions;
  // Extra regions kept out of the reference population besides the suspects.
  std::vector<std::string> excluded_regions;
  std::vector<std::size_t> rejection_levels{1, 3, 7, 9};
  std::vector<std::pair<double, double>> intervals{{-0.1, 0.1}};
  std::vector<double> scales{1.0};
  PipelineOptions options;
};

struct AnalysisReport {
  ReferenceStats reference;
  std::vector<std::string> suspect_regions;
  std::vector<RatioEntry> ratios;
  std::vector<double> sorted_ratios;
  std::vector<EstimateRow> sweep;
  double sample_mean = 0.0;  // over the untrimmed ratio sample
  std::vector<IntervalProbability> probabilities;
  std::vector<std::string> flags;
};

inline std::vector<std::string> known_regions(std::span<const ConstituencyRecord> records) {
  std::vector<std::string> regions;
  for (const auto& r : records) {
    if (!detail::contains(regions, r.region)) {
      regions.push_back(r.region);
    }
  }
  return regions;
}

inline double sample_mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) {
    s += x;
  }
  return s / static_cast<double>(xs.size());
}

inline AnalysisReport analyze(std::span<const ConstituencyRecord> records, const AnalysisRequest& request) {
  if (request.suspect_regions.empty()) {
    throw DataError("no suspect regions given");
  }
  for (const auto& [lo, hi] : request.intervals) {
    if (!(lo < hi)) {
      throw DomainError("probability interval requires lo < hi");
    }
  }
  for (double g : request.scales) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw DomainError("probability scale must be finite and > 0");
    }
  }
  const auto regions = known_regions(records);
  auto check_known = [&](const std::string& label) {
    if (!detail::contains(regions, label)) {
      std::string known;
      for (const auto& k : regions) {
        known += (known.empty() ? "" : ", ") + k;
      }
      throw DataError("unknown region '" + label + "'; known regions: " + known);
    }
  };
  for (const auto& s : request.suspect_regions) {
    check_known(s);
  }
  for (const auto& e : request.excluded_regions) {
    check_known(e);
  }

  AnalysisReport report;
  report.suspect_regions = request.suspect_regions;

  std::vector<std::string> reference_exclusions = request.suspect_regions;
  for (const auto& e : request.excluded_regions) {
    if (!detail::contains(reference_exclusions, e)) {
      reference_exclusions.push_back(e);
    }
  }

  std::vector<ConstituencyRecord> suspects;
  for (const auto& r : records) {
    if (turnout_exceeds_registered(r)) {
      report.flags.push_back("turnout>100%: " + r.constituency_id);
    }
    if (detail::contains(request.suspect_regions, r.region)) {
      suspects.push_back(r);
    }
  }

  try {
    report.reference = compute_reference_stats(records, reference_exclusions, request.options);
  } catch (const Error&) {
    detail::rethrow_with_prefix("reference statistics: ");
  }

  RatioSeries series;
  try {
    series = ratio_series(suspects, report.reference);
  } catch (const Error&) {
    detail::rethrow_with_prefix("ratio series: ");
  }
  report.flags.insert(report.flags.end(), series.flags.begin(), series.flags.end());
  report.ratios = std::move(series.entries);

  report.sorted_ratios.reserve(report.ratios.size());
  for (const auto& e : report.ratios) {
    report.sorted_ratios.push_back(e.ratio);
  }
  report.sample_mean = sample_mean(report.sorted_ratios);
  std::sort(report.sorted_ratios.begin(), report.sorted_ratios.end());

  try {
    report.sweep = rejection_sweep(report.sorted_ratios, request.rejection_levels);
  } catch (const Error&) {
    detail::rethrow_with_prefix("estimation: ");
  }

  for (const auto& [lo, hi] : request.intervals) {
    for (double g : request.scales) {
      report.probabilities.push_back({lo, hi, g, location_interval_prob(lo, hi, report.sample_mean, g)});
    }
  }
  return report;
}

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;  // +inf for the overflow bin
  std::size_t count = 0;
  bool overflow = false;
};

/// Turnout histogram. Regular bins are [k*w, (k+1)*w) starting from 0%, with
/// turnout of exactly 100% kept in the last regular bin. Records whose
/// ballots exceed registered voters land in a trailing [100, inf) bin. The
/// regular range is dense between the lowest and highest occupied bins; the
/// overflow bin is always present for a non-empty input.
inline std::vector<HistogramBin> turnout_histogram(std::span<const ConstituencyRecord> records, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw DomainError("bin width must be finite and > 0");
  }
  std::vector<HistogramBin> bins;
  if (records.empty()) {
    return bins;
  }
  const auto last_regular = static_cast<std::int64_t>(std::ceil(100.0 / bin_width)) - 1;
  std::vector<std::int64_t> indices;
  std::size_t overflow = 0;
  for (const auto& r : records) {
    if (turnout_exceeds_registered(r)) {
      ++overflow;
      continue;
    }
    // Nudge so exact multiples of the width are not lost to rounding.
    const auto idx = static_cast<std::int64_t>(std::floor(turnout_pct(r) / bin_width + 1e-9));
    indices.push_back(std::min(idx, last_regular));
  }
  if (!indices.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(indices.begin(), indices.end());
    const std::int64_t first = *lo_it;
    for (std::int64_t k = first; k <= *hi_it; ++k) {
      bins.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width, 0, false});
    }
    for (auto idx : indices) {
      ++bins[static_cast<std::size_t>(idx - first)].count;
    }
  }
  bins.push_back({100.0, std::numeric_limits<double>::infinity(), overflow, true});
  return bins;
}

} // namespace cauchy_forensics
