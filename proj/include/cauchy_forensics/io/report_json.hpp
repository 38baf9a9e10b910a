#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "cauchy_forensics/election.hpp"
#include "cauchy_forensics/simulator.hpp"

namespace cauchy_forensics::io {

/// Reals in reports carry 6 decimals.
inline double round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

inline std::string to_string(VarianceDivisor d) {
  return d == VarianceDivisor::SampleNMinus1 ? "n-1" : "n";
}

inline std::string to_string(AgainstAllBasis b) {
  return b == AgainstAllBasis::BallotsCast ? "ballots_cast" : "registered_voters";
}

inline nlohmann::ordered_json indicator_json(const IndicatorStats& s) {
  return {{"mean", round6(s.mean)}, {"variance", round6(s.variance)}, {"sigma", round6(s.sigma)}};
}

/// Top-level keys: reference, ratios, sweep, sample_mean, probabilities, flags.
inline nlohmann::ordered_json report_to_json(const AnalysisReport& report) {
  using nlohmann::ordered_json;
  ordered_json reference{
      {"turnout_pct", indicator_json(report.reference.turnout)},
      {"against_all_pct", indicator_json(report.reference.against_all)},
      {"excluded_regions", report.reference.excluded_regions},
      {"n_used", report.reference.n_used},
      {"variance_divisor", to_string(report.reference.options.variance_divisor)},
      {"against_all_basis", to_string(report.reference.options.against_all_basis)},
  };

  ordered_json entries = ordered_json::array();
  for (const auto& e : report.ratios) {
    entries.push_back({{"region", e.region},
                       {"constituency_id", e.constituency_id},
                       {"z_turnout", round6(e.z_turnout)},
                       {"z_against_all", round6(e.z_against_all)},
                       {"ratio", round6(e.ratio)}});
  }
  ordered_json sorted = ordered_json::array();
  for (double x : report.sorted_ratios) {
    sorted.push_back(round6(x));
  }
  ordered_json ratios{{"suspect_regions", report.suspect_regions},
                      {"n", report.ratios.size()},
                      {"entries", entries},
                      {"sorted", sorted}};

  ordered_json sweep = ordered_json::array();
  for (const auto& row : report.sweep) {
    sweep.push_back({{"rejected_total", row.rejected_total},
                     {"rejected_low", row.rejected_low},
                     {"rejected_high", row.rejected_high},
                     {"n_retained", report.sorted_ratios.size() - row.rejected_total},
                     {"location", round6(row.location_hat)},
                     {"scale", round6(row.scale_hat)}});
  }

  ordered_json probs = ordered_json::array();
  for (const auto& p : report.probabilities) {
    probs.push_back({{"interval", {round6(p.lo), round6(p.hi)}},
                     {"scale", round6(p.scale)},
                     {"probability", round6(p.probability)}});
  }

  return {{"reference", reference},
          {"ratios", ratios},
          {"sweep", sweep},
          {"sample_mean", round6(report.sample_mean)},
          {"probabilities", probs},
          {"flags", report.flags}};
}

inline nlohmann::ordered_json power_study_to_json(const std::vector<PowerRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"magnitude", round6(r.magnitude)},
                   {"mean_location", round6(r.mean_location)},
                   {"mean_scale", round6(r.mean_scale)},
                   {"detection_rate", round6(r.detection_rate)},
                   {"n_seeds", r.n_seeds}});
  }
  return arr;
}

} // namespace cauchy_forensics::io
