#pragma once

// Synthetic elections with known ground truth. Turnout and against-all shares
// are drawn from independent normals per constituency (the null model the
// detector assumes); suspect constituencies optionally receive injected fraud.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "cauchy_forensics/arctan_estimator.hpp"
#include "cauchy_forensics/cauchy.hpp"
#include "cauchy_forensics/election.hpp"
#include "cauchy_forensics/errors.hpp"
#include "cauchy_forensics/random.hpp"

namespace cauchy_forensics {

enum class FraudMode { None, Stuffing, TurnoutShift };

inline std::string to_string(FraudMode m) {
  switch (m) {
    case FraudMode::None: return "none";
    case FraudMode::Stuffing: return "stuffing";
    case FraudMode::TurnoutShift: return "turnout_shift";
  }
  return "none";
}

inline FraudMode parse_fraud_mode(const std::string& s) {
  if (s == "none") return FraudMode::None;
  if (s == "stuffing") return FraudMode::Stuffing;
  if (s == "turnout_shift") return FraudMode::TurnoutShift;
  throw ConfigError("unknown fraud_mode '" + s + "' (expected none, stuffing or turnout_shift)");
}

struct ScenarioConfig {
  std::size_t n_reference = 190;
  std::size_t n_suspect = 35;
  double turnout_mean = 74.502;
  double turnout_sigma = 6.810;
  double against_all_mean = 2.027;
  double against_all_sigma = 1.363;
  std::int64_t registered_min = 100000;
  std::int64_t registered_max = 200000;
  FraudMode fraud_mode = FraudMode::None;
  // Turnout sigmas for turnout_shift; fraction of registered voters for stuffing.
  double fraud_magnitude = 0.0;
  std::uint64_t seed = 1;
  std::string reference_region = "Reference";
  std::string suspect_region = "Suspect";

  // Detection harness.
  std::vector<std::size_t> rejection_levels{1, 3, 7, 9};
  double detection_lo = -0.1;
  double detection_hi = 0.1;
  double detection_threshold = 0.05;
};

inline void validate(const ScenarioConfig& c) {
  if (c.n_reference < 2) throw ConfigError("n_reference must be >= 2");
  if (c.n_suspect < 2) throw ConfigError("n_suspect must be >= 2");
  if (!(c.turnout_sigma > 0.0)) throw ConfigError("turnout_sigma must be > 0");
  if (!(c.against_all_sigma > 0.0)) throw ConfigError("against_all_sigma must be > 0");
  if (c.registered_min <= 0 || c.registered_max < c.registered_min) {
    throw ConfigError("registered voter range must satisfy 0 < registered_min <= registered_max");
  }
  if (!(c.fraud_magnitude >= 0.0)) throw ConfigError("fraud_magnitude must be >= 0");
  if (c.reference_region == c.suspect_region) {
    throw ConfigError("reference_region and suspect_region must differ");
  }
  if (!(c.detection_lo < c.detection_hi)) throw ConfigError("detection interval requires lo < hi");
  if (c.rejection_levels.empty()) throw ConfigError("rejection_levels must not be empty");
}

struct GeneratedCorpus {
  std::vector<ConstituencyRecord> records;
  std::vector<std::string> flags;
};

namespace detail {

inline constexpr double kPctFloor = 0.1;
inline constexpr double kPctCeiling = 99.9;
inline constexpr double kInvalidMean = 1.5;
inline constexpr double kInvalidSigma = 0.5;
inline constexpr double kLeaderShareMean = 0.45;
inline constexpr double kLeaderShareSigma = 0.10;

inline double clamp_pct(double pct, const char* what, const std::string& id, std::vector<std::string>& flags) {
  if (pct < kPctFloor || pct > kPctCeiling) {
    flags.push_back(std::string("clamped ") + what + ": " + id);
    return std::clamp(pct, kPctFloor, kPctCeiling);
  }
  return pct;
}

inline std::string constituency_label(char prefix, std::size_t i) {
  std::string digits = std::to_string(i + 1);
  if (digits.size() < 3) {
    digits.insert(0, 3 - digits.size(), '0');
  }
  return std::string(1, prefix) + digits;
}

inline ConstituencyRecord draw_record(Rng& rng, const ScenarioConfig& c, bool suspect, std::size_t i,
                                      std::vector<std::string>& flags) {
  ConstituencyRecord r;
  r.region = suspect ? c.suspect_region : c.reference_region;
  r.constituency_id = constituency_label(suspect ? 'S' : 'R', i);
  r.registered_voters = rng.uniform_int(c.registered_min, c.registered_max);

  double turnout = rng.normal(c.turnout_mean, c.turnout_sigma);
  if (suspect && c.fraud_mode == FraudMode::TurnoutShift) {
    turnout += c.fraud_magnitude * c.turnout_sigma;
  }
  turnout = clamp_pct(turnout, "turnout", r.constituency_id, flags);
  const double against = clamp_pct(rng.normal(c.against_all_mean, c.against_all_sigma), "against_all",
                                   r.constituency_id, flags);
  const double invalid = std::clamp(rng.normal(kInvalidMean, kInvalidSigma), kPctFloor, kPctCeiling);
  const double leader_share = std::clamp(rng.normal(kLeaderShareMean, kLeaderShareSigma), 0.0, 1.0);

  const auto registered = static_cast<double>(r.registered_voters);
  r.ballots_cast = std::llround(registered * turnout / 100.0);
  const auto ballots = static_cast<double>(r.ballots_cast);
  r.votes_against_all = std::llround(ballots * against / 100.0);
  r.invalid_ballots = std::min<std::int64_t>(std::llround(ballots * invalid / 100.0), r.ballots_cast - r.votes_against_all);
  const std::int64_t valid = r.ballots_cast - r.votes_against_all - r.invalid_ballots;
  std::int64_t leader = std::llround(static_cast<double>(valid) * leader_share);
  const std::int64_t others = valid - leader;

  if (suspect && c.fraud_mode == FraudMode::Stuffing) {
    const std::int64_t stuffed = std::llround(c.fraud_magnitude * registered);
    r.ballots_cast += stuffed;
    leader += stuffed;
  }
  r.candidate_votes = {{"leader", leader}, {"others", others}};
  return r;
}

} // namespace detail

/// Reference constituencies first, then suspects; every draw comes from one
/// generator seeded with `config.seed`.
inline GeneratedCorpus generate(const ScenarioConfig& config) {
  validate(config);
  Rng rng(config.seed);
  GeneratedCorpus out;
  out.records.reserve(config.n_reference + config.n_suspect);
  for (std::size_t i = 0; i < config.n_reference; ++i) {
    out.records.push_back(detail::draw_record(rng, config, false, i, out.flags));
  }
  for (std::size_t i = 0; i < config.n_suspect; ++i) {
    out.records.push_back(detail::draw_record(rng, config, true, i, out.flags));
  }
  return out;
}

/// The harness request: suspects are the suspect region, reference is the rest.
inline AnalysisRequest detection_request(const ScenarioConfig& config) {
  AnalysisRequest req;
  req.suspect_regions = {config.suspect_region};
  req.rejection_levels = config.rejection_levels;
  req.intervals = {{config.detection_lo, config.detection_hi}};
  req.scales = {1.0};
  return req;
}

struct DetectionOutcome {
  double mean_location = 0.0;  // averaged over sweep rows
  double mean_scale = 0.0;
  double probability = 0.0;  // mass on the detection interval
};

/// Centre and scale are the sweep averages of the arctan estimates; the
/// statistic is the Cauchy mass those put on the detection interval.
inline DetectionOutcome detection_statistic(const AnalysisReport& report, const ScenarioConfig& config) {
  DetectionOutcome d;
  for (const auto& row : report.sweep) {
    d.mean_location += row.location_hat;
    d.mean_scale += row.scale_hat;
  }
  const auto rows = static_cast<double>(report.sweep.size());
  d.mean_location /= rows;
  d.mean_scale /= rows;
  d.probability = location_interval_prob(config.detection_lo, config.detection_hi, d.mean_location, d.mean_scale);
  return d;
}

inline DetectionOutcome run_detection(const ScenarioConfig& config) {
  const auto corpus = generate(config);
  const auto report = analyze(corpus.records, detection_request(config));
  return detection_statistic(report, config);
}

namespace detail {

// Evaluates fn(i) for i in [0, n) on a few threads; results stay in index order.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> results(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          results[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return results;
}

inline std::vector<DetectionOutcome> detection_runs(const ScenarioConfig& base, double magnitude,
                                                    std::size_t n_seeds) {
  return parallel_map(n_seeds, [&](std::size_t i) {
    ScenarioConfig c = base;
    c.fraud_magnitude = magnitude;
    c.seed = base.seed + i;
    try {
      return run_detection(c);
    } catch (const Error&) {
      rethrow_with_prefix("seed " + std::to_string(c.seed) + ": ");
    }
  });
}

} // namespace detail

struct PowerRow {
  double magnitude = 0.0;
  double mean_location = 0.0;
  double mean_scale = 0.0;
  double detection_rate = 0.0;
  std::size_t n_seeds = 0;
};

/// For each magnitude, seeds base.seed .. base.seed + n_seeds - 1 are
/// simulated and analysed; a seed counts as detected when the interval mass
/// falls below config.detection_threshold. The same seeds are reused across
/// magnitudes.
inline std::vector<PowerRow> power_study(const ScenarioConfig& base, const std::vector<double>& magnitudes,
                                         std::size_t n_seeds) {
  validate(base);
  if (n_seeds == 0) {
    throw ConfigError("power study needs n_seeds >= 1");
  }
  for (double m : magnitudes) {
    if (!(m >= 0.0)) throw ConfigError("fraud magnitudes must be >= 0");
    if (m > 0.0 && base.fraud_mode == FraudMode::None) {
      throw ConfigError("power study with positive magnitude needs fraud_mode stuffing or turnout_shift");
    }
  }
  std::vector<PowerRow> rows;
  for (double m : magnitudes) {
    const auto runs = detail::detection_runs(base, m, n_seeds);
    PowerRow row{m, 0.0, 0.0, 0.0, n_seeds};
    std::size_t detected = 0;
    for (const auto& r : runs) {
      row.mean_location += r.mean_location;
      row.mean_scale += r.mean_scale;
      detected += r.probability < base.detection_threshold ? 1 : 0;
    }
    const auto n = static_cast<double>(n_seeds);
    row.mean_location /= n;
    row.mean_scale /= n;
    row.detection_rate = static_cast<double>(detected) / n;
    rows.push_back(row);
  }
  return rows;
}

/// Null-model quantile of the detection statistic over seeds base.seed ..
/// base.seed + n_seeds - 1 (magnitude 0). Using the `false_alarm_rate`
/// quantile as the threshold fixes the expected null detection rate.
inline double calibrate_detection_threshold(const ScenarioConfig& base, std::size_t n_seeds, double false_alarm_rate) {
  validate(base);
  if (n_seeds < 2) throw ConfigError("calibration needs n_seeds >= 2");
  if (!(false_alarm_rate > 0.0 && false_alarm_rate < 1.0)) {
    throw ConfigError("false_alarm_rate must lie in (0,1)");
  }
  const auto runs = detail::detection_runs(base, 0.0, n_seeds);
  std::vector<double> stats;
  stats.reserve(runs.size());
  for (const auto& r : runs) {
    stats.push_back(r.probability);
  }
  std::sort(stats.begin(), stats.end());
  return detail::weibull_quantile(stats, false_alarm_rate);
}

} // namespace cauchy_forensics
