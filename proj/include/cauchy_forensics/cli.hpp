#pragma once

// Command dispatch for the `cauchy-forensics` tool. Kept in a header so the
// test suites can drive the exact same code path in-process.
//
// Exit codes: 0 success, 2 data/config error, 3 estimation failure.

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cauchy_forensics/election.hpp"
#include "cauchy_forensics/errors.hpp"
#include "cauchy_forensics/io/csv.hpp"
#include "cauchy_forensics/io/report_json.hpp"
#include "cauchy_forensics/io/scenario_config.hpp"
#include "cauchy_forensics/io/svg_histogram.hpp"
#include "cauchy_forensics/simulator.hpp"

namespace cauchy_forensics::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitEstimationError = 3;

struct AnalyzeArgs {
  std::string data;
  std::string suspect_regions;
  std::string exclude_regions;
  std::string reject = "1,3,7,9";
  std::vector<std::string> intervals;
  std::vector<double> scales;
  std::string out;
  bool json = false;
  bool skip_bad = false;
  std::string variance_divisor = "n-1";
  std::string against_all_basis = "ballots_cast";
};

struct HistogramArgs {
  std::string data;
  double bin_width = 1.0;
  std::string out;
  std::string title = "Turnout distribution";
  bool skip_bad = false;
};

struct SimulateArgs {
  std::string config;
  std::string out;
  bool power_study = false;
  std::string magnitudes = "0,1,2,3";
  std::size_t n_seeds = 100;
  std::string power_out;
  std::string format = "csv";
  std::vector<std::pair<std::string, std::string>> overrides;
};

namespace detail {

inline void report_diagnostics(const std::vector<io::Diagnostic>& diags, std::ostream& err) {
  for (const auto& d : diags) {
    err << "line " << d.line << ": " << d.message << '\n';
  }
}

inline std::pair<double, double> parse_interval(const std::string& text) {
  const auto parts = io::parse_number_list<double>("--interval", text);
  if (parts.size() != 2) {
    throw ConfigError("--interval expects lo,hi; got '" + text + "'");
  }
  return {parts[0], parts[1]};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw DataError("cannot write '" + path + "'");
  }
}

} // namespace detail

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const auto ingested = io::ingest_file(a.data, {a.skip_bad});
  detail::report_diagnostics(ingested.diagnostics, err);

  AnalysisRequest req;
  req.suspect_regions = io::detail::split_list(a.suspect_regions);
  req.excluded_regions = io::detail::split_list(a.exclude_regions);
  req.rejection_levels = io::parse_number_list<std::size_t>("--reject", a.reject);
  if (!a.intervals.empty()) {
    req.intervals.clear();
    for (const auto& i : a.intervals) {
      req.intervals.push_back(detail::parse_interval(i));
    }
  }
  if (!a.scales.empty()) {
    req.scales = a.scales;
  }
  if (a.variance_divisor == "n") {
    req.options.variance_divisor = VarianceDivisor::PopulationN;
  } else if (a.variance_divisor != "n-1") {
    throw ConfigError("--variance-divisor must be n-1 or n");
  }
  if (a.against_all_basis == "registered_voters") {
    req.options.against_all_basis = AgainstAllBasis::RegisteredVoters;
  } else if (a.against_all_basis != "ballots_cast") {
    throw ConfigError("--against-all-basis must be ballots_cast or registered_voters");
  }

  const auto report = analyze(ingested.records, req);
  const std::string doc = io::report_to_json(report).dump(2) + "\n";
  if (!a.out.empty()) {
    detail::write_text(a.out, doc);
  }
  if (a.json || a.out.empty()) {
    out << doc;
  } else {
    out << "ratios: " << report.ratios.size() << ", sample mean " << io::round6(report.sample_mean) << '\n';
    for (const auto& row : report.sweep) {
      out << "reject " << row.rejected_total << ": location " << io::round6(row.location_hat) << ", scale "
          << io::round6(row.scale_hat) << '\n';
    }
    for (const auto& p : report.probabilities) {
      out << "P{location in [" << p.lo << ", " << p.hi << "] | scale " << p.scale
          << "} = " << io::round6(p.probability) << '\n';
    }
  }
  return kExitOk;
}

inline int cmd_histogram(const HistogramArgs& a, std::ostream& out, std::ostream& err) {
  const auto ingested = io::ingest_file(a.data, {a.skip_bad});
  detail::report_diagnostics(ingested.diagnostics, err);
  if (ingested.records.empty()) {
    throw DataError("no records in '" + a.data + "'");
  }
  const auto bins = turnout_histogram(ingested.records, a.bin_width);
  io::SvgStyle style;
  style.title = a.title;
  io::write_histogram_svg(a.out, bins, style);
  out << "wrote " << bins.size() << " bins to " << a.out << '\n';
  return kExitOk;
}

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  if (!a.config.empty()) {
    config = io::load_scenario(a.config);
  }
  for (const auto& [key, value] : a.overrides) {
    io::apply_setting(config, key, value);
  }
  validate(config);

  if (!a.power_study) {
    const auto corpus = generate(config);
    for (const auto& f : corpus.flags) {
      err << f << '\n';
    }
    if (a.out.empty()) {
      io::write_csv(out, corpus.records);
    } else {
      std::ofstream file(a.out, std::ios::binary);
      if (!file) {
        throw DataError("cannot write '" + a.out + "'");
      }
      io::write_csv(file, corpus.records);
    }
    return kExitOk;
  }

  if (config.fraud_mode == FraudMode::None) {
    config.fraud_mode = FraudMode::TurnoutShift;
  }
  const auto magnitudes = io::parse_number_list<double>("--magnitudes", a.magnitudes);
  const auto rows = power_study(config, magnitudes, a.n_seeds);
  std::ostringstream table;
  if (a.format == "json") {
    table << io::power_study_to_json(rows).dump(2) << '\n';
  } else if (a.format == "csv") {
    table << "magnitude,mean_location,mean_scale,detection_rate,n_seeds\n";
    for (const auto& r : rows) {
      table << io::round6(r.magnitude) << ',' << io::round6(r.mean_location) << ',' << io::round6(r.mean_scale)
            << ',' << io::round6(r.detection_rate) << ',' << r.n_seeds << '\n';
    }
  } else {
    throw ConfigError("--format must be csv or json");
  }
  if (a.power_out.empty()) {
    out << table.str();
  } else {
    detail::write_text(a.power_out, table.str());
  }
  return kExitOk;
}

/// Parses argv and runs one subcommand. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cauchy ratio forensics for election returns"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate Cauchy parameters of suspect-region indicator ratios");
  analyze_cmd->add_option("--data", analyze_args.data, "Input CSV")->required();
  analyze_cmd->add_option("--suspect-regions", analyze_args.suspect_regions, "Comma list of suspect regions")
      ->required();
  analyze_cmd->add_option("--exclude-regions", analyze_args.exclude_regions,
                          "Comma list of further regions left out of the reference statistics");
  analyze_cmd->add_option("--reject", analyze_args.reject, "Comma list of rejection counts")
      ->capture_default_str();
  analyze_cmd->add_option("--interval", analyze_args.intervals, "Location interval lo,hi (repeatable)")
      ->allow_extra_args(false);
  analyze_cmd->add_option("--scale", analyze_args.scales, "Scale for interval probabilities (repeatable)")
      ->allow_extra_args(false);
  analyze_cmd->add_option("--out", analyze_args.out, "Write the JSON report here");
  analyze_cmd->add_flag("--json", analyze_args.json, "Print the JSON report on standard output");
  analyze_cmd->add_flag("--skip-bad", analyze_args.skip_bad, "Skip malformed rows instead of failing");
  analyze_cmd->add_option("--variance-divisor", analyze_args.variance_divisor, "n-1 or n")->capture_default_str();
  analyze_cmd->add_option("--against-all-basis", analyze_args.against_all_basis,
                          "ballots_cast or registered_voters")
      ->capture_default_str();

  HistogramArgs hist_args;
  auto* hist_cmd = app.add_subcommand("histogram", "Render a turnout histogram as SVG");
  hist_cmd->add_option("--data", hist_args.data, "Input CSV")->required();
  hist_cmd->add_option("--bin-width", hist_args.bin_width, "Bin width in percent")->capture_default_str();
  hist_cmd->add_option("--out", hist_args.out, "Output SVG path")->required();
  hist_cmd->add_option("--title", hist_args.title, "Chart title");
  hist_cmd->add_flag("--skip-bad", hist_args.skip_bad, "Skip malformed rows instead of failing");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic corpus or run a power study");
  sim_cmd->add_option("--config", sim_args.config, "Scenario file (key = value lines)");
  sim_cmd->add_option("--out", sim_args.out, "Corpus CSV path (default: standard output)");
  sim_cmd->add_flag("--power-study", sim_args.power_study, "Run a detection power study instead");
  sim_cmd->add_option("--magnitudes", sim_args.magnitudes, "Comma list of fraud magnitudes")->capture_default_str();
  sim_cmd->add_option("--n-seeds", sim_args.n_seeds, "Seeds per magnitude")->capture_default_str();
  sim_cmd->add_option("--power-out", sim_args.power_out, "Power table path (default: standard output)");
  sim_cmd->add_option("--format", sim_args.format, "Power table format: csv or json")->capture_default_str();
  // Inline overrides of scenario keys; applied after --config.
  std::map<std::string, std::string> inline_values;
  for (const char* key : {"seed", "n_reference", "n_suspect", "fraud_mode", "fraud_magnitude", "turnout_mean",
                          "turnout_sigma", "against_all_mean", "against_all_sigma", "registered_min",
                          "registered_max", "reference_region", "suspect_region", "rejection_levels",
                          "detection_lo", "detection_hi", "detection_threshold"}) {
    std::string flag = std::string("--") + key;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    sim_cmd->add_option(flag, inline_values[key], std::string("Override scenario key ") + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitDataError;
  }

  try {
    if (analyze_cmd->parsed()) {
      return cmd_analyze(analyze_args, out, err);
    }
    if (hist_cmd->parsed()) {
      return cmd_histogram(hist_args, out, err);
    }
    for (const auto& [key, value] : inline_values) {
      std::string flag = "--" + key;
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      if (sim_cmd->count(flag) > 0) {
        sim_args.overrides.emplace_back(key, value);
      }
    }
    return cmd_simulate(sim_args, out, err);
  } catch (const EstimationError& e) {
    err << "estimation failure: " << e.what() << '\n';
    return kExitEstimationError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << '\n';
    return kExitFailure;
  }
}

} // namespace cauchy_forensics::cli
