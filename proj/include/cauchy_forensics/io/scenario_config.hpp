#pragma once

// Scenario files are `key = value` lines; `#` starts a comment. Keys mirror
// ScenarioConfig field names. List values are comma separated.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "cauchy_forensics/errors.hpp"
#include "cauchy_forensics/simulator.hpp"

namespace cauchy_forensics::io {

namespace detail {

inline std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  }
  return value;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = strip(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

} // namespace detail

template <class T>
std::vector<T> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : detail::split_list(text)) {
    out.push_back(detail::parse_number<T>(key, item));
  }
  return out;
}

/// Sets one field by name. Unknown keys raise ConfigError naming the key.
inline void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_number;
  static const std::map<std::string, std::function<void(ScenarioConfig&, const std::string&, const std::string&)>>
      setters{
          {"n_reference", [](auto& c, auto& k, auto& v) { c.n_reference = parse_number<std::size_t>(k, v); }},
          {"n_suspect", [](auto& c, auto& k, auto& v) { c.n_suspect = parse_number<std::size_t>(k, v); }},
          {"turnout_mean", [](auto& c, auto& k, auto& v) { c.turnout_mean = parse_number<double>(k, v); }},
          {"turnout_sigma", [](auto& c, auto& k, auto& v) { c.turnout_sigma = parse_number<double>(k, v); }},
          {"against_all_mean", [](auto& c, auto& k, auto& v) { c.against_all_mean = parse_number<double>(k, v); }},
          {"against_all_sigma", [](auto& c, auto& k, auto& v) { c.against_all_sigma = parse_number<double>(k, v); }},
          {"registered_min", [](auto& c, auto& k, auto& v) { c.registered_min = parse_number<std::int64_t>(k, v); }},
          {"registered_max", [](auto& c, auto& k, auto& v) { c.registered_max = parse_number<std::int64_t>(k, v); }},
          {"fraud_mode", [](auto& c, auto&, auto& v) { c.fraud_mode = parse_fraud_mode(v); }},
          {"fraud_magnitude", [](auto& c, auto& k, auto& v) { c.fraud_magnitude = parse_number<double>(k, v); }},
          {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
          {"reference_region", [](auto& c, auto&, auto& v) { c.reference_region = v; }},
          {"suspect_region", [](auto& c, auto&, auto& v) { c.suspect_region = v; }},
          {"rejection_levels",
           [](auto& c, auto& k, auto& v) { c.rejection_levels = parse_number_list<std::size_t>(k, v); }},
          {"detection_lo", [](auto& c, auto& k, auto& v) { c.detection_lo = parse_number<double>(k, v); }},
          {"detection_hi", [](auto& c, auto& k, auto& v) { c.detection_hi = parse_number<double>(k, v); }},
          {"detection_threshold",
           [](auto& c, auto& k, auto& v) { c.detection_threshold = parse_number<double>(k, v); }},
      };
  const auto it = setters.find(key);
  if (it == setters.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  it->second(c, key, value);
}

inline ScenarioConfig parse_scenario(std::istream& in, ScenarioConfig base = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    line = detail::strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(base, detail::strip(line.substr(0, eq)), detail::strip(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(base);
  return base;
}

inline ScenarioConfig load_scenario(const std::string& path, ScenarioConfig base = {}) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_scenario(in, std::move(base));
}

} // namespace cauchy_forensics::io
