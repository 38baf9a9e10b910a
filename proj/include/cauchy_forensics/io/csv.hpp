#pragma once

// Constituency returns as comma-separated UTF-8 text with a mandatory header:
//   region,constituency_id,registered_voters,ballots_cast,votes_against_all,invalid_ballots[,<candidate>...]
// Extra columns are candidate vote counts; an empty candidate cell means the
// candidate did not stand there.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cauchy_forensics/election.hpp"
#include "cauchy_forensics/errors.hpp"

namespace cauchy_forensics::io {

inline const std::vector<std::string>& required_columns() {
  static const std::vector<std::string> cols{"region",           "constituency_id",   "registered_voters",
                                             "ballots_cast",     "votes_against_all", "invalid_ballots"};
  return cols;
}

struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<ConstituencyRecord> records;
  std::vector<Diagnostic> diagnostics;
};

struct IngestOptions {
  bool skip_bad = false;
};

namespace detail {

// RFC 4180 field splitting: quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) {
    throw DataError("unterminated quoted field");
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct ParsedCount {
  std::int64_t value = 0;
  bool decimal_comma = false;
};

// Non-negative integer. "1472.0" and the decimal-comma form "1472,0" are
// accepted when the fractional part is zero.
inline ParsedCount parse_count(const std::string& column, const std::string& text) {
  std::string s = text;
  ParsedCount out;
  const auto sep = s.find_first_of(".,");
  if (sep != std::string::npos) {
    const std::string frac = s.substr(sep + 1);
    if (frac.empty() || !std::all_of(frac.begin(), frac.end(), [](char c) { return c == '0'; })) {
      throw DataError(column + ": non-integer count '" + text + "'");
    }
    out.decimal_comma = s[sep] == ',';
    s.resize(sep);
  }
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out.value);
  if (s.empty() || ec != std::errc{} || ptr != end) {
    throw DataError(column + ": non-integer count '" + text + "'");
  }
  if (out.value < 0) {
    throw DataError(column + ": negative count '" + text + "'");
  }
  return out;
}

} // namespace detail

inline IngestResult ingest(std::istream& in, const IngestOptions& options = {}) {
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
      line.erase(0, 3);
    }
    if (!detail::trim(line).empty()) {
      for (const auto& f : detail::split_csv_line(line)) {
        header.push_back(detail::trim(f));
      }
      break;
    }
  }
  if (header.empty()) {
    throw DataError("missing header row");
  }
  std::vector<std::size_t> required_idx;
  for (const auto& col : required_columns()) {
    const auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) {
      throw DataError("missing required column '" + col + "'");
    }
    required_idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::size_t> candidate_idx;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(required_idx.begin(), required_idx.end(), i) == required_idx.end()) {
      candidate_idx.push_back(i);
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    try {
      auto fields = detail::split_csv_line(line);
      if (fields.size() != header.size()) {
        throw DataError("expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
      }
      for (auto& f : fields) {
        f = detail::trim(f);
      }
      bool decimal_comma = false;
      auto count = [&](std::size_t idx) {
        const auto parsed = detail::parse_count(header[idx], fields[idx]);
        decimal_comma = decimal_comma || parsed.decimal_comma;
        return parsed.value;
      };
      ConstituencyRecord r;
      r.region = fields[required_idx[0]];
      r.constituency_id = fields[required_idx[1]];
      r.registered_voters = count(required_idx[2]);
      r.ballots_cast = count(required_idx[3]);
      r.votes_against_all = count(required_idx[4]);
      r.invalid_ballots = count(required_idx[5]);
      for (auto idx : candidate_idx) {
        if (!fields[idx].empty()) {
          r.candidate_votes.emplace_back(header[idx], count(idx));
        }
      }
      validate_record(r);
      if (decimal_comma) {
        result.diagnostics.push_back({line_no, "decimal comma normalized to decimal point"});
      }
      if (turnout_exceeds_registered(r)) {
        std::ostringstream msg;
        msg << "turnout>100% (" << r.ballots_cast << " ballots, " << r.registered_voters << " registered)";
        result.diagnostics.push_back({line_no, msg.str()});
      }
      result.records.push_back(std::move(r));
    } catch (const DataError& e) {
      if (!options.skip_bad) {
        throw DataError("line " + std::to_string(line_no) + ": " + e.what());
      }
      result.diagnostics.push_back({line_no, std::string("skipped: ") + e.what()});
    }
  }
  return result;
}

inline IngestResult ingest_file(const std::string& path, const IngestOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  try {
    return ingest(in, options);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

} // namespace detail

/// Writes records in the ingestion schema. Candidate columns are the union of
/// labels in first-seen order.
inline void write_csv(std::ostream& out, const std::vector<ConstituencyRecord>& records) {
  std::vector<std::string> candidates;
  for (const auto& r : records) {
    for (const auto& [label, votes] : r.candidate_votes) {
      if (std::find(candidates.begin(), candidates.end(), label) == candidates.end()) {
        candidates.push_back(label);
      }
    }
  }
  const auto& req = required_columns();
  for (std::size_t i = 0; i < req.size(); ++i) {
    out << (i ? "," : "") << req[i];
  }
  for (const auto& c : candidates) {
    out << ',' << detail::csv_escape(c);
  }
  out << '\n';
  for (const auto& r : records) {
    out << detail::csv_escape(r.region) << ',' << detail::csv_escape(r.constituency_id) << ',' << r.registered_voters
        << ',' << r.ballots_cast << ',' << r.votes_against_all << ',' << r.invalid_ballots;
    for (const auto& c : candidates) {
      out << ',';
      const auto it = std::find_if(r.candidate_votes.begin(), r.candidate_votes.end(),
                                   [&](const auto& kv) { return kv.first == c; });
      if (it != r.candidate_votes.end()) {
        out << it->second;
      }
    }
    out << '\n';
  }
}

} // namespace cauchy_forensics::io
