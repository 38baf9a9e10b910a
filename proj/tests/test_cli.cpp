#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cauchy_forensics/cli.hpp"

using namespace cauchy_forensics;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cauchy-forensics");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string tmp_path(const std::string& name) { return std::string(CF_TEST_TMP_DIR) + "/cli_" + name; }

std::string fixture() { return std::string(CF_FIXTURE_DIR) + "/fixture_corpus.csv"; }

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = tmp_path(name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kHeader = "region,constituency_id,registered_voters,ballots_cast,votes_against_all,invalid_ballots\n";

// Bin counts in drawing order, read back from the bar tooltips.
std::vector<std::size_t> svg_counts(const std::string& svg) {
  std::vector<std::size_t> counts;
  const std::regex title("<title>[^<]*%: ([0-9]+)</title>");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), title); it != std::sregex_iterator(); ++it) {
    counts.push_back(std::stoul((*it)[1].str()));
  }
  return counts;
}

} // namespace

TEST_CASE("analyze with defaults", "[cli]") {
  const auto r = run_cli({"analyze", "--data", fixture(), "--suspect-regions", "East", "--json"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = json::parse(r.out);
  REQUIRE(j["sweep"].size() == 4);
  CHECK(j["sweep"][0]["rejected_total"] == 1);
  CHECK(j["sweep"][3]["rejected_total"] == 9);
  REQUIRE(j["probabilities"].size() == 1);
  CHECK(j["probabilities"][0]["interval"] == json::array({-0.1, 0.1}));
  CHECK(j["probabilities"][0]["scale"] == 1.0);
}

TEST_CASE("analyze writes the report file and a text summary", "[cli]") {
  const auto out = tmp_path("report.json");
  std::filesystem::remove(out);
  const auto r = run_cli({"analyze", "--data", fixture(), "--suspect-regions", "East", "--out", out});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("reject 7: location") != std::string::npos);
  CHECK(json::parse(slurp(out))["ratios"]["n"] == 35);
}

TEST_CASE("repeated intervals and scales, negative bounds", "[cli]") {
  const auto r = run_cli({"analyze", "--data", fixture(), "--suspect-regions", "East", "--interval", "-1.1,-0.95",
                          "--interval=-1.04,-1.02", "--scale", "1", "--scale", "1.26", "--reject", "2,4"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = json::parse(r.out);
  REQUIRE(j["probabilities"].size() == 4);
  CHECK(j["probabilities"][0]["interval"] == json::array({-1.1, -0.95}));
  CHECK(j["probabilities"][1]["scale"] == 1.26);
  CHECK(j["probabilities"][3]["interval"] == json::array({-1.04, -1.02}));
  CHECK(j["sweep"].size() == 2);

  CHECK(run_cli({"analyze", "--data", fixture(), "--suspect-regions", "East", "--interval", "1"}).code ==
        cli::kExitDataError);
  CHECK(run_cli({"analyze", "--data", fixture(), "--suspect-regions", "East", "--interval=0.5,0.1"}).code ==
        cli::kExitDataError);
}

TEST_CASE("unknown suspect region", "[cli]") {
  const auto r = run_cli({"analyze", "--data", fixture(), "--suspect-regions", "Atlantis"});
  CHECK(r.code == cli::kExitDataError);
  CHECK(r.err.find("Atlantis") != std::string::npos);
  CHECK(r.err.find("East") != std::string::npos);
  CHECK(r.err.find("West") != std::string::npos);
}

TEST_CASE("data and usage errors exit 2", "[cli]") {
  CHECK(run_cli({"analyze", "--data", tmp_path("absent.csv"), "--suspect-regions", "East"}).code ==
        cli::kExitDataError);
  CHECK(run_cli({"analyze", "--data", fixture()}).code == cli::kExitDataError);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitDataError);
  CHECK(run_cli({}).code == cli::kExitDataError);
  CHECK(run_cli({"analyze", "--data", fixture(), "--suspect-regions", "East", "--variance-divisor", "n+1"}).code ==
        cli::kExitDataError);

  const auto bad = write_file("bad_row.csv", kHeader + "A,1,1000,600,10,5\nA,2,1000,6x0,10,5\n");
  const auto r = run_cli({"analyze", "--data", bad, "--suspect-regions", "A"});
  CHECK(r.code == cli::kExitDataError);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("estimation failure exits 3", "[cli]") {
  // Identical suspect rows give identical ratios and a zero fitted scale.
  std::string text = kHeader + "Ref,r1,1000,400,4,0\nRef,r2,1000,500,10,0\nRef,r3,1000,600,18,0\n";
  for (int i = 0; i < 6; ++i) {
    text += "Sus,s" + std::to_string(i) + ",1000,600,18,0\n";
  }
  const auto path = write_file("flat.csv", text);
  const auto r = run_cli({"analyze", "--data", path, "--suspect-regions", "Sus", "--reject", "0"});
  CHECK(r.code == cli::kExitEstimationError);
  CHECK(r.err.find("estimation") != std::string::npos);
}

TEST_CASE("histogram of an empty file writes nothing", "[cli][histogram]") {
  const auto data = write_file("empty.csv", kHeader);
  const auto svg = tmp_path("empty.svg");
  std::filesystem::remove(svg);
  const auto r = run_cli({"histogram", "--data", data, "--out", svg});
  CHECK(r.code == cli::kExitDataError);
  CHECK_FALSE(std::filesystem::exists(svg));
}

TEST_CASE("histogram of a single record", "[cli][histogram]") {
  const auto data = write_file("single.csv", kHeader + "A,1,1000,723,10,5\n");
  const auto svg = tmp_path("single.svg");
  REQUIRE(run_cli({"histogram", "--data", data, "--out", svg, "--bin-width", "2"}).code == cli::kExitOk);
  const auto counts = svg_counts(slurp(svg));
  REQUIRE(counts.size() == 2);  // one regular bin plus the overflow bin
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 0);
  CHECK(slurp(svg).find("72-74%: 1") != std::string::npos);
}

TEST_CASE("histogram of a bimodal corpus has two peaks", "[cli][histogram]") {
  std::string text = kHeader;
  int id = 0;
  // Two clusters, around 55% and 85% turnout.
  for (int centre : {550, 850}) {
    for (int offset : {-30, -20, -10, -10, 0, 0, 0, 0, 10, 10, 20, 30}) {
      text += "A," + std::to_string(++id) + ",1000," + std::to_string(centre + offset) + ",10,5\n";
    }
  }
  const auto data = write_file("bimodal.csv", text);
  const auto svg = tmp_path("bimodal.svg");
  REQUIRE(run_cli({"histogram", "--data", data, "--out", svg, "--bin-width", "1", "--title", "bimodal"}).code ==
          cli::kExitOk);
  auto counts = svg_counts(slurp(svg));
  REQUIRE(counts.size() > 2);
  counts.pop_back();  // overflow
  std::size_t peaks = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::size_t left = i == 0 ? 0 : counts[i - 1];
    const std::size_t right = i + 1 == counts.size() ? 0 : counts[i + 1];
    peaks += (counts[i] > left && counts[i] > right) ? 1 : 0;
  }
  CHECK(peaks == 2);
}

TEST_CASE("simulate", "[cli][simulate]") {
  const auto a = run_cli({"simulate", "--seed", "5", "--n-reference", "10", "--n-suspect", "5"});
  REQUIRE(a.code == cli::kExitOk);
  CHECK(a.out == run_cli({"simulate", "--seed", "5", "--n-reference", "10", "--n-suspect", "5"}).out);
  std::istringstream csv(a.out);
  CHECK(io::ingest(csv).records.size() == 15);

  const auto cfg = write_file("scenario.cfg", "n_reference = 12\nn_suspect = 4\nseed = 5\n");
  const auto out = tmp_path("sim.csv");
  REQUIRE(run_cli({"simulate", "--config", cfg, "--out", out, "--n-suspect", "6"}).code == cli::kExitOk);
  CHECK(io::ingest_file(out).records.size() == 18);

  CHECK(run_cli({"simulate", "--config", tmp_path("missing.cfg")}).code == cli::kExitDataError);
  const auto bad = write_file("bad.cfg", "n_suspects = 4\n");
  const auto r = run_cli({"simulate", "--config", bad});
  CHECK(r.code == cli::kExitDataError);
  CHECK(r.err.find("unknown config key 'n_suspects'") != std::string::npos);
}

TEST_CASE("simulate power study", "[cli][simulate]") {
  const auto r = run_cli({"simulate", "--power-study", "--magnitudes", "0,3", "--n-seeds", "4", "--seed", "1000"});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "magnitude,mean_location,mean_scale,detection_rate,n_seeds");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2);

  const auto j = run_cli({"simulate", "--power-study", "--magnitudes", "1", "--n-seeds", "2", "--format", "json"});
  REQUIRE(j.code == cli::kExitOk);
  CHECK(json::parse(j.out).size() == 1);
  CHECK(run_cli({"simulate", "--power-study", "--format", "xml", "--n-seeds", "2"}).code == cli::kExitDataError);
}
