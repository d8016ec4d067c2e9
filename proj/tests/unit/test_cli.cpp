#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using dem::testing::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dem::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec_path(const char* name) { return std::string(DEM_SPEC_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }

  fs::path dir_;
};

TEST_F(CliTest, BoundsAzuma) {
  const Result r = run({"bounds", "azuma", "--m", "100", "--c", "1", "--t", "20"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.270670566473\n");
  EXPECT_EQ(run({"bounds", "azuma", "--m", "100", "--c", "1", "--t", "0"}).out, "2\n");
}

TEST_F(CliTest, BoundsTheorem) {
  const Result r = run({"bounds", "theorem", "--a", "2", "--n", "1000000", "--lambda", "0.01",
                        "--T", "1", "--beta", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1.49066126883e-05\n");
}

TEST_F(CliTest, BoundsOthers) {
  EXPECT_EQ(run({"bounds", "gronwall-discrete", "--c", "2", "--b", "1", "--a", "0.5", "--m", "4"})
                .out,
            "29.5562243957\n");
  EXPECT_EQ(run({"bounds", "gronwall-continuous", "--C", "2", "--L", "1", "--t", "1"}).out,
            "5.43656365692\n");
  EXPECT_EQ(run({"bounds", "binomial", "--m", "2", "--gamma", "0.5", "--k", "1"}).out, "0.75\n");
  EXPECT_EQ(run({"bounds", "envelope", "--lambda", "0.1", "--delta", "0.25", "--t", "2"}).out,
            "0.6\n");
  EXPECT_EQ(run({"bounds", "stability", "--lambda", "0", "--delta", "0", "--L", "1", "--T", "2"})
                .out,
            "0\n");
  const Result f = run({"bounds", "freedman", "--a", "1", "--n", "10000", "--lambda", "0.1",
                        "--T", "1", "--beta", "10", "--b", "0.1"});
  EXPECT_EQ(f.code, 0);
  EXPECT_EQ(f.out.substr(0, f.out.find('\n')), "2.77758877299e-11");
  const Result t = run({"bounds", "truncated", "--a", "1", "--n", "100", "--lambda", "0.5", "--T",
                        "1", "--beta", "1", "--gamma", "0.01", "--x", "0"});
  EXPECT_EQ(t.out, "0.721841525974\n");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"bounds", "azuma", "--m", "100"}).code, 2);
  EXPECT_EQ(run({"bounds", "azuma", "--m", "0", "--c", "1", "--t", "1"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"verify", "--help"}).code, 0);
}

TEST_F(CliTest, SolvePrintsConstants) {
  const auto csv = (dir_ / "sol.csv").string();
  const Result r = run({"solve", spec_path("balls_in_bins.json"), "--out", csv});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sigma = 1.9778\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("margin = 0.0221671682968"), std::string::npos);
  EXPECT_NE(r.out.find("lambda admissible: yes"), std::string::npos);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.substr(0, 8), "t,y_1\n0,");
}

TEST_F(CliTest, SolveToStdoutKeepsSummaryOnStderr) {
  const Result r = run({"solve", spec_path("zero_drift.json")});
  EXPECT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "t,y_1,y_2");
  int rows = 0;
  while (std::getline(lines, line)) {
    ASSERT_EQ(line.substr(line.find(',')), ",0.5,0.5");
    ++rows;
  }
  EXPECT_GT(rows, 2000);
  EXPECT_NE(r.err.find("R = 1\n"), std::string::npos);
}

TEST_F(CliTest, SolveRejectsMalformedJson) {
  EXPECT_EQ(run({"solve", write("bad.json", "{\"schema\": 1,")}).code, 2);
  EXPECT_EQ(run({"solve", (dir_ / "missing.json").string()}).code, 2);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const auto a = dir_ / "a";
  const auto b = dir_ / "b";
  const auto spec = spec_path("balls_in_bins.json");
  EXPECT_EQ(run({"simulate", spec, "--count", "1", "--seed", "7", "--out", a.string()}).code, 0);
  EXPECT_EQ(run({"simulate", spec, "--count", "1", "--seed", "7", "--out", b.string(), "--jobs",
                 "3"})
                .code,
            0);
  const std::string first = slurp(a / "trajectory_0.csv");
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(b / "trajectory_0.csv"));
}

TEST_F(CliTest, SimulateEndsNearTheLimit) {
  json doc = dem::testing::balls_doc(100, 1e-3, 2.0);
  const auto spec = write("small.json", doc.dump());
  const auto out = dir_ / "runs";
  ASSERT_EQ(run({"simulate", spec, "--count", "40", "--seed", "3", "--out", out.string()}).code,
            0);
  double mean = 0.0;
  for (int i = 0; i < 40; ++i) {
    std::istringstream lines(slurp(out / ("trajectory_" + std::to_string(i) + ".csv")));
    std::string line, last;
    while (std::getline(lines, line)) last = line;
    const auto first_comma = last.find(',');
    const double y = std::stod(last.substr(first_comma + 1));
    mean += y / 100.0 / 40.0;
  }
  const double sigma = 2.0 - 3.0 * std::exp(2.0) * 1e-3;
  EXPECT_NEAR(mean, std::exp(-sigma), 0.02);
}

TEST_F(CliTest, SimulateUnknownPlugin) {
  json doc = dem::testing::balls_doc(100, 1e-3);
  doc["drift"]["plugin"] = "martian";
  EXPECT_EQ(run({"simulate", write("x.json", doc.dump()), "--out", dir_.string()}).code, 2);
}

TEST_F(CliTest, VerifyPassWritesReport) {
  const auto report = (dir_ / "r.json").string();
  const Result r = run({"verify", spec_path("greedy_matching.json"), "--count", "3", "--report",
                        report});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("status: pass"), std::string::npos);
  const json j = json::parse(slurp(report));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["ensemble_size"], 3);
}

TEST_F(CliTest, VerifyFailureExitsOne) {
  json doc = dem::testing::balls_doc(5000, 0.02, 1.0, -0.2, 0.05, 1.2);
  doc["beta"] = 0.5;
  const Result r = run({"verify", write("adv.json", doc.dump()), "--count", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("hypotheses-failed"), std::string::npos);
}

TEST_F(CliTest, VerifyRefusals) {
  const auto spec = spec_path("greedy_matching.json");
  EXPECT_EQ(run({"verify", spec, "--mode", "truncated", "--count", "1"}).code, 2);
  EXPECT_EQ(run({"verify", spec, "--mode", "sideways", "--count", "1"}).code, 2);
  EXPECT_EQ(run({"verify", spec, "--check", "lenient", "--count", "1"}).code, 2);
  EXPECT_EQ(run({"verify", spec, "--count", "0"}).code, 2);
  json doc = dem::testing::balls_doc(100, 0.001);
  EXPECT_EQ(run({"verify", write("inadm.json", doc.dump())}).code, 2);
}

TEST_F(CliTest, VerifyModesAndAnchors) {
  const auto spec = spec_path("balls_in_bins_truncated.json");
  EXPECT_EQ(run({"verify", spec, "--mode", "truncated", "--count", "2", "--jobs", "2"}).code, 0);
  EXPECT_EQ(run({"verify", spec, "--mode", "averaged", "--count", "2", "--check", "proof"}).code,
            0);
  const auto anchors = write("anchors.json", "[[1.0], [0.99]]");
  const auto report = (dir_ / "multi.json").string();
  const Result r = run({"verify", spec, "--count", "2", "--anchors", anchors, "--report", report});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("== anchor 1"), std::string::npos);
  EXPECT_EQ(json::parse(slurp(report)).size(), 2u);
  EXPECT_EQ(run({"verify", spec, "--count", "1", "--anchors", write("bad.json", "[[3.0]]")}).code,
            2);
}

}  // namespace
