#include "hkd/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace hkd::cli {
namespace {

struct Run {
  int code = -1;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hkdlab");
  std::ostringstream out, err;
  Run r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data_path(const std::string& name) { return std::string(HKDLAB_TEST_DATA_DIR) + "/" + name; }

TEST(CliCheck, ConstantProjectorIsNonuniformButPasses) {
  const auto r = run_cli({"check", "--example", "dicho-2d-constantP", "--h", "exp:1", "--k", "exp:1"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  const Json j = r.json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"config", "structural", "envelopes", "norms", "theorems",
                                            "violations", "meta"}));
  EXPECT_EQ(j["meta"]["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["envelopes"]["uniformity"]["dichotomy"]["verdict"], "nonuniform");
  EXPECT_NEAR(j["envelopes"]["dichotomy"]["second_req"].back().get<double>(), 27.97344519650268, 1e-9);
  EXPECT_TRUE(j["structural"]["pass"].get<bool>());
  EXPECT_FALSE(j["meta"].contains("wall_time_s"));
}

TEST(CliCheck, LiteralFlagsInvarianceDefect) {
  const auto r = run_cli({"check", "--example", "dicho-2d-literal", "--tmax", "2", "--grid-points", "21"});
  EXPECT_EQ(r.code, kExitFail);
  const Json j = r.json();
  EXPECT_FALSE(j["structural"]["invariance"]["pass"].get<bool>());
  bool found = false;
  for (const auto& row : j["structural"]["invariance"]["from_origin"])
    if (row["t"] == 1.0 && row["probe"] == 1) {
      EXPECT_NEAR(row["defect"].get<double>(), 1.7783105663039, 1e-3);
      found = true;
    }
  EXPECT_TRUE(found);
  EXPECT_FALSE(j["violations"].empty());
  EXPECT_NE(r.err.find("structural checks failed"), std::string::npos);
}

TEST(CliCheck, SinglePointGridIsTrivial) {
  const auto r = run_cli({"check", "--example", "scalar-ulnu", "--u", "exp-shift:1", "--grid-points", "1"});
  EXPECT_EQ(r.code, kExitPass) << r.err;
  EXPECT_EQ(r.json()["envelopes"]["dichotomy"]["t"].size(), 1u);
}

TEST(CliCheck, CsvEnvelopeTable) {
  const auto r = run_cli({"check", "--example", "split-exp", "--tmax", "1", "--grid-points", "11", "--format", "csv"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,N1_req,N2_req,hull,M1_req,M2_req,growth_hull");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 11);
}

TEST(CliCheck, TableRateFromFile) {
  const std::string path = data_path("rate_table.csv");
  {
    std::ofstream f(path);
    f << "t,value\n0,1\n5,2\n10,3\n20,4\n";
  }
  const auto r = run_cli({"check", "--example", "split-exp", "--h", "table:" + path, "--tmax", "2", "--grid-points", "5"});
  EXPECT_EQ(r.code, kExitPass) << r.err;
  EXPECT_TRUE(r.json()["structural"]["rates"]["h"]["pass"].get<bool>());
}

TEST(CliCheck, TimingIsOptIn) {
  const auto r = run_cli({"check", "--example", "identity-2d", "--tmax", "1", "--grid-points", "3", "--timing"});
  EXPECT_TRUE(r.json()["meta"].contains("wall_time_s"));
}

TEST(CliUsage, ErrorsExitTwo) {
  EXPECT_EQ(run_cli({"check", "--example", "nope"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "--example", "split-exp", "--h", "exp:-1"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "--example", "split-exp", "--h", "table:/nonexistent.csv"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "--example", "split-exp", "--tmax", "0"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "--example", "split-exp", "--grid-points", "0"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "--example", "split-exp", "--format", "xml"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "--example", "split-exp", "--u", "exp-shift:1"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"norms", "--example", "split-exp", "--kind", "other"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"norms", "--example", "split-exp", "--kind", "growth", "--probe", "1,2,3"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"norms", "--example", "split-exp", "--kind", "growth", "--probe", "1,x"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"reproduce", "figure-3"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kExitPass);
}

TEST(CliNorms, DichotomyRowAtOrigin) {
  const auto r = run_cli({"norms", "--example", "dicho-2d-constantP", "--kind", "dichotomy", "--probe", "1,0",
                          "--tmax", "3", "--grid-points", "31"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  const Json j = r.json();
  const auto& row = j["norms"]["rows"][0];
  EXPECT_EQ(row["t"], 0.0);
  EXPECT_NEAR(row["value"].get<double>(), 1.0, 1e-14);
  EXPECT_EQ(j["norms"]["verdict"], "pass");
}

TEST(CliNorms, ZeroProbeGivesZeroRows) {
  const auto r = run_cli({"norms", "--example", "dicho-2d-repaired", "--kind", "dichotomy", "--probe", "0,0",
                          "--tmax", "2", "--grid-points", "11"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  for (const auto& row : r.json()["norms"]["rows"]) EXPECT_EQ(row["value"], 0.0);
}

TEST(CliNorms, GrowthRowAtOrigin) {
  const auto r = run_cli({"norms", "--example", "growth-not-dicho", "--kind", "growth", "--probe", "1,0",
                          "--tmax", "3", "--grid-points", "31"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  EXPECT_NEAR(r.json()["norms"]["rows"][0]["value"].get<double>(), 1.0, 1e-14);
}

TEST(CliNorms, BoundsBracketEveryValue) {
  const auto r = run_cli({"norms", "--example", "dicho-2d-repaired", "--kind", "growth", "--probe", "0.3,-2",
                          "--probe", "1,1", "--tmax", "2", "--grid-points", "21", "--format", "csv"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,probe,value,lower_bound,upper_bound");
  int rows = 0;
  while (std::getline(in, line)) {
    double t, value, lower, upper;
    int probe;
    char c;
    std::istringstream fields(line);
    fields >> t >> c >> probe >> c >> value >> c >> lower >> c >> upper;
    EXPECT_LE(lower, value * (1 + 1e-12));
    EXPECT_LE(value, upper * (1 + 1e-12));
    ++rows;
  }
  EXPECT_EQ(rows, 42);
}

TEST(CliNorms, DichotomyOnNonDichotomicSystemFailsPrecondition) {
  const auto r = run_cli({"norms", "--example", "growth-not-dicho", "--kind", "dichotomy", "--tmax", "5",
                          "--grid-points", "51"});
  EXPECT_EQ(r.code, kExitFail);
  EXPECT_EQ(r.json()["norms"]["verdict"], "precondition-failed");
  EXPECT_NE(r.err.find("precondition"), std::string::npos);
}

TEST(CliReproduce, NonuniformExample) {
  const auto r = run_cli({"reproduce", "nonuniform-example"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["envelopes"]["uniformity"]["verdict"], "nonuniform");
  for (const auto& g : j["theorems"]["golden"]) EXPECT_TRUE(g["pass"].get<bool>()) << g.dump();
}

TEST(CliReproduce, GrowthNotDicho) {
  const auto r = run_cli({"reproduce", "growth-not-dicho", "--format", "csv"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,M1_req,M2_req,N1_req");
}

TEST(CliReproduce, OutFileMatchesStdout) {
  const std::string path = data_path("nonuniform.json");
  const auto a = run_cli({"reproduce", "nonuniform-example", "--out", path});
  ASSERT_EQ(a.code, kExitPass);
  EXPECT_TRUE(a.out.empty());
  std::ifstream f(path, std::ios::binary);
  const std::string written((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(written, run_cli({"reproduce", "nonuniform-example"}).out);
}

TEST(CliConfig, ProbeParsing) {
  const Vector v = parse_probe("1.5,-2e-3", 2);
  EXPECT_EQ(v[0], 1.5);
  EXPECT_EQ(v[1], -2e-3);
  EXPECT_THROW(parse_probe("1,", 2), UsageError);
  EXPECT_THROW(parse_probe("", 1), UsageError);
  EXPECT_THROW(parse_probe("nan", 1), UsageError);
}

TEST(CliConfig, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(27.973445196502677), "27.973445196502677");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_TRUE(number_or_null(INFINITY).is_null());
}

}  // namespace
}  // namespace hkd::cli
