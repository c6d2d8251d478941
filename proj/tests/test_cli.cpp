// Copyright 2026 The qpart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qpart/cli.hpp"

namespace qpart {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qpart");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qpart_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const json& j) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << j.dump();
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string sample(const std::string& name) { return std::string(QPART_SAMPLES_DIR) + "/" + name; }

TEST_F(CliTest, ValuationRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto v = oracle::random_xos(4, 3, seed);
    const auto p = write("v.json", valuation_to_json(v));
    const auto back = load_valuation(p);
    ASSERT_EQ(back.m(), v.m());
    for (Mask s = 0; s < v.size(); ++s) EXPECT_EQ(back(s), v(s));
  }
}

TEST_F(CliTest, ZeroDenominatorIsInputError) {
  const auto p = write("bad.json", json{{"m", 1}, {"values", {"0", "1/0"}}});
  const auto r = run({"classify", "--in", p, "--q", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("values[1]"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedInputsExitTwo) {
  EXPECT_EQ(run({"classify", "--in", path("missing.json"), "--q", "2"}).code, 2);
  EXPECT_EQ(run({"classify", "--bogus"}).code, 2);
  EXPECT_EQ(run({"prices", "--in", sample("xos4.json"), "--partition", "1,2|2,3|4"}).code, 2);
  EXPECT_EQ(run({"prices", "--in", sample("xos4.json"), "--partition", "1,9"}).code, 2);
  EXPECT_EQ(run({"roots", "--alpha", "0.1", "--q", "4", "--s", "2"}).code, 2);
  const auto wide = write("wide.json", json{{"generator", {{"kind", "threshold"}, {"m", 9}, {"top", "2"}}}});
  EXPECT_EQ(run({"classify", "--in", wide, "--q", "2"}).code, 2);
  const auto gen = write("gen.json", json{{"generator", {{"kind", "nope"}, {"m", 3}}}});
  const auto r = run({"classify", "--in", gen, "--q", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("generator.kind"), std::string::npos) << r.err;
}

TEST_F(CliTest, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("classify"), std::string::npos);
}

TEST_F(CliTest, LevelPrintsInteger) {
  const auto p = write("t.json", json{{"generator", {{"kind", "threshold"}, {"m", 5}, {"top", "3/2"}}}});
  const auto r = run({"classify", "--in", p, "--level"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "3\n");
  EXPECT_EQ(run({"classify", "--in", p, "--level", "--linear"}).out, "3\n");
}

TEST_F(CliTest, WitnessReverifies) {
  const auto rep = path("rep.json");
  const auto wit = path("w.json");
  const auto r = run({"--format", "json", "--out", rep, "classify", "--in", sample("binomial6.json"), "--q", "3",
                      "--witness", wit});
  ASSERT_EQ(r.code, 1);
  EXPECT_EQ(run({"classify", "--in", sample("binomial6.json"), "--check-witness", rep}).code, 0);
  EXPECT_EQ(run({"classify", "--in", sample("binomial6.json"), "--check-witness", wit}).code, 0);
  EXPECT_EQ(read_json_file(wit)["rhs"], "15");

  json tampered = read_json_file(wit);
  tampered["lhs"] = "15";
  const auto bad = write("bad.json", tampered);
  EXPECT_EQ(run({"classify", "--in", sample("binomial6.json"), "--check-witness", bad}).code, 1);
}

TEST_F(CliTest, MphCheckAcceptsRepresentation) {
  const auto rep = write("mph.json", mph_to_json(binomial_floor_representation(6, 2)));
  const auto r = run({"--format", "json", "mph", "--in", sample("binomial6.json"), "--check", rep});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(json::parse(r.out)["max_hyperedge"], 2);

  const auto out = path("xos_rep.json");
  ASSERT_EQ(run({"--format", "json", "--out", out, "mph", "--in", sample("xos4.json"), "--q", "4"}).code, 0);
  const auto only = write("only.json", read_json_file(out)["representation"]);
  EXPECT_EQ(run({"mph", "--in", sample("xos4.json"), "--check", only}).code, 0);
  EXPECT_EQ(run({"mph", "--in", sample("threshold4.json"), "--check", only}).code, 1);
}

TEST_F(CliTest, TailsCsvIsDeterministic) {
  const std::vector<std::string> args{"tails", "--in", sample("xos4.json"), "--q", "4", "--n", "5000", "--seed", "9"};
  const auto a = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "x,empirical_survival,bound_qpart,bound_schechtman");
  auto threaded = args;
  threaded.insert(threaded.begin(), {"--threads", "3"});
  EXPECT_EQ(run(threaded).out, a.out);

  const auto f1 = path("a.csv");
  const auto f2 = path("b.csv");
  auto to_file = [&](const std::string& f) {
    auto v = args;
    v.insert(v.begin(), {"--out", f});
    return run(v).code;
  };
  ASSERT_EQ(to_file(f1), 0);
  ASSERT_EQ(to_file(f2), 0);
  std::ifstream i1(f1), i2(f2);
  std::stringstream s1, s2;
  s1 << i1.rdbuf();
  s2 << i2.rdbuf();
  EXPECT_EQ(s1.str(), a.out);
  EXPECT_EQ(s1.str(), s2.str());
}

TEST_F(CliTest, VerifySmoothnessPasses) {
  const auto r = run({"verify", "--suite", "smoothness"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(run({"verify", "--suite", "unknown"}).code, 2);
}

TEST_F(CliTest, SimulateSampleMarket) {
  const auto r = run({"--format", "json", "simulate", "--market", sample("market.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["welfare"], "6");
  EXPECT_EQ(j["revenue"], "2");
  EXPECT_EQ(j["opt_welfare"], "7");
  EXPECT_EQ(j["accounting_identity"], true);
}

TEST_F(CliTest, PricesInfeasibleExitsOne) {
  const auto r = run({"--format", "json", "prices", "--in", sample("binomial6.json"), "--partition", "1,2|3,4|5,6"});
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["lp_value"], "45/4");
  EXPECT_EQ(j["ok"], false);
}

TEST_F(CliTest, ThreadsFromEnvironment) {
  ::setenv("QPART_THREADS", "zero", 1);
  EXPECT_EQ(run({"roots", "--alpha", "1", "--q", "2", "--s", "1"}).code, 2);
  ::setenv("QPART_THREADS", "2", 1);
  EXPECT_EQ(run({"classify", "--in", sample("xos4.json"), "--q", "4"}).code, 0);
  ::unsetenv("QPART_THREADS");
}

}  // namespace
}  // namespace qpart
