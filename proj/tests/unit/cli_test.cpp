// Copyright 2026 The pwsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pwsel/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

namespace pwsel::cli {
namespace {

using nlohmann::json;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

json body_of(const Outcome& o) { return json::parse(o.out).at("body"); }

TEST(CliTest, ExactPiTestPasses) {
  const auto o = invoke({"pi-test", "--exact", "--q", "2", "--m", "2", "--n", "3", "--d", "3"});
  EXPECT_EQ(o.code, kExitPass) << o.err;
  const auto doc = json::parse(o.out);
  EXPECT_EQ(doc.at("schema"), 1);
  EXPECT_EQ(doc.at("verdict"), "pass");
  EXPECT_EQ(doc.at("header").at("command"), "pi-test");
  EXPECT_TRUE(doc.at("header").contains("timestamp"));
  EXPECT_TRUE(doc.at("header").contains("version"));
}

TEST(CliTest, MutationFails) {
  EXPECT_EQ(invoke({"pi-test", "--exact", "--duplicate-column"}).code, kExitFail);
  EXPECT_EQ(invoke({"pi-test", "--exact", "--unordered", "--d", "2", "--n", "2",
                    "--weight-numerator", "2"})
                .code,
            kExitFail);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({"crs-hardness", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(invoke({"crs-hardness", "--q", "4", "--trials", "10"}).code, kExitUsage);
  EXPECT_EQ(invoke({"crs-hardness", "--trials", "0"}).code, kExitUsage);
  EXPECT_EQ(invoke({"certify", "--instance", "bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({}).code, kExitUsage);
}

TEST(CliTest, HelpExitsZero) { EXPECT_EQ(invoke({"--help"}).code, kExitPass); }

TEST(CliTest, BodyIndependentOfThreads) {
  const std::vector<std::string> base = {"crs-hardness", "--q", "3", "--d", "4", "--c", "2",
                                         "--trials", "20000", "--seed", "5"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const auto a = invoke(one), b = invoke(four);
  ASSERT_EQ(a.code, b.code);
  EXPECT_EQ(body_of(a), body_of(b));
  EXPECT_EQ(json::parse(a.out).at("header").at("config"),
            json::parse(b.out).at("header").at("config"));
}

TEST(CliTest, SeedChangesResult) {
  const std::vector<std::string> base = {"crs-hardness", "--q", "3", "--d", "4", "--c", "2",
                                         "--trials", "2000"};
  auto s1 = base, s2 = base;
  s1.insert(s1.end(), {"--seed", "1"});
  s2.insert(s2.end(), {"--seed", "2"});
  EXPECT_NE(body_of(invoke(s1)), body_of(invoke(s2)));
  EXPECT_EQ(body_of(invoke(s1)), body_of(invoke(s1)));
}

TEST(CliTest, SeedFromEnvironment) {
  ::setenv("PWSEL_SEED", "77", 1);
  const auto o = invoke({"crs-hardness", "--q", "3", "--d", "4", "--c", "2", "--trials", "100"});
  ::unsetenv("PWSEL_SEED");
  EXPECT_EQ(json::parse(o.out).at("header").at("seed"), 77);
  const auto d = invoke({"crs-hardness", "--q", "3", "--d", "4", "--c", "2", "--trials", "100"});
  EXPECT_EQ(json::parse(d.out).at("header").at("seed"), 1);
}

TEST(CliTest, ConfigFileAndOverride) {
  const auto path = std::filesystem::temp_directory_path() / "pwsel_cli_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"q": 3, "d": 4, "c": 2, "trials": 500})";
  }
  const auto from_file = invoke({"crs-hardness", "--config", path.string()});
  ASSERT_EQ(from_file.code, kExitPass) << from_file.err;
  const auto cfg = json::parse(from_file.out).at("header").at("config");
  EXPECT_EQ(cfg.at("trials"), 500);
  const auto flag = invoke({"crs-hardness", "--config", path.string(), "--trials", "700"});
  EXPECT_EQ(json::parse(flag.out).at("header").at("config").at("trials"), 700);
  std::filesystem::remove(path);
}

TEST(CliTest, CsvAndTextFormats) {
  const auto csv = invoke({"crs-hardness", "--q", "3", "--d", "4", "--c", "2", "--trials", "200",
                           "--format", "csv"});
  EXPECT_EQ(csv.out.rfind("name,mean,std_error,ci_low,ci_high,trials,target,pass", 0), 0u);
  const auto text = invoke({"crs-hardness", "--q", "3", "--d", "4", "--c", "2", "--trials", "200",
                            "--format", "text"});
  EXPECT_FALSE(text.out.empty());
  EXPECT_NE(text.out.find("E[Rank(A)]"), std::string::npos);
}

TEST(CliTest, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "pwsel_cli_test_out.json";
  const auto o = invoke({"sigma-props", "--kappa", "1", "2", "--seeds", "3", "--continuations",
                         "300", "--output", path.string()});
  EXPECT_EQ(o.code, kExitPass) << o.err;
  EXPECT_TRUE(o.out.empty());
  std::ifstream f(path);
  const auto doc = json::parse(f);
  EXPECT_EQ(doc.at("header").at("command"), "sigma-props");
  std::filesystem::remove(path);
}

TEST(CliTest, OcrsZeroCoinFails) {
  const auto o = invoke({"ocrs-bench", "--q", "3", "--d", "3", "--c", "2", "--trials", "20000",
                         "--coin", "0"});
  EXPECT_EQ(o.code, kExitFail);
  EXPECT_EQ(json::parse(o.out).at("verdict"), "fail");
}

TEST(CliTest, PartitionTraceIsLineDelimitedJson) {
  const auto path = std::filesystem::temp_directory_path() / "pwsel_cli_test_trace.jsonl";
  const auto o = invoke({"partition-bench", "--trials", "50", "--aux", "50", "--trace",
                         path.string(), "--threads", "4"});
  EXPECT_NE(o.code, kExitUsage) << o.err;
  std::ifstream f(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(f, line)) {
    EXPECT_NO_THROW(json::parse(line));
    ++lines;
  }
  EXPECT_GT(lines, 0u);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace pwsel::cli
