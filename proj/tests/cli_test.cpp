// Copyright 2026 The fairsynth Authors.
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
#include <stdlib.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "fairsynth/cli.hpp"
#include "fairsynth/reports.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace fairsynth {
namespace {

using testing::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = CliMain(args, out, err);
  return {code, out.str(), err.str()};
}

class SeedEnv {
 public:
  explicit SeedEnv(const char* value) { setenv(kSeedEnvVar, value, 1); }
  ~SeedEnv() { unsetenv(kSeedEnvVar); }
};

nlohmann::json Json(const std::filesystem::path& p) {
  return nlohmann::json::parse(ReadTextFile(p));
}

TEST(Cli, RunWritesReports) {
  TempDir dir;
  const Outcome o = Cli({"run", "--out", (dir / "r").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  for (const char* f : {kQualityFile, kFairnessFile, kSummaryFile, kSyntheticFile}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "r" / f)) << f;
  }
  const auto summary = Json(dir / "r" / kSummaryFile);
  EXPECT_EQ(summary["command"], "run");
  EXPECT_EQ(summary["data"], "demo");
  EXPECT_EQ(summary["config"]["backend"], "gaussian_copula");
  const auto fairness = Json(dir / "r" / kFairnessFile);
  EXPECT_TRUE(fairness["by_attribute"].contains("Race"));
  EXPECT_TRUE(fairness["by_attribute"].contains("Sex"));
}

TEST(Cli, RunTwiceIsByteIdentical) {
  TempDir dir;
  ASSERT_EQ(Cli({"run", "--out", (dir / "a").string()}).code, kExitOk);
  ASSERT_EQ(Cli({"run", "--out", (dir / "b").string()}).code, kExitOk);
  for (const char* f : {kQualityFile, kFairnessFile, kSummaryFile, kSyntheticFile}) {
    EXPECT_EQ(ReadTextFile(dir / "a" / f), ReadTextFile(dir / "b" / f)) << f;
  }
}

TEST(Cli, SeedEnvironmentOverridesFlag) {
  TempDir dir;
  ASSERT_EQ(Cli({"run", "--seed", "7", "--out", (dir / "flag").string()}).code, kExitOk);
  {
    SeedEnv env("7");
    ASSERT_EQ(Cli({"run", "--seed", "3", "--out", (dir / "env").string()}).code, kExitOk);
  }
  EXPECT_EQ(ReadTextFile(dir / "flag" / kSyntheticFile), ReadTextFile(dir / "env" / kSyntheticFile));
  EXPECT_EQ(Json(dir / "env" / kSummaryFile)["config"]["seed"], 7);
  SeedEnv bad("seven");
  const Outcome o = Cli({"run", "--out", (dir / "bad").string()});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_NE(o.err.find(kSeedEnvVar), std::string::npos);
}

TEST(Cli, ScoreFromReports) {
  TempDir dir;
  WriteTextFile(dir / "q.json", R"({"overall_score": 0.91})");
  WriteTextFile(dir / "f.json", R"({"max_rel_fpr": 2.67, "tstr": {"degenerate": false}})");
  const Outcome o = Cli({"score", "--quality", (dir / "q.json").string(), "--fairness",
                         (dir / "f.json").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(o.out.rfind("synth_score 0.68\n", 0), 0u) << o.out;
  EXPECT_NE(o.out.find("\"synth_score\": 0.681648"), std::string::npos);

  WriteTextFile(dir / "inf.json", R"({"max_rel_fpr": "inf"})");
  const Outcome inf = Cli({"score", "--quality", (dir / "q.json").string(), "--fairness",
                           (dir / "inf.json").string()});
  ASSERT_EQ(inf.code, kExitOk) << inf.err;
  EXPECT_EQ(inf.out.rfind("synth_score 0.00\n", 0), 0u);

  WriteTextFile(dir / "q2.json", R"({"overall_score": 1.5})");
  EXPECT_EQ(Cli({"score", "--quality", (dir / "q2.json").string(), "--fairness",
                 (dir / "f.json").string()}).code,
            kExitValidation);
  EXPECT_EQ(Cli({"score", "--quality", (dir / "none.json").string(), "--fairness",
                 (dir / "f.json").string()}).code,
            kExitRuntime);
}

TEST(Cli, UnknownBackend) {
  TempDir dir;
  const Outcome o = Cli({"run", "--backend", "nope", "--out", dir.path().string()});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_NE(o.err.find("gaussian_copula"), std::string::npos);
  EXPECT_NE(o.err.find("independent"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Cli({}).code, kExitValidation);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitValidation);
  EXPECT_EQ(Cli({"run"}).code, kExitValidation);  // --out missing
  EXPECT_EQ(Cli({"run", "--out", "x", "--train-rows", "abc"}).code, kExitValidation);
  EXPECT_EQ(Cli({"sample", "--out", "x"}).code, kExitValidation);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST(Cli, InsufficientRowsIsValidationError) {
  TempDir dir;
  const Outcome o = Cli({"run", "--train-rows", "1900", "--out", dir.path().string()});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_NE(o.err.find("InsufficientRows"), std::string::npos) << o.err;
}

TEST(Cli, DemoThenRunOnCsv) {
  TempDir dir;
  ASSERT_EQ(Cli({"demo", "--rows", "1500", "--seed", "2", "--out", (dir / "d").string()}).code,
            kExitOk);
  const Outcome o = Cli({"run", "--data", (dir / "d" / "demo.csv").string(), "--metadata",
                         (dir / "d" / "metadata.json").string(), "--train-rows", "800",
                         "--out", (dir / "r").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(Json(dir / "r" / kSummaryFile)["data"], "csv");
  // CSV without metadata is rejected.
  EXPECT_EQ(Cli({"run", "--data", (dir / "d" / "demo.csv").string(), "--out",
                 (dir / "x").string()}).code,
            kExitValidation);
}

TEST(Cli, FitSampleEvaluateMatchesRun) {
  TempDir dir;
  ASSERT_EQ(Cli({"run", "--seed", "4", "--out", (dir / "run").string()}).code, kExitOk);
  ASSERT_EQ(Cli({"fit", "--seed", "4", "--out", (dir / "fit").string()}).code, kExitOk);
  ASSERT_TRUE(std::filesystem::exists(dir / "fit" / kModelFile));
  ASSERT_EQ(Cli({"sample", "--seed", "4", "--model", (dir / "fit" / kModelFile).string(),
                 "--out", (dir / "sample").string()}).code,
            kExitOk);
  EXPECT_EQ(ReadTextFile(dir / "sample" / kSyntheticFile),
            ReadTextFile(dir / "run" / kSyntheticFile));
  const Outcome ev = Cli({"evaluate", "--seed", "4", "--synthetic",
                          (dir / "sample" / kSyntheticFile).string(), "--out",
                          (dir / "eval").string()});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  EXPECT_EQ(ReadTextFile(dir / "eval" / kQualityFile), ReadTextFile(dir / "run" / kQualityFile));
  EXPECT_EQ(ReadTextFile(dir / "eval" / kFairnessFile),
            ReadTextFile(dir / "run" / kFairnessFile));
}

TEST(Cli, SuperviseSummary) {
  TempDir dir;
  const Outcome o = Cli({"supervise", "--max-refinements", "1", "--out", dir.path().string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_NE(o.out.find("stop_reason"), std::string::npos);
  const auto summary = Json(dir / kSummaryFile);
  EXPECT_EQ(summary["command"], "supervise");
  EXPECT_LE(summary["history"].size(), 2u);
  EXPECT_TRUE(summary.contains("best_iteration"));
  EXPECT_TRUE(std::filesystem::exists(dir / kQualityFile));
}

TEST(Cli, SuperviseAllFailedExitsRuntime) {
  TempDir dir;
  WriteTextFile(dir / "b.json", R"([{"name": "broken", "command": ["false"]}])");
  const Outcome o = Cli({"supervise", "--backend", "broken", "--backends-file",
                         (dir / "b.json").string(), "--max-refinements", "1", "--out",
                         (dir / "o").string()});
  EXPECT_EQ(o.code, kExitRuntime);
  EXPECT_EQ(Json(dir / "o" / kSummaryFile)["stop_reason"], "all_failed");
}

TEST(Cli, BenchTableAndJson) {
  TempDir dir;
  const Outcome o = Cli({"bench", "--out", dir.path().string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_NE(o.out.find("gaussian_copula"), std::string::npos);
  EXPECT_NE(o.out.find("independent"), std::string::npos);
  EXPECT_EQ(ReadTextFile(dir / kBenchTableFile), o.out);
  const auto doc = Json(dir / kBenchJsonFile);
  EXPECT_EQ(doc["config"]["train_rows"], 1000);
  EXPECT_EQ(doc["rows"].size(), 2u);
  EXPECT_EQ(Cli({"bench", "--backends", "independent,nope"}).code, kExitValidation);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = FAIRSYNTH_CLI_PATH;
  EXPECT_EQ(std::system((bin + " --help > /dev/null").c_str()), 0);
  const int status = std::system((bin + " run --backend nope --out /tmp/x 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitValidation);
}

}  // namespace
}  // namespace fairsynth
