// Copyright 2026 The FrameBERT Authors.
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
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "framebert/cli.h"
#include "json.hpp"

namespace framebert {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "framebert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = Dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("framebert_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    // Small models and few epochs keep the end-to-end runs quick.
    std::ofstream(dir_ / "small.json") << R"({
      "pretrain_epochs": 1, "train_epochs": 1, "batch_size": 16,
      "sentence_encoder": {"hidden_dim": 8, "num_layers": 1, "num_heads": 2},
      "concept_encoder": {"hidden_dim": 8, "num_layers": 1, "num_heads": 2}
    })";
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& sub) const { return (dir_ / sub).string(); }
  std::string Config() const { return Path("small.json"); }

  fs::path dir_;
};

TEST_F(CliTest, HelpSucceedsForEverySubcommand) {
  EXPECT_EQ(Invoke({"--help"}).code, 0);
  for (const char* sub :
       {"gen-data", "pretrain-frames", "train", "eval", "ablate", "analyze"}) {
    Result r = Invoke({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Invoke({}).code, 1);
  EXPECT_EQ(Invoke({"fly"}).code, 1);
  EXPECT_EQ(Invoke({"gen-data", "--out", Path("x"), "--bogus"}).code, 1);
  Result r = Invoke({"eval", "--mode", "rand_in_eval"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--checkpoint"), std::string::npos) << r.err;
  EXPECT_EQ(Invoke({"pretrain-frames", "--out", Path("p"), "--lambda", "-1"}).code, 1);
  EXPECT_EQ(Invoke({"train", "--out", Path("t"), "--mode", "sideways"}).code, 1);
  EXPECT_EQ(Invoke({"train", "--config", Config(), "--out", Path("t")}).code, 1);
}

TEST_F(CliTest, IoErrorsExitTwo) {
  EXPECT_EQ(Invoke({"eval", "--checkpoint", Path("nothing")}).code, 2);
  EXPECT_EQ(Invoke({"pretrain-frames", "--data", Path("nothing"), "--out", Path("p")}).code,
            2);
}

TEST_F(CliTest, GenDataIsByteReproducible) {
  ASSERT_EQ(Invoke({"gen-data", "--seed", "42", "--out", Path("a")}).code, 0);
  ASSERT_EQ(Invoke({"gen-data", "--seed", "42", "--out", Path("b")}).code, 0);
  for (const char* f : {"frames_train.tsv", "frames_eval.tsv", "metaphor_train.tsv",
                        "metaphor_eval.tsv", "config.json"}) {
    const std::string a = ReadFile(dir_ / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, ReadFile(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, FlagsOverrideConfigAndRunsRecordResolvedConfig) {
  ASSERT_EQ(Invoke({"gen-data", "--seed", "3", "--out", Path("data")}).code, 0);
  Result r = Invoke({"pretrain-frames", "--config", Config(), "--data", Path("data"),
                  "--seed", "9", "--lambda", "1.5", "--epochs", "2", "--out",
                  Path("pre")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto cfg = nlohmann::json::parse(ReadFile(dir_ / "pre" / "config.json"));
  EXPECT_EQ(cfg["seed"], 9);
  EXPECT_EQ(cfg["lambda"], 1.5);
  EXPECT_EQ(cfg["pretrain_epochs"], 2);
  EXPECT_EQ(cfg["batch_size"], 16);
  EXPECT_EQ(cfg["sentence_encoder"]["hidden_dim"], 8);
  EXPECT_TRUE(fs::exists(dir_ / "pre" / "checkpoint" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir_ / "pre" / "log.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "pre" / "metrics.json"));
}

TEST_F(CliTest, AblateTableEqualsConcatenatedSingleRuns) {
  ASSERT_EQ(Invoke({"gen-data", "--seed", "7", "--out", Path("data")}).code, 0);
  const std::vector<std::string> common = {"--config", Config(), "--seed", "7",
                                           "--data", Path("data")};
  auto with = [&](std::vector<std::string> args) {
    args.insert(args.begin() + 1, common.begin(), common.end());
    return Invoke(args);
  };
  Result ablate = with({"ablate", "--out", Path("ablate")});
  ASSERT_EQ(ablate.code, 0) << ablate.err;
  ASSERT_EQ(with({"pretrain-frames", "--out", Path("pre")}).code, 0);

  std::string rows;
  for (const std::string mode :
       {"none", "rand_in_eval", "rand_in_train_and_eval", "no_frame_finetune"}) {
    std::vector<std::string> train = {"train", "--mode", mode, "--out",
                                      Path("train_" + mode)};
    if (mode != "no_frame_finetune") {
      train.push_back("--checkpoint");
      train.push_back(Path("pre/checkpoint"));
    }
    Result t = with(train);
    ASSERT_EQ(t.code, 0) << mode << ": " << t.err;
    Result e = with({"eval", "--mode", mode, "--checkpoint",
                     Path("train_" + mode + "/checkpoint"), "--out",
                     Path("eval_" + mode)});
    ASSERT_EQ(e.code, 0) << mode << ": " << e.err;
    rows += ReadFile(dir_ / ("eval_" + mode) / "metrics.tsv");
    EXPECT_EQ(ReadFile(dir_ / ("eval_" + mode) / "metrics.json"),
              ReadFile(dir_ / "ablate" / mode / "metrics.json"))
        << mode;
  }
  EXPECT_EQ(ReadFile(dir_ / "ablate" / "ablation.tsv"), rows);
  EXPECT_EQ(ablate.out, rows);

  Result analyze = with({"analyze", "--checkpoint", Path("ablate/trained"), "--k",
                         "2", "--out", Path("analyze")});
  ASSERT_EQ(analyze.code, 0) << analyze.err;
  auto report = nlohmann::json::parse(ReadFile(dir_ / "analyze" / "concepts.json"));
  EXPECT_EQ(report["k"], 2);
  EXPECT_EQ(report["samples"][0]["literal_frames"].size(), 2u);
  EXPECT_EQ(with({"analyze", "--checkpoint", Path("ablate/trained"), "--k", "13"})
                .code,
            1);
}

TEST_F(CliTest, IdenticalRunsWriteIdenticalFiles) {
  for (const char* out : {"r1", "r2"}) {
    ASSERT_EQ(Invoke({"pretrain-frames", "--config", Config(), "--seed", "4", "--out",
                   Path(out)})
                  .code,
              0);
  }
  for (const char* f : {"metrics.json", "config.json", "log.jsonl",
                        "checkpoint/manifest.json", "checkpoint/params.bin"}) {
    EXPECT_EQ(ReadFile(dir_ / "r1" / f), ReadFile(dir_ / "r2" / f)) << f;
  }
}

}  // namespace
}  // namespace framebert
