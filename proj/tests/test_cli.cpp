// Copyright 2026 The entlearn Authors
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

#include "entlearn/cli.hpp"
#include "entlearn/json_io.hpp"

using namespace entlearn;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const std::filesystem::path& p) {
  const auto text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("entlearn_test_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, UnknownCommandPrintsUsage) {
  const auto r = run_cli({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, cli::kExitValidation);
  EXPECT_EQ(run_cli({"gen-static", "--bogus-flag", "1"}).code, cli::kExitValidation);
}

TEST_F(CliTest, GradcheckPasses) {
  const auto r = run_cli({"gradcheck", "--arch", "dynamic", "--seed", "7"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("max relative error"), std::string::npos);
  EXPECT_EQ(run_cli({"gradcheck", "--arch", "static", "--seed", "7"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"gradcheck", "--arch", "recurrent"}).code, cli::kExitValidation);
}

TEST_F(CliTest, GenSweepWritesDatasetAndTable) {
  const auto r = run_cli({"gen-sweep", "--model", "xxz", "--output", path("sweep.jsonl")});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(line_count(path("sweep.jsonl")), 52u);
  EXPECT_EQ(line_count(path("sweep.jsonl.csv")), 52u);
  EXPECT_EQ(slurp(path("sweep.jsonl.csv")).substr(0, 32), "sweep_value,energy,gap,degenerat");
  EXPECT_TRUE(std::filesystem::exists(path("sweep.jsonl.config.json")));
  EXPECT_EQ(run_cli({"oracle", "--dataset", path("sweep.jsonl")}).code, cli::kExitOk);
}

TEST_F(CliTest, ConfigDrivenPipeline) {
  const Json config{
      {"gen_static", {{"n_qubits", 3}, {"n_samples", 40}, {"seed", 5}, {"metrics", {"renyi:2:1", "pt:3:1:2"}},
                      {"output", path("data.jsonl")}}},
      {"train",
       {{"dataset", path("data.jsonl")},
        {"output", path("model.json")},
        {"arch", {{"hidden", {8}}}},
        {"config", {{"max_epochs", 3}, {"batch_size", 8}, {"seed", 1}}}}},
      {"predict", {{"model", path("model.json")}, {"dataset", path("data.jsonl")}, {"output", path("preds.jsonl")}}},
      {"evaluate", {{"predictions", path("preds.jsonl")}, {"oracle", true}, {"output_prefix", path("eval")}}}};
  write_text_file(path("pipeline.json"), dump_json(config));

  for (const char* cmd : {"gen-static", "train", "predict", "evaluate"}) {
    const auto r = run_cli({"--config", path("pipeline.json"), cmd});
    EXPECT_EQ(r.code, cli::kExitOk) << cmd << ": " << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1) << r.out;
  }
  EXPECT_EQ(line_count(path("data.jsonl")), 41u);
  EXPECT_EQ(line_count(path("model.json.log.csv")), 4u);
  EXPECT_EQ(line_count(path("eval_summary.csv")), 3u);
  const auto resolved = read_json_file(path("model.json.config.json"));
  EXPECT_EQ(resolved["train"]["config"]["max_epochs"], 3);
  EXPECT_EQ(resolved["train"]["config"]["learning_rate"], 1e-3);

  const auto first_data = slurp(path("data.jsonl"));
  const auto first_model = slurp(path("model.json"));
  EXPECT_EQ(run_cli({"--config", path("pipeline.json"), "gen-static"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"--config", path("pipeline.json"), "train"}).code, cli::kExitOk);
  EXPECT_EQ(slurp(path("data.jsonl")), first_data);
  EXPECT_EQ(slurp(path("model.json")), first_model);

  const auto r = run_cli({"--config", path("pipeline.json"), "train", "--epochs", "2", "--output", path("m2.json")});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(line_count(path("m2.json.log.csv")), 3u);
}

TEST_F(CliTest, ErrorsMapToExitCodes) {
  EXPECT_EQ(run_cli({"oracle", "--dataset", path("missing.jsonl")}).code, cli::kExitIo);
  EXPECT_EQ(run_cli({"--config", path("missing.json"), "oracle"}).code, cli::kExitIo);
  write_text_file(path("bad.json"), "{not json");
  EXPECT_EQ(run_cli({"--config", path("bad.json"), "oracle"}).code, cli::kExitValidation);
  EXPECT_EQ(run_cli({"gen-static", "--samples", "2"}).code, cli::kExitValidation);
  EXPECT_EQ(run_cli({"gen-static", "--n-qubits", "12", "--samples", "2", "--output", path("x.jsonl")}).code,
            cli::kExitValidation);

  ASSERT_EQ(run_cli({"gen-static", "--n-qubits", "2", "--samples", "4", "--metric", "renyi:2:1", "--output",
                     path("two.jsonl")})
                .code,
            cli::kExitOk);
  ASSERT_EQ(run_cli({"gen-static", "--n-qubits", "3", "--samples", "4", "--metric", "renyi:2:1", "--output",
                     path("three.jsonl")})
                .code,
            cli::kExitOk);
  ASSERT_EQ(run_cli({"train", "--dataset", path("two.jsonl"), "--output", path("m.json"), "--hidden", "4", "--epochs",
                     "1"})
                .code,
            cli::kExitOk);
  const auto mismatch = run_cli({"predict", "--model", path("m.json"), "--dataset", path("three.jsonl"), "--output",
                                 path("p.jsonl")});
  EXPECT_EQ(mismatch.code, cli::kExitValidation);
  EXPECT_FALSE(std::filesystem::exists(path("p.jsonl")));
}

TEST_F(CliTest, OracleDetectsTamperedTargets) {
  ASSERT_EQ(run_cli({"gen-static", "--n-qubits", "2", "--samples", "3", "--metric", "renyi:2:1", "--output",
                     path("d.jsonl")})
                .code,
            cli::kExitOk);
  EXPECT_EQ(run_cli({"oracle", "--dataset", path("d.jsonl")}).code, cli::kExitOk);
  std::string fixed = slurp(path("d.jsonl"));
  const auto tpos = fixed.rfind("\"targets\":[") + 11;
  const auto tend = fixed.find(']', tpos);
  fixed.replace(tpos, tend - tpos, "0.123");
  write_text_file(path("d.jsonl"), fixed);
  const auto r = run_cli({"oracle", "--dataset", path("d.jsonl")});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.out.find("EXCEEDS"), std::string::npos);
}
