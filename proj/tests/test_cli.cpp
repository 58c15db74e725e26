/*
 * Copyright 2026 The DecGAN Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * End-to-end checks of the installed binary: every assertion here goes
 * through the real argv surface, exit codes included.
 */
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <doctest.h>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "decgan_cli_tests";

struct CliResult {
  int exit_code;
  std::string output;  // stdout and stderr combined
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::create_directories(kRoot);
  const fs::path log = kRoot / ("log" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      "\""s + DECGAN_BIN + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

// Small spec and config shared by the tests below; training a handful of
// epochs on it takes well under a second.
const char* kSpecJson = R"({
  "n_seen_classes": 4,
  "n_unseen_classes": 2,
  "samples_per_class": 20,
  "feature_dim": 6,
  "embed_dim": 3,
  "cluster_std": 0.1,
  "seed": 7
})";

const char* kTrainJson = R"({
  "e1": 1, "e2": 1, "e3": 1,
  "batch_size": 8,
  "learning_rate": 0.003,
  "dims": {"noise_dim": 3, "prior_dim": 4, "hidden_dim": 6},
  "eval": {"n_per_class": 10, "cls_epochs": 20}
})";

// Builds the shared dataset once; later tests reuse the manifest.
const std::string& dataset_manifest() {
  static std::string manifest = [] {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
    write_file(kRoot / "spec.json", kSpecJson);
    write_file(kRoot / "train.json", kTrainJson);
    const CliResult r = run_cli("synth-data --config " +
                                (kRoot / "spec.json").string() + " --out " +
                                (kRoot / "data").string());
    REQUIRE(r.exit_code == 0);
    return (kRoot / "data" / "manifest.json").string();
  }();
  return manifest;
}

std::set<int> telemetry_stages(const fs::path& csv) {
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  std::set<int> stages;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    stages.insert(std::stoi(line.substr(a + 1, b - a - 1)));
  }
  return stages;
}

}  // namespace

TEST_CASE("synth-data is reproducible byte for byte") {
  dataset_manifest();
  const CliResult r = run_cli("synth-data --config " +
                              (kRoot / "spec.json").string() + " --out " +
                              (kRoot / "data2").string());
  REQUIRE(r.exit_code == 0);
  for (const char* part :
       {"manifest.json", "features.csv", "labels.csv", "embeddings.csv",
        "splits.json"}) {
    CHECK(slurp(kRoot / "data" / part) == slurp(kRoot / "data2" / part));
  }
  CHECK(r.output.find("seen classes:   4") != std::string::npos);
}

TEST_CASE("train writes its outputs and repeats byte for byte") {
  const std::string& manifest = dataset_manifest();
  const std::string common = "train --data " + manifest + " --config " +
                             (kRoot / "train.json").string() +
                             " --deterministic --out ";
  const CliResult a = run_cli(common + (kRoot / "run_a").string());
  REQUIRE(a.exit_code == 0);
  CHECK(a.output.find("a_u=") != std::string::npos);
  const CliResult b = run_cli(common + (kRoot / "run_b").string());
  REQUIRE(b.exit_code == 0);

  for (const char* part :
       {"metrics.csv", "telemetry.csv", "run.json", "checkpoint.bin"}) {
    CHECK(slurp(kRoot / "run_a" / part) == slurp(kRoot / "run_b" / part));
  }
  CHECK(fs::exists(kRoot / "run_a" / "checkpoint_stage1.bin"));
  CHECK(fs::exists(kRoot / "run_a" / "checkpoint_stage2.bin"));
  CHECK(fs::exists(kRoot / "run_a" / "checkpoint_stage3.bin"));
  CHECK(fs::file_size(kRoot / "run_a" / "checkpoint.bin") > 100);
  CHECK(telemetry_stages(kRoot / "run_a" / "telemetry.csv") ==
        std::set<int>{1, 2, 3});
}

TEST_CASE("ablation names select the advertised stage subsets") {
  const std::string& manifest = dataset_manifest();
  const std::string base = "train --data " + manifest + " --config " +
                           (kRoot / "train.json").string() + " --deterministic ";

  const CliResult no2 = run_cli(base + "--ablation=-Stg2 --out " +
                                (kRoot / "run_no2").string());
  REQUIRE(no2.exit_code == 0);
  CHECK(telemetry_stages(kRoot / "run_no2" / "telemetry.csv") ==
        std::set<int>{1, 3});

  const CliResult only1 = run_cli(base + "--stages 1 --out " +
                                  (kRoot / "run_s1").string());
  REQUIRE(only1.exit_code == 0);
  CHECK(telemetry_stages(kRoot / "run_s1" / "telemetry.csv") ==
        std::set<int>{1});

  const CliResult baseline = run_cli(base + "--ablation baseline --out " +
                                     (kRoot / "run_base").string());
  REQUIRE(baseline.exit_code == 0);
  const std::string record = slurp(kRoot / "run_base" / "run.json");
  CHECK(record.find("\"ablation\": \"baseline\"") != std::string::npos);
  CHECK(record.find("\"baseline\": true") != std::string::npos);
  CHECK(record.find("written_at_unix") == std::string::npos);
}

TEST_CASE("bad invocations map to the documented exit codes") {
  const std::string& manifest = dataset_manifest();

  SUBCASE("misconfigured synthetic spec") {
    write_file(kRoot / "bad_spec.json", R"({"cluster_std": 0.0})");
    const CliResult r = run_cli("synth-data --config " +
                                (kRoot / "bad_spec.json").string() + " --out " +
                                (kRoot / "bad_data").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("cluster_std") != std::string::npos);
  }

  SUBCASE("unknown config key names the typo") {
    write_file(kRoot / "typo.json", R"({"learnig_rate": 0.1})");
    const CliResult r = run_cli("train --data " + manifest + " --config " +
                                (kRoot / "typo.json").string() + " --out " +
                                (kRoot / "typo_out").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("learnig_rate") != std::string::npos);
  }

  SUBCASE("malformed JSON") {
    write_file(kRoot / "broken.json", "{not json");
    const CliResult r = run_cli("train --data " + manifest + " --config " +
                                (kRoot / "broken.json").string() + " --out " +
                                (kRoot / "broken_out").string());
    CHECK(r.exit_code == 2);
  }

  SUBCASE("missing dataset") {
    const CliResult r = run_cli("train --data " +
                                (kRoot / "nowhere" / "manifest.json").string() +
                                " --out " + (kRoot / "missing_out").string());
    CHECK(r.exit_code == 3);
  }

  SUBCASE("unknown ablation name") {
    const CliResult r = run_cli("train --data " + manifest +
                                " --ablation=Stg9 --out " +
                                (kRoot / "abl_out").string());
    CHECK(r.exit_code == 2);
  }

  SUBCASE("ablation and stages are mutually exclusive") {
    const CliResult r = run_cli("train --data " + manifest +
                                " --ablation=full --stages 1 --out " +
                                (kRoot / "both_out").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("mutually exclusive") != std::string::npos);
  }

  SUBCASE("no subcommand") {
    CHECK(run_cli("").exit_code == 2);
  }
}

TEST_CASE("the gradient self-check passes from the command line") {
  const CliResult r = run_cli("gradcheck");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("all") != std::string::npos);
  CHECK(r.output.find("FAIL") == std::string::npos);
}

TEST_CASE("ablate sweeps every configuration and aggregates") {
  const std::string& manifest = dataset_manifest();
  const CliResult r = run_cli("ablate --data " + manifest + " --config " +
                              (kRoot / "train.json").string() +
                              " --seeds 1 --deterministic --out " +
                              (kRoot / "ablate_out").string());
  REQUIRE(r.exit_code == 0);
  const std::string runs = slurp(kRoot / "ablate_out" / "runs.csv");
  const std::string summary = slurp(kRoot / "ablate_out" / "summary.csv");
  for (const char* name :
       {"full", "Stg1", "Stg3", "-Stg1", "-Stg2", "-Stg3", "baseline"}) {
    CHECK(runs.find(name + ",1,"s) != std::string::npos);
    CHECK(summary.find(name + ","s) != std::string::npos);
  }
  CHECK(runs.find(",error") == std::string::npos);
  CHECK(summary.rfind("config,a_u,a_s,H_mean,H_of_means\n", 0) == 0);
}
