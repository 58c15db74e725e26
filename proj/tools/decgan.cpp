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
 * decgan: command line surface for the decoupled feature generator.
 *
 *   decgan synth-data --out DIR [--config spec.json] [--seed N]
 *   decgan train --data manifest.json --out DIR [--config train.json]
 *                [--seed N] [--ablation=NAME] [--stages 1,2,3]
 *                [--deterministic]
 *   decgan ablate --data manifest.json --out DIR [--config train.json]
 *                 [--seeds 1,2,3,4,5] [--deterministic]
 *   decgan gradcheck [--seed N]
 *
 * Exit codes: 0 success, 2 usage/config/validation error, 3 I/O error,
 * 4 numeric error, 1 unexpected internal error.
 */
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "decgan/checkpoint.hpp"
#include "decgan/data.hpp"
#include "decgan/error.hpp"
#include "decgan/eval.hpp"
#include "decgan/gradcheck.hpp"
#include "decgan/io.hpp"
#include "decgan/synthetic.hpp"
#include "decgan/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;  // usage, config, validation
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

const std::vector<std::string> kAblationNames = {
    "full", "Stg1", "Stg3", "-Stg1", "-Stg2", "-Stg3", "baseline"};

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw decgan::ConfigError("unknown key \"" + item.key() + "\" in " +
                                where);
    }
  }
}

json load_json_file(const std::string& path) {
  const std::string text = decgan::read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw decgan::ConfigError("malformed JSON in " + path);
  }
  if (!j.is_object()) {
    throw decgan::ConfigError("expected a JSON object in " + path);
  }
  return j;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw decgan::ConfigError("config key \"" + key + "\" has the wrong type");
  }
}

decgan::SyntheticSpec parse_synth_spec(const json& j) {
  reject_unknown_keys(j,
                      {"n_seen_classes", "n_unseen_classes",
                       "samples_per_class", "feature_dim", "embed_dim",
                       "cluster_std", "seed"},
                      "synthetic spec");
  decgan::SyntheticSpec spec;
  spec.n_seen_classes = get_or<std::size_t>(j, "n_seen_classes", spec.n_seen_classes);
  spec.n_unseen_classes =
      get_or<std::size_t>(j, "n_unseen_classes", spec.n_unseen_classes);
  spec.samples_per_class =
      get_or<std::size_t>(j, "samples_per_class", spec.samples_per_class);
  spec.feature_dim = get_or<std::size_t>(j, "feature_dim", spec.feature_dim);
  spec.embed_dim = get_or<std::size_t>(j, "embed_dim", spec.embed_dim);
  spec.cluster_std = get_or<double>(j, "cluster_std", spec.cluster_std);
  spec.seed = get_or<std::uint64_t>(j, "seed", spec.seed);
  return spec;
}

decgan::TrainConfig parse_train_config(const json& j) {
  reject_unknown_keys(
      j,
      {"k", "batch_size", "e1", "e2", "e3", "learning_rate", "adam_beta1",
       "adam_beta2", "adam_eps", "gp_lambda", "rec_beta", "seed", "stages",
       "baseline", "cond_grad_to_prior", "rec_on_interpolates", "init_scale",
       "leaky_slope", "ridge",
       "dims", "eval"},
      "train config");
  decgan::TrainConfig cfg;
  cfg.k = get_or<std::size_t>(j, "k", cfg.k);
  cfg.batch_size = get_or<std::size_t>(j, "batch_size", cfg.batch_size);
  cfg.e1 = get_or<std::size_t>(j, "e1", cfg.e1);
  cfg.e2 = get_or<std::size_t>(j, "e2", cfg.e2);
  cfg.e3 = get_or<std::size_t>(j, "e3", cfg.e3);
  cfg.learning_rate = get_or<double>(j, "learning_rate", cfg.learning_rate);
  cfg.adam_beta1 = get_or<double>(j, "adam_beta1", cfg.adam_beta1);
  cfg.adam_beta2 = get_or<double>(j, "adam_beta2", cfg.adam_beta2);
  cfg.adam_eps = get_or<double>(j, "adam_eps", cfg.adam_eps);
  cfg.weights.gp_lambda = get_or<double>(j, "gp_lambda", cfg.weights.gp_lambda);
  cfg.weights.rec_beta = get_or<double>(j, "rec_beta", cfg.weights.rec_beta);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  if (j.contains("stages")) {
    std::set<int> mask;
    for (const int s : get_or<std::vector<int>>(j, "stages", {})) mask.insert(s);
    cfg.stage_mask = mask;
  }
  cfg.baseline_mode = get_or<bool>(j, "baseline", cfg.baseline_mode);
  cfg.cond_grad_to_prior =
      get_or<bool>(j, "cond_grad_to_prior", cfg.cond_grad_to_prior);
  cfg.rec_on_interpolates =
      get_or<bool>(j, "rec_on_interpolates", cfg.rec_on_interpolates);
  cfg.init_scale = get_or<double>(j, "init_scale", cfg.init_scale);
  cfg.leaky_slope = get_or<double>(j, "leaky_slope", cfg.leaky_slope);
  cfg.ridge = get_or<double>(j, "ridge", cfg.ridge);
  if (j.contains("dims")) {
    const json& d = j.at("dims");
    reject_unknown_keys(d, {"noise_dim", "prior_dim", "hidden_dim"},
                        "train config dims");
    cfg.dims.noise_dim = get_or<std::size_t>(d, "noise_dim", cfg.dims.noise_dim);
    cfg.dims.prior_dim = get_or<std::size_t>(d, "prior_dim", cfg.dims.prior_dim);
    cfg.dims.hidden_dim =
        get_or<std::size_t>(d, "hidden_dim", cfg.dims.hidden_dim);
  }
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    reject_unknown_keys(
        e, {"n_per_class", "cls_lr", "cls_epochs", "cls_l2", "pooled_accuracy"},
        "train config eval");
    cfg.eval.n_per_class =
        get_or<std::size_t>(e, "n_per_class", cfg.eval.n_per_class);
    cfg.eval.cls_lr = get_or<double>(e, "cls_lr", cfg.eval.cls_lr);
    cfg.eval.cls_epochs =
        get_or<std::size_t>(e, "cls_epochs", cfg.eval.cls_epochs);
    cfg.eval.cls_l2 = get_or<double>(e, "cls_l2", cfg.eval.cls_l2);
    cfg.eval.pooled_accuracy =
        get_or<bool>(e, "pooled_accuracy", cfg.eval.pooled_accuracy);
  }
  return cfg;
}

// Canonical effective config. nlohmann::json orders keys, so dumping this is
// a stable serialization suitable for hashing.
json config_to_json(const decgan::TrainConfig& cfg) {
  json j;
  j["k"] = cfg.k;
  j["batch_size"] = cfg.batch_size;
  j["e1"] = cfg.e1;
  j["e2"] = cfg.e2;
  j["e3"] = cfg.e3;
  j["learning_rate"] = cfg.learning_rate;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["gp_lambda"] = cfg.weights.gp_lambda;
  j["rec_beta"] = cfg.weights.rec_beta;
  j["seed"] = cfg.seed;
  j["stages"] = std::vector<int>(cfg.stage_mask.begin(), cfg.stage_mask.end());
  j["baseline"] = cfg.baseline_mode;
  j["cond_grad_to_prior"] = cfg.cond_grad_to_prior;
  j["rec_on_interpolates"] = cfg.rec_on_interpolates;
  j["init_scale"] = cfg.init_scale;
  j["leaky_slope"] = cfg.leaky_slope;
  j["ridge"] = cfg.ridge;
  j["dims"] = {{"noise_dim", cfg.dims.noise_dim},
               {"prior_dim", cfg.dims.prior_dim},
               {"hidden_dim", cfg.dims.hidden_dim}};
  j["eval"] = {{"n_per_class", cfg.eval.n_per_class},
               {"cls_lr", cfg.eval.cls_lr},
               {"cls_epochs", cfg.eval.cls_epochs},
               {"cls_l2", cfg.eval.cls_l2},
               {"pooled_accuracy", cfg.eval.pooled_accuracy}};
  return j;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void apply_ablation(decgan::TrainConfig& cfg, const std::string& name) {
  cfg.baseline_mode = false;
  if (name == "full") {
    cfg.stage_mask = {1, 2, 3};
  } else if (name == "Stg1") {
    cfg.stage_mask = {1};
  } else if (name == "Stg3") {
    cfg.stage_mask = {3};
  } else if (name == "-Stg1") {
    cfg.stage_mask = {2, 3};
  } else if (name == "-Stg2") {
    cfg.stage_mask = {1, 3};
  } else if (name == "-Stg3") {
    cfg.stage_mask = {1, 2};
  } else if (name == "baseline") {
    cfg.baseline_mode = true;
    cfg.stage_mask = {1, 2, 3};
  } else {
    throw decgan::UsageError("unknown ablation \"" + name + "\"");
  }
}

std::set<int> parse_stage_list(const std::string& text) {
  std::set<int> mask;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok != "1" && tok != "2" && tok != "3") {
      throw decgan::UsageError("--stages expects a comma list drawn from 1,2,3");
    }
    mask.insert(tok[0] - '0');
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (mask.empty()) {
    throw decgan::UsageError("--stages expects a comma list drawn from 1,2,3");
  }
  return mask;
}

struct TrainFlags {
  std::string data;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string ablation;
  std::string stages;
  bool deterministic = false;
};

decgan::TrainConfig resolve_train_config(const TrainFlags& flags) {
  decgan::TrainConfig cfg = flags.config.empty()
                                ? decgan::TrainConfig{}
                                : parse_train_config(load_json_file(flags.config));
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.ablation.empty() && !flags.stages.empty()) {
    throw decgan::UsageError("--ablation and --stages are mutually exclusive");
  }
  if (!flags.ablation.empty()) apply_ablation(cfg, flags.ablation);
  if (!flags.stages.empty()) cfg.stage_mask = parse_stage_list(flags.stages);
  cfg.validate();
  return cfg;
}

void write_run_record(const TrainFlags& flags, const decgan::TrainConfig& cfg,
                      const decgan::GzslMetrics& metrics,
                      const std::string& command) {
  const json cfg_json = config_to_json(cfg);
  json rec;
  rec["command"] = command;
  rec["version"] = DECGAN_VERSION;
  rec["data"] = flags.data;
  rec["seed"] = cfg.seed;
  rec["ablation"] = flags.ablation.empty() ? "full" : flags.ablation;
  rec["config"] = cfg_json;
  rec["config_hash"] = "fnv1a64:" + fnv1a_hex(cfg_json.dump());
  rec["metrics"] = {
      {"a_u", metrics.a_u}, {"a_s", metrics.a_s}, {"h", metrics.h}};
  if (!flags.deterministic) {
    rec["written_at_unix"] =
        static_cast<std::int64_t>(std::time(nullptr));
  }
  decgan::write_text_file((fs::path(flags.out) / "run.json").string(),
                          rec.dump(2) + "\n");
}

int cmd_synth_data(const std::string& config, const std::string& out,
                   std::optional<std::uint64_t> seed) {
  decgan::SyntheticSpec spec;
  if (!config.empty()) spec = parse_synth_spec(load_json_file(config));
  if (seed) spec.seed = *seed;
  spec.validate();
  const decgan::GzslDataset ds = decgan::make_synthetic(spec);
  fs::create_directories(out);
  decgan::save_dataset(ds, out);
  std::cout << "wrote dataset: " << (fs::path(out) / "manifest.json").string()
            << "\n"
            << "  seen classes:   " << ds.seen_classes.size() << "\n"
            << "  unseen classes: " << ds.unseen_classes.size() << "\n"
            << "  seen train/test rows: " << ds.seen_train_x.rows() << "/"
            << ds.seen_test_x.rows() << "\n"
            << "  unseen pool rows: " << ds.unseen_pool_x.rows() << "\n"
            << "  feature/embedding width: " << ds.seen_train_x.cols() << "/"
            << ds.embeddings.embed_dim() << "\n";
  return kExitOk;
}

int cmd_train(const TrainFlags& flags) {
  const decgan::TrainConfig cfg = resolve_train_config(flags);
  const decgan::GzslDataset ds = decgan::load_dataset(flags.data);
  fs::create_directories(flags.out);

  const auto on_stage_end = [&](int stage, const decgan::Trainer& trainer) {
    decgan::Checkpoint ck{cfg.seed, trainer.model, trainer.regressor};
    const fs::path path =
        fs::path(flags.out) / ("checkpoint_stage" + std::to_string(stage) + ".bin");
    decgan::save_checkpoint(ck, path.string());
  };
  const decgan::PipelineResult res =
      decgan::run_pipeline(ds, cfg, on_stage_end);

  decgan::save_checkpoint({cfg.seed, res.model, res.regressor},
                          (fs::path(flags.out) / "checkpoint.bin").string());
  decgan::write_text_file((fs::path(flags.out) / "telemetry.csv").string(),
                          res.telemetry.to_csv());
  decgan::write_text_file(
      (fs::path(flags.out) / "metrics.csv").string(),
      decgan::metrics_to_csv(res.metrics, ds.seen_classes, ds.unseen_classes));
  write_run_record(flags, cfg, res.metrics, "train");

  std::printf("a_u=%.6f a_s=%.6f H=%.6f\n", res.metrics.a_u, res.metrics.a_s,
              res.metrics.h);
  std::cout << "outputs in " << flags.out << ": checkpoint.bin telemetry.csv "
            << "metrics.csv run.json\n";
  return kExitOk;
}

int cmd_ablate(const TrainFlags& flags, std::vector<std::uint64_t> seeds) {
  if (seeds.empty()) {
    throw decgan::UsageError("--seeds needs at least one seed");
  }
  const decgan::GzslDataset ds = decgan::load_dataset(flags.data);
  fs::create_directories(flags.out);

  std::string runs_csv = "config,seed,a_u,a_s,H,status\n";
  std::string summary_csv = "config,a_u,a_s,H_mean,H_of_means\n";
  for (const std::string& name : kAblationNames) {
    double sum_au = 0.0;
    double sum_as = 0.0;
    double sum_h = 0.0;
    std::size_t ok = 0;
    for (const std::uint64_t seed : seeds) {
      TrainFlags run_flags = flags;
      run_flags.ablation = name;
      run_flags.seed = seed;
      try {
        const decgan::TrainConfig cfg = resolve_train_config(run_flags);
        const decgan::PipelineResult res = decgan::run_pipeline(ds, cfg);
        runs_csv += name + "," + std::to_string(seed) + "," +
                    decgan::format_double(res.metrics.a_u) + "," +
                    decgan::format_double(res.metrics.a_s) + "," +
                    decgan::format_double(res.metrics.h) + ",ok\n";
        sum_au += res.metrics.a_u;
        sum_as += res.metrics.a_s;
        sum_h += res.metrics.h;
        ++ok;
      } catch (const decgan::Error& e) {
        std::cerr << "run " << name << " seed " << seed << " failed: "
                  << e.what() << "\n";
        runs_csv += name + "," + std::to_string(seed) + ",,,,error\n";
      }
    }
    const double n = ok > 0 ? static_cast<double>(ok) : 1.0;
    const double mean_au = sum_au / n;
    const double mean_as = sum_as / n;
    // H_mean averages per-run H; H_of_means recomputes H from the averaged
    // accuracies. Reports should quote H_mean.
    summary_csv += name + "," + decgan::format_double(mean_au) + "," +
                   decgan::format_double(mean_as) + "," +
                   decgan::format_double(sum_h / n) + "," +
                   decgan::format_double(decgan::harmonic_mean(mean_as, mean_au)) +
                   "\n";
    std::printf("%-9s a_u=%.4f a_s=%.4f H_mean=%.4f (%zu/%zu runs ok)\n",
                name.c_str(), mean_au, mean_as, sum_h / n, ok, seeds.size());
  }
  decgan::write_text_file((fs::path(flags.out) / "runs.csv").string(), runs_csv);
  decgan::write_text_file((fs::path(flags.out) / "summary.csv").string(),
                          summary_csv);
  std::cout << "outputs in " << flags.out << ": runs.csv summary.csv\n";
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed) {
  const std::vector<decgan::GradCheckResult> results =
      decgan::run_gradcheck(seed);
  std::size_t failed = 0;
  for (const decgan::GradCheckResult& r : results) {
    std::printf("%-24s max_err=%10.3e tol=%7.0e %s\n", r.op.c_str(),
                r.max_error, r.tolerance, r.pass ? "ok" : "FAIL");
    if (!r.pass) ++failed;
  }
  if (failed > 0) {
    std::cerr << "gradcheck: " << failed << " operation(s) out of tolerance\n";
    return kExitNumeric;
  }
  std::cout << "gradcheck: all " << results.size() << " checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decgan: decoupled feature generation for transductive GZSL"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 2 usage/config/validation, 3 I/O, 4 numeric, "
      "1 internal.");

  std::string synth_config;
  std::string synth_out;
  std::optional<std::uint64_t> synth_seed;
  CLI::App* synth = app.add_subcommand(
      "synth-data", "Generate the synthetic benchmark dataset");
  synth->add_option("--config", synth_config,
                    "Synthetic spec JSON (defaults when omitted)");
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  synth->add_option("--seed", synth_seed, "Override the spec seed");

  TrainFlags train_flags;
  CLI::App* train =
      app.add_subcommand("train", "Run the training pipeline and evaluate");
  train->add_option("--data", train_flags.data, "Dataset manifest JSON")
      ->required();
  train->add_option("--config", train_flags.config,
                    "Train config JSON (defaults when omitted)");
  train->add_option("--out", train_flags.out, "Output directory")->required();
  train->add_option("--seed", train_flags.seed, "Override the config seed");
  train
      ->add_option("--ablation", train_flags.ablation,
                   "Named configuration (use --ablation=-Stg2 for the "
                   "leading-dash names)")
      ->check(CLI::IsMember(kAblationNames));
  train->add_option("--stages", train_flags.stages,
                    "Comma list of stages to run, e.g. 1,3");
  train->add_flag("--deterministic", train_flags.deterministic,
                  "Omit wall-clock fields so outputs are byte-stable");

  TrainFlags ablate_flags;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  CLI::App* ablate = app.add_subcommand(
      "ablate", "Run all seven configurations over a list of seeds");
  ablate->add_option("--data", ablate_flags.data, "Dataset manifest JSON")
      ->required();
  ablate->add_option("--config", ablate_flags.config,
                     "Base train config JSON (defaults when omitted)");
  ablate->add_option("--out", ablate_flags.out, "Output directory")->required();
  ablate->add_option("--seeds", seeds, "Seeds, one run per config per seed")
      ->delimiter(',');
  ablate->add_flag("--deterministic", ablate_flags.deterministic,
                   "Omit wall-clock fields so outputs are byte-stable");

  std::uint64_t gradcheck_seed = 1;
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "Finite-difference self-check of every gradient rule");
  gradcheck->add_option("--seed", gradcheck_seed, "Sampling seed");

  try {
    app.parse(argc, argv);
    if (*synth) return cmd_synth_data(synth_config, synth_out, synth_seed);
    if (*train) return cmd_train(train_flags);
    if (*ablate) return cmd_ablate(ablate_flags, seeds);
    if (*gradcheck) return cmd_gradcheck(gradcheck_seed);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const decgan::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const decgan::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const decgan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
