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
 */
#ifndef DECGAN_TRAINER_HPP_
#define DECGAN_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "decgan/data.hpp"
#include "decgan/eval.hpp"
#include "decgan/losses.hpp"
#include "decgan/model.hpp"
#include "decgan/optim.hpp"

namespace decgan {

struct TrainConfig {
  std::size_t k = 5;  // critic updates per generator update
  std::size_t batch_size = 64;
  std::size_t e1 = 30;
  std::size_t e2 = 10;
  std::size_t e3 = 10;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.9;
  double adam_eps = 1e-8;
  LossWeights weights;
  std::uint64_t seed = 1;
  std::set<int> stage_mask = {1, 2, 3};
  bool baseline_mode = false;
  // Let the conditional generator's stage-1 gradient reach G1 through the
  // structured prior. Off by default: G1 learns only from the
  // unconditional game.
  bool cond_grad_to_prior = false;
  // Aim the reconstruction loss at real/fake interpolates instead of the
  // generated features themselves.
  bool rec_on_interpolates = false;
  double init_scale = 0.02;
  double leaky_slope = 0.2;
  double ridge = 1e-3;  // regressor pretraining
  // noise/prior/hidden widths; feature and embedding widths are taken from
  // the dataset by run_pipeline.
  ModelDims dims;
  EvalConfig eval;

  AdamConfig adam() const {
    return AdamConfig{learning_rate, adam_beta1, adam_beta2, adam_eps};
  }
  void validate() const;
};

// Desk-scale hyperparameters for the bundled synthetic benchmark. A full
// three-stage run takes well under a minute on one core.
TrainConfig synthetic_benchmark_config();

struct TelemetryRow {
  std::uint64_t step;  // optimizer updates so far, monotone over the run
  int stage;
  std::string loss;
  double value;
};

class Telemetry {
 public:
  void log(std::uint64_t step, int stage, const std::string& loss, double value) {
    rows_.push_back({step, stage, loss, value});
  }
  const std::vector<TelemetryRow>& rows() const { return rows_; }
  std::size_t count(int stage, const std::string& loss) const;
  // "step,stage,loss,value" lines.
  std::string to_csv() const;

 private:
  std::vector<TelemetryRow> rows_;
};

// Closed-form ridge regression through the normal equations. Minimizes
// sum_i ||c_i - (x_i w + b)||^2 + ridge ||w||_F^2 with the bias column
// unpenalized. Returns the frozen single-layer regressor A.
NetworkParams pretrain_regressor(const Matrix& seen_features,
                                 const Matrix& seen_embeddings, double ridge,
                                 bool with_bias = true);

// Everything a training run mutates, bundled so stages compose.
struct Trainer {
  DecganModel model;
  NetworkParams regressor;
  OptimizerState opt_g1, opt_g2, opt_gc, opt_d0, opt_dc;
  Telemetry telemetry;
  Rng rng;
  std::uint64_t step = 0;

  Trainer(DecganModel m, NetworkParams a, std::uint64_t seed);
};

// Stage 1: on seen data, k D0 updates then one G0 update (through G1 and
// G2), then k Dc updates and one Gc update per full step.
void stage1(Trainer& tr, const TrainView& data, const TrainConfig& cfg);

// Stage 2: the unconditional half only, real batches from the unlabeled
// unseen pool. Touches D0, G1, G2.
void stage2(Trainer& tr, const TrainView& data, const TrainConfig& cfg);

// Stage 3: cross branch. Fakes are Gc(G1(z), c(y_u)) with y_u uniform over
// unseen classes, judged by D0. Updates D0 and Gc; G1, G2, Dc stay frozen.
void stage3(Trainer& tr, const TrainView& data, const TrainConfig& cfg);

// Baseline (non-decoupled) stages: a single conditional generator fed
// prior-width noise directly. Stage 1 trains Gc with Dc on seen data,
// stage 3 trains Gc with D0 on the unseen pool.
void baseline_stage1(Trainer& tr, const TrainView& data, const TrainConfig& cfg);
void baseline_stage3(Trainer& tr, const TrainView& data, const TrainConfig& cfg);

struct PipelineResult {
  DecganModel model;
  NetworkParams regressor;
  GzslMetrics metrics;
  Telemetry telemetry;
};

// Pretrains the regressor, runs the stages named by stage_mask in order,
// evaluates, and returns everything. `on_stage_end` (when set) runs after
// each completed stage, e.g. to write checkpoints.
PipelineResult run_pipeline(
    const GzslDataset& ds, const TrainConfig& cfg,
    const std::function<void(int stage, const Trainer&)>& on_stage_end = {});

}  // namespace decgan

#endif  // DECGAN_TRAINER_HPP_
