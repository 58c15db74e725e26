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
#include "decgan/trainer.hpp"

#include <utility>

#include "decgan/error.hpp"
#include "decgan/io.hpp"
#include "decgan/linalg.hpp"
#include "decgan/tape.hpp"

namespace decgan {

void TrainConfig::validate() const {
  if (k == 0) throw ConfigError("train config: k must be >= 1");
  if (batch_size == 0) throw ConfigError("train config: batch_size must be >= 1");
  // 0 is allowed so a null update can be exercised end to end.
  if (learning_rate < 0.0) {
    throw ConfigError("train config: learning_rate must be >= 0");
  }
  if (stage_mask.empty()) throw ConfigError("train config: stage_mask is empty");
  for (int s : stage_mask) {
    if (s < 1 || s > 3) {
      throw ConfigError("train config: stage " + std::to_string(s) +
                        " outside {1, 2, 3}");
    }
  }
  if (init_scale < 0.0) throw ConfigError("train config: init_scale must be >= 0");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
    throw ConfigError("train config: leaky_slope outside (0, 1)");
  }
  if (ridge < 0.0) throw ConfigError("train config: ridge must be >= 0");
  weights.validate();
  adam().validate();
}

std::size_t Telemetry::count(int stage, const std::string& loss) const {
  std::size_t n = 0;
  for (const TelemetryRow& r : rows_) {
    if (r.stage == stage && r.loss == loss) ++n;
  }
  return n;
}

std::string Telemetry::to_csv() const {
  std::string out = "step,stage,loss,value\n";
  for (const TelemetryRow& r : rows_) {
    out += std::to_string(r.step);
    out += ',';
    out += std::to_string(r.stage);
    out += ',';
    out += r.loss;
    out += ',';
    out += format_double(r.value);
    out += '\n';
  }
  return out;
}

NetworkParams pretrain_regressor(const Matrix& seen_features,
                                 const Matrix& seen_embeddings, double ridge,
                                 bool with_bias) {
  if (seen_features.rows() != seen_embeddings.rows()) {
    throw DimensionError("regressor pretraining: " +
                         std::to_string(seen_features.rows()) + " feature rows vs " +
                         std::to_string(seen_embeddings.rows()) + " embedding rows");
  }
  if (seen_features.rows() == 0) {
    throw ConfigError("regressor pretraining: no data");
  }
  if (ridge < 0.0) throw ConfigError("regressor pretraining: ridge must be >= 0");

  const std::size_t d = seen_features.cols();
  const std::size_t da = with_bias ? d + 1 : d;
  Matrix xa(seen_features.rows(), da);
  for (std::size_t i = 0; i < seen_features.rows(); ++i) {
    double* dst = xa.row(i);
    const double* src = seen_features.row(i);
    for (std::size_t j = 0; j < d; ++j) dst[j] = src[j];
    if (with_bias) dst[d] = 1.0;
  }
  Matrix gram = matmul_values(transpose_values(xa), xa);
  for (std::size_t i = 0; i < d; ++i) gram(i, i) += ridge;  // bias unpenalized
  const Matrix rhs = matmul_values(transpose_values(xa), seen_embeddings);
  const Matrix theta = solve_spd(gram, rhs);

  NetworkParams a = make_regressor(d, seen_embeddings.cols());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < theta.cols(); ++j) {
      a.layers[0].weight(i, j) = theta(i, j);
    }
  }
  if (with_bias) {
    for (std::size_t j = 0; j < theta.cols(); ++j) {
      a.layers[0].bias(0, j) = theta(d, j);
    }
  }
  return a;
}

TrainConfig synthetic_benchmark_config() {
  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.dims.noise_dim = 16;
  cfg.dims.prior_dim = 32;
  cfg.dims.hidden_dim = 64;
  // Short cross-connected phase: enough to realign an already-conditioned
  // generator to the pool, not enough to train one from scratch.
  cfg.e3 = 4;
  // Matches the 160 real rows per seen class so the classifier sees flat
  // class priors; a degenerate generator then earns no accuracy from the
  // label frequencies alone.
  cfg.eval.n_per_class = 160;
  return cfg;
}

Trainer::Trainer(DecganModel m, NetworkParams a, std::uint64_t seed)
    : model(std::move(m)),
      regressor(std::move(a)),
      opt_g1(make_optimizer_state(model.g1)),
      opt_g2(make_optimizer_state(model.g2)),
      opt_gc(make_optimizer_state(model.gc)),
      opt_d0(make_optimizer_state(model.d0)),
      opt_dc(make_optimizer_state(model.dc)),
      rng(seed) {}

namespace {

std::vector<Matrix> grad_values(const Gradients& g, const TapedNet& net) {
  std::vector<Matrix> out;
  out.reserve(net.weights.size() * 2);
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    out.push_back(g.value_at(net.weights[i]));
    out.push_back(g.value_at(net.biases[i]));
  }
  return out;
}

void log_critic(Trainer& tr, int stage, const char* prefix, const CriticLoss& cl) {
  tr.step += 1;
  const std::string p(prefix);
  tr.telemetry.log(tr.step, stage, p + "_loss", cl.loss.scalar());
  tr.telemetry.log(tr.step, stage, p + "_w", cl.wasserstein.scalar());
  tr.telemetry.log(tr.step, stage, p + "_gp", cl.penalty.scalar());
}

// One critic update against detached fakes, unconditional form. Used by the
// seen-data game of stage 1, the fine-tuning of stage 2, and (with
// conditionally generated fakes) the cross branch of stage 3.
void d0_update(Trainer& tr, const Matrix& real, const Matrix& fake,
               const TrainConfig& cfg, int stage) {
  Tape t;
  const CriticLoss cl =
      critic_loss_unconditional(t, tr.model.d0, real, fake, cfg.weights, tr.rng);
  const Gradients g = backward(cl.loss, cl.critic.all());
  adam_step(tr.model.d0, grad_values(g, cl.critic), tr.opt_d0, cfg.adam());
  log_critic(tr, stage, "d0", cl);
}

void dc_update(Trainer& tr, const Matrix& real_x, const Matrix& fake_x,
               const Matrix& c, const TrainConfig& cfg, int stage) {
  Tape t;
  const CriticLoss cl = critic_loss_conditional(t, tr.model.dc, real_x, fake_x, c,
                                                cfg.weights, tr.rng);
  const Gradients g = backward(cl.loss, cl.critic.all());
  adam_step(tr.model.dc, grad_values(g, cl.critic), tr.opt_dc, cfg.adam());
  log_critic(tr, stage, "dc", cl);
}

// One generator update of the unconditional branch, through both G1 and G2.
void g0_update(Trainer& tr, const TrainConfig& cfg, int stage) {
  const Matrix z = tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.noise_dim);
  Tape t;
  const TapedNet g1v = lift(t, tr.model.g1);
  const TapedNet g2v = lift(t, tr.model.g2);
  const Var fake = forward(tr.model.g2, g2v, forward(tr.model.g1, g1v, t.leaf(z)));
  const Var loss = generator_loss_unconditional(t, tr.model.d0, fake);
  std::vector<Var> wrt = g1v.all();
  for (const Var& v : g2v.all()) wrt.push_back(v);
  const Gradients g = backward(loss, wrt);
  adam_step(tr.model.g1, grad_values(g, g1v), tr.opt_g1, cfg.adam());
  adam_step(tr.model.g2, grad_values(g, g2v), tr.opt_g2, cfg.adam());
  tr.step += 1;
  tr.telemetry.log(tr.step, stage, "g0_loss", loss.scalar());
}

// Reconstruction target per config: the generated features themselves, or
// per-row interpolates between the real batch and the fakes.
Var rec_target(Trainer& tr, Tape& t, const Matrix& real, Var fake,
               const TrainConfig& cfg) {
  if (!cfg.rec_on_interpolates) return fake;
  const std::size_t n = real.rows();
  Matrix alpha(n, 1);
  Matrix remainder(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = tr.rng.uniform();
    alpha(i, 0) = a;
    remainder(i, 0) = 1.0 - a;
  }
  return add(scale_rows(t.leaf(real), t.leaf(alpha)),
             scale_rows(fake, t.leaf(remainder)));
}

// One conditional generator update against Dc (stage 1 and the baseline's
// seen stage). The structured prior enters detached unless
// cond_grad_to_prior is set; the baseline feeds prior-width noise directly.
void gc_update_conditional(Trainer& tr, const Matrix& real_x, const Matrix& c,
                           const TrainConfig& cfg, int stage, bool baseline) {
  Tape t;
  const TapedNet gcv = lift(t, tr.model.gc);
  TapedNet g1v;
  Var s;
  if (baseline) {
    s = t.leaf(tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.prior_dim));
  } else {
    const Matrix z = tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.noise_dim);
    if (cfg.cond_grad_to_prior) {
      g1v = lift(t, tr.model.g1);
      s = forward(tr.model.g1, g1v, t.leaf(z));
    } else {
      s = t.leaf(structured_prior(tr.model.g1, z));
    }
  }
  const Var fake = forward(tr.model.gc, gcv, concat_cols(s, t.leaf(c)));
  const Var adversarial = generator_loss_conditional(t, tr.model.dc, fake, c);
  const Var rec = reconstruction_loss(t, tr.regressor,
                                      rec_target(tr, t, real_x, fake, cfg), c,
                                      cfg.weights);
  const Var loss = add(adversarial, rec);
  std::vector<Var> wrt = gcv.all();
  if (!baseline && cfg.cond_grad_to_prior) {
    for (const Var& v : g1v.all()) wrt.push_back(v);
  }
  const Gradients g = backward(loss, wrt);
  adam_step(tr.model.gc, grad_values(g, gcv), tr.opt_gc, cfg.adam());
  if (!baseline && cfg.cond_grad_to_prior) {
    adam_step(tr.model.g1, grad_values(g, g1v), tr.opt_g1, cfg.adam());
  }
  tr.step += 1;
  tr.telemetry.log(tr.step, stage, "gc_loss", loss.scalar());
  tr.telemetry.log(tr.step, stage, "gc_rec", rec.scalar());
}

// One cross-branch generator update: conditionally generated fakes judged
// by the frozen D0, plus the reconstruction term. Only Gc moves.
void gc_update_cross(Trainer& tr, const Matrix& real, const Matrix& c,
                     const TrainConfig& cfg, bool baseline) {
  const Matrix s = baseline
                       ? tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.prior_dim)
                       : structured_prior(tr.model.g1,
                                          tr.rng.normal_matrix(
                                              cfg.batch_size,
                                              tr.model.dims.noise_dim));
  Tape t;
  const TapedNet gcv = lift(t, tr.model.gc);
  const Var fake = forward(tr.model.gc, gcv, concat_cols(t.leaf(s), t.leaf(c)));
  const Var adversarial = generator_loss_unconditional(t, tr.model.d0, fake);
  const Var rec = reconstruction_loss(t, tr.regressor,
                                      rec_target(tr, t, real, fake, cfg), c,
                                      cfg.weights);
  const Var loss = add(adversarial, rec);
  const Gradients g = backward(loss, gcv.all());
  adam_step(tr.model.gc, grad_values(g, gcv), tr.opt_gc, cfg.adam());
  tr.step += 1;
  tr.telemetry.log(tr.step, 3, "gc_loss", loss.scalar());
  tr.telemetry.log(tr.step, 3, "gc_rec", rec.scalar());
}

// Batch of unseen-class labels drawn uniformly over the class list.
std::vector<int> draw_unseen_labels(Trainer& tr, const TrainView& data,
                                    std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = data.unseen_classes[tr.rng.uniform_index(data.unseen_classes.size())];
  }
  return out;
}

Matrix conditional_fake(Trainer& tr, const Matrix& c, const TrainConfig& cfg,
                        bool baseline) {
  if (baseline) {
    const Matrix s = tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.prior_dim);
    return generate_conditional(tr.model.gc, s, c);
  }
  const Matrix z = tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.noise_dim);
  return generate_conditional(tr.model.gc, structured_prior(tr.model.g1, z), c);
}

}  // namespace

void stage1(Trainer& tr, const TrainView& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.seen_train_x.rows() == 0) {
    throw ConfigError("stage 1: empty seen training set");
  }
  for (std::size_t epoch = 0; epoch < cfg.e1; ++epoch) {
    const auto uncond = batch_iter(data.seen_train_x.rows(), cfg.batch_size, tr.rng);
    const auto cond = batch_iter_balanced(data.seen_train_y, cfg.batch_size, tr.rng);
    for (std::size_t i = 0; i < uncond.size(); ++i) {
      const Matrix real = gather_rows(data.seen_train_x, uncond[i]);
      for (std::size_t j = 0; j < cfg.k; ++j) {
        const Matrix z =
            tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.noise_dim);
        const Matrix fake = generate_unconditional(tr.model.g1, tr.model.g2, z);
        d0_update(tr, real, fake, cfg, 1);
      }
      g0_update(tr, cfg, 1);

      const Matrix real_x = gather_rows(data.seen_train_x, cond[i]);
      const std::vector<int> yb = gather(data.seen_train_y, cond[i]);
      const Matrix c = data.embeddings.embed(yb);
      for (std::size_t j = 0; j < cfg.k; ++j) {
        const Matrix fake_x = conditional_fake(tr, c, cfg, false);
        dc_update(tr, real_x, fake_x, c, cfg, 1);
      }
      gc_update_conditional(tr, real_x, c, cfg, 1, false);
    }
  }
}

void stage2(Trainer& tr, const TrainView& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.unseen_pool_x.rows() == 0) {
    throw ConfigError("stage 2: empty unseen pool");
  }
  for (std::size_t epoch = 0; epoch < cfg.e2; ++epoch) {
    const auto batches = batch_iter(data.unseen_pool_x.rows(), cfg.batch_size, tr.rng);
    for (const auto& idx : batches) {
      const Matrix real = gather_rows(data.unseen_pool_x, idx);
      for (std::size_t j = 0; j < cfg.k; ++j) {
        const Matrix z =
            tr.rng.normal_matrix(cfg.batch_size, tr.model.dims.noise_dim);
        const Matrix fake = generate_unconditional(tr.model.g1, tr.model.g2, z);
        d0_update(tr, real, fake, cfg, 2);
      }
      g0_update(tr, cfg, 2);
    }
  }
}

namespace {

void cross_stage(Trainer& tr, const TrainView& data, const TrainConfig& cfg,
                 bool baseline) {
  cfg.validate();
  if (data.unseen_pool_x.rows() == 0) {
    throw ConfigError("stage 3: empty unseen pool");
  }
  if (data.unseen_classes.empty()) {
    throw ConfigError("stage 3: no unseen class embeddings");
  }
  for (std::size_t epoch = 0; epoch < cfg.e3; ++epoch) {
    const auto batches = batch_iter(data.unseen_pool_x.rows(), cfg.batch_size, tr.rng);
    for (const auto& idx : batches) {
      const Matrix real = gather_rows(data.unseen_pool_x, idx);
      for (std::size_t j = 0; j < cfg.k; ++j) {
        const std::vector<int> yb = draw_unseen_labels(tr, data, cfg.batch_size);
        const Matrix c = data.embeddings.embed(yb);
        const Matrix fake = conditional_fake(tr, c, cfg, baseline);
        d0_update(tr, real, fake, cfg, 3);
      }
      const std::vector<int> yb = draw_unseen_labels(tr, data, cfg.batch_size);
      const Matrix c = data.embeddings.embed(yb);
      gc_update_cross(tr, real, c, cfg, baseline);
    }
  }
}

}  // namespace

void stage3(Trainer& tr, const TrainView& data, const TrainConfig& cfg) {
  cross_stage(tr, data, cfg, false);
}

void baseline_stage1(Trainer& tr, const TrainView& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.seen_train_x.rows() == 0) {
    throw ConfigError("stage 1: empty seen training set");
  }
  for (std::size_t epoch = 0; epoch < cfg.e1; ++epoch) {
    const auto cond = batch_iter_balanced(data.seen_train_y, cfg.batch_size, tr.rng);
    for (const auto& idx : cond) {
      const Matrix real_x = gather_rows(data.seen_train_x, idx);
      const std::vector<int> yb = gather(data.seen_train_y, idx);
      const Matrix c = data.embeddings.embed(yb);
      for (std::size_t j = 0; j < cfg.k; ++j) {
        const Matrix fake_x = conditional_fake(tr, c, cfg, true);
        dc_update(tr, real_x, fake_x, c, cfg, 1);
      }
      gc_update_conditional(tr, real_x, c, cfg, 1, true);
    }
  }
}

void baseline_stage3(Trainer& tr, const TrainView& data, const TrainConfig& cfg) {
  cross_stage(tr, data, cfg, true);
}

PipelineResult run_pipeline(
    const GzslDataset& ds, const TrainConfig& cfg,
    const std::function<void(int stage, const Trainer&)>& on_stage_end) {
  cfg.validate();
  ds.validate();

  ModelDims dims = cfg.dims;
  dims.feature_dim = ds.seen_train_x.cols();
  dims.embed_dim = ds.embeddings.embed_dim();
  dims.validate();

  Rng master(cfg.seed);
  Rng init_rng = master.spawn(1);
  DecganModel model = init_decgan(dims, init_rng, cfg.init_scale, cfg.leaky_slope);
  NetworkParams regressor = pretrain_regressor(
      ds.seen_train_x, ds.embeddings.embed(ds.seen_train_y), cfg.ridge);

  Trainer tr(std::move(model), std::move(regressor), master.spawn(2).seed());
  const TrainView view = ds.train_view();

  if (cfg.baseline_mode) {
    baseline_stage1(tr, view, cfg);
    if (on_stage_end) on_stage_end(1, tr);
    baseline_stage3(tr, view, cfg);
    if (on_stage_end) on_stage_end(3, tr);
  } else {
    if (cfg.stage_mask.count(1) != 0) {
      stage1(tr, view, cfg);
      if (on_stage_end) on_stage_end(1, tr);
    }
    if (cfg.stage_mask.count(2) != 0) {
      stage2(tr, view, cfg);
      if (on_stage_end) on_stage_end(2, tr);
    }
    if (cfg.stage_mask.count(3) != 0) {
      stage3(tr, view, cfg);
      if (on_stage_end) on_stage_end(3, tr);
    }
  }

  EvalConfig ec = cfg.eval;
  ec.seed = master.spawn(3).seed();
  const ClassGenerator gen =
      cfg.baseline_mode
          ? make_direct_generator(tr.model.gc, ds.embeddings)
          : make_decgan_generator(tr.model.g1, tr.model.gc, ds.embeddings);

  PipelineResult result;
  result.metrics = evaluate_gzsl(gen, ds, ec);
  result.model = tr.model;
  result.regressor = tr.regressor;
  result.telemetry = tr.telemetry;
  return result;
}

}  // namespace decgan
