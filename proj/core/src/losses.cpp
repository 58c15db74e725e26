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
#include "decgan/losses.hpp"

#include "decgan/error.hpp"

namespace decgan {

void LossWeights::validate() const {
  if (gp_lambda < 0.0) throw ConfigError("loss weights: gp_lambda must be >= 0");
  if (rec_beta < 0.0) throw ConfigError("loss weights: rec_beta must be >= 0");
}

Matrix interpolate(const Matrix& real, const Matrix& fake, Rng& rng) {
  if (!real.same_shape(fake)) {
    throw DimensionError("interpolate: shape mismatch " + real.shape_str() + " vs " +
                         fake.shape_str());
  }
  std::vector<double> alphas(real.rows());
  for (double& a : alphas) a = rng.uniform();
  return interpolate_with_alphas(real, fake, alphas);
}

Matrix interpolate_with_alphas(const Matrix& real, const Matrix& fake,
                               const std::vector<double>& alphas) {
  if (!real.same_shape(fake)) {
    throw DimensionError("interpolate: shape mismatch " + real.shape_str() + " vs " +
                         fake.shape_str());
  }
  if (alphas.size() != real.rows()) {
    throw DimensionError("interpolate: " + std::to_string(alphas.size()) +
                         " alphas for " + std::to_string(real.rows()) + " rows");
  }
  Matrix out(real.rows(), real.cols());
  for (std::size_t i = 0; i < real.rows(); ++i) {
    const double a = alphas[i];
    const double* pr = real.row(i);
    const double* pf = fake.row(i);
    double* po = out.row(i);
    for (std::size_t j = 0; j < real.cols(); ++j) {
      po[j] = a * pr[j] + (1.0 - a) * pf[j];
    }
  }
  return out;
}

Var gradient_penalty(Tape& t, const NetworkParams& d, const TapedNet& lifted,
                     const Matrix& input) {
  Var x = t.leaf(input);
  Var score = forward(d, lifted, x);
  // Rows pass through the critic independently, so the input gradient of the
  // summed score holds one critic gradient per row.
  Var total = sum(score);
  Gradients g = backward(total, {x});
  Var norms = l2_norm_rows(g.at(x));
  Var excess = add_scalar(norms, -1.0);
  return mean(mul(excess, excess));
}

double gradient_penalty_value(const NetworkParams& d, const Matrix& input) {
  Tape t;
  TapedNet lifted = lift(t, d);
  return gradient_penalty(t, d, lifted, input).scalar();
}

namespace {

CriticLoss critic_loss_impl(Tape& t, const NetworkParams& d, const Matrix& real_in,
                            const Matrix& fake_in, const Matrix& interp_in,
                            const LossWeights& weights) {
  CriticLoss out;
  out.critic = lift(t, d);
  Var real_score = forward(d, out.critic, t.leaf(real_in));
  Var fake_score = forward(d, out.critic, t.leaf(fake_in));
  out.wasserstein = sub(mean(real_score), mean(fake_score));
  out.penalty = gradient_penalty(t, d, out.critic, interp_in);
  out.loss = add(neg(out.wasserstein), scale(out.penalty, weights.gp_lambda));
  return out;
}

}  // namespace

CriticLoss critic_loss_unconditional(Tape& t, const NetworkParams& d0,
                                     const Matrix& real, const Matrix& fake,
                                     const LossWeights& weights, Rng& rng) {
  weights.validate();
  Matrix interp = interpolate(real, fake, rng);
  return critic_loss_impl(t, d0, real, fake, interp, weights);
}

CriticLoss critic_loss_conditional(Tape& t, const NetworkParams& dc,
                                   const Matrix& real_x, const Matrix& fake_x,
                                   const Matrix& c, const LossWeights& weights,
                                   Rng& rng) {
  weights.validate();
  if (real_x.rows() != c.rows()) {
    throw DimensionError("conditional critic loss: features " + real_x.shape_str() +
                         " and embeddings " + c.shape_str() + " differ in rows");
  }
  Matrix interp = interpolate(real_x, fake_x, rng);
  return critic_loss_impl(t, dc, concat_cols_values(real_x, c),
                          concat_cols_values(fake_x, c),
                          concat_cols_values(interp, c), weights);
}

Var generator_loss_unconditional(Tape& t, const NetworkParams& d0, Var fake) {
  Var score = forward_frozen(t, d0, fake);
  return neg(mean(score));
}

Var generator_loss_conditional(Tape& t, const NetworkParams& dc, Var fake_x,
                               const Matrix& c) {
  Var input = concat_cols(fake_x, t.leaf(c));
  Var score = forward_frozen(t, dc, input);
  return neg(mean(score));
}

Var reconstruction_loss(Tape& t, const NetworkParams& a, Var x_gen,
                        const Matrix& c, const LossWeights& weights) {
  weights.validate();
  if (x_gen.rows() != c.rows()) {
    throw DimensionError("reconstruction loss: generated batch and embeddings "
                         "differ in rows");
  }
  Var estimate = forward_frozen(t, a, x_gen);
  Var diff = sub(t.leaf(c), estimate);
  Var per_row = row_sums(mul(diff, diff));
  return scale(mean(per_row), weights.rec_beta);
}

CrossBranchLosses cross_branch_losses(Tape& t, const NetworkParams& d0,
                                      const Matrix& real_unseen, Var fake_cond,
                                      const LossWeights& weights, Rng& rng) {
  CrossBranchLosses out;
  out.critic =
      critic_loss_unconditional(t, d0, real_unseen, fake_cond.value(), weights, rng);
  out.generator = generator_loss_unconditional(t, d0, fake_cond);
  return out;
}

}  // namespace decgan
