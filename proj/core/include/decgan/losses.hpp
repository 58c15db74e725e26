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
#ifndef DECGAN_LOSSES_HPP_
#define DECGAN_LOSSES_HPP_

#include <vector>

#include "decgan/matrix.hpp"
#include "decgan/network.hpp"
#include "decgan/rng.hpp"
#include "decgan/tape.hpp"

namespace decgan {

struct LossWeights {
  double gp_lambda = 10.0;
  double rec_beta = 0.01;

  void validate() const;
};

// Per-row convex mix: out_i = alpha_i * real_i + (1 - alpha_i) * fake_i,
// with one alpha ~ U(0,1) drawn per row.
Matrix interpolate(const Matrix& real, const Matrix& fake, Rng& rng);
Matrix interpolate_with_alphas(const Matrix& real, const Matrix& fake,
                               const std::vector<double>& alphas);

// mean over rows of (||grad_input D(input)|| - 1)^2, recorded so that the
// outer backward through the critic parameters sees the second-order term.
// `input` is the critic's full input block, already concatenated for a
// conditional critic.
Var gradient_penalty(Tape& t, const NetworkParams& d, const TapedNet& lifted,
                     const Matrix& input);

// Evaluation-only helper: value of the penalty with d lifted internally.
double gradient_penalty_value(const NetworkParams& d, const Matrix& input);

// A critic loss with its telemetry sub-terms and the critic's parameter
// handles, all on the caller's tape. `loss` is the minimization form
//   -(mean D(real) - mean D(fake)) + gp_lambda * penalty.
struct CriticLoss {
  Var loss;
  Var wasserstein;  // mean D(real) - mean D(fake)
  Var penalty;      // unweighted gradient penalty
  TapedNet critic;
};

// Both real and fake enter as constants; gradients reach only the critic.
CriticLoss critic_loss_unconditional(Tape& t, const NetworkParams& d0,
                                     const Matrix& real, const Matrix& fake,
                                     const LossWeights& weights, Rng& rng);

// Conditional variant. Rows of real_x, fake_x and c are aligned; only the
// feature block is interpolated, the embedding block rides along unmixed.
CriticLoss critic_loss_conditional(Tape& t, const NetworkParams& dc,
                                   const Matrix& real_x, const Matrix& fake_x,
                                   const Matrix& c, const LossWeights& weights,
                                   Rng& rng);

// -mean D(fake). `fake` carries gradients to the generator that produced
// it; the critic parameters enter as frozen constants.
Var generator_loss_unconditional(Tape& t, const NetworkParams& d0, Var fake);

// -mean Dc(concat(fake_x, c)).
Var generator_loss_conditional(Tape& t, const NetworkParams& dc, Var fake_x,
                               const Matrix& c);

// rec_beta * mean over rows of ||c - A(x_gen)||^2. A enters frozen.
Var reconstruction_loss(Tape& t, const NetworkParams& a, Var x_gen,
                        const Matrix& c, const LossWeights& weights);

// Cross branch: conditionally generated fakes judged by the unconditional
// critic. The critic side sees fake_cond detached; the generator side
// differentiates through it. The reconstruction term is added by the caller.
struct CrossBranchLosses {
  CriticLoss critic;
  Var generator;
};

CrossBranchLosses cross_branch_losses(Tape& t, const NetworkParams& d0,
                                      const Matrix& real_unseen, Var fake_cond,
                                      const LossWeights& weights, Rng& rng);

}  // namespace decgan

#endif  // DECGAN_LOSSES_HPP_
