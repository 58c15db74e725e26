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
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "decgan/losses.hpp"
#include "decgan/matrix.hpp"
#include "decgan/network.hpp"
#include "decgan/optim.hpp"
#include "decgan/rng.hpp"
#include "decgan/tape.hpp"
#include "test_support.hpp"

using namespace decgan;
using decgan::testing::fd_gradients;
using decgan::testing::max_rel_err;
using decgan::testing::rel_err;

namespace {

NetworkParams linear_critic(const Matrix& w, double bias) {
  NetworkParams d;
  d.name = "d_lin";
  Layer l;
  l.weight = w;
  l.bias = Matrix::filled(1, 1, bias);
  l.activation = Activation::kNone;
  d.layers.push_back(l);
  return d;
}

double weight_norm(const Matrix& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w.data()[i] * w.data()[i];
  return std::sqrt(acc);
}

// Collects parameter values of a lifted net in TapedNet::all() order.
std::vector<Matrix> grad_values(const Gradients& g, const TapedNet& net) {
  std::vector<Matrix> out;
  for (Var v : net.all()) out.push_back(g.value_at(v));
  return out;
}

}  // namespace

TEST_CASE("interpolation stays on the segment and honors given alphas") {
  Rng rng(3);
  const Matrix real = rng.uniform_matrix(5, 3, 1.0, 2.0);
  const Matrix fake = rng.uniform_matrix(5, 3, -2.0, -1.0);
  const Matrix mix = interpolate(real, fake, rng);
  REQUIRE(mix.rows() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(mix(i, j) <= real(i, j));
      CHECK(mix(i, j) >= fake(i, j));
    }
  }

  const Matrix ends = interpolate_with_alphas(real, fake, {1, 0, 1, 0, 1});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(ends(0, j) == real(0, j));
    CHECK(ends(1, j) == fake(1, j));
  }
  CHECK_THROWS(interpolate_with_alphas(real, fake, {1, 0}));
}

TEST_CASE("penalty of a linear critic is exactly the squared norm excess") {
  // D(x) = x w + b has constant input gradient w, so the penalty collapses
  // to (||w|| - 1)^2 regardless of the evaluation points.
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix w = rng.normal_matrix(6, 1);
    const NetworkParams d = linear_critic(w, rng.normal());
    const Matrix input = rng.normal_matrix(7, 6, 0.0, 3.0);
    const double expect = std::pow(weight_norm(w) - 1.0, 2.0);
    CHECK(std::abs(gradient_penalty_value(d, input) - expect) < 1e-10);
  }

  Matrix unit(4, 1);
  unit(0, 0) = 0.5;
  unit(1, 0) = 0.5;
  unit(2, 0) = 0.5;
  unit(3, 0) = 0.5;
  const NetworkParams d1 = linear_critic(unit, 0.25);
  CHECK(gradient_penalty_value(d1, rng.normal_matrix(3, 4)) == 0.0);

  Matrix off = unit;
  off(0, 0) = 0.5 + 1e-7;
  const NetworkParams d2 = linear_critic(off, 0.25);
  CHECK(gradient_penalty_value(d2, rng.normal_matrix(3, 4)) > 0.0);
}

TEST_CASE("penalty of a two layer critic matches finite-difference row norms") {
  Rng rng(21);
  NetworkParams d = make_network("d", {4, 8, 1},
                                 {Activation::kLeakyRelu, Activation::kNone},
                                 rng, 0.5);
  Matrix input;
  // Keep every first-layer preactivation away from the kink so central
  // differences stay on one branch.
  for (int draw = 0;; ++draw) {
    REQUIRE(draw < 200);
    input = rng.normal_matrix(6, 4);
    const Matrix pre = add_values(
        matmul_values(input, d.layers[0].weight),
        matmul_values(Matrix::filled(6, 1, 1.0), d.layers[0].bias));
    double margin = 1e9;
    for (std::size_t i = 0; i < pre.size(); ++i) {
      margin = std::min(margin, std::abs(pre.data()[i]));
    }
    if (margin > 1e-3) break;
  }

  const double h = 1e-6;
  double fd_penalty = 0.0;
  for (std::size_t i = 0; i < input.rows(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < input.cols(); ++j) {
      Matrix hi = input, lo = input;
      hi(i, j) += h;
      lo(i, j) -= h;
      const double g = (forward_values(d, hi)(i, 0) - forward_values(d, lo)(i, 0)) / (2 * h);
      sq += g * g;
    }
    fd_penalty += std::pow(std::sqrt(sq) - 1.0, 2.0);
  }
  fd_penalty /= static_cast<double>(input.rows());

  CHECK(rel_err(gradient_penalty_value(d, input), fd_penalty) < 1e-6);
}

TEST_CASE("unconditional critic loss on degenerate critics") {
  LossWeights weights;
  weights.gp_lambda = 10.0;
  Rng data(4);
  const Matrix real = data.normal_matrix(5, 3, 1.0, 0.5);
  const Matrix fake = data.normal_matrix(5, 3, -1.0, 0.5);

  SUBCASE("all-zero critic scores nothing and pays the full unit penalty") {
    Rng rng(1);
    NetworkParams d = make_network(
        "d", {3, 4, 1}, {Activation::kLeakyRelu, Activation::kNone}, rng, 0.0);
    Tape t;
    Rng mix(2);
    const CriticLoss l = critic_loss_unconditional(t, d, real, fake, weights, mix);
    CHECK(l.wasserstein.scalar() == 0.0);
    CHECK(l.penalty.scalar() == 1.0);
    CHECK(l.loss.scalar() == weights.gp_lambda);
  }

  SUBCASE("identity critic gives the plain mean gap and no penalty") {
    const NetworkParams d = linear_critic(Matrix{{1.0}}, 0.0);
    Tape t;
    Rng mix(2);
    const CriticLoss l = critic_loss_unconditional(
        t, d, Matrix{{2.0}, {4.0}}, Matrix{{1.0}, {1.0}}, weights, mix);
    CHECK(l.wasserstein.scalar() == 2.0);
    CHECK(l.penalty.scalar() == 0.0);
    CHECK(l.loss.scalar() == -2.0);
  }
}

TEST_CASE("a trained critic separates the pools it is shown") {
  LossWeights weights;
  Rng data(8);
  const Matrix real = data.normal_matrix(64, 2, 2.0, 0.5);
  const Matrix fake = data.normal_matrix(64, 2, -2.0, 0.5);

  Rng init(1);
  NetworkParams d = make_network("d", {2, 8, 1},
                                 {Activation::kLeakyRelu, Activation::kNone},
                                 init, 0.02);
  OptimizerState state = make_optimizer_state(d);
  AdamConfig adam;
  adam.learning_rate = 1e-3;

  Rng mix(5);
  std::vector<double> wasserstein;
  for (int step = 0; step < 200; ++step) {
    Tape t;
    const CriticLoss l = critic_loss_unconditional(t, d, real, fake, weights, mix);
    wasserstein.push_back(l.wasserstein.scalar());
    const Gradients g = backward(l.loss, l.critic.all());
    adam_step(d, grad_values(g, l.critic), state, adam);
  }
  const double head =
      std::accumulate(wasserstein.begin(), wasserstein.begin() + 20, 0.0) / 20.0;
  const double tail =
      std::accumulate(wasserstein.end() - 20, wasserstein.end(), 0.0) / 20.0;
  CHECK(tail > head);
  CHECK(tail > 0.5);
}

TEST_CASE("generator loss") {
  Rng data(6);
  const Matrix z = data.normal_matrix(5, 3);

  SUBCASE("zero critic ignores the generator entirely") {
    Rng init(1);
    NetworkParams d = make_network(
        "d", {4, 4, 1}, {Activation::kLeakyRelu, Activation::kNone}, init, 0.0);
    Tape t;
    Var fake = t.leaf(data.normal_matrix(5, 4));
    Var loss = generator_loss_unconditional(t, d, fake);
    CHECK(loss.scalar() == 0.0);
    const Gradients g = backward(loss, {fake});
    CHECK(bitwise_equal(g.value_at(fake), Matrix::zeros(5, 4)));
  }

  SUBCASE("gradients through a one layer generator match finite differences") {
    Rng init(2);
    NetworkParams d = make_network(
        "d", {4, 6, 1}, {Activation::kLeakyRelu, Activation::kNone}, init, 0.4);
    const Matrix w0 = init.normal_matrix(3, 4, 0.0, 0.6);
    const Matrix b0 = init.normal_matrix(1, 4, 0.0, 0.3);

    const auto objective = [&](const std::vector<Matrix>& p) {
      Tape t;
      Var fake = leaky_relu(affine(t.leaf(z), t.leaf(p[0]), t.leaf(p[1])), 0.2);
      return generator_loss_unconditional(t, d, fake).scalar();
    };

    Tape t;
    Var w = t.leaf(w0);
    Var b = t.leaf(b0);
    Var fake = leaky_relu(affine(t.leaf(z), w, b), 0.2);
    const Gradients g = backward(generator_loss_unconditional(t, d, fake), {w, b});

    const std::vector<Matrix> fd = fd_gradients(objective, {w0, b0}, 1e-5);
    CHECK(max_rel_err(g.value_at(w), fd[0]) < 1e-5);
    CHECK(max_rel_err(g.value_at(b), fd[1]) < 1e-5);
  }
}

TEST_CASE("conditional critic loss") {
  LossWeights weights;
  Rng data(14);
  const Matrix real_x = data.normal_matrix(6, 3, 1.0, 1.0);
  const Matrix fake_x = data.normal_matrix(6, 3, -1.0, 1.0);
  const Matrix c = data.uniform_matrix(6, 2);

  SUBCASE("width-zero embeddings reduce it to the unconditional loss") {
    Rng init(3);
    const NetworkParams d = make_network(
        "d", {3, 5, 1}, {Activation::kLeakyRelu, Activation::kNone}, init, 0.3);
    const Matrix no_embed(6, 0);

    Tape tc;
    Rng mix_c(9);
    const CriticLoss lc =
        critic_loss_conditional(tc, d, real_x, fake_x, no_embed, weights, mix_c);
    Tape tu;
    Rng mix_u(9);
    const CriticLoss lu =
        critic_loss_unconditional(tu, d, real_x, fake_x, weights, mix_u);

    CHECK(lc.loss.scalar() == lu.loss.scalar());
    CHECK(lc.wasserstein.scalar() == lu.wasserstein.scalar());
    const Gradients gc = backward(lc.loss, lc.critic.all());
    const Gradients gu = backward(lu.loss, lu.critic.all());
    const auto hc = lc.critic.all();
    const auto hu = lu.critic.all();
    for (std::size_t i = 0; i < hc.size(); ++i) {
      CHECK(bitwise_equal(gc.value_at(hc[i]), gu.value_at(hu[i])));
    }
  }

  SUBCASE("zero critic pays the unit penalty") {
    Rng init(3);
    NetworkParams dc = make_network(
        "dc", {5, 5, 1}, {Activation::kLeakyRelu, Activation::kNone}, init, 0.0);
    Tape t;
    Rng mix(9);
    const CriticLoss l =
        critic_loss_conditional(t, dc, real_x, fake_x, c, weights, mix);
    CHECK(l.wasserstein.scalar() == 0.0);
    CHECK(l.loss.scalar() == weights.gp_lambda);
  }

  SUBCASE("parameter gradients match finite differences") {
    Rng init(5);
    NetworkParams dc = make_network(
        "dc", {5, 6, 1}, {Activation::kLeakyRelu, Activation::kNone}, init, 0.4);

    // Same seed on every call so the interpolation alphas are pinned and the
    // objective is a deterministic function of the parameters.
    const auto objective = [&](const std::vector<Matrix>& p) {
      NetworkParams trial = dc;
      trial.layers[0].weight = p[0];
      trial.layers[0].bias = p[1];
      trial.layers[1].weight = p[2];
      trial.layers[1].bias = p[3];
      Tape t;
      Rng mix(9);
      return critic_loss_conditional(t, trial, real_x, fake_x, c, weights, mix)
          .loss.scalar();
    };

    Tape t;
    Rng mix(9);
    const CriticLoss l =
        critic_loss_conditional(t, dc, real_x, fake_x, c, weights, mix);
    const Gradients g = backward(l.loss, l.critic.all());

    const std::vector<Matrix> at = {dc.layers[0].weight, dc.layers[0].bias,
                                    dc.layers[1].weight, dc.layers[1].bias};
    const std::vector<Matrix> fd = fd_gradients(objective, at, 1e-4);
    const auto handles = l.critic.all();
    for (std::size_t i = 0; i < handles.size(); ++i) {
      CHECK(max_rel_err(g.value_at(handles[i]), fd[i]) < 1e-4);
    }
  }

  SUBCASE("embedding columns ride along unmixed") {
    // A critic that reads only the embedding block scores interpolates the
    // same as real rows, so its input gradient never sees the mixing.
    Matrix w(5, 1);
    w(3, 0) = 1.0;
    w(4, 0) = 1.0;
    const NetworkParams dc = linear_critic(w, 0.0);
    Tape t;
    Rng mix(9);
    const CriticLoss l =
        critic_loss_conditional(t, dc, real_x, fake_x, c, weights, mix);
    // Scores depend on c alone: mean D(real block) == mean D(fake block).
    CHECK(std::abs(l.wasserstein.scalar()) < 1e-12);
  }
}

TEST_CASE("reconstruction loss") {
  LossWeights weights;
  weights.rec_beta = 0.01;
  Rng data(31);
  NetworkParams a;
  a.name = "a";
  Layer l;
  l.weight = data.normal_matrix(4, 2, 0.0, 0.5);
  l.bias = Matrix::zeros(1, 2);
  l.activation = Activation::kNone;
  a.layers.push_back(l);

  SUBCASE("perfect regression costs nothing") {
    const Matrix x = data.normal_matrix(5, 4);
    const Matrix c = forward_values(a, x);
    Tape t;
    Var loss = reconstruction_loss(t, a, t.leaf(x), c, weights);
    CHECK(loss.scalar() == 0.0);
  }

  SUBCASE("zero regressor leaves the squared embedding norm") {
    NetworkParams zero = a;
    zero.layers[0].weight = Matrix::zeros(4, 2);
    Tape t;
    Var loss = reconstruction_loss(t, zero, t.leaf(Matrix::zeros(1, 4)),
                                   Matrix{{1.0, 0.0}}, weights);
    CHECK(loss.scalar() == weights.rec_beta * 1.0);
  }

  SUBCASE("gradients to the generated features match finite differences") {
    const Matrix x0 = data.normal_matrix(3, 4);
    const Matrix c = data.uniform_matrix(3, 2);
    const auto objective = [&](const std::vector<Matrix>& p) {
      Tape t;
      return reconstruction_loss(t, a, t.leaf(p[0]), c, weights).scalar();
    };
    Tape t;
    Var x = t.leaf(x0);
    const Gradients g = backward(reconstruction_loss(t, a, x, c, weights), {x});
    const std::vector<Matrix> fd = fd_gradients(objective, {x0}, 1e-6);
    CHECK(max_rel_err(g.value_at(x), fd[0]) < 1e-6);
  }
}

TEST_CASE("cross branch losses") {
  LossWeights weights;
  Rng data(41);
  const Matrix real = data.normal_matrix(6, 3, 1.5, 0.8);
  const Matrix fake_values = data.normal_matrix(6, 3, -1.5, 0.8);
  Rng init(7);
  NetworkParams d0 = make_network(
      "d0", {3, 6, 1}, {Activation::kLeakyRelu, Activation::kNone}, init, 0.3);

  SUBCASE("critic side equals the unconditional loss on the same tensors") {
    Tape t;
    Rng mix_a(9);
    const CrossBranchLosses cross =
        cross_branch_losses(t, d0, real, t.leaf(fake_values), weights, mix_a);
    Tape tu;
    Rng mix_b(9);
    const CriticLoss uncond =
        critic_loss_unconditional(tu, d0, real, fake_values, weights, mix_b);
    CHECK(cross.critic.loss.scalar() == uncond.loss.scalar());
    CHECK(cross.critic.wasserstein.scalar() == uncond.wasserstein.scalar());
    CHECK(cross.critic.penalty.scalar() == uncond.penalty.scalar());
  }

  SUBCASE("generator side equals the plain generator loss") {
    Tape t;
    Rng mix(9);
    Var fake = t.leaf(fake_values);
    const CrossBranchLosses cross =
        cross_branch_losses(t, d0, real, fake, weights, mix);
    Tape tg;
    const double direct =
        generator_loss_unconditional(tg, d0, tg.leaf(fake_values)).scalar();
    CHECK(cross.generator.scalar() == direct);
  }

  SUBCASE("the critic side never backpropagates into the generator") {
    Tape t;
    Rng mix(9);
    Var fake = t.leaf(fake_values);
    const CrossBranchLosses cross =
        cross_branch_losses(t, d0, real, fake, weights, mix);
    const Gradients g_critic = backward(cross.critic.loss, {fake});
    CHECK(bitwise_equal(g_critic.value_at(fake), Matrix::zeros(6, 3)));
    const Gradients g_gen = backward(cross.generator, {fake});
    CHECK_FALSE(bitwise_equal(g_gen.value_at(fake), Matrix::zeros(6, 3)));
  }

  SUBCASE("penalty weight scales only the penalty term") {
    LossWeights w10 = weights;
    w10.gp_lambda = 10.0;
    LossWeights w20 = weights;
    w20.gp_lambda = 20.0;
    Tape ta;
    Rng mix_a(9);
    const CrossBranchLosses c10 =
        cross_branch_losses(ta, d0, real, ta.leaf(fake_values), w10, mix_a);
    Tape tb;
    Rng mix_b(9);
    const CrossBranchLosses c20 =
        cross_branch_losses(tb, d0, real, tb.leaf(fake_values), w20, mix_b);
    const double diff = c20.critic.loss.scalar() - c10.critic.loss.scalar();
    CHECK(rel_err(diff, 10.0 * c10.critic.penalty.scalar()) < 1e-12);
  }

  SUBCASE("zero critic") {
    Rng z(1);
    NetworkParams dz = make_network(
        "d0", {3, 6, 1}, {Activation::kLeakyRelu, Activation::kNone}, z, 0.0);
    Tape t;
    Rng mix(9);
    const CrossBranchLosses cross =
        cross_branch_losses(t, dz, real, t.leaf(fake_values), weights, mix);
    CHECK(cross.critic.loss.scalar() == weights.gp_lambda);
    CHECK(cross.generator.scalar() == 0.0);
  }
}
