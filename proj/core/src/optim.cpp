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
#include "decgan/optim.hpp"

#include <cmath>

#include "decgan/error.hpp"

namespace decgan {

void AdamConfig::validate() const {
  if (learning_rate < 0.0) throw ConfigError("adam: learning_rate must be >= 0");
  if (beta1 < 0.0 || beta1 >= 1.0) throw ConfigError("adam: beta1 outside [0, 1)");
  if (beta2 < 0.0 || beta2 >= 1.0) throw ConfigError("adam: beta2 outside [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("adam: eps must be > 0");
}

OptimizerState make_optimizer_state(const std::vector<Matrix>& params) {
  OptimizerState state;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  for (const Matrix& p : params) {
    state.m.push_back(Matrix::zeros(p.rows(), p.cols()));
    state.v.push_back(Matrix::zeros(p.rows(), p.cols()));
  }
  return state;
}

OptimizerState make_optimizer_state(const NetworkParams& net) {
  OptimizerState state;
  state.m.reserve(net.layers.size() * 2);
  state.v.reserve(net.layers.size() * 2);
  for (const Layer& l : net.layers) {
    for (const Matrix* p : {&l.weight, &l.bias}) {
      state.m.push_back(Matrix::zeros(p->rows(), p->cols()));
      state.v.push_back(Matrix::zeros(p->rows(), p->cols()));
    }
  }
  return state;
}

namespace {

void update_one(Matrix& p, const Matrix& g, Matrix& m, Matrix& v,
                const AdamConfig& cfg, double bc1, double bc2,
                const std::string& what) {
  if (!p.same_shape(g)) {
    throw DimensionError("adam: gradient " + g.shape_str() + " does not match " +
                         what + " " + p.shape_str());
  }
  if (!g.all_finite()) {
    throw NumericError("adam: non-finite gradient for " + what);
  }
  double* pp = p.data();
  double* pm = m.data();
  double* pv = v.data();
  const double* pg = g.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    pm[i] = cfg.beta1 * pm[i] + (1.0 - cfg.beta1) * pg[i];
    pv[i] = cfg.beta2 * pv[i] + (1.0 - cfg.beta2) * pg[i] * pg[i];
    const double mhat = pm[i] / bc1;
    const double vhat = pv[i] / bc2;
    pp[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace

void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
               OptimizerState& state, const AdamConfig& config,
               const std::string& context) {
  config.validate();
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw UsageError("adam: parameter/gradient/state count mismatch for " + context);
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    update_one(params[i], grads[i], state.m[i], state.v[i], config, bc1, bc2,
               context + "[" + std::to_string(i) + "]");
  }
}

void adam_step(NetworkParams& net, const std::vector<Matrix>& grads,
               OptimizerState& state, const AdamConfig& config) {
  config.validate();
  const std::size_t n = net.layers.size() * 2;
  if (grads.size() != n || state.m.size() != n) {
    throw UsageError("adam: expected " + std::to_string(n) + " gradients for network '" +
                     net.name + "', got " + std::to_string(grads.size()));
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    update_one(net.layers[i].weight, grads[2 * i], state.m[2 * i], state.v[2 * i],
               config, bc1, bc2, net.name + " layer " + std::to_string(i) + " weight");
    update_one(net.layers[i].bias, grads[2 * i + 1], state.m[2 * i + 1],
               state.v[2 * i + 1], config, bc1, bc2,
               net.name + " layer " + std::to_string(i) + " bias");
  }
}

}  // namespace decgan
