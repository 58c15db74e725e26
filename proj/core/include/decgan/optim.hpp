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
#ifndef DECGAN_OPTIM_HPP_
#define DECGAN_OPTIM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "decgan/matrix.hpp"
#include "decgan/network.hpp"

namespace decgan {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps = 1e-8;

  void validate() const;
};

// First/second moment accumulators, one pair per parameter matrix, plus the
// shared step counter used for bias correction.
struct OptimizerState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t step = 0;
};

// Zeroed state mirroring the given parameter shapes.
OptimizerState make_optimizer_state(const std::vector<Matrix>& params);

// State sized for a network's parameters in [w0, b0, w1, b1, ...] order,
// matching TapedNet::all().
OptimizerState make_optimizer_state(const NetworkParams& net);

// Bias-corrected adaptive moment update, in place. A non-finite gradient
// entry aborts with a NumericError naming the offending parameter via
// `context`.
void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
               OptimizerState& state, const AdamConfig& config,
               const std::string& context);

// Updates every parameter of `net`, gradients in [w0, b0, w1, b1, ...]
// order.
void adam_step(NetworkParams& net, const std::vector<Matrix>& grads,
               OptimizerState& state, const AdamConfig& config);

}  // namespace decgan

#endif  // DECGAN_OPTIM_HPP_
