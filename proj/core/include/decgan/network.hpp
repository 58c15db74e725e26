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
#ifndef DECGAN_NETWORK_HPP_
#define DECGAN_NETWORK_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "decgan/matrix.hpp"
#include "decgan/rng.hpp"
#include "decgan/tape.hpp"

namespace decgan {

enum class Activation { kNone, kLeakyRelu, kRelu };

// One fully connected layer. weight is (in x out), bias is (1 x out).
struct Layer {
  Matrix weight;
  Matrix bias;
  Activation activation = Activation::kNone;
};

// A small MLP with a name used in error messages, telemetry, and
// checkpoints. Layers chain: out-dim of layer i equals in-dim of layer i+1.
struct NetworkParams {
  std::string name;
  std::vector<Layer> layers;
  double leaky_slope = 0.2;

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t param_count() const;
  void validate() const;
};

// Builds a network from (in, hidden..., out) widths with the given
// activations (one per layer). Weights ~ N(0, scale^2), biases zero.
NetworkParams make_network(std::string name, const std::vector<std::size_t>& widths,
                           const std::vector<Activation>& activations, Rng& rng,
                           double scale, double leaky_slope = 0.2);

// Parameter handles for one network lifted onto a tape as leaves,
// in layer order: weights[i], biases[i].
struct TapedNet {
  std::vector<Var> weights;
  std::vector<Var> biases;

  std::vector<Var> all() const;
};

// Enters every parameter of `net` as a leaf on `t`.
TapedNet lift(Tape& t, const NetworkParams& net);

// Recorded forward pass using the lifted parameter handles.
Var forward(const NetworkParams& net, const TapedNet& lifted, Var input);

// Recorded forward pass with parameters entered as constant leaves.
// Gradients reach the input but parameter leaves are not exposed.
Var forward_frozen(Tape& t, const NetworkParams& net, Var input);

// Plain forward evaluation, no tape involved.
Matrix forward_values(const NetworkParams& net, const Matrix& input);

// Writes back updated parameter values after an optimizer step.
void assign_from(NetworkParams& net, const std::vector<Matrix>& weights,
                 const std::vector<Matrix>& biases);

}  // namespace decgan

#endif  // DECGAN_NETWORK_HPP_
