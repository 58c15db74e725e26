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
#include "decgan/network.hpp"

#include <algorithm>
#include <utility>

#include "decgan/error.hpp"

namespace decgan {

std::size_t NetworkParams::in_dim() const {
  if (layers.empty()) throw ConfigError("network '" + name + "' has no layers");
  return layers.front().weight.rows();
}

std::size_t NetworkParams::out_dim() const {
  if (layers.empty()) throw ConfigError("network '" + name + "' has no layers");
  return layers.back().weight.cols();
}

std::size_t NetworkParams::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

void NetworkParams::validate() const {
  if (layers.empty()) throw ConfigError("network '" + name + "' has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.bias.rows() != 1 || l.bias.cols() != l.weight.cols()) {
      throw DimensionError("network '" + name + "' layer " + std::to_string(i) +
                           ": bias " + l.bias.shape_str() + " does not match weight " +
                           l.weight.shape_str());
    }
    if (i > 0 && layers[i - 1].weight.cols() != l.weight.rows()) {
      throw DimensionError("network '" + name + "' layer " + std::to_string(i) +
                           ": weight " + l.weight.shape_str() + " does not chain from " +
                           layers[i - 1].weight.shape_str());
    }
    if (!l.weight.all_finite() || !l.bias.all_finite()) {
      throw NumericError("network '" + name + "' layer " + std::to_string(i) +
                         " holds non-finite parameters");
    }
  }
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
    throw ConfigError("network '" + name + "': leaky slope " +
                      std::to_string(leaky_slope) + " outside (0, 1)");
  }
}

NetworkParams make_network(std::string name, const std::vector<std::size_t>& widths,
                           const std::vector<Activation>& activations, Rng& rng,
                           double scale, double leaky_slope) {
  if (widths.size() < 2) throw ConfigError("make_network: need at least two widths");
  if (activations.size() != widths.size() - 1) {
    throw ConfigError("make_network: " + std::to_string(widths.size() - 1) +
                      " layers but " + std::to_string(activations.size()) +
                      " activations");
  }
  NetworkParams net;
  net.name = std::move(name);
  net.leaky_slope = leaky_slope;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Layer l;
    l.weight = rng.normal_matrix(widths[i], widths[i + 1], 0.0, scale);
    l.bias = Matrix::zeros(1, widths[i + 1]);
    l.activation = activations[i];
    net.layers.push_back(std::move(l));
  }
  net.validate();
  return net;
}

std::vector<Var> TapedNet::all() const {
  std::vector<Var> out;
  out.reserve(weights.size() * 2);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out.push_back(weights[i]);
    out.push_back(biases[i]);
  }
  return out;
}

TapedNet lift(Tape& t, const NetworkParams& net) {
  TapedNet lifted;
  lifted.weights.reserve(net.layers.size());
  lifted.biases.reserve(net.layers.size());
  for (const Layer& l : net.layers) {
    lifted.weights.push_back(t.leaf(l.weight));
    lifted.biases.push_back(t.leaf(l.bias));
  }
  return lifted;
}

namespace {

Var apply_activation(Var h, Activation act, double slope) {
  switch (act) {
    case Activation::kNone:
      return h;
    case Activation::kLeakyRelu:
      return leaky_relu(h, slope);
    case Activation::kRelu:
      return relu(h);
  }
  throw UsageError("unknown activation");
}

}  // namespace

Var forward(const NetworkParams& net, const TapedNet& lifted, Var input) {
  if (lifted.weights.size() != net.layers.size() ||
      lifted.biases.size() != net.layers.size()) {
    throw UsageError("forward: lifted parameter count does not match network '" +
                     net.name + "'");
  }
  Var h = input;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    h = affine(h, lifted.weights[i], lifted.biases[i]);
    h = apply_activation(h, net.layers[i].activation, net.leaky_slope);
  }
  return h;
}

Var forward_frozen(Tape& t, const NetworkParams& net, Var input) {
  Var h = input;
  for (const Layer& l : net.layers) {
    h = affine(h, t.leaf(l.weight), t.leaf(l.bias));
    h = apply_activation(h, l.activation, net.leaky_slope);
  }
  return h;
}

Matrix forward_values(const NetworkParams& net, const Matrix& input) {
  if (net.layers.empty()) throw ConfigError("network '" + net.name + "' has no layers");
  if (input.cols() != net.in_dim()) {
    throw DimensionError("forward: input " + input.shape_str() +
                         " does not match network '" + net.name + "' input width " +
                         std::to_string(net.in_dim()));
  }
  Matrix h = input;
  for (const Layer& l : net.layers) {
    Matrix z = matmul_values(h, l.weight);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      for (std::size_t j = 0; j < z.cols(); ++j) {
        double v = z(i, j) + l.bias(0, j);
        switch (l.activation) {
          case Activation::kNone:
            break;
          case Activation::kLeakyRelu:
            v = v >= 0.0 ? v : net.leaky_slope * v;
            break;
          case Activation::kRelu:
            v = v > 0.0 ? v : 0.0;
            break;
        }
        z(i, j) = v;
      }
    }
    h = std::move(z);
  }
  require_finite(h, "forward through '" + net.name + "'");
  return h;
}

void assign_from(NetworkParams& net, const std::vector<Matrix>& weights,
                 const std::vector<Matrix>& biases) {
  if (weights.size() != net.layers.size() || biases.size() != net.layers.size()) {
    throw UsageError("assign_from: layer count mismatch for network '" + net.name +
                     "'");
  }
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!weights[i].same_shape(net.layers[i].weight) ||
        !biases[i].same_shape(net.layers[i].bias)) {
      throw DimensionError("assign_from: shape mismatch at layer " + std::to_string(i) +
                           " of network '" + net.name + "'");
    }
    net.layers[i].weight = weights[i];
    net.layers[i].bias = biases[i];
  }
}

}  // namespace decgan
