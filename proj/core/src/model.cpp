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
#include "decgan/model.hpp"

#include <string>

#include "decgan/error.hpp"

namespace decgan {

void ModelDims::validate() const {
  auto check = [](std::size_t v, const char* name) {
    if (v == 0) {
      throw ConfigError(std::string("model dims: ") + name + " must be positive");
    }
  };
  check(noise_dim, "noise_dim");
  check(prior_dim, "prior_dim");
  check(hidden_dim, "hidden_dim");
  check(feature_dim, "feature_dim");
  check(embed_dim, "embed_dim");
}

std::size_t DecganModel::param_count() const {
  return g1.param_count() + g2.param_count() + gc.param_count() +
         d0.param_count() + dc.param_count();
}

DecganModel init_decgan(const ModelDims& dims, Rng& rng, double scale,
                        double leaky_slope) {
  dims.validate();
  DecganModel m;
  m.dims = dims;
  m.g1 = make_network("G1", {dims.noise_dim, dims.prior_dim},
                      {Activation::kLeakyRelu}, rng, scale, leaky_slope);
  m.g2 = make_network("G2", {dims.prior_dim, dims.hidden_dim, dims.feature_dim},
                      {Activation::kLeakyRelu, Activation::kRelu}, rng, scale,
                      leaky_slope);
  m.gc = make_network(
      "Gc", {dims.prior_dim + dims.embed_dim, dims.hidden_dim, dims.feature_dim},
      {Activation::kLeakyRelu, Activation::kRelu}, rng, scale, leaky_slope);
  m.d0 = make_network("D0", {dims.feature_dim, dims.hidden_dim, 1},
                      {Activation::kLeakyRelu, Activation::kNone}, rng, scale,
                      leaky_slope);
  m.dc = make_network("Dc", {dims.feature_dim + dims.embed_dim, dims.hidden_dim, 1},
                      {Activation::kLeakyRelu, Activation::kNone}, rng, scale,
                      leaky_slope);
  return m;
}

Matrix structured_prior(const NetworkParams& g1, const Matrix& z) {
  return forward_values(g1, z);
}

Matrix generate_unconditional(const NetworkParams& g1, const NetworkParams& g2,
                              const Matrix& z) {
  return forward_values(g2, forward_values(g1, z));
}

Matrix generate_conditional(const NetworkParams& gc, const Matrix& s,
                            const Matrix& c) {
  if (s.rows() != c.rows()) {
    throw DimensionError("generate_conditional: prior batch " + s.shape_str() +
                         " and embedding batch " + c.shape_str() +
                         " differ in rows");
  }
  return forward_values(gc, concat_cols_values(s, c));
}

Matrix discriminate(const NetworkParams& d, const Matrix& input) {
  return forward_values(d, input);
}

Matrix regress_attributes(const NetworkParams& a, const Matrix& x) {
  return forward_values(a, x);
}

NetworkParams make_regressor(std::size_t feature_dim, std::size_t embed_dim) {
  NetworkParams a;
  a.name = "A";
  Layer l;
  l.weight = Matrix::zeros(feature_dim, embed_dim);
  l.bias = Matrix::zeros(1, embed_dim);
  l.activation = Activation::kNone;
  a.layers.push_back(std::move(l));
  return a;
}

}  // namespace decgan
