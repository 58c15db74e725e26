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
#ifndef DECGAN_MODEL_HPP_
#define DECGAN_MODEL_HPP_

#include <cstdint>

#include "decgan/matrix.hpp"
#include "decgan/network.hpp"
#include "decgan/rng.hpp"

namespace decgan {

// Layer widths of the generator stack. embed_dim follows the dataset's
// class-embedding table (312 for CUB attributes, 102 for SUN, 1024 for
// FLO sentence embeddings).
struct ModelDims {
  std::size_t noise_dim = 512;
  std::size_t prior_dim = 1024;
  std::size_t hidden_dim = 4096;
  std::size_t feature_dim = 2048;
  std::size_t embed_dim = 312;

  void validate() const;
  bool operator==(const ModelDims&) const = default;
};

// The five adversarial networks. The attribute regressor A is produced
// separately by pretraining (see trainer) and stays frozen.
//
//   g1: noise -> prior           (structured prior, leaky ReLU)
//   g2: prior -> hidden -> feature   (leaky ReLU, ReLU)
//   gc: prior+embed -> hidden -> feature  (leaky ReLU, ReLU)
//   d0: feature -> hidden -> 1   (leaky ReLU, linear score)
//   dc: feature+embed -> hidden -> 1
struct DecganModel {
  ModelDims dims;
  NetworkParams g1, g2, gc, d0, dc;

  std::size_t param_count() const;
};

// Initializes all five networks. Weights ~ N(0, scale^2), biases zero.
DecganModel init_decgan(const ModelDims& dims, Rng& rng, double scale = 0.02,
                        double leaky_slope = 0.2);

// s = G1(z), shape n x prior_dim.
Matrix structured_prior(const NetworkParams& g1, const Matrix& z);

// x0 = G2(G1(z)), shape n x feature_dim, entries >= 0.
Matrix generate_unconditional(const NetworkParams& g1, const NetworkParams& g2,
                              const Matrix& z);

// xc = Gc(concat(s, c)), shape n x feature_dim, entries >= 0.
Matrix generate_conditional(const NetworkParams& gc, const Matrix& s,
                            const Matrix& c);

// Critic score, one unconstrained real per row. The caller concatenates
// feature and embedding blocks when scoring with Dc.
Matrix discriminate(const NetworkParams& d, const Matrix& input);

// Attribute estimate from the frozen linear regressor A.
Matrix regress_attributes(const NetworkParams& a, const Matrix& x);

// Single zero-initialized affine layer feature_dim -> embed_dim, the
// shape produced by regressor pretraining.
NetworkParams make_regressor(std::size_t feature_dim, std::size_t embed_dim);

}  // namespace decgan

#endif  // DECGAN_MODEL_HPP_
