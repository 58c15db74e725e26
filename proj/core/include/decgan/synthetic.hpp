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
#ifndef DECGAN_SYNTHETIC_HPP_
#define DECGAN_SYNTHETIC_HPP_

#include <cstdint>

#include "decgan/data.hpp"
#include "decgan/matrix.hpp"

namespace decgan {

// Desk-scale benchmark generator. Class embeddings are uniform on [0,1],
// every class mean is relu(c(y) * mixing), and samples are the mean plus
// isotropic Gaussian noise clipped at zero. The ReLU-of-linear map keeps
// the benchmark inside the generator family, so end-to-end accuracy
// reflects training rather than model misspecification.
struct SyntheticSpec {
  std::size_t n_seen_classes = 10;
  std::size_t n_unseen_classes = 5;
  std::size_t samples_per_class = 200;
  std::size_t feature_dim = 64;
  std::size_t embed_dim = 16;
  double cluster_std = 0.1;
  std::uint64_t seed = 1;
  // embed_dim x feature_dim semantic-to-visual map; empty means "draw one
  // from the seed stream".
  Matrix mixing;

  void validate() const;
};

// Deterministic: the same spec yields a bitwise identical dataset.
// Seen classes take ids [0, n_seen); unseen take [n_seen, n_seen+n_unseen).
// Each seen class splits 80/20 into train/test.
GzslDataset make_synthetic(const SyntheticSpec& spec);

// True cluster means, one row per class id. Ground-truth oracle for
// evaluation tests.
Matrix synthetic_class_means(const SyntheticSpec& spec);

}  // namespace decgan

#endif  // DECGAN_SYNTHETIC_HPP_
