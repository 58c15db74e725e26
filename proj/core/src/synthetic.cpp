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
#include "decgan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "decgan/error.hpp"

namespace decgan {

void SyntheticSpec::validate() const {
  if (n_seen_classes == 0 || n_unseen_classes == 0) {
    throw ConfigError("synthetic spec: class counts must be >= 1");
  }
  if (samples_per_class == 0) {
    throw ConfigError("synthetic spec: samples_per_class must be >= 1");
  }
  if (feature_dim == 0 || embed_dim == 0) {
    throw ConfigError("synthetic spec: dimensions must be positive");
  }
  if (!(cluster_std > 0.0)) {
    throw ConfigError("synthetic spec: cluster_std must be > 0");
  }
  if (!mixing.empty() &&
      (mixing.rows() != embed_dim || mixing.cols() != feature_dim)) {
    throw ConfigError("synthetic spec: mixing is " + mixing.shape_str() +
                      ", expected " + std::to_string(embed_dim) + "x" +
                      std::to_string(feature_dim));
  }
}

namespace {

// Embeddings and the mixing map are drawn before any sample noise, in a
// fixed order, so synthetic_class_means and make_synthetic see the same
// stream prefix for the same seed.
struct SyntheticGround {
  Matrix embeddings;  // n_classes x embed_dim
  Matrix means;       // n_classes x feature_dim
};

SyntheticGround synthetic_ground(const SyntheticSpec& spec, Rng& rng) {
  const std::size_t n_classes = spec.n_seen_classes + spec.n_unseen_classes;
  SyntheticGround g;
  g.embeddings = rng.uniform_matrix(n_classes, spec.embed_dim);
  Matrix mixing = spec.mixing;
  if (mixing.empty()) {
    mixing = rng.normal_matrix(spec.embed_dim, spec.feature_dim, 0.0,
                               1.0 / std::sqrt(static_cast<double>(spec.embed_dim)));
  }
  g.means = matmul_values(g.embeddings, mixing);
  for (std::size_t i = 0; i < g.means.size(); ++i) {
    g.means.data()[i] = std::max(0.0, g.means.data()[i]);
  }
  return g;
}

}  // namespace

Matrix synthetic_class_means(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  return synthetic_ground(spec, rng).means;
}

GzslDataset make_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const SyntheticGround g = synthetic_ground(spec, rng);
  const std::size_t n_classes = spec.n_seen_classes + spec.n_unseen_classes;
  const std::size_t spc = spec.samples_per_class;
  const std::size_t train_per_class = spc * 4 / 5;

  GzslDataset ds;
  std::vector<int> ids(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) ids[c] = static_cast<int>(c);
  ds.embeddings = ClassEmbeddingTable(ids, g.embeddings);
  ds.seen_classes.assign(ids.begin(), ids.begin() + spec.n_seen_classes);
  ds.unseen_classes.assign(ids.begin() + spec.n_seen_classes, ids.end());

  ds.seen_train_x = Matrix(spec.n_seen_classes * train_per_class, spec.feature_dim);
  ds.seen_test_x =
      Matrix(spec.n_seen_classes * (spc - train_per_class), spec.feature_dim);
  ds.unseen_pool_x = Matrix(spec.n_unseen_classes * spc, spec.feature_dim);
  std::vector<int> pool_labels;

  std::size_t train_row = 0, test_row = 0, pool_row = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double* mu = g.means.row(c);
    for (std::size_t s = 0; s < spc; ++s) {
      double* dst;
      if (c < spec.n_seen_classes) {
        if (s < train_per_class) {
          dst = ds.seen_train_x.row(train_row++);
          ds.seen_train_y.push_back(static_cast<int>(c));
        } else {
          dst = ds.seen_test_x.row(test_row++);
          ds.seen_test_y.push_back(static_cast<int>(c));
        }
      } else {
        dst = ds.unseen_pool_x.row(pool_row++);
        pool_labels.push_back(static_cast<int>(c));
      }
      for (std::size_t f = 0; f < spec.feature_dim; ++f) {
        dst[f] = std::max(0.0, mu[f] + rng.normal(0.0, spec.cluster_std));
      }
    }
  }
  ds.set_unseen_pool_labels(std::move(pool_labels));
  ds.validate();
  return ds;
}

}  // namespace decgan
