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
#ifndef DECGAN_DATA_HPP_
#define DECGAN_DATA_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "decgan/matrix.hpp"
#include "decgan/rng.hpp"

namespace decgan {

// class id -> embedding row. Uniform width, finite entries.
class ClassEmbeddingTable {
 public:
  ClassEmbeddingTable() = default;
  ClassEmbeddingTable(std::vector<int> class_ids, Matrix rows);

  std::size_t embed_dim() const { return rows_.cols(); }
  std::size_t size() const { return ids_.size(); }
  bool has(int cls) const { return index_.count(cls) != 0; }
  const std::vector<int>& class_ids() const { return ids_; }
  const Matrix& table() const { return rows_; }

  // Embedding of one class as a 1 x embed_dim matrix.
  Matrix embed_one(int cls) const;
  // Row-aligned embeddings for a label sequence, n x embed_dim.
  Matrix embed(const std::vector<int>& labels) const;

 private:
  std::vector<int> ids_;
  Matrix rows_;
  std::map<int, std::size_t> index_;
};

// What training stages are allowed to see. Unseen-class *ids* are public
// knowledge (they index the embedding table); the per-sample labels of the
// transductive pool are not present here at all.
struct TrainView {
  const Matrix& seen_train_x;
  const std::vector<int>& seen_train_y;
  const Matrix& unseen_pool_x;
  const ClassEmbeddingTable& embeddings;
  const std::vector<int>& seen_classes;
  const std::vector<int>& unseen_classes;
};

class GzslDataset {
 public:
  Matrix seen_train_x;
  std::vector<int> seen_train_y;
  Matrix seen_test_x;
  std::vector<int> seen_test_y;
  Matrix unseen_pool_x;
  ClassEmbeddingTable embeddings;
  std::vector<int> seen_classes;
  std::vector<int> unseen_classes;

  void set_unseen_pool_labels(std::vector<int> labels);
  // Evaluation-only accessor: the held-out labels of the transductive pool.
  const std::vector<int>& eval_unseen_pool_labels() const { return unseen_pool_y_; }

  TrainView train_view() const {
    return TrainView{seen_train_x, seen_train_y, unseen_pool_x,
                     embeddings,   seen_classes, unseen_classes};
  }

  // Checks every structural invariant; throws ValidationError naming the
  // violation (class overlap lists the offending classes).
  void validate() const;

 private:
  std::vector<int> unseen_pool_y_;
};

// Dataset serialization: a manifest JSON naming headerless CSV parts plus a
// splits JSON. save_dataset writes <dir>/manifest.json and its parts.
GzslDataset load_dataset(const std::string& manifest_path);
void save_dataset(const GzslDataset& ds, const std::string& dir);

// One epoch of batch index lists. Shuffles [0, pool_size), cuts full
// batches, drops the partial tail.
std::vector<std::vector<std::size_t>> batch_iter(std::size_t pool_size,
                                                 std::size_t batch_size, Rng& rng);

// Class-balanced sampling: each slot draws a class uniformly, then a row of
// that class uniformly. Batch count matches batch_iter on the same pool.
std::vector<std::vector<std::size_t>> batch_iter_balanced(
    const std::vector<int>& labels, std::size_t batch_size, Rng& rng);

// Rows of x selected by idx, in order.
Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& idx);

template <typename T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v.at(i));
  return out;
}

}  // namespace decgan

#endif  // DECGAN_DATA_HPP_
