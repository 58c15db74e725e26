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
#ifndef DECGAN_EVAL_HPP_
#define DECGAN_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "decgan/data.hpp"
#include "decgan/matrix.hpp"
#include "decgan/network.hpp"
#include "decgan/rng.hpp"

namespace decgan {

struct GzslMetrics {
  std::map<int, double> per_class_acc;
  double a_s = 0.0;
  double a_u = 0.0;
  double h = 0.0;
};

// 2 a b / (a + b), 0 when both are 0. Inputs must lie in [0, 1].
double harmonic_mean(double a_s, double a_u);

// Synthesizes n feature rows for one unseen class. The indirection lets
// evaluation run with oracle or degenerate generators in tests.
using ClassGenerator = std::function<Matrix(int cls, std::size_t n, Rng& rng)>;

// Gc(G1(z), c(cls)) with z ~ N(0, I) of g1's input width.
ClassGenerator make_decgan_generator(const NetworkParams& g1, const NetworkParams& gc,
                                     const ClassEmbeddingTable& embeddings);

// Gc(z, c(cls)) with z of width gc_in - embed_dim; the non-decoupled
// baseline path.
ClassGenerator make_direct_generator(const NetworkParams& gc,
                                     const ClassEmbeddingTable& embeddings);

struct Synthesized {
  Matrix features;
  std::vector<int> labels;
};

// n_per_class rows per class, labeled, classes in the given order.
Synthesized synthesize_unseen(const ClassGenerator& gen,
                              const std::vector<int>& classes,
                              std::size_t n_per_class, Rng& rng);

// Multinomial logistic regression, single affine layer.
struct SoftmaxModel {
  Matrix w;  // d x k
  Matrix b;  // 1 x k
};

// Mean cross-entropy plus 0.5 * l2 * ||w||^2. Gradients written to gw/gb
// when non-null.
double softmax_loss(const SoftmaxModel& m, const Matrix& x,
                    const std::vector<int>& y, double l2, Matrix* gw, Matrix* gb);

// Full-batch gradient descent. Labels must lie in [0, n_classes); a class
// with no training rows produces a warning line but stays in the output
// space.
SoftmaxModel train_softmax(const Matrix& x, const std::vector<int>& y,
                           std::size_t n_classes, double lr, std::size_t epochs,
                           double l2, Rng& rng,
                           std::vector<std::string>* warnings = nullptr);

// Argmax class index per row; ties break toward the lowest index.
std::vector<int> softmax_predict(const SoftmaxModel& m, const Matrix& x);

// Fraction of correctly predicted samples per class of class_set; classes
// with no samples are omitted. Every prediction must belong to `universe`.
std::map<int, double> per_class_top1(const std::vector<int>& predictions,
                                     const std::vector<int>& labels,
                                     const std::vector<int>& class_set,
                                     const std::vector<int>& universe);

struct EvalConfig {
  std::size_t n_per_class = 400;
  double cls_lr = 0.5;
  std::size_t cls_epochs = 200;
  double cls_l2 = 1e-4;
  bool pooled_accuracy = false;  // raw pooled instead of per-class means
  std::uint64_t seed = 1;
};

// The transductive GZSL protocol: train a softmax over seen + unseen
// classes on real seen_train plus synthesized unseen features, score a_s on
// seen_test and a_u on the unseen pool, combine with the harmonic mean.
GzslMetrics evaluate_gzsl(const ClassGenerator& gen, const GzslDataset& ds,
                          const EvalConfig& cfg,
                          std::vector<std::string>* warnings = nullptr);

// Rows "<class>,<seen|unseen>,<accuracy>" followed by the summary line
// "summary,<a_u>,<a_s>,<H>".
std::string metrics_to_csv(const GzslMetrics& metrics,
                           const std::vector<int>& seen_classes,
                           const std::vector<int>& unseen_classes);

}  // namespace decgan

#endif  // DECGAN_EVAL_HPP_
