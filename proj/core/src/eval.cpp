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
#include "decgan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "decgan/error.hpp"
#include "decgan/io.hpp"

namespace decgan {

double harmonic_mean(double a_s, double a_u) {
  if (a_s < 0.0 || a_s > 1.0 || a_u < 0.0 || a_u > 1.0) {
    throw ValidationError("harmonic_mean: accuracies must lie in [0, 1]");
  }
  if (a_s + a_u == 0.0) return 0.0;
  return 2.0 * a_s * a_u / (a_s + a_u);
}

ClassGenerator make_decgan_generator(const NetworkParams& g1, const NetworkParams& gc,
                                     const ClassEmbeddingTable& embeddings) {
  return [&g1, &gc, &embeddings](int cls, std::size_t n, Rng& rng) {
    const Matrix c = embeddings.embed_one(cls);
    const Matrix z = rng.normal_matrix(n, g1.in_dim());
    const Matrix s = forward_values(g1, z);
    Matrix in(n, s.cols() + c.cols());
    for (std::size_t i = 0; i < n; ++i) {
      double* dst = in.row(i);
      const double* sp = s.row(i);
      for (std::size_t j = 0; j < s.cols(); ++j) dst[j] = sp[j];
      for (std::size_t j = 0; j < c.cols(); ++j) dst[s.cols() + j] = c(0, j);
    }
    return forward_values(gc, in);
  };
}

ClassGenerator make_direct_generator(const NetworkParams& gc,
                                     const ClassEmbeddingTable& embeddings) {
  return [&gc, &embeddings](int cls, std::size_t n, Rng& rng) {
    const Matrix c = embeddings.embed_one(cls);
    if (gc.in_dim() <= c.cols()) {
      throw DimensionError("direct generator: embedding width " +
                           std::to_string(c.cols()) + " leaves no noise block in '" +
                           gc.name + "'");
    }
    const std::size_t noise_dim = gc.in_dim() - c.cols();
    const Matrix z = rng.normal_matrix(n, noise_dim);
    Matrix in(n, gc.in_dim());
    for (std::size_t i = 0; i < n; ++i) {
      double* dst = in.row(i);
      const double* zp = z.row(i);
      for (std::size_t j = 0; j < noise_dim; ++j) dst[j] = zp[j];
      for (std::size_t j = 0; j < c.cols(); ++j) dst[noise_dim + j] = c(0, j);
    }
    return forward_values(gc, in);
  };
}

Synthesized synthesize_unseen(const ClassGenerator& gen,
                              const std::vector<int>& classes,
                              std::size_t n_per_class, Rng& rng) {
  if (classes.empty()) throw ConfigError("synthesize_unseen: no classes");
  if (n_per_class == 0) throw ConfigError("synthesize_unseen: n_per_class must be >= 1");
  Synthesized out;
  out.labels.reserve(classes.size() * n_per_class);
  std::size_t row = 0;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const Matrix block = gen(classes[ci], n_per_class, rng);
    if (block.rows() != n_per_class) {
      throw ValidationError("generator returned " + std::to_string(block.rows()) +
                            " rows, expected " + std::to_string(n_per_class));
    }
    if (ci == 0) {
      out.features = Matrix(classes.size() * n_per_class, block.cols());
    } else if (block.cols() != out.features.cols()) {
      throw ValidationError("generator changed feature width across classes");
    }
    for (std::size_t i = 0; i < n_per_class; ++i, ++row) {
      double* dst = out.features.row(row);
      const double* src = block.row(i);
      for (std::size_t j = 0; j < block.cols(); ++j) dst[j] = src[j];
      out.labels.push_back(classes[ci]);
    }
  }
  return out;
}

double softmax_loss(const SoftmaxModel& m, const Matrix& x,
                    const std::vector<int>& y, double l2, Matrix* gw, Matrix* gb) {
  const std::size_t n = x.rows();
  const std::size_t k = m.w.cols();
  if (y.size() != n) {
    throw DimensionError("softmax: " + std::to_string(y.size()) + " labels for " +
                         std::to_string(n) + " rows");
  }
  Matrix logits = matmul_values(x, m.w);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) logits(i, j) += m.b(0, j);
  }
  // Row-stabilized softmax; `logits` becomes the probability table.
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* row = logits.row(i);
    const double mx = *std::max_element(row, row + k);
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(row[j] - mx);
    const int yi = y[i];
    if (yi < 0 || static_cast<std::size_t>(yi) >= k) {
      throw ValidationError("softmax: label " + std::to_string(yi) +
                            " outside [0, " + std::to_string(k) + ")");
    }
    loss -= (row[yi] - mx) - std::log(z);
    for (std::size_t j = 0; j < k; ++j) row[j] = std::exp(row[j] - mx) / z;
  }
  loss /= static_cast<double>(n);
  double reg = 0.0;
  for (std::size_t i = 0; i < m.w.size(); ++i) reg += m.w.data()[i] * m.w.data()[i];
  loss += 0.5 * l2 * reg;

  if (gw != nullptr || gb != nullptr) {
    // d(mean CE)/d(logits) = (P - onehot) / n
    for (std::size_t i = 0; i < n; ++i) {
      logits(i, static_cast<std::size_t>(y[i])) -= 1.0;
    }
    const Matrix residual = scale_values(logits, 1.0 / static_cast<double>(n));
    if (gw != nullptr) {
      *gw = matmul_values(transpose_values(x), residual);
      for (std::size_t i = 0; i < gw->size(); ++i) {
        gw->data()[i] += l2 * m.w.data()[i];
      }
    }
    if (gb != nullptr) {
      *gb = Matrix(1, k);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) (*gb)(0, j) += residual(i, j);
      }
    }
  }
  return loss;
}

SoftmaxModel train_softmax(const Matrix& x, const std::vector<int>& y,
                           std::size_t n_classes, double lr, std::size_t epochs,
                           double l2, Rng& rng,
                           std::vector<std::string>* warnings) {
  if (n_classes == 0) throw ConfigError("softmax: need at least one class");
  if (!(lr > 0.0)) throw ConfigError("softmax: learning rate must be > 0");
  std::vector<std::size_t> counts(n_classes, 0);
  for (int yi : y) {
    if (yi < 0 || static_cast<std::size_t>(yi) >= n_classes) {
      throw ValidationError("softmax: label " + std::to_string(yi) +
                            " outside [0, " + std::to_string(n_classes) + ")");
    }
    ++counts[static_cast<std::size_t>(yi)];
  }
  if (warnings != nullptr) {
    for (std::size_t cls = 0; cls < n_classes; ++cls) {
      if (counts[cls] == 0) {
        warnings->push_back("softmax: class " + std::to_string(cls) +
                            " has no training rows");
      }
    }
  }
  SoftmaxModel m;
  m.w = rng.normal_matrix(x.cols(), n_classes, 0.0, 1e-3);
  m.b = Matrix::zeros(1, n_classes);
  Matrix gw, gb;
  for (std::size_t e = 0; e < epochs; ++e) {
    softmax_loss(m, x, y, l2, &gw, &gb);
    for (std::size_t i = 0; i < m.w.size(); ++i) m.w.data()[i] -= lr * gw.data()[i];
    for (std::size_t i = 0; i < m.b.size(); ++i) m.b.data()[i] -= lr * gb.data()[i];
  }
  return m;
}

std::vector<int> softmax_predict(const SoftmaxModel& m, const Matrix& x) {
  Matrix logits = matmul_values(x, m.w);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    double best_v = logits(i, 0) + m.b(0, 0);
    for (std::size_t j = 1; j < m.w.cols(); ++j) {
      const double v = logits(i, j) + m.b(0, j);
      if (v > best_v) {
        best_v = v;
        best = j;
      }
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

std::map<int, double> per_class_top1(const std::vector<int>& predictions,
                                     const std::vector<int>& labels,
                                     const std::vector<int>& class_set,
                                     const std::vector<int>& universe) {
  if (predictions.size() != labels.size()) {
    throw DimensionError("per_class_top1: " + std::to_string(predictions.size()) +
                         " predictions for " + std::to_string(labels.size()) +
                         " labels");
  }
  const std::set<int> valid(universe.begin(), universe.end());
  for (int p : predictions) {
    if (valid.count(p) == 0) {
      throw ValidationError("prediction " + std::to_string(p) +
                            " outside the label universe");
    }
  }
  std::map<int, std::pair<std::size_t, std::size_t>> tally;  // class -> (correct, total)
  for (int cls : class_set) tally[cls];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = tally.find(labels[i]);
    if (it == tally.end()) continue;
    it->second.second += 1;
    if (predictions[i] == labels[i]) it->second.first += 1;
  }
  std::map<int, double> out;
  for (const auto& [cls, counts] : tally) {
    if (counts.second == 0) continue;  // no samples, excluded from the mean
    out[cls] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return out;
}

namespace {

double mean_of(const std::map<int, double>& acc) {
  if (acc.empty()) return 0.0;
  double s = 0.0;
  for (const auto& [cls, v] : acc) s += v;
  return s / static_cast<double>(acc.size());
}

double pooled(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (preds[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace

GzslMetrics evaluate_gzsl(const ClassGenerator& gen, const GzslDataset& ds,
                          const EvalConfig& cfg,
                          std::vector<std::string>* warnings) {
  ds.validate();
  Rng rng(cfg.seed);

  // Classifier index space: seen then unseen class ids, each in list order.
  std::vector<int> universe = ds.seen_classes;
  universe.insert(universe.end(), ds.unseen_classes.begin(), ds.unseen_classes.end());
  std::map<int, int> to_index;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    to_index[universe[i]] = static_cast<int>(i);
  }

  const Synthesized synth =
      synthesize_unseen(gen, ds.unseen_classes, cfg.n_per_class, rng);
  if (synth.features.cols() != ds.seen_train_x.cols()) {
    throw ValidationError("synthesized width " +
                          std::to_string(synth.features.cols()) +
                          " does not match real features " +
                          std::to_string(ds.seen_train_x.cols()));
  }

  Matrix train_x(ds.seen_train_x.rows() + synth.features.rows(),
                 ds.seen_train_x.cols());
  std::vector<int> train_y;
  train_y.reserve(train_x.rows());
  std::size_t row = 0;
  for (const Matrix* part : {&ds.seen_train_x, &synth.features}) {
    for (std::size_t i = 0; i < part->rows(); ++i, ++row) {
      double* dst = train_x.row(row);
      const double* src = part->row(i);
      for (std::size_t j = 0; j < part->cols(); ++j) dst[j] = src[j];
    }
  }
  for (int yv : ds.seen_train_y) train_y.push_back(to_index.at(yv));
  for (int yv : synth.labels) train_y.push_back(to_index.at(yv));

  const SoftmaxModel cls = train_softmax(train_x, train_y, universe.size(), cfg.cls_lr,
                                         cfg.cls_epochs, cfg.cls_l2, rng, warnings);

  auto predict_ids = [&](const Matrix& x) {
    std::vector<int> ids;
    ids.reserve(x.rows());
    for (int idx : softmax_predict(cls, x)) ids.push_back(universe.at(idx));
    return ids;
  };
  const std::vector<int> seen_preds = predict_ids(ds.seen_test_x);
  const std::vector<int> unseen_preds = predict_ids(ds.unseen_pool_x);

  GzslMetrics out;
  const auto seen_acc =
      per_class_top1(seen_preds, ds.seen_test_y, ds.seen_classes, universe);
  const auto unseen_acc = per_class_top1(unseen_preds, ds.eval_unseen_pool_labels(),
                                         ds.unseen_classes, universe);
  out.per_class_acc = seen_acc;
  out.per_class_acc.insert(unseen_acc.begin(), unseen_acc.end());
  if (cfg.pooled_accuracy) {
    out.a_s = pooled(seen_preds, ds.seen_test_y);
    out.a_u = pooled(unseen_preds, ds.eval_unseen_pool_labels());
  } else {
    out.a_s = mean_of(seen_acc);
    out.a_u = mean_of(unseen_acc);
  }
  out.h = harmonic_mean(out.a_s, out.a_u);
  return out;
}

std::string metrics_to_csv(const GzslMetrics& metrics,
                           const std::vector<int>& seen_classes,
                           const std::vector<int>& unseen_classes) {
  std::string out;
  auto emit = [&](const std::vector<int>& classes, const char* split) {
    for (int cls : classes) {
      const auto it = metrics.per_class_acc.find(cls);
      if (it == metrics.per_class_acc.end()) continue;
      out += std::to_string(cls);
      out += ',';
      out += split;
      out += ',';
      out += format_double(it->second);
      out += '\n';
    }
  };
  emit(seen_classes, "seen");
  emit(unseen_classes, "unseen");
  out += "summary," + format_double(metrics.a_u) + "," + format_double(metrics.a_s) +
         "," + format_double(metrics.h) + "\n";
  return out;
}

}  // namespace decgan
