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
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include "decgan/error.hpp"
#include "decgan/eval.hpp"
#include "decgan/model.hpp"
#include "decgan/synthetic.hpp"
#include "test_support.hpp"

using namespace decgan;

namespace {

SyntheticSpec eval_spec() {
  SyntheticSpec s;
  s.n_seen_classes = 6;
  s.n_unseen_classes = 3;
  s.samples_per_class = 100;
  s.feature_dim = 16;
  s.embed_dim = 8;
  s.cluster_std = 0.05;
  s.seed = 17;
  return s;
}

// Generator stub that emits the exact class mean for every requested row.
ClassGenerator mean_generator(const Matrix& means) {
  return [means](int cls, std::size_t n, Rng&) {
    Matrix out(n, means.cols());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < means.cols(); ++j) {
        out(i, j) = means(static_cast<std::size_t>(cls), j);
      }
    }
    return out;
  };
}

}  // namespace

TEST_CASE("harmonic mean") {
  SUBCASE("reference fixtures") {
    CHECK(std::abs(harmonic_mean(0.922, 0.730) - 0.815) < 0.0005);
    CHECK(std::abs(harmonic_mean(0.353, 0.020) - 0.0379) < 0.0005);
    CHECK(harmonic_mean(0.0, 0.0) == 0.0);
    CHECK(harmonic_mean(0.7, 0.0) == 0.0);
    CHECK(std::abs(harmonic_mean(0.37, 0.37) - 0.37) < 1e-15);
  }

  SUBCASE("bounds over random pairs") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
      const double a = rng.uniform();
      const double b = rng.uniform();
      const double h = harmonic_mean(a, b);
      const double lo = std::min(a, b), hi = std::max(a, b);
      CHECK(h >= lo - 1e-15);
      CHECK(h <= hi + 1e-15);
      CHECK(h <= 2.0 * lo + 1e-15);
    }
  }

  SUBCASE("inputs outside the unit interval are rejected") {
    CHECK_THROWS_AS(harmonic_mean(-0.1, 0.5), ValidationError);
    CHECK_THROWS_AS(harmonic_mean(0.5, 1.1), ValidationError);
  }
}

TEST_CASE("reference accuracy pairs reproduce their printed harmonic means") {
  // (a_u, a_s, printed mean), all in percent. The third pair's printed mean
  // is arithmetically inconsistent with its own accuracies by 0.19 points;
  // it is asserted as such so a change in harmonic_mean cannot mask it.
  struct Cell {
    double a_u, a_s, printed;
  };
  const Cell consistent[] = {
      {73.0, 92.2, 81.5}, {57.2, 44.3, 49.9}, {59.1, 68.4, 63.4},
      {58.1, 79.8, 67.2}, {45.0, 34.5, 39.1}, {4.7, 82.2, 8.9},
      {1.2, 30.1, 2.3},   {2.0, 35.3, 3.8},
  };
  for (const Cell& c : consistent) {
    const double h = 100.0 * harmonic_mean(c.a_s / 100.0, c.a_u / 100.0);
    CHECK(std::abs(h - c.printed) < 0.1);
  }
  const Cell odd{44.1, 56.7, 49.8};
  const double h = 100.0 * harmonic_mean(odd.a_s / 100.0, odd.a_u / 100.0);
  CHECK(std::abs(h - 49.6125) < 1e-9);
  CHECK(std::abs(h - odd.printed) > 0.1);
}

TEST_CASE("synthesize_unseen labels every class equally, in order") {
  const SyntheticSpec spec = eval_spec();
  const Matrix means = synthetic_class_means(spec);
  Rng rng(9);
  const std::vector<int> classes = {6, 7, 8};
  const Synthesized s = synthesize_unseen(mean_generator(means), classes, 40, rng);
  REQUIRE(s.features.rows() == 120);
  REQUIRE(s.labels.size() == 120);
  std::map<int, int> hist;
  for (int y : s.labels) hist[y] += 1;
  for (int cls : classes) CHECK(hist[cls] == 40);
  CHECK(s.labels.front() == 6);
  CHECK(s.labels.back() == 8);

  // The decoupled generator path: zero weights produce zero features, and a
  // random model keeps the ReLU output head nonnegative.
  const GzslDataset ds = make_synthetic(spec);
  ModelDims dims;
  dims.noise_dim = 4;
  dims.prior_dim = 6;
  dims.hidden_dim = 8;
  dims.feature_dim = spec.feature_dim;
  dims.embed_dim = spec.embed_dim;
  Rng zrng(1);
  const DecganModel zero = init_decgan(dims, zrng, 0.0);
  Rng r2(2);
  const Synthesized zs = synthesize_unseen(
      make_decgan_generator(zero.g1, zero.gc, ds.embeddings), classes, 5, r2);
  CHECK(bitwise_equal(zs.features, Matrix::zeros(15, spec.feature_dim)));

  Rng mrng(3);
  const DecganModel m = init_decgan(dims, mrng);
  Rng r3(4);
  const Synthesized ms = synthesize_unseen(
      make_decgan_generator(m.g1, m.gc, ds.embeddings), classes, 5, r3);
  for (std::size_t i = 0; i < ms.features.size(); ++i) {
    CHECK(ms.features.data()[i] >= 0.0);
  }
}

TEST_CASE("softmax training") {
  SUBCASE("separates well-spread clusters completely") {
    Rng rng(23);
    Matrix x(90, 2);
    std::vector<int> y(90);
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < 30; ++i) {
        const std::size_t r = static_cast<std::size_t>(c * 30 + i);
        x(r, 0) = 2.0 * c + rng.normal(0.0, 0.05);
        x(r, 1) = -2.0 * c + rng.normal(0.0, 0.05);
        y[r] = c;
      }
    }
    // Full-batch descent: keep lr below 2 / L with L ~ max row norm^2 / 4.
    Rng trng(1);
    const SoftmaxModel m = train_softmax(x, y, 3, 0.1, 300, 1e-4, trng);
    const std::vector<int> pred = softmax_predict(m, x);
    CHECK(pred == y);
  }

  SUBCASE("an overwhelming penalty crushes the weights") {
    Rng rng(24);
    const Matrix x = rng.normal_matrix(30, 3);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) y[i] = static_cast<int>(i % 2);
    Rng trng(1);
    const SoftmaxModel m = train_softmax(x, y, 2, 0.5, 300, 1e6, trng);
    CHECK(max_abs_diff(m.w, Matrix::zeros(3, 2)) < 1e-4);
  }

  SUBCASE("classes with no rows warn but stay in the output space") {
    Rng rng(25);
    const Matrix x = rng.normal_matrix(20, 2);
    std::vector<int> y(20, 0);
    for (std::size_t i = 10; i < 20; ++i) y[i] = 1;
    std::vector<std::string> warnings;
    Rng trng(1);
    const SoftmaxModel m = train_softmax(x, y, 4, 0.5, 50, 1e-4, trng, &warnings);
    CHECK(m.w.cols() == 4);
    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].find("2") != std::string::npos);
    CHECK_THROWS_AS(train_softmax(x, {0, 1}, 2, 0.5, 10, 1e-4, trng),
                    DimensionError);
  }

  SUBCASE("prediction ties break toward the lowest class index") {
    SoftmaxModel m;
    m.w = Matrix::zeros(2, 3);
    m.b = Matrix{{1.0, 1.0, 0.0}};
    const std::vector<int> pred = softmax_predict(m, Matrix::zeros(2, 2));
    CHECK(pred == std::vector<int>{0, 0});
  }

  SUBCASE("loss gradients match finite differences") {
    Rng rng(26);
    const Matrix x = rng.normal_matrix(6, 4);
    const std::vector<int> y = {0, 1, 2, 0, 2, 1};
    const double l2 = 0.3;
    const Matrix w0 = rng.normal_matrix(4, 3, 0.0, 0.5);
    const Matrix b0 = rng.normal_matrix(1, 3, 0.0, 0.5);

    Matrix gw, gb;
    const SoftmaxModel m{w0, b0};
    softmax_loss(m, x, y, l2, &gw, &gb);

    const auto objective = [&](const std::vector<Matrix>& p) {
      const SoftmaxModel trial{p[0], p[1]};
      return softmax_loss(trial, x, y, l2, nullptr, nullptr);
    };
    const auto fd = decgan::testing::fd_gradients(objective, {w0, b0}, 1e-5);
    CHECK(decgan::testing::max_rel_err(gw, fd[0]) < 1e-6);
    CHECK(decgan::testing::max_rel_err(gb, fd[1]) < 1e-6);
  }
}

TEST_CASE("per-class accuracy") {
  const std::vector<int> universe = {0, 1, 7};

  SUBCASE("counts hits per class") {
    const auto acc = per_class_top1({0, 0, 0, 1}, {0, 0, 0, 0}, {0, 1}, universe);
    CHECK(acc.at(0) == 0.75);
    CHECK(acc.count(1) == 0);  // no class-1 samples, so it is omitted
  }

  SUBCASE("is invariant to duplicating every row") {
    const std::vector<int> pred = {0, 1, 7, 1};
    const std::vector<int> labels = {0, 1, 1, 1};
    const auto once = per_class_top1(pred, labels, {0, 1}, universe);
    std::vector<int> pred2 = pred, labels2 = labels;
    pred2.insert(pred2.end(), pred.begin(), pred.end());
    labels2.insert(labels2.end(), labels.begin(), labels.end());
    const auto twice = per_class_top1(pred2, labels2, {0, 1}, universe);
    CHECK(once == twice);
    CHECK(once.at(1) == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("predictions outside the universe are rejected") {
    CHECK_THROWS_AS(per_class_top1({3}, {0}, {0}, universe), ValidationError);
    CHECK_THROWS_AS(per_class_top1({0, 0}, {0}, {0}, universe), DimensionError);
  }
}

TEST_CASE("gzsl evaluation") {
  const SyntheticSpec spec = eval_spec();
  const GzslDataset ds = make_synthetic(spec);
  const Matrix means = synthetic_class_means(spec);
  EvalConfig cfg;
  cfg.n_per_class = 50;

  SUBCASE("an oracle generator earns a near-perfect harmonic mean") {
    const GzslMetrics m = evaluate_gzsl(mean_generator(means), ds, cfg);
    CHECK(m.a_u >= 0.99);
    CHECK(m.a_s >= 0.99);
    CHECK(m.h >= 0.99);
    CHECK(m.h == harmonic_mean(m.a_s, m.a_u));
    // One accuracy entry per class.
    CHECK(m.per_class_acc.size() ==
          ds.seen_classes.size() + ds.unseen_classes.size());
  }

  SUBCASE("a degenerate generator drags the unseen accuracy down") {
    const ClassGenerator zero = [&](int, std::size_t n, Rng&) {
      return Matrix::zeros(n, spec.feature_dim);
    };
    const GzslMetrics m = evaluate_gzsl(zero, ds, cfg);
    CHECK(m.a_u <= 0.4);
    CHECK(m.h <= harmonic_mean(m.a_s, 0.4));
  }

  SUBCASE("evaluation is deterministic in the config seed") {
    const GzslMetrics a = evaluate_gzsl(mean_generator(means), ds, cfg);
    const GzslMetrics b = evaluate_gzsl(mean_generator(means), ds, cfg);
    CHECK(a.a_u == b.a_u);
    CHECK(a.a_s == b.a_s);
    CHECK(a.h == b.h);
    CHECK(a.per_class_acc == b.per_class_acc);
  }
}

TEST_CASE("metrics csv layout") {
  GzslMetrics m;
  m.per_class_acc = {{0, 1.0}, {4, 0.5}};
  m.a_s = 1.0;
  m.a_u = 0.5;
  m.h = harmonic_mean(1.0, 0.5);
  const std::string csv = metrics_to_csv(m, {0}, {4});
  CHECK(csv.find("0,seen,1\n") != std::string::npos);
  CHECK(csv.find("4,unseen,0.5\n") != std::string::npos);
  const auto tail = csv.find("summary,0.5,1,");
  REQUIRE(tail != std::string::npos);
  // Classes absent from the accuracy map are skipped, not zero-filled.
  const std::string sparse = metrics_to_csv(m, {0, 1}, {4});
  CHECK(sparse == csv);
}
