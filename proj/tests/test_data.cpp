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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "decgan/data.hpp"
#include "decgan/error.hpp"
#include "decgan/synthetic.hpp"
#include "decgan/trainer.hpp"

using namespace decgan;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p.string();
}

bool dataset_equal(const GzslDataset& a, const GzslDataset& b) {
  return bitwise_equal(a.seen_train_x, b.seen_train_x) &&
         a.seen_train_y == b.seen_train_y &&
         bitwise_equal(a.seen_test_x, b.seen_test_x) &&
         a.seen_test_y == b.seen_test_y &&
         bitwise_equal(a.unseen_pool_x, b.unseen_pool_x) &&
         a.eval_unseen_pool_labels() == b.eval_unseen_pool_labels() &&
         a.seen_classes == b.seen_classes &&
         a.unseen_classes == b.unseen_classes &&
         a.embeddings.class_ids() == b.embeddings.class_ids() &&
         bitwise_equal(a.embeddings.table(), b.embeddings.table());
}

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.n_seen_classes = 4;
  s.n_unseen_classes = 2;
  s.samples_per_class = 20;
  s.feature_dim = 6;
  s.embed_dim = 3;
  s.seed = 7;
  return s;
}

}  // namespace

TEST_CASE("synthetic generation is deterministic and well formed") {
  const GzslDataset a = make_synthetic(small_spec());
  const GzslDataset b = make_synthetic(small_spec());
  CHECK(dataset_equal(a, b));
  a.validate();
  // 80/20 split of 20 rows per seen class.
  CHECK(a.seen_train_x.rows() == 4 * 16);
  CHECK(a.seen_test_x.rows() == 4 * 4);
  CHECK(a.unseen_pool_x.rows() == 2 * 20);
  CHECK(a.seen_classes == std::vector<int>{0, 1, 2, 3});
  CHECK(a.unseen_classes == std::vector<int>{4, 5});
  for (std::size_t i = 0; i < a.seen_train_x.size(); ++i) {
    CHECK(a.seen_train_x.data()[i] >= 0.0);
  }
}

TEST_CASE("class means follow the injected semantic-to-visual map") {
  SyntheticSpec spec = small_spec();
  Rng rng(15);
  spec.mixing = rng.uniform_matrix(3, 6, 0.1, 1.0);  // strictly positive
  const GzslDataset ds = make_synthetic(spec);
  const Matrix means = synthetic_class_means(spec);
  REQUIRE(means.rows() == 6);

  const Matrix lin = matmul_values(ds.embeddings.table(), spec.mixing);
  for (std::size_t i = 0; i < lin.rows(); ++i) {
    for (std::size_t j = 0; j < lin.cols(); ++j) {
      CHECK(means(i, j) == std::max(0.0, lin(i, j)));
    }
  }

  // Positive map and nonnegative embeddings keep every mean well above the
  // double underflow range, so a vanishing cluster width must reproduce the
  // means bitwise.
  SyntheticSpec point = spec;
  point.cluster_std = 1e-300;
  const GzslDataset pd = make_synthetic(point);
  for (std::size_t i = 0; i < pd.unseen_pool_x.rows(); ++i) {
    const int cls = pd.eval_unseen_pool_labels()[i];
    for (std::size_t j = 0; j < pd.unseen_pool_x.cols(); ++j) {
      CHECK(pd.unseen_pool_x(i, j) == means(static_cast<std::size_t>(cls), j));
    }
  }
}

TEST_CASE("a nearest-class-mean oracle solves the default benchmark") {
  SyntheticSpec spec;  // defaults
  const GzslDataset ds = make_synthetic(spec);
  const Matrix means = synthetic_class_means(spec);

  const auto check_block = [&](const Matrix& x, const std::vector<int>& y) {
    std::map<int, std::size_t> hit, total;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double best = 1e300;
      int arg = -1;
      for (std::size_t m = 0; m < means.rows(); ++m) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
          const double diff = x(i, j) - means(m, j);
          d2 += diff * diff;
        }
        if (d2 < best) {
          best = d2;
          arg = static_cast<int>(m);
        }
      }
      total[y[i]] += 1;
      if (arg == y[i]) hit[y[i]] += 1;
    }
    for (const auto& [cls, n] : total) {
      CHECK(static_cast<double>(hit[cls]) / static_cast<double>(n) >= 0.99);
    }
  };
  check_block(ds.seen_train_x, ds.seen_train_y);
  check_block(ds.seen_test_x, ds.seen_test_y);
  check_block(ds.unseen_pool_x, ds.eval_unseen_pool_labels());
}

TEST_CASE("datasets round-trip through the manifest bitwise") {
  const GzslDataset ds = make_synthetic(small_spec());
  const std::string dir = fresh_dir("decgan_ds_roundtrip");
  save_dataset(ds, dir);
  const GzslDataset back = load_dataset(dir + "/manifest.json");
  CHECK(dataset_equal(ds, back));
  fs::remove_all(dir);
}

TEST_CASE("a benchmark-scale manifest with wide features loads back intact") {
  // 150/50 classes, two rows per class, 2048-wide features and 312-wide
  // embeddings: the shape of a real bird-image benchmark.
  GzslDataset ds;
  Rng rng(29);
  const std::size_t n_seen = 150, n_unseen = 50, fd = 2048, ed = 312;
  ds.seen_train_x = rng.uniform_matrix(2 * n_seen, fd);
  ds.seen_test_x = rng.uniform_matrix(n_seen, fd);
  ds.unseen_pool_x = rng.uniform_matrix(2 * n_unseen, fd);
  std::vector<int> all_ids;
  for (std::size_t c = 0; c < n_seen; ++c) {
    ds.seen_classes.push_back(static_cast<int>(c));
    ds.seen_train_y.push_back(static_cast<int>(c));
    ds.seen_train_y.push_back(static_cast<int>(c));
    ds.seen_test_y.push_back(static_cast<int>(c));
  }
  std::vector<int> pool_y;
  for (std::size_t c = 0; c < n_unseen; ++c) {
    ds.unseen_classes.push_back(static_cast<int>(n_seen + c));
    pool_y.push_back(static_cast<int>(n_seen + c));
    pool_y.push_back(static_cast<int>(n_seen + c));
  }
  ds.set_unseen_pool_labels(pool_y);
  for (std::size_t c = 0; c < n_seen + n_unseen; ++c) {
    all_ids.push_back(static_cast<int>(c));
  }
  ds.embeddings =
      ClassEmbeddingTable(all_ids, rng.uniform_matrix(n_seen + n_unseen, ed));
  ds.validate();

  const std::string dir = fresh_dir("decgan_ds_wide");
  save_dataset(ds, dir);
  const GzslDataset back = load_dataset(dir + "/manifest.json");
  CHECK(dataset_equal(ds, back));
  fs::remove_all(dir);
}

TEST_CASE("structural violations are rejected by name") {
  GzslDataset ds = make_synthetic(small_spec());

  SUBCASE("seen/unseen overlap") {
    ds.unseen_classes.push_back(ds.seen_classes.front());
    CHECK_THROWS_WITH_AS(ds.validate(),
                         doctest::Contains("disjointness violated"),
                         ValidationError);
  }
  SUBCASE("missing embedding row") {
    ds.seen_classes.push_back(997);
    ds.seen_train_y[0] = 997;
    CHECK_THROWS_WITH_AS(ds.validate(), doctest::Contains("no embedding row"),
                         ValidationError);
  }
  SUBCASE("feature width mismatch") {
    ds.unseen_pool_x = Matrix::zeros(3, 2);
    CHECK_THROWS_WITH_AS(ds.validate(),
                         doctest::Contains("feature width mismatch"),
                         ValidationError);
  }
  SUBCASE("label outside its class set") {
    ds.seen_train_y[0] = ds.unseen_classes.front();
    CHECK_THROWS_WITH_AS(ds.validate(),
                         doctest::Contains("outside its declared class set"),
                         ValidationError);
  }
  SUBCASE("pool labels of the wrong length") {
    ds.set_unseen_pool_labels({4, 5, 4});
    CHECK_THROWS_WITH_AS(ds.validate(), doctest::Contains("labels for"),
                         ValidationError);
  }
  SUBCASE("a manifest pointing at a missing part") {
    const std::string dir = fresh_dir("decgan_ds_missing_part");
    save_dataset(ds, dir);
    fs::remove(fs::path(dir) / "embeddings.csv");
    CHECK_THROWS_AS(load_dataset(dir + "/manifest.json"), IoError);
    fs::remove_all(dir);
  }
}

TEST_CASE("batch iteration") {
  Rng rng(3);

  SUBCASE("cuts full batches and drops the tail") {
    const auto batches = batch_iter(130, 64, rng);
    REQUIRE(batches.size() == 2);
    std::set<std::size_t> seen_idx;
    for (const auto& b : batches) {
      CHECK(b.size() == 64);
      for (std::size_t i : b) {
        CHECK(i < 130);
        seen_idx.insert(i);
      }
    }
    CHECK(seen_idx.size() == 128);  // no index repeats within an epoch
  }

  SUBCASE("identical seeds give identical epochs") {
    Rng a(11), b(11);
    CHECK(batch_iter(100, 32, a) == batch_iter(100, 32, b));
  }

  SUBCASE("a batch larger than the pool is a configuration error") {
    CHECK_THROWS_AS(batch_iter(10, 11, rng), ConfigError);
    CHECK_THROWS_AS(batch_iter(10, 0, rng), ConfigError);
  }

  SUBCASE("balanced sampling hits every class at the same rate") {
    std::vector<int> labels;
    for (int c = 0; c < 10; ++c) {
      for (int i = 0; i < 100; ++i) labels.push_back(c);
    }
    std::map<int, int> counts;
    std::size_t slots = 0;
    while (slots < 10000) {
      for (const auto& b : batch_iter_balanced(labels, 100, rng)) {
        for (std::size_t i : b) {
          counts[labels[i]] += 1;
          ++slots;
        }
      }
    }
    for (const auto& [cls, n] : counts) {
      CHECK(std::abs(n - 1000) <= 90);  // three sigma for p = 1/10
    }
  }

  SUBCASE("gather_rows keeps order") {
    const Matrix m{{0.0, 1.0}, {2.0, 3.0}, {4.0, 5.0}};
    const Matrix g = gather_rows(m, {2, 0});
    CHECK(g(0, 0) == 4.0);
    CHECK(g(1, 1) == 1.0);
  }
}

TEST_CASE("training never reads the transductive pool labels") {
  const GzslDataset ds = make_synthetic(small_spec());
  GzslDataset permuted = ds;
  std::vector<int> labels = ds.eval_unseen_pool_labels();
  std::rotate(labels.begin(), labels.begin() + 1, labels.end());
  permuted.set_unseen_pool_labels(labels);

  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.e1 = 1;
  cfg.e2 = 1;
  cfg.e3 = 1;
  cfg.learning_rate = 1e-3;
  cfg.dims.noise_dim = 3;
  cfg.dims.prior_dim = 4;
  cfg.dims.hidden_dim = 6;

  const auto train_all = [&](const GzslDataset& d) {
    ModelDims dims = cfg.dims;
    dims.feature_dim = d.seen_train_x.cols();
    dims.embed_dim = d.embeddings.embed_dim();
    Rng init(21);
    DecganModel model = init_decgan(dims, init, cfg.init_scale);
    NetworkParams a = pretrain_regressor(
        d.seen_train_x, d.embeddings.embed(d.seen_train_y), cfg.ridge);
    Trainer tr(std::move(model), std::move(a), 22);
    stage1(tr, d.train_view(), cfg);
    stage2(tr, d.train_view(), cfg);
    stage3(tr, d.train_view(), cfg);
    return tr;
  };

  const Trainer a = train_all(ds);
  const Trainer b = train_all(permuted);
  CHECK(a.telemetry.to_csv() == b.telemetry.to_csv());
  for (std::size_t l = 0; l < a.model.gc.layers.size(); ++l) {
    CHECK(bitwise_equal(a.model.gc.layers[l].weight, b.model.gc.layers[l].weight));
  }
  for (std::size_t l = 0; l < a.model.d0.layers.size(); ++l) {
    CHECK(bitwise_equal(a.model.d0.layers[l].weight, b.model.d0.layers[l].weight));
  }
}
