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
#include "decgan/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "decgan/error.hpp"
#include "decgan/io.hpp"

namespace decgan {

namespace fs = std::filesystem;
using nlohmann::json;

ClassEmbeddingTable::ClassEmbeddingTable(std::vector<int> class_ids, Matrix rows)
    : ids_(std::move(class_ids)), rows_(std::move(rows)) {
  if (ids_.size() != rows_.rows()) {
    throw ValidationError("embedding table: " + std::to_string(ids_.size()) +
                          " class ids for " + std::to_string(rows_.rows()) + " rows");
  }
  require_finite(rows_, "embedding table");
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw ValidationError("embedding table: duplicate class id " +
                            std::to_string(ids_[i]));
    }
  }
}

Matrix ClassEmbeddingTable::embed_one(int cls) const {
  const auto it = index_.find(cls);
  if (it == index_.end()) {
    throw ValidationError("no embedding for class " + std::to_string(cls));
  }
  Matrix out(1, rows_.cols());
  const double* src = rows_.row(it->second);
  for (std::size_t j = 0; j < rows_.cols(); ++j) out(0, j) = src[j];
  return out;
}

Matrix ClassEmbeddingTable::embed(const std::vector<int>& labels) const {
  Matrix out(labels.size(), rows_.cols());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = index_.find(labels[i]);
    if (it == index_.end()) {
      throw ValidationError("no embedding for class " + std::to_string(labels[i]));
    }
    const double* src = rows_.row(it->second);
    double* dst = out.row(i);
    for (std::size_t j = 0; j < rows_.cols(); ++j) dst[j] = src[j];
  }
  return out;
}

void GzslDataset::set_unseen_pool_labels(std::vector<int> labels) {
  unseen_pool_y_ = std::move(labels);
}

namespace {

void check_labels(const std::vector<int>& labels, std::size_t n_rows,
                  const std::set<int>& allowed, const char* split) {
  if (labels.size() != n_rows) {
    throw ValidationError(std::string(split) + ": " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(n_rows) + " rows");
  }
  for (int y : labels) {
    if (allowed.count(y) == 0) {
      throw ValidationError(std::string(split) + ": label " + std::to_string(y) +
                            " outside its declared class set");
    }
  }
}

}  // namespace

void GzslDataset::validate() const {
  const std::set<int> seen(seen_classes.begin(), seen_classes.end());
  const std::set<int> unseen(unseen_classes.begin(), unseen_classes.end());
  if (seen.size() != seen_classes.size() || unseen.size() != unseen_classes.size()) {
    throw ValidationError("duplicate class id in a class list");
  }
  for (int cls : seen_classes) {
    if (unseen.count(cls) != 0) {
      throw ValidationError("disjointness violated: class " + std::to_string(cls) +
                            " is listed as both seen and unseen");
    }
  }
  for (int cls : seen_classes) {
    if (!embeddings.has(cls)) {
      throw ValidationError("seen class " + std::to_string(cls) +
                            " has no embedding row");
    }
  }
  for (int cls : unseen_classes) {
    if (!embeddings.has(cls)) {
      throw ValidationError("unseen class " + std::to_string(cls) +
                            " has no embedding row");
    }
  }
  const std::size_t fd = seen_train_x.cols();
  if (seen_test_x.rows() > 0 && seen_test_x.cols() != fd) {
    throw ValidationError("feature width mismatch: seen_test " +
                          seen_test_x.shape_str() + " vs seen_train width " +
                          std::to_string(fd));
  }
  if (unseen_pool_x.rows() > 0 && unseen_pool_x.cols() != fd) {
    throw ValidationError("feature width mismatch: unseen_pool " +
                          unseen_pool_x.shape_str() + " vs seen_train width " +
                          std::to_string(fd));
  }
  check_labels(seen_train_y, seen_train_x.rows(), seen, "seen_train");
  check_labels(seen_test_y, seen_test_x.rows(), seen, "seen_test");
  check_labels(unseen_pool_y_, unseen_pool_x.rows(), unseen, "unseen_pool");
  require_finite(seen_train_x, "seen_train features");
  require_finite(seen_test_x, "seen_test features");
  require_finite(unseen_pool_x, "unseen_pool features");
}

namespace {

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ValidationError("malformed JSON in " + path);
  }
  return j;
}

std::vector<int> to_int_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ValidationError(what + " must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

std::vector<std::size_t> to_index_vector(const json& j, const std::string& what,
                                         std::size_t limit) {
  std::vector<std::size_t> out;
  for (int v : to_int_vector(j, what)) {
    if (v < 0 || static_cast<std::size_t>(v) >= limit) {
      throw ValidationError(what + ": index " + std::to_string(v) + " out of range");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

GzslDataset load_dataset(const std::string& manifest_path) {
  const json manifest = read_json_file(manifest_path);
  if (manifest.value("format", "") != std::string("decgan-dataset")) {
    throw ValidationError(manifest_path + ": not a decgan-dataset manifest");
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  auto part = [&](const char* key) {
    if (!manifest.contains(key)) {
      throw ValidationError(manifest_path + ": missing key '" + key + "'");
    }
    return (base / manifest.at(key).get<std::string>()).string();
  };

  const Matrix features = read_csv_matrix(part("features"));
  const std::vector<int> labels = read_csv_ints(part("labels"));
  const Matrix emb_raw = read_csv_matrix(part("embeddings"));
  const json splits = read_json_file(part("splits"));

  if (!manifest.contains("feature_dim") || !manifest.contains("embed_dim")) {
    throw ValidationError(manifest_path + ": missing feature_dim or embed_dim");
  }
  const auto feature_dim = manifest.at("feature_dim").get<std::size_t>();
  const auto embed_dim = manifest.at("embed_dim").get<std::size_t>();
  if (features.rows() > 0 && features.cols() != feature_dim) {
    throw ValidationError("feature width mismatch: manifest declares " +
                          std::to_string(feature_dim) + ", file has " +
                          std::to_string(features.cols()));
  }
  if (labels.size() != features.rows()) {
    throw ValidationError("labels/features row mismatch: " +
                          std::to_string(labels.size()) + " vs " +
                          std::to_string(features.rows()));
  }
  if (emb_raw.cols() != embed_dim + 1) {
    throw ValidationError("embedding width mismatch: manifest declares " +
                          std::to_string(embed_dim) + ", file rows have " +
                          std::to_string(emb_raw.cols()) + " fields (id + values)");
  }

  std::vector<int> emb_ids(emb_raw.rows());
  Matrix emb_rows(emb_raw.rows(), embed_dim);
  for (std::size_t i = 0; i < emb_raw.rows(); ++i) {
    const double id = emb_raw(i, 0);
    if (id != std::floor(id)) {
      throw ValidationError("embedding row " + std::to_string(i) +
                            " has a non-integer class id");
    }
    emb_ids[i] = static_cast<int>(id);
    for (std::size_t j = 0; j < embed_dim; ++j) emb_rows(i, j) = emb_raw(i, j + 1);
  }

  GzslDataset ds;
  ds.embeddings = ClassEmbeddingTable(std::move(emb_ids), std::move(emb_rows));
  ds.seen_classes = to_int_vector(splits.at("seen_classes"), "seen_classes");
  ds.unseen_classes = to_int_vector(splits.at("unseen_classes"), "unseen_classes");

  const auto train_idx =
      to_index_vector(splits.at("seen_train"), "seen_train", features.rows());
  const auto test_idx =
      to_index_vector(splits.at("seen_test"), "seen_test", features.rows());
  const auto pool_idx =
      to_index_vector(splits.at("unseen_pool"), "unseen_pool", features.rows());

  ds.seen_train_x = gather_rows(features, train_idx);
  ds.seen_train_y = gather(labels, train_idx);
  ds.seen_test_x = gather_rows(features, test_idx);
  ds.seen_test_y = gather(labels, test_idx);
  ds.unseen_pool_x = gather_rows(features, pool_idx);
  ds.set_unseen_pool_labels(gather(labels, pool_idx));
  ds.validate();
  return ds;
}

void save_dataset(const GzslDataset& ds, const std::string& dir) {
  ds.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir);
  const fs::path base(dir);

  const std::size_t n_train = ds.seen_train_x.rows();
  const std::size_t n_test = ds.seen_test_x.rows();
  const std::size_t n_pool = ds.unseen_pool_x.rows();

  Matrix features(n_train + n_test + n_pool, ds.seen_train_x.cols());
  std::vector<int> labels;
  labels.reserve(features.rows());
  std::size_t row = 0;
  auto append = [&](const Matrix& x, const std::vector<int>& y) {
    for (std::size_t i = 0; i < x.rows(); ++i, ++row) {
      double* dst = features.row(row);
      const double* src = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j];
    }
    labels.insert(labels.end(), y.begin(), y.end());
  };
  append(ds.seen_train_x, ds.seen_train_y);
  append(ds.seen_test_x, ds.seen_test_y);
  append(ds.unseen_pool_x, ds.eval_unseen_pool_labels());

  write_csv_matrix((base / "features.csv").string(), features);
  write_csv_ints((base / "labels.csv").string(), labels);

  Matrix emb_out(ds.embeddings.size(), ds.embeddings.embed_dim() + 1);
  const Matrix& table = ds.embeddings.table();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    emb_out(i, 0) = static_cast<double>(ds.embeddings.class_ids()[i]);
    for (std::size_t j = 0; j < table.cols(); ++j) emb_out(i, j + 1) = table(i, j);
  }
  write_csv_matrix((base / "embeddings.csv").string(), emb_out);

  auto iota_block = [](std::size_t begin, std::size_t count) {
    std::vector<std::size_t> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = begin + i;
    return v;
  };
  json splits;
  splits["seen_classes"] = ds.seen_classes;
  splits["unseen_classes"] = ds.unseen_classes;
  splits["seen_train"] = iota_block(0, n_train);
  splits["seen_test"] = iota_block(n_train, n_test);
  splits["unseen_pool"] = iota_block(n_train + n_test, n_pool);
  write_text_file((base / "splits.json").string(), splits.dump(2) + "\n");

  json manifest;
  manifest["format"] = "decgan-dataset";
  manifest["version"] = 1;
  manifest["feature_dim"] = ds.seen_train_x.cols();
  manifest["embed_dim"] = ds.embeddings.embed_dim();
  manifest["features"] = "features.csv";
  manifest["labels"] = "labels.csv";
  manifest["embeddings"] = "embeddings.csv";
  manifest["splits"] = "splits.json";
  write_text_file((base / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::vector<std::vector<std::size_t>> batch_iter(std::size_t pool_size,
                                                 std::size_t batch_size, Rng& rng) {
  if (pool_size == 0) throw ConfigError("batch_iter: empty pool");
  if (batch_size == 0 || batch_size > pool_size) {
    throw ConfigError("batch_iter: batch size " + std::to_string(batch_size) +
                      " exceeds pool of " + std::to_string(pool_size));
  }
  const std::vector<std::size_t> perm = rng.permutation(pool_size);
  const std::size_t n_batches = pool_size / batch_size;
  std::vector<std::vector<std::size_t>> out(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    out[b].assign(perm.begin() + static_cast<std::ptrdiff_t>(b * batch_size),
                  perm.begin() + static_cast<std::ptrdiff_t>((b + 1) * batch_size));
  }
  return out;
}

std::vector<std::vector<std::size_t>> batch_iter_balanced(
    const std::vector<int>& labels, std::size_t batch_size, Rng& rng) {
  if (labels.empty()) throw ConfigError("batch_iter: empty pool");
  if (batch_size == 0 || batch_size > labels.size()) {
    throw ConfigError("batch_iter: batch size " + std::to_string(batch_size) +
                      " exceeds pool of " + std::to_string(labels.size()));
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<const std::vector<std::size_t>*> classes;
  classes.reserve(by_class.size());
  for (const auto& [cls, rows] : by_class) classes.push_back(&rows);

  const std::size_t n_batches = labels.size() / batch_size;
  std::vector<std::vector<std::size_t>> out(n_batches);
  for (auto& batch : out) {
    batch.reserve(batch_size);
    for (std::size_t s = 0; s < batch_size; ++s) {
      const auto& rows = *classes[rng.uniform_index(classes.size())];
      batch.push_back(rows[rng.uniform_index(rows.size())]);
    }
  }
  return out;
}

Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& idx) {
  Matrix out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= x.rows()) {
      throw ValidationError("gather_rows: index " + std::to_string(idx[i]) +
                            " out of range for " + x.shape_str());
    }
    const double* src = x.row(idx[i]);
    double* dst = out.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j];
  }
  return out;
}

}  // namespace decgan
