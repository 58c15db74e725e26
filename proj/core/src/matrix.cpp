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
#include "decgan/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "decgan/error.hpp"

namespace decgan {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix buffer of length " + std::to_string(data_.size()) +
                         " does not fill " + shape_str());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw DimensionError("ragged initializer list for Matrix");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::filled(std::size_t rows, std::size_t cols, double value) {
  Matrix m(rows, cols);
  for (auto& v : m.data_) v = value;
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Matrix::bitwise_equal(const Matrix& other) const {
  if (!same_shape(other)) return false;
  return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0;
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void require_finite(const Matrix& m, const std::string& context) {
  if (!m.all_finite()) {
    throw NumericError("non-finite value produced by " + context);
  }
}

namespace {
void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
  }
}
}  // namespace

Matrix matmul_values(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions disagree, " + a.shape_str() + " times " +
                         b.shape_str());
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Matrix out(n, m);
  // ikj order keeps the inner loop contiguous over both b and out.
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b.row(p);
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

Matrix transpose_values(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  }
  return out;
}

Matrix add_values(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] += pb[i];
  return out;
}

Matrix sub_values(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a;
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] -= pb[i];
  return out;
}

Matrix mul_values(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mul");
  Matrix out = a;
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] *= pb[i];
  return out;
}

Matrix scale_values(const Matrix& a, double s) {
  Matrix out = a;
  double* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] *= s;
  return out;
}

Matrix concat_cols_values(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_cols: row counts differ, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = out.row(i);
    const double* pa = a.row(i);
    const double* pb = b.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = pa[j];
    for (std::size_t j = 0; j < b.cols(); ++j) dst[a.cols() + j] = pb[j];
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

}  // namespace decgan
