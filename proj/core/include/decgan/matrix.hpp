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
#ifndef DECGAN_MATRIX_HPP
#define DECGAN_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace decgan {

/// Dense row-major matrix of doubles. The universal value carrier for
/// features, embeddings, parameters and gradients.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static Matrix filled(std::size_t rows, std::size_t cols, double value);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

  /// True when shapes and every payload bit agree.
  bool bitwise_equal(const Matrix& other) const;

  /// "3x4" style shape string for error messages.
  std::string shape_str() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Value-level arithmetic used outside the tape (detached forwards, optimizer
// updates, data generation). Shape mismatches throw DimensionError.
Matrix matmul_values(const Matrix& a, const Matrix& b);
Matrix transpose_values(const Matrix& m);
Matrix add_values(const Matrix& a, const Matrix& b);
Matrix sub_values(const Matrix& a, const Matrix& b);
Matrix mul_values(const Matrix& a, const Matrix& b);
Matrix scale_values(const Matrix& a, double s);
Matrix concat_cols_values(const Matrix& a, const Matrix& b);
double max_abs_diff(const Matrix& a, const Matrix& b);

inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.bitwise_equal(b);
}

/// Throws NumericError naming `context` if any entry is NaN or infinite.
void require_finite(const Matrix& m, const std::string& context);

}  // namespace decgan

#endif  // DECGAN_MATRIX_HPP
