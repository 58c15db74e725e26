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
#include "decgan/linalg.hpp"

#include <cmath>

#include "decgan/error.hpp"

namespace decgan {

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) {
    throw DimensionError("solve_spd: matrix " + a.shape_str() + " is not square");
  }
  if (b.rows() != n) {
    throw DimensionError("solve_spd: rhs " + b.shape_str() + " does not match " +
                         a.shape_str());
  }

  // Lower Cholesky factor, in place over a copy.
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw NumericError(
          "solve_spd: matrix is singular or not positive definite; "
          "a ridge term > 0 makes the normal equations regular");
    }
    const double dsqrt = std::sqrt(diag);
    l(j, j) = dsqrt;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / dsqrt;
    }
  }

  // Forward then backward substitution, column by column of B.
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = x(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * x(k, c);
      x(i, c) = v / l(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      double v = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) v -= l(k, i) * x(k, c);
      x(i, c) = v / l(i, i);
    }
  }
  return x;
}

}  // namespace decgan
