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
#ifndef DECGAN_LINALG_HPP
#define DECGAN_LINALG_HPP

#include "decgan/matrix.hpp"

namespace decgan {

/// Solves A X = B for symmetric positive definite A via Cholesky.
/// Throws NumericError when A is singular or indefinite.
Matrix solve_spd(const Matrix& a, const Matrix& b);

}  // namespace decgan

#endif  // DECGAN_LINALG_HPP
