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
#ifndef DECGAN_RNG_HPP
#define DECGAN_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "decgan/matrix.hpp"

namespace decgan {

/// Deterministic random source. The same seed always yields the same draw
/// stream, independent of platform: distributions are derived from the raw
/// mt19937_64 output here instead of relying on std:: distribution objects,
/// whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double stddev);
  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::size_t uniform_index(std::size_t n);

  Matrix normal_matrix(std::size_t rows, std::size_t cols, double mean = 0.0,
                       double stddev = 1.0);
  Matrix uniform_matrix(std::size_t rows, std::size_t cols, double lo = 0.0, double hi = 1.0);

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  /// Independent child stream keyed by (seed, stream_id).
  Rng spawn(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace decgan

#endif  // DECGAN_RNG_HPP
