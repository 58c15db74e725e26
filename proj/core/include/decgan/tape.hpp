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
#ifndef DECGAN_TAPE_HPP
#define DECGAN_TAPE_HPP

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "decgan/matrix.hpp"

namespace decgan {

class Tape;

/// Handle to one node on a tape. Cheap to copy; valid until the tape is
/// cleared or destroyed.
struct Var {
  Tape* tape = nullptr;
  std::int32_t id = -1;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;
};

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kDivSafe,
  kScale,
  kAddScalar,
  kMatmul,
  kTranspose,
  kAffine,
  kRelu,
  kLeakyRelu,
  kConcatCols,
  kSliceCols,
  kPadCols,
  kSum,
  kBroadcastScalar,
  kRowSums,
  kBroadcastCols,
  kColSums,
  kBroadcastRows,
  kScaleRows,
  kL2NormRows,
};

/// Recorded computation graph. Append-only, so node order is already a
/// topological order. The backward pass appends its own operations to the
/// same tape, which is what makes gradients differentiable a second time.
class Tape {
 public:
  struct Node {
    Op op;
    std::array<std::int32_t, 3> in{-1, -1, -1};
    double sa = 0.0;  // per-op scalar argument (scale factor, slope, bounds)
    double sb = 0.0;
    Matrix value;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Matrix value);
  Var record(Op op, std::array<std::int32_t, 3> in, Matrix value, double sa = 0.0,
             double sb = 0.0);

  const Node& node(std::int32_t id) const;
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }

 private:
  std::vector<Node> nodes_;
};

// Differentiable primitives. Every function validates shapes, records one or
// more nodes on the operands' tape and checks the result for non-finite
// entries.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// Elementwise a/b with the convention 0 where b is 0. Internal workhorse of
/// the l2_norm_rows derivative; exposed for tests.
Var div_safe(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var neg(Var a);
Var matmul(Var a, Var b);
Var transpose(Var a);
/// input @ weight + bias with bias broadcast over rows.
Var affine(Var input, Var weight, Var bias);
Var relu(Var a);
Var leaky_relu(Var a, double slope);
Var concat_cols(Var a, Var b);
Var slice_cols(Var a, std::size_t begin, std::size_t end);
Var pad_cols(Var a, std::size_t left, std::size_t right);
Var sum(Var a);
Var mean(Var a);
Var broadcast_scalar(Var a, std::size_t rows, std::size_t cols);
Var row_sums(Var a);
Var broadcast_cols(Var a, std::size_t cols);
Var col_sums(Var a);
Var broadcast_rows(Var a, std::size_t rows);
/// Row i of a multiplied by v[i]; v is n x 1.
Var scale_rows(Var a, Var v);
/// Per-row Euclidean norm, n x 1. Gradient at an all-zero row is zero.
Var l2_norm_rows(Var a);

/// Gradient map returned by backward(). Gradients are nodes on the same tape
/// and can be differentiated again.
class Gradients {
 public:
  Var at(Var wrt) const;
  const Matrix& value_at(Var wrt) const { return at(wrt).value(); }
  bool contains(Var wrt) const;

 private:
  friend Gradients backward(Var, const std::vector<Var>&);
  Tape* tape_ = nullptr;
  std::unordered_map<std::int32_t, std::int32_t> grads_;
};

/// Reverse-mode sweep from a scalar root. Returns d root / d wrt for every
/// requested node; nodes the root does not depend on get a zero gradient of
/// matching shape. The sweep itself is recorded, so results support a second
/// backward pass (and deeper nesting).
Gradients backward(Var root, const std::vector<Var>& wrt);

}  // namespace decgan

#endif  // DECGAN_TAPE_HPP
