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
#include "decgan/tape.hpp"

#include <cmath>
#include <string>

#include "decgan/error.hpp"

namespace decgan {

const Matrix& Var::value() const {
  if (tape == nullptr) throw UsageError("Var::value on a null handle");
  return tape->node(id).value;
}

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw UsageError("Var::scalar on a " + v.shape_str() + " node");
  }
  return v(0, 0);
}

Var Tape::leaf(Matrix value) {
  require_finite(value, "leaf");
  nodes_.push_back(Node{Op::kLeaf, {-1, -1, -1}, 0.0, 0.0, std::move(value)});
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::record(Op op, std::array<std::int32_t, 3> in, Matrix value, double sa, double sb) {
  require_finite(value, "tape op");
  nodes_.push_back(Node{op, in, sa, sb, std::move(value)});
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw UsageError("node id " + std::to_string(id) + " not on this tape");
  }
  return nodes_[static_cast<std::size_t>(id)];
}

namespace {

Tape& same_tape(Var a, Var b, const char* op) {
  if (a.tape == nullptr || b.tape == nullptr) {
    throw UsageError(std::string(op) + ": null Var handle");
  }
  if (a.tape != b.tape) {
    throw UsageError(std::string(op) + ": operands live on different tapes");
  }
  return *a.tape;
}

void require_shape_match(Var a, Var b, const char* op) {
  if (!a.value().same_shape(b.value())) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.value().shape_str() +
                         " vs " + b.value().shape_str());
  }
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b, "add");
  require_shape_match(a, b, "add");
  return t.record(Op::kAdd, {a.id, b.id, -1}, add_values(a.value(), b.value()));
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b, "sub");
  require_shape_match(a, b, "sub");
  return t.record(Op::kSub, {a.id, b.id, -1}, sub_values(a.value(), b.value()));
}

Var mul(Var a, Var b) {
  Tape& t = same_tape(a, b, "mul");
  require_shape_match(a, b, "mul");
  return t.record(Op::kMul, {a.id, b.id, -1}, mul_values(a.value(), b.value()));
}

Var div_safe(Var a, Var b) {
  Tape& t = same_tape(a, b, "div_safe");
  require_shape_match(a, b, "div_safe");
  Matrix out(a.rows(), a.cols());
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = bv.data()[i] != 0.0 ? av.data()[i] / bv.data()[i] : 0.0;
  }
  return t.record(Op::kDivSafe, {a.id, b.id, -1}, std::move(out));
}

Var scale(Var a, double s) {
  return a.tape->record(Op::kScale, {a.id, -1, -1}, scale_values(a.value(), s), s);
}

Var add_scalar(Var a, double s) {
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += s;
  return a.tape->record(Op::kAddScalar, {a.id, -1, -1}, std::move(out), s);
}

Var neg(Var a) { return scale(a, -1.0); }

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b, "matmul");
  return t.record(Op::kMatmul, {a.id, b.id, -1}, matmul_values(a.value(), b.value()));
}

Var transpose(Var a) {
  return a.tape->record(Op::kTranspose, {a.id, -1, -1}, transpose_values(a.value()));
}

Var affine(Var input, Var weight, Var bias) {
  Tape& t = same_tape(input, weight, "affine");
  same_tape(weight, bias, "affine");
  const Matrix& x = input.value();
  const Matrix& w = weight.value();
  const Matrix& b = bias.value();
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
    throw DimensionError("affine: input " + x.shape_str() + ", weight " + w.shape_str() +
                         ", bias " + b.shape_str() + " do not chain");
  }
  Matrix out = matmul_values(x, w);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* orow = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) orow[j] += b(0, j);
  }
  return t.record(Op::kAffine, {input.id, weight.id, bias.id}, std::move(out));
}

Var relu(Var a) {
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.data()[i] < 0.0) out.data()[i] = 0.0;
  }
  return a.tape->record(Op::kRelu, {a.id, -1, -1}, std::move(out));
}

Var leaky_relu(Var a, double slope) {
  if (!(slope > 0.0 && slope < 1.0)) {
    throw ConfigError("leaky_relu: slope must be in (0, 1), got " + std::to_string(slope));
  }
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.data()[i] < 0.0) out.data()[i] *= slope;
  }
  return a.tape->record(Op::kLeakyRelu, {a.id, -1, -1}, std::move(out), slope);
}

Var concat_cols(Var a, Var b) {
  Tape& t = same_tape(a, b, "concat_cols");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw DimensionError("concat_cols: row mismatch " + av.shape_str() + " vs " +
                         bv.shape_str());
  }
  Matrix out(av.rows(), av.cols() + bv.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* orow = out.row(i);
    for (std::size_t j = 0; j < av.cols(); ++j) orow[j] = av(i, j);
    for (std::size_t j = 0; j < bv.cols(); ++j) orow[av.cols() + j] = bv(i, j);
  }
  return t.record(Op::kConcatCols, {a.id, b.id, -1}, std::move(out));
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Matrix& av = a.value();
  if (begin > end || end > av.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + av.shape_str());
  }
  Matrix out(av.rows(), end - begin);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = av(i, begin + j);
  }
  return a.tape->record(Op::kSliceCols, {a.id, -1, -1}, std::move(out),
                        static_cast<double>(begin), static_cast<double>(end));
}

Var pad_cols(Var a, std::size_t left, std::size_t right) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), left + av.cols() + right);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < av.cols(); ++j) out(i, left + j) = av(i, j);
  }
  return a.tape->record(Op::kPadCols, {a.id, -1, -1}, std::move(out),
                        static_cast<double>(left), static_cast<double>(right));
}

Var sum(Var a) {
  double acc = 0.0;
  const Matrix& av = a.value();
  for (std::size_t i = 0; i < av.size(); ++i) acc += av.data()[i];
  Matrix out(1, 1);
  out(0, 0) = acc;
  return a.tape->record(Op::kSum, {a.id, -1, -1}, std::move(out));
}

Var mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw UsageError("mean of an empty matrix");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var broadcast_scalar(Var a, std::size_t rows, std::size_t cols) {
  const Matrix& av = a.value();
  if (av.rows() != 1 || av.cols() != 1) {
    throw DimensionError("broadcast_scalar: source is " + av.shape_str() + ", expected 1x1");
  }
  return a.tape->record(Op::kBroadcastScalar, {a.id, -1, -1},
                        Matrix::filled(rows, cols, av(0, 0)), static_cast<double>(rows),
                        static_cast<double>(cols));
}

Var row_sums(Var a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), 1);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double acc = 0.0;
    const double* arow = av.row(i);
    for (std::size_t j = 0; j < av.cols(); ++j) acc += arow[j];
    out(i, 0) = acc;
  }
  return a.tape->record(Op::kRowSums, {a.id, -1, -1}, std::move(out));
}

Var broadcast_cols(Var a, std::size_t cols) {
  const Matrix& av = a.value();
  if (av.cols() != 1) {
    throw DimensionError("broadcast_cols: source is " + av.shape_str() + ", expected n x 1");
  }
  Matrix out(av.rows(), cols);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double* orow = out.row(i);
    for (std::size_t j = 0; j < cols; ++j) orow[j] = av(i, 0);
  }
  return a.tape->record(Op::kBroadcastCols, {a.id, -1, -1}, std::move(out),
                        static_cast<double>(cols));
}

Var col_sums(Var a) {
  const Matrix& av = a.value();
  Matrix out(1, av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    const double* arow = av.row(i);
    for (std::size_t j = 0; j < av.cols(); ++j) out(0, j) += arow[j];
  }
  return a.tape->record(Op::kColSums, {a.id, -1, -1}, std::move(out));
}

Var broadcast_rows(Var a, std::size_t rows) {
  const Matrix& av = a.value();
  if (av.rows() != 1) {
    throw DimensionError("broadcast_rows: source is " + av.shape_str() + ", expected 1 x d");
  }
  Matrix out(rows, av.cols());
  for (std::size_t i = 0; i < rows; ++i) {
    double* orow = out.row(i);
    for (std::size_t j = 0; j < av.cols(); ++j) orow[j] = av(0, j);
  }
  return a.tape->record(Op::kBroadcastRows, {a.id, -1, -1}, std::move(out),
                        static_cast<double>(rows));
}

Var scale_rows(Var a, Var v) {
  Tape& t = same_tape(a, v, "scale_rows");
  const Matrix& av = a.value();
  const Matrix& vv = v.value();
  if (vv.cols() != 1 || vv.rows() != av.rows()) {
    throw DimensionError("scale_rows: scales " + vv.shape_str() + " do not match rows of " +
                         av.shape_str());
  }
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double s = vv(i, 0);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) orow[j] *= s;
  }
  return t.record(Op::kScaleRows, {a.id, v.id, -1}, std::move(out));
}

Var l2_norm_rows(Var a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), 1);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double acc = 0.0;
    const double* arow = av.row(i);
    for (std::size_t j = 0; j < av.cols(); ++j) acc += arow[j] * arow[j];
    out(i, 0) = std::sqrt(acc);
  }
  return a.tape->record(Op::kL2NormRows, {a.id, -1, -1}, std::move(out));
}

namespace {

/// Constant 0/1 (or slope) activation masks. Piecewise-constant in the input,
/// so they enter the backward graph as plain leaves.
Var relu_mask(Tape& t, const Matrix& pre) {
  Matrix mask(pre.rows(), pre.cols());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    mask.data()[i] = pre.data()[i] > 0.0 ? 1.0 : 0.0;
  }
  return t.leaf(std::move(mask));
}

Var leaky_mask(Tape& t, const Matrix& pre, double slope) {
  Matrix mask(pre.rows(), pre.cols());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    // At exactly zero the positive branch applies.
    mask.data()[i] = pre.data()[i] >= 0.0 ? 1.0 : slope;
  }
  return t.leaf(std::move(mask));
}

}  // namespace

Gradients backward(Var root, const std::vector<Var>& wrt) {
  if (root.tape == nullptr) throw UsageError("backward: null root");
  Tape& t = *root.tape;
  const Matrix& rv = root.value();  // also validates the id
  if (rv.rows() != 1 || rv.cols() != 1) {
    throw UsageError("backward: root must be scalar, got " + rv.shape_str());
  }
  for (const Var& w : wrt) {
    if (w.tape != &t) throw UsageError("backward: wrt node not on the root's tape");
    (void)w.value();
  }

  const std::int32_t root_id = root.id;
  // Mark the nodes the root actually depends on; everything else is skipped.
  std::vector<char> needed(static_cast<std::size_t>(root_id) + 1, 0);
  needed[static_cast<std::size_t>(root_id)] = 1;
  for (std::int32_t id = root_id; id >= 0; --id) {
    if (!needed[static_cast<std::size_t>(id)]) continue;
    for (std::int32_t in : t.node(id).in) {
      if (in >= 0) needed[static_cast<std::size_t>(in)] = 1;
    }
  }

  // adjoint[i] = id of the gradient node for node i, or -1.
  std::vector<std::int32_t> adjoint(static_cast<std::size_t>(root_id) + 1, -1);
  adjoint[static_cast<std::size_t>(root_id)] = t.leaf(Matrix::filled(1, 1, 1.0)).id;

  auto accumulate = [&](std::int32_t target, Var g) {
    if (target < 0 || target > root_id) return;  // inputs above root cannot occur
    std::int32_t& slot = adjoint[static_cast<std::size_t>(target)];
    slot = slot < 0 ? g.id : add(Var{&t, slot}, g).id;
  };

  for (std::int32_t id = root_id; id >= 0; --id) {
    if (!needed[static_cast<std::size_t>(id)] ||
        adjoint[static_cast<std::size_t>(id)] < 0) {
      continue;
    }
    // Copy: t.node(id) may be invalidated by appends below.
    const Tape::Node n = t.node(id);
    const Var g{&t, adjoint[static_cast<std::size_t>(id)]};
    const Var in0{&t, n.in[0]};
    const Var in1{&t, n.in[1]};
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd:
        accumulate(n.in[0], g);
        accumulate(n.in[1], g);
        break;
      case Op::kSub:
        accumulate(n.in[0], g);
        accumulate(n.in[1], neg(g));
        break;
      case Op::kMul:
        accumulate(n.in[0], mul(g, in1));
        accumulate(n.in[1], mul(g, in0));
        break;
      case Op::kDivSafe: {
        // out = a/b (0 where b = 0): da = g/b, db = -g*out/b, same convention.
        const Var out_var{&t, id};
        accumulate(n.in[0], div_safe(g, in1));
        accumulate(n.in[1], neg(div_safe(mul(g, out_var), in1)));
        break;
      }
      case Op::kScale:
        accumulate(n.in[0], scale(g, n.sa));
        break;
      case Op::kAddScalar:
        accumulate(n.in[0], g);
        break;
      case Op::kMatmul:
        accumulate(n.in[0], matmul(g, transpose(in1)));
        accumulate(n.in[1], matmul(transpose(in0), g));
        break;
      case Op::kTranspose:
        accumulate(n.in[0], transpose(g));
        break;
      case Op::kAffine:
        accumulate(n.in[0], matmul(g, transpose(in1)));
        accumulate(n.in[1], matmul(transpose(in0), g));
        accumulate(n.in[2], col_sums(g));
        break;
      case Op::kRelu:
        accumulate(n.in[0], mul(g, relu_mask(t, in0.value())));
        break;
      case Op::kLeakyRelu:
        accumulate(n.in[0], mul(g, leaky_mask(t, in0.value(), n.sa)));
        break;
      case Op::kConcatCols: {
        const std::size_t p = in0.cols();
        accumulate(n.in[0], slice_cols(g, 0, p));
        accumulate(n.in[1], slice_cols(g, p, p + in1.cols()));
        break;
      }
      case Op::kSliceCols: {
        const auto begin = static_cast<std::size_t>(n.sa);
        const auto end = static_cast<std::size_t>(n.sb);
        accumulate(n.in[0], pad_cols(g, begin, in0.cols() - end));
        break;
      }
      case Op::kPadCols: {
        const auto left = static_cast<std::size_t>(n.sa);
        accumulate(n.in[0], slice_cols(g, left, left + in0.cols()));
        break;
      }
      case Op::kSum:
        accumulate(n.in[0], broadcast_scalar(g, in0.rows(), in0.cols()));
        break;
      case Op::kBroadcastScalar:
        accumulate(n.in[0], sum(g));
        break;
      case Op::kRowSums:
        accumulate(n.in[0], broadcast_cols(g, in0.cols()));
        break;
      case Op::kBroadcastCols:
        accumulate(n.in[0], row_sums(g));
        break;
      case Op::kColSums:
        accumulate(n.in[0], broadcast_rows(g, in0.rows()));
        break;
      case Op::kBroadcastRows:
        accumulate(n.in[0], col_sums(g));
        break;
      case Op::kScaleRows:
        accumulate(n.in[0], scale_rows(g, in1));
        accumulate(n.in[1], row_sums(mul(g, in0)));
        break;
      case Op::kL2NormRows: {
        // dr_i/da_ij = a_ij / r_i, zero on all-zero rows.
        const Var out_var{&t, id};
        accumulate(n.in[0], scale_rows(in0, div_safe(g, out_var)));
        break;
      }
    }
  }

  Gradients result;
  result.tape_ = &t;
  for (const Var& w : wrt) {
    std::int32_t gid = adjoint[static_cast<std::size_t>(w.id)];
    if (gid < 0) {
      gid = t.leaf(Matrix::zeros(w.rows(), w.cols())).id;
    }
    result.grads_.emplace(w.id, gid);
  }
  return result;
}

Var Gradients::at(Var wrt) const {
  auto it = grads_.find(wrt.id);
  if (it == grads_.end() || wrt.tape != tape_) {
    throw UsageError("Gradients::at: node was not in the wrt set");
  }
  return Var{tape_, it->second};
}

bool Gradients::contains(Var wrt) const {
  return wrt.tape == tape_ && grads_.count(wrt.id) > 0;
}

}  // namespace decgan
