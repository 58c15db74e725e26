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
#include "decgan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "decgan/error.hpp"
#include "decgan/rng.hpp"
#include "decgan/tape.hpp"

namespace decgan {

double max_fd_error(const ScalarFn& f, const GradFn& g,
                    const std::vector<Matrix>& at, double h) {
  const std::vector<Matrix> analytic = g(at);
  if (analytic.size() != at.size()) {
    throw DimensionError("gradcheck: gradient count does not match inputs");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < at.size(); ++i) {
    for (std::size_t j = 0; j < at[i].size(); ++j) {
      std::vector<Matrix> plus = at;
      std::vector<Matrix> minus = at;
      plus[i].data()[j] += h;
      minus[i].data()[j] -= h;
      const double fd = (f(plus) - f(minus)) / (2.0 * h);
      const double a = analytic[i].data()[j];
      const double scale = std::max({1.0, std::abs(a), std::abs(fd)});
      worst = std::max(worst, std::abs(a - fd) / scale);
    }
  }
  return worst;
}

namespace {

using DrawFn = std::function<std::vector<Matrix>(Rng&)>;
using BuildFn = std::function<Var(Tape&, const std::vector<Var>&)>;

// Entries with magnitude in [lo, hi] and random sign, keeping activation
// inputs away from the kink at zero.
Matrix signed_uniform(Rng& rng, std::size_t rows, std::size_t cols, double lo,
                      double hi) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double mag = rng.uniform(lo, hi);
    m.data()[i] = rng.uniform() < 0.5 ? -mag : mag;
  }
  return m;
}

GradCheckResult check_case(const std::string& name, double tol, double h,
                           int points, Rng& rng, const DrawFn& draw,
                           const BuildFn& build) {
  const ScalarFn f = [&build](const std::vector<Matrix>& in) {
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(in.size());
    for (const Matrix& m : in) leaves.push_back(tape.leaf(m));
    return build(tape, leaves).scalar();
  };
  const GradFn g = [&build](const std::vector<Matrix>& in) {
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(in.size());
    for (const Matrix& m : in) leaves.push_back(tape.leaf(m));
    const Var root = build(tape, leaves);
    const Gradients grads = backward(root, leaves);
    std::vector<Matrix> out;
    out.reserve(leaves.size());
    for (const Var& leaf : leaves) out.push_back(grads.value_at(leaf));
    return out;
  };

  GradCheckResult result;
  result.op = name;
  result.tolerance = tol;
  for (int p = 0; p < points; ++p) {
    const std::vector<Matrix> at = draw(rng);
    result.max_error = std::max(result.max_error, max_fd_error(f, g, at, h));
  }
  result.pass = result.max_error <= tol;
  return result;
}

// Reduces a matrix-valued op output to a scalar through a fixed random
// weighting so that errors which cancel in a plain sum still show up.
BuildFn weighted(const Matrix& w, const std::function<Var(Tape&, const std::vector<Var>&)>& op) {
  return [w, op](Tape& tape, const std::vector<Var>& in) {
    const Var out = op(tape, in);
    return sum(mul(out, tape.leaf(w)));
  };
}

bool preacts_clear_of_kinks(const Matrix& pre, double margin) {
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if (std::abs(pre.data()[i]) < margin) return false;
  }
  return true;
}

}  // namespace

std::vector<GradCheckResult> run_gradcheck(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckResult> results;
  constexpr double kTol = 1e-5;
  constexpr double kH = 1e-5;
  constexpr int kPoints = 10;
  const std::size_t r = 2;
  const std::size_t c = 3;

  const auto pair_draw = [=](Rng& g) {
    return std::vector<Matrix>{g.normal_matrix(r, c), g.normal_matrix(r, c)};
  };
  const auto single_draw = [=](Rng& g) {
    return std::vector<Matrix>{g.normal_matrix(r, c)};
  };

  Matrix w23 = rng.normal_matrix(r, c);
  results.push_back(check_case(
      "add", kTol, kH, kPoints, rng, pair_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return add(in[0], in[1]); })));
  results.push_back(check_case(
      "sub", kTol, kH, kPoints, rng, pair_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return sub(in[0], in[1]); })));
  results.push_back(check_case(
      "mul", kTol, kH, kPoints, rng, pair_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return mul(in[0], in[1]); })));
  results.push_back(check_case(
      "div_safe", kTol, kH, kPoints, rng,
      [=](Rng& g) {
        // Denominators away from zero; div_safe is not differentiable there.
        return std::vector<Matrix>{g.normal_matrix(r, c),
                                   signed_uniform(g, r, c, 0.5, 1.5)};
      },
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return div_safe(in[0], in[1]); })));
  results.push_back(check_case(
      "scale", kTol, kH, kPoints, rng, single_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return scale(in[0], 0.7); })));
  results.push_back(check_case(
      "add_scalar", kTol, kH, kPoints, rng, single_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return add_scalar(in[0], 0.3); })));
  results.push_back(check_case(
      "neg", kTol, kH, kPoints, rng, single_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return neg(in[0]); })));

  Matrix w24 = rng.normal_matrix(2, 4);
  results.push_back(check_case(
      "matmul", kTol, kH, kPoints, rng,
      [](Rng& g) {
        return std::vector<Matrix>{g.normal_matrix(2, 3), g.normal_matrix(3, 4)};
      },
      weighted(w24, [](Tape&, const std::vector<Var>& in) { return matmul(in[0], in[1]); })));

  Matrix w32 = rng.normal_matrix(c, r);
  results.push_back(check_case(
      "transpose", kTol, kH, kPoints, rng, single_draw,
      weighted(w32, [](Tape&, const std::vector<Var>& in) { return transpose(in[0]); })));

  results.push_back(check_case(
      "affine", kTol, kH, kPoints, rng,
      [](Rng& g) {
        return std::vector<Matrix>{g.normal_matrix(2, 3), g.normal_matrix(3, 4),
                                   g.normal_matrix(1, 4)};
      },
      weighted(w24, [](Tape&, const std::vector<Var>& in) {
        return affine(in[0], in[1], in[2]);
      })));

  const auto kink_free_draw = [=](Rng& g) {
    return std::vector<Matrix>{signed_uniform(g, r, c, 0.1, 1.0)};
  };
  results.push_back(check_case(
      "relu", kTol, kH, kPoints, rng, kink_free_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) { return relu(in[0]); })));
  results.push_back(check_case(
      "leaky_relu", kTol, kH, kPoints, rng, kink_free_draw,
      weighted(w23, [](Tape&, const std::vector<Var>& in) {
        return leaky_relu(in[0], 0.2);
      })));

  Matrix w26 = rng.normal_matrix(2, 6);
  results.push_back(check_case(
      "concat_cols", kTol, kH, kPoints, rng, pair_draw,
      weighted(w26, [](Tape&, const std::vector<Var>& in) {
        return concat_cols(in[0], in[1]);
      })));
  Matrix w22 = rng.normal_matrix(2, 2);
  results.push_back(check_case(
      "slice_cols", kTol, kH, kPoints, rng, single_draw,
      weighted(w22, [](Tape&, const std::vector<Var>& in) {
        return slice_cols(in[0], 1, 3);
      })));
  Matrix w25 = rng.normal_matrix(2, 5);
  results.push_back(check_case(
      "pad_cols", kTol, kH, kPoints, rng, single_draw,
      weighted(w25, [](Tape&, const std::vector<Var>& in) {
        return pad_cols(in[0], 1, 1);
      })));

  results.push_back(check_case(
      "sum", kTol, kH, kPoints, rng, single_draw,
      [](Tape&, const std::vector<Var>& in) { return sum(in[0]); }));
  results.push_back(check_case(
      "mean", kTol, kH, kPoints, rng, single_draw,
      [](Tape&, const std::vector<Var>& in) { return mean(in[0]); }));

  Matrix w11 = rng.normal_matrix(1, 1);
  const auto scalar_draw = [](Rng& g) {
    return std::vector<Matrix>{g.normal_matrix(1, 1)};
  };
  results.push_back(check_case(
      "broadcast_scalar", kTol, kH, kPoints, rng, scalar_draw,
      weighted(w23, [=](Tape&, const std::vector<Var>& in) {
        return broadcast_scalar(in[0], r, c);
      })));

  Matrix w21 = rng.normal_matrix(r, 1);
  results.push_back(check_case(
      "row_sums", kTol, kH, kPoints, rng, single_draw,
      weighted(w21, [](Tape&, const std::vector<Var>& in) { return row_sums(in[0]); })));
  results.push_back(check_case(
      "broadcast_cols", kTol, kH, kPoints, rng,
      [=](Rng& g) { return std::vector<Matrix>{g.normal_matrix(r, 1)}; },
      weighted(w23, [=](Tape&, const std::vector<Var>& in) {
        return broadcast_cols(in[0], c);
      })));
  Matrix w13 = rng.normal_matrix(1, c);
  results.push_back(check_case(
      "col_sums", kTol, kH, kPoints, rng, single_draw,
      weighted(w13, [](Tape&, const std::vector<Var>& in) { return col_sums(in[0]); })));
  results.push_back(check_case(
      "broadcast_rows", kTol, kH, kPoints, rng,
      [=](Rng& g) { return std::vector<Matrix>{g.normal_matrix(1, c)}; },
      weighted(w23, [=](Tape&, const std::vector<Var>& in) {
        return broadcast_rows(in[0], r);
      })));
  results.push_back(check_case(
      "scale_rows", kTol, kH, kPoints, rng,
      [=](Rng& g) {
        return std::vector<Matrix>{g.normal_matrix(r, c), g.normal_matrix(r, 1)};
      },
      weighted(w23, [](Tape&, const std::vector<Var>& in) {
        return scale_rows(in[0], in[1]);
      })));
  results.push_back(check_case(
      "l2_norm_rows", kTol, kH, kPoints, rng,
      [=](Rng& g) {
        // Rows with norm bounded away from zero, where the norm has no
        // derivative.
        return std::vector<Matrix>{signed_uniform(g, r, c, 0.3, 1.0)};
      },
      weighted(w21, [](Tape&, const std::vector<Var>& in) {
        return l2_norm_rows(in[0]);
      })));

  // Composed two-layer network with a leaky ReLU between the affines,
  // differentiated with respect to input and all parameters at once.
  results.push_back(check_case(
      "composed_net", kTol, kH, kPoints, rng,
      [](Rng& g) {
        for (int attempt = 0; attempt < 100; ++attempt) {
          Matrix x = g.normal_matrix(3, 4);
          Matrix w1 = g.normal_matrix(4, 5);
          Matrix b1 = g.normal_matrix(1, 5);
          Matrix w2 = g.normal_matrix(5, 2);
          Matrix b2 = g.normal_matrix(1, 2);
          Matrix pre = matmul_values(x, w1);
          for (std::size_t i = 0; i < pre.rows(); ++i) {
            for (std::size_t j = 0; j < pre.cols(); ++j) pre(i, j) += b1(0, j);
          }
          if (preacts_clear_of_kinks(pre, 1e-3)) {
            return std::vector<Matrix>{x, w1, b1, w2, b2};
          }
        }
        throw NumericError("gradcheck: could not sample a kink-free network");
      },
      [](Tape&, const std::vector<Var>& in) {
        const Var h = leaky_relu(affine(in[0], in[1], in[2]), 0.2);
        return mean(affine(h, in[3], in[4]));
      }));

  // Second order: parameter gradients of a gradient penalty, whose forward
  // pass already contains a backward sweep over the critic input.
  const Matrix xhat = rng.normal_matrix(3, 3);
  results.push_back(check_case(
      "penalty_second_order", 1e-4, 1e-4, kPoints, rng,
      [xhat](Rng& g) {
        for (int attempt = 0; attempt < 100; ++attempt) {
          Matrix w1 = g.normal_matrix(3, 4);
          Matrix b1 = g.normal_matrix(1, 4);
          Matrix w2 = g.normal_matrix(4, 1);
          Matrix b2 = g.normal_matrix(1, 1);
          Matrix pre = matmul_values(xhat, w1);
          for (std::size_t i = 0; i < pre.rows(); ++i) {
            for (std::size_t j = 0; j < pre.cols(); ++j) pre(i, j) += b1(0, j);
          }
          if (preacts_clear_of_kinks(pre, 1e-2)) {
            return std::vector<Matrix>{w1, b1, w2, b2};
          }
        }
        throw NumericError("gradcheck: could not sample a kink-free critic");
      },
      [xhat](Tape& tape, const std::vector<Var>& in) {
        const Var x = tape.leaf(xhat);
        const Var h = leaky_relu(affine(x, in[0], in[1]), 0.2);
        const Var score = affine(h, in[2], in[3]);
        const Gradients inner = backward(sum(score), {x});
        const Var excess = add_scalar(l2_norm_rows(inner.at(x)), -1.0);
        return mean(mul(excess, excess));
      }));

  return results;
}

bool all_passed(const std::vector<GradCheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const GradCheckResult& r) { return r.pass; });
}

}  // namespace decgan
