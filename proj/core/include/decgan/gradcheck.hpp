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
#ifndef DECGAN_GRADCHECK_HPP_
#define DECGAN_GRADCHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "decgan/matrix.hpp"

namespace decgan {

// A differentiable scalar function of several matrix inputs, rebuilt from
// scratch on every call so it can be probed by finite differences.
using ScalarFn = std::function<double(const std::vector<Matrix>&)>;
// Analytic gradients of the same function, one matrix per input.
using GradFn = std::function<std::vector<Matrix>(const std::vector<Matrix>&)>;

// Worst error over all input entries between analytic gradients and central
// finite differences with step h. The error at each entry is
// |analytic - fd| / max(1, |analytic|, |fd|), i.e. relative for large
// gradients and absolute near zero.
double max_fd_error(const ScalarFn& f, const GradFn& g,
                    const std::vector<Matrix>& at, double h);

struct GradCheckResult {
  std::string op;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// The full first- and-second-order finite-difference suite over every
// differentiable primitive plus composed networks and the gradient-penalty
// parameter gradient. 10 random kink-avoiding points per case.
std::vector<GradCheckResult> run_gradcheck(std::uint64_t seed);

bool all_passed(const std::vector<GradCheckResult>& results);

}  // namespace decgan

#endif  // DECGAN_GRADCHECK_HPP_
