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
 *
 * Hot paths, in rough order of training cost: dense matmul, a taped
 * forward/backward pass, the gradient penalty (which runs backward twice),
 * and one epoch of the softmax classifier used during evaluation.
 */
#include <benchmark/benchmark.h>

#include "decgan/eval.hpp"
#include "decgan/losses.hpp"
#include "decgan/model.hpp"
#include "decgan/network.hpp"
#include "decgan/rng.hpp"
#include "decgan/tape.hpp"

using namespace decgan;

namespace {

void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Matrix a = rng.normal_matrix(n, n);
  const Matrix b = rng.normal_matrix(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul_values(a, b));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(bm_matmul)->Arg(64)->Arg(128)->Arg(256);

NetworkParams bench_net(std::size_t in, std::size_t hidden, std::size_t out) {
  Rng rng(2);
  return make_network("bench", {in, hidden, out},
                      {Activation::kLeakyRelu, Activation::kNone}, rng, 0.02);
}

void bm_taped_forward_backward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const NetworkParams net = bench_net(64, 256, 64);
  Rng rng(3);
  const Matrix x = rng.normal_matrix(batch, 64);
  for (auto _ : state) {
    Tape t;
    TapedNet lifted = lift(t, net);
    Var out = forward(net, lifted, t.leaf(x));
    Var loss = mean(out);
    Gradients g = backward(loss, lifted.all());
    benchmark::DoNotOptimize(g.value_at(lifted.weights[0]).data());
  }
}
BENCHMARK(bm_taped_forward_backward)->Arg(16)->Arg(64)->Arg(256);

void bm_gradient_penalty(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const NetworkParams d = bench_net(64, 256, 1);
  Rng rng(4);
  const Matrix x = rng.normal_matrix(batch, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient_penalty_value(d, x));
  }
}
BENCHMARK(bm_gradient_penalty)->Arg(16)->Arg(64)->Arg(256);

void bm_softmax_epoch(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 64, classes = 15;
  Rng rng(5);
  const Matrix x = rng.normal_matrix(rows, dim);
  std::vector<int> y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] = static_cast<int>(i % classes);
  }
  for (auto _ : state) {
    Rng local(6);
    benchmark::DoNotOptimize(
        train_softmax(x, y, classes, 0.5, 1, 1e-4, local));
  }
}
BENCHMARK(bm_softmax_epoch)->Arg(512)->Arg(2048);

void bm_generate_unconditional(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  ModelDims dims;
  dims.noise_dim = 16;
  dims.prior_dim = 32;
  dims.hidden_dim = 64;
  dims.feature_dim = 64;
  dims.embed_dim = 16;
  Rng rng(7);
  const DecganModel m = init_decgan(dims, rng);
  const Matrix z = rng.normal_matrix(batch, dims.noise_dim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_unconditional(m.g1, m.g2, z));
  }
}
BENCHMARK(bm_generate_unconditional)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
