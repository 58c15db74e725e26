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
#include "decgan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "decgan/error.hpp"

namespace decgan {
namespace {

constexpr char kMagic[8] = {'D', 'E', 'C', 'G', 'A', 'N', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  write_u64(os, v);
}

double read_f64(std::istream& is) {
  std::uint64_t v = read_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  write_u64(os, m.rows());
  write_u64(os, m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) write_f64(os, m.data()[i]);
}

Matrix read_matrix(std::istream& is) {
  const std::uint64_t rows = read_u64(is);
  const std::uint64_t cols = read_u64(is);
  if (rows > (1u << 24) || cols > (1u << 24)) {
    throw IoError("checkpoint: implausible matrix shape");
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = read_f64(is);
  return m;
}

void write_network(std::ostream& os, const NetworkParams& net) {
  write_u64(os, net.name.size());
  os.write(net.name.data(), static_cast<std::streamsize>(net.name.size()));
  write_f64(os, net.leaky_slope);
  write_u64(os, net.layers.size());
  for (const Layer& l : net.layers) {
    write_u64(os, static_cast<std::uint64_t>(l.activation));
    write_matrix(os, l.weight);
    write_matrix(os, l.bias);
  }
}

NetworkParams read_network(std::istream& is) {
  NetworkParams net;
  const std::uint64_t name_len = read_u64(is);
  if (name_len > 256) throw IoError("checkpoint: implausible network name length");
  net.name.resize(name_len);
  is.read(net.name.data(), static_cast<std::streamsize>(name_len));
  net.leaky_slope = read_f64(is);
  const std::uint64_t n_layers = read_u64(is);
  if (n_layers > 64) throw IoError("checkpoint: implausible layer count");
  for (std::uint64_t i = 0; i < n_layers; ++i) {
    Layer l;
    const std::uint64_t act = read_u64(is);
    if (act > 2) throw IoError("checkpoint: unknown activation tag");
    l.activation = static_cast<Activation>(act);
    l.weight = read_matrix(is);
    l.bias = read_matrix(is);
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  write_u64(os, kVersion);
  write_u64(os, ck.seed);
  write_u64(os, ck.model.dims.noise_dim);
  write_u64(os, ck.model.dims.prior_dim);
  write_u64(os, ck.model.dims.hidden_dim);
  write_u64(os, ck.model.dims.feature_dim);
  write_u64(os, ck.model.dims.embed_dim);
  write_network(os, ck.model.g1);
  write_network(os, ck.model.g2);
  write_network(os, ck.model.gc);
  write_network(os, ck.model.d0);
  write_network(os, ck.model.dc);
  write_network(os, ck.regressor);
  if (!os) throw IoError("write failure on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a checkpoint file: " + path);
  }
  const std::uint64_t version = read_u64(is);
  if (version != kVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) +
                  " in " + path);
  }
  Checkpoint ck;
  ck.seed = read_u64(is);
  ck.model.dims.noise_dim = read_u64(is);
  ck.model.dims.prior_dim = read_u64(is);
  ck.model.dims.hidden_dim = read_u64(is);
  ck.model.dims.feature_dim = read_u64(is);
  ck.model.dims.embed_dim = read_u64(is);
  ck.model.g1 = read_network(is);
  ck.model.g2 = read_network(is);
  ck.model.gc = read_network(is);
  ck.model.d0 = read_network(is);
  ck.model.dc = read_network(is);
  ck.regressor = read_network(is);
  if (!is) throw IoError("truncated checkpoint: " + path);
  return ck;
}

}  // namespace decgan
