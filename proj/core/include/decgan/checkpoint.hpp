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
#ifndef DECGAN_CHECKPOINT_HPP_
#define DECGAN_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "decgan/model.hpp"

namespace decgan {

// On-disk model snapshot. Binary, versioned, round-trips bitwise:
// load(save(m)) reproduces every parameter byte for byte.
struct Checkpoint {
  std::uint64_t seed = 0;
  DecganModel model;
  NetworkParams regressor;  // empty layers when not yet pretrained
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace decgan

#endif  // DECGAN_CHECKPOINT_HPP_
