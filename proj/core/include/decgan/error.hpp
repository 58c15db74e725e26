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
#ifndef DECGAN_ERROR_HPP
#define DECGAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace decgan {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible matrix/layer shapes. The message names both shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (slope out of range, empty dataset, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a dataset or metric contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value or a singular system where a regular one was required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// API misuse (non-scalar backward root, node not on tape, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace decgan

#endif  // DECGAN_ERROR_HPP
