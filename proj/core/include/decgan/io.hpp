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
#ifndef DECGAN_IO_HPP_
#define DECGAN_IO_HPP_

#include <string>
#include <vector>

#include "decgan/matrix.hpp"

namespace decgan {

// Shortest decimal form that parses back to the same double, so CSV
// round-trips are bitwise exact.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Headerless CSV of decimal floats, one sample per line. Rejects ragged
// rows and non-numeric fields with a ValidationError naming the line.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);

// One integer per line.
std::vector<int> read_csv_ints(const std::string& path);
void write_csv_ints(const std::string& path, const std::vector<int>& v);

}  // namespace decgan

#endif  // DECGAN_IO_HPP_
