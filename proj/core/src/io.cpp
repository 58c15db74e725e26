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
#include "decgan/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "decgan/error.hpp"

namespace decgan {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw NumericError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open file: " + path);
  std::ostringstream out;
  out << is.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open file for writing: " + path);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw IoError("write failure: " + path);
}

namespace {

double parse_field(const std::string& field, const std::string& path,
                   std::size_t line_no) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ValidationError(path + ":" + std::to_string(line_no) +
                          ": not a number: '" + field + "'");
  }
  return v;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open file: " + path);
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t this_cols = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string field =
          line.substr(start, comma == std::string::npos ? comma : comma - start);
      data.push_back(parse_field(field, path, line_no));
      ++this_cols;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = this_cols;
    } else if (this_cols != cols) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": ragged row, " +
                            std::to_string(this_cols) + " fields after " +
                            std::to_string(cols));
    }
    ++rows;
  }
  Matrix m(rows, cols, std::move(data));
  require_finite(m, "csv file " + path);
  return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open file for writing: " + path);
  std::string line;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += format_double(m(i, j));
    }
    line += '\n';
    os.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!os) throw IoError("write failure: " + path);
}

std::vector<int> read_csv_ints(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open file: " + path);
  std::vector<int> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int v = 0;
    const char* begin = line.data();
    const char* end = begin + line.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": not an integer: '" + line + "'");
    }
    out.push_back(v);
  }
  return out;
}

void write_csv_ints(const std::string& path, const std::vector<int>& v) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open file for writing: " + path);
  for (int x : v) {
    const std::string line = std::to_string(x) + "\n";
    os.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!os) throw IoError("write failure: " + path);
}

}  // namespace decgan
