// Copyright 2026 The tvgd Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tvgd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "tvgd/alloc.hpp"
#include "tvgd/error.hpp"

namespace tvgd {

Tensor2::Tensor2(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  if (size() > 0) {
    data_ = static_cast<double*>(alloc::allocate(size() * sizeof(double)));
    std::memset(data_, 0, size() * sizeof(double));
  }
}

Tensor2::Tensor2(const Tensor2& other) : rows_(other.rows_), cols_(other.cols_) {
  if (size() > 0) {
    data_ = static_cast<double*>(alloc::allocate(size() * sizeof(double)));
    std::memcpy(data_, other.data_, size() * sizeof(double));
  }
}

Tensor2::Tensor2(Tensor2&& other) noexcept
    : rows_(other.rows_), cols_(other.cols_), data_(other.data_) {
  other.rows_ = other.cols_ = 0;
  other.data_ = nullptr;
}

Tensor2& Tensor2::operator=(const Tensor2& other) {
  if (this == &other) return *this;
  Tensor2 tmp(other);
  *this = std::move(tmp);
  return *this;
}

Tensor2& Tensor2::operator=(Tensor2&& other) noexcept {
  if (this == &other) return *this;
  if (data_ != nullptr) alloc::deallocate(data_, size() * sizeof(double));
  rows_ = other.rows_;
  cols_ = other.cols_;
  data_ = other.data_;
  other.rows_ = other.cols_ = 0;
  other.data_ = nullptr;
  return *this;
}

Tensor2::~Tensor2() {
  if (data_ != nullptr) alloc::deallocate(data_, size() * sizeof(double));
}

Tensor2 Tensor2::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Tensor2 out(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw Error("from_rows: ragged row lengths");
    std::copy(row.begin(), row.end(), out.row(i));
    ++i;
  }
  return out;
}

Tensor2 Tensor2::scalar(double v) {
  Tensor2 out(1, 1);
  out.at(0, 0) = v;
  return out;
}

bool Tensor2::all_finite() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(data_[i])) return false;
  }
  return true;
}

void Tensor2::fill(double v) {
  std::fill(data_, data_ + size(), v);
}

bool Tensor2::operator==(const Tensor2& other) const {
  if (!same_shape(other)) return false;
  return std::memcmp(data_, other.data_, size() * sizeof(double)) == 0;
}

}  // namespace tvgd
