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

#ifndef TVGD_TENSOR_HPP
#define TVGD_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace tvgd {

/// Dense row-major matrix of doubles. The single payload type of the
/// autodiff engine; vectors are 1xN or Nx1, scalars are 1x1.
/// Storage is 64-byte aligned and counted by tvgd::alloc.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols);  // zero-filled
  Tensor2(const Tensor2& other);
  Tensor2(Tensor2&& other) noexcept;
  Tensor2& operator=(const Tensor2& other);
  Tensor2& operator=(Tensor2&& other) noexcept;
  ~Tensor2();

  static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor2 scalar(double v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }
  bool empty() const { return size() == 0; }

  double* data() { return data_; }
  const double* data() const { return data_; }
  double* row(std::size_t r) { return data_ + r * cols_; }
  const double* row(std::size_t r) const { return data_ + r * cols_; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool same_shape(const Tensor2& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;
  void fill(double v);
  void zero() { fill(0.0); }

  /// Exact elementwise equality (shape and bits).
  bool operator==(const Tensor2& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double* data_ = nullptr;
};

}  // namespace tvgd

#endif  // TVGD_TENSOR_HPP
