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

// Scalar reference kernels. The i-k-j loop order in the matmul variants is
// load-bearing: the AVX2 variants vectorize across j and therefore reproduce
// these sums bit-for-bit. Keep the orders in sync if either side changes.

#include "tvgd/kernels.hpp"

namespace tvgd::kernels {

namespace {

void matmul_nn_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double ail = a[i * k + l];
      const double* bl = b + l * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ail * bl[j];
    }
  }
}

void matmul_tn_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double ali = a[l * m + i];
      const double* bl = b + l * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ali * bl[j];
    }
  }
}

void matmul_nt_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = ci[j];
      for (std::size_t l = 0; l < k; ++l) acc += ai[l] * bj[l];
      ci[j] = acc;
    }
  }
}

void add_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void sub_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void add_row_scalar(double* m, const double* v, std::size_t rows,
                    std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* mr = m + r * cols;
    for (std::size_t j = 0; j < cols; ++j) mr[j] += v[j];
  }
}

void leaky_relu_scalar(const double* x, double* out, std::size_t n,
                       double slope) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_grad_scalar(const double* x, const double* g, double* out,
                            std::size_t n, double slope) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? g[i] : slope * g[i];
}

void col_sum_scalar(const double* m, double* out, std::size_t rows,
                    std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* mr = m + r * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += mr[j];
  }
}

void col_max_scalar(const double* m, double* out, std::size_t rows,
                    std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = m[j];
  for (std::size_t r = 1; r < rows; ++r) {
    const double* mr = m + r * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (mr[j] > out[j]) out[j] = mr[j];
    }
  }
}

const KernelTable kScalarTable = {
    "scalar",
    matmul_nn_scalar,
    matmul_tn_scalar,
    matmul_nt_scalar,
    add_scalar,
    sub_scalar,
    mul_scalar,
    axpy_scalar,
    scale_scalar,
    add_row_scalar,
    leaky_relu_scalar,
    leaky_relu_grad_scalar,
    col_sum_scalar,
    col_max_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

}  // namespace tvgd::kernels
