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

#ifndef TVGD_KERNELS_HPP
#define TVGD_KERNELS_HPP

#include <cstddef>

namespace tvgd::kernels {

// Dense double-precision inner loops behind the autodiff ops. Every entry
// has a scalar reference implementation and, on x86-64 with AVX2, a vector
// variant selected once at startup. The vector variants keep the scalar
// accumulation order (lanes only ever hold independent output elements),
// so both implementations produce bit-identical results. That property is
// what the equivalence tests assert and what keeps kernel selection out of
// the determinism contract.
struct KernelTable {
  const char* name;

  // c += a . b           a: m x k, b: k x n, c: m x n
  void (*matmul_nn)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n);
  // c += a^T . b         a: k x m, b: k x n, c: m x n
  void (*matmul_tn)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n);
  // c += a . b^T         a: m x k, b: n x k, c: m x n
  void (*matmul_nt)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n);

  void (*add)(const double* x, const double* y, double* out, std::size_t n);
  void (*sub)(const double* x, const double* y, double* out, std::size_t n);
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);

  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);

  // every row of m += v
  void (*add_row)(double* m, const double* v, std::size_t rows,
                  std::size_t cols);

  void (*leaky_relu)(const double* x, double* out, std::size_t n,
                     double slope);
  // out = g where x > 0 else slope * g
  void (*leaky_relu_grad)(const double* x, const double* g, double* out,
                          std::size_t n, double slope);

  // out[j] = sum_r m[r][j]; out must be zeroed by the caller
  void (*col_sum)(const double* m, double* out, std::size_t rows,
                  std::size_t cols);
  // out[j] = max_r m[r][j]; requires rows >= 1
  void (*col_max)(const double* m, double* out, std::size_t rows,
                  std::size_t cols);
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when the build has no AVX2 support compiled in.
const KernelTable* avx2_table();

bool cpu_supports_avx2();

/// Active table: AVX2 when the CPU has it, else scalar. The environment
/// variable TVGD_KERNELS=scalar|avx2 overrides the choice at startup.
const KernelTable& active();

/// Test hook: force a specific table for the current process.
void force(const KernelTable& table);

}  // namespace tvgd::kernels

#endif  // TVGD_KERNELS_HPP
