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

// AVX2 kernel variants. This translation unit is the only one compiled with
// -mavx2; it must stay behind the runtime dispatch in kernels.cpp.
//
// Bit-exactness contract with kernels_scalar.cpp: lanes hold independent
// output elements and accumulate in the same order as the scalar loops, and
// mul/add stay unfused (no FMA), so results match the scalar kernels exactly.

#include "tvgd/kernels.hpp"

#if defined(__AVX2__)
#define TVGD_HAVE_AVX2_BUILD 1
#include <immintrin.h>

#include <cstdint>
#endif

namespace tvgd::kernels {

#if TVGD_HAVE_AVX2_BUILD

namespace {

// c row i += s * b row l, vectorized across columns.
inline void row_axpy4(const double* bl, double* ci, double s, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d cv = _mm256_loadu_pd(ci + j);
    __m256d bv = _mm256_loadu_pd(bl + j);
    cv = _mm256_add_pd(cv, _mm256_mul_pd(sv, bv));
    _mm256_storeu_pd(ci + j, cv);
  }
  for (; j < n; ++j) ci[j] += s * bl[j];
}

void matmul_nn_avx2(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      row_axpy4(b + l * n, ci, a[i * k + l], n);
    }
  }
}

void matmul_tn_avx2(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      row_axpy4(b + l * n, ci, a[l * m + i], n);
    }
  }
}

void matmul_nt_avx2(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  // Lanes are four consecutive output columns j..j+3; each lane walks its own
  // row of b via a stride-k gather, so per-element sums keep scalar order.
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* bj = b + j * k;
      const __m256i idx =
          _mm256_set_epi64x(3 * static_cast<std::int64_t>(k),
                            2 * static_cast<std::int64_t>(k),
                            1 * static_cast<std::int64_t>(k), 0);
      __m256d acc = _mm256_loadu_pd(ci + j);
      for (std::size_t l = 0; l < k; ++l) {
        const __m256d av = _mm256_set1_pd(ai[l]);
        const __m256d bv = _mm256_i64gather_pd(bj + l, idx, 8);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(av, bv));
      }
      _mm256_storeu_pd(ci + j, acc);
    }
    for (; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = ci[j];
      for (std::size_t l = 0; l < k; ++l) acc += ai[l] * bj[l];
      ci[j] = acc;
    }
  }
}

void add_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void sub_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_add_pd(yv, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void add_row_avx2(double* m, const double* v, std::size_t rows,
                  std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* mr = m + r * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(mr + j, _mm256_add_pd(_mm256_loadu_pd(mr + j),
                                             _mm256_loadu_pd(v + j)));
    }
    for (; j < cols; ++j) mr[j] += v[j];
  }
}

void leaky_relu_avx2(const double* x, double* out, std::size_t n,
                     double slope) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sv = _mm256_set1_pd(slope);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d mask = _mm256_cmp_pd(xv, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i,
                     _mm256_blendv_pd(_mm256_mul_pd(sv, xv), xv, mask));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_grad_avx2(const double* x, const double* g, double* out,
                          std::size_t n, double slope) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sv = _mm256_set1_pd(slope);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d gv = _mm256_loadu_pd(g + i);
    const __m256d mask = _mm256_cmp_pd(xv, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i,
                     _mm256_blendv_pd(_mm256_mul_pd(sv, gv), gv, mask));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? g[i] : slope * g[i];
}

void col_sum_avx2(const double* m, double* out, std::size_t rows,
                  std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* mr = m + r * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j),
                                              _mm256_loadu_pd(mr + j)));
    }
    for (; j < cols; ++j) out[j] += mr[j];
  }
}

void col_max_avx2(const double* m, double* out, std::size_t rows,
                  std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = m[j];
  for (std::size_t r = 1; r < rows; ++r) {
    const double* mr = m + r * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(out + j, _mm256_max_pd(_mm256_loadu_pd(out + j),
                                              _mm256_loadu_pd(mr + j)));
    }
    for (; j < cols; ++j) {
      if (mr[j] > out[j]) out[j] = mr[j];
    }
  }
}

const KernelTable kAvx2Table = {
    "avx2",
    matmul_nn_avx2,
    matmul_tn_avx2,
    matmul_nt_avx2,
    add_avx2,
    sub_avx2,
    mul_avx2,
    axpy_avx2,
    scale_avx2,
    add_row_avx2,
    leaky_relu_avx2,
    leaky_relu_grad_avx2,
    col_sum_avx2,
    col_max_avx2,
};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2Table; }

#else

const KernelTable* avx2_table() { return nullptr; }

#endif  // TVGD_HAVE_AVX2_BUILD

}  // namespace tvgd::kernels
