// Copyright (c) 2026 The hclm Authors. All Rights Reserved.
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

// Compiled with -mavx2 -mfma. Nothing in this file may run before dispatch.cpp
// has confirmed CPU support.

#include <immintrin.h>

#include "hclm/kernels.hpp"

namespace hclm::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void hadamard_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

// Four simultaneous dot products of `t` against columns c0..c3.
inline void dot4(const double* t, const double* c0, const double* c1, const double* c2,
                 const double* c3, std::size_t n, double* res) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d tv = _mm256_loadu_pd(t + i);
    a0 = _mm256_fmadd_pd(tv, _mm256_loadu_pd(c0 + i), a0);
    a1 = _mm256_fmadd_pd(tv, _mm256_loadu_pd(c1 + i), a1);
    a2 = _mm256_fmadd_pd(tv, _mm256_loadu_pd(c2 + i), a2);
    a3 = _mm256_fmadd_pd(tv, _mm256_loadu_pd(c3 + i), a3);
  }
  double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
  for (; i < n; ++i) {
    s0 += t[i] * c0[i];
    s1 += t[i] * c1[i];
    s2 += t[i] * c2[i];
    s3 += t[i] * c3[i];
  }
  res[0] = s0;
  res[1] = s1;
  res[2] = s2;
  res[3] = s3;
}

void gemv_t_avx2(ColMajorView a, const double* u, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= a.cols; j += 4) {
    dot4(u, a.col(j), a.col(j + 1), a.col(j + 2), a.col(j + 3), a.rows, out + j);
  }
  for (; j < a.cols; ++j) out[j] = dot_avx2(a.col(j), u, a.rows);
}

void weighted_gram_avx2(ColMajorView a, const double* w, double* out, double* scratch) {
  const std::size_t r = a.cols;
  double res[4];
  for (std::size_t j = 0; j < r; ++j) {
    hadamard_avx2(a.col(j), w, scratch, a.rows);
    std::size_t k = j;
    for (; k + 4 <= r; k += 4) {
      dot4(scratch, a.col(k), a.col(k + 1), a.col(k + 2), a.col(k + 3), a.rows, res);
      for (std::size_t c = 0; c < 4; ++c) {
        out[j * r + k + c] = res[c];
        out[(k + c) * r + j] = res[c];
      }
    }
    for (; k < r; ++k) {
      const double v = dot_avx2(scratch, a.col(k), a.rows);
      out[j * r + k] = v;
      out[k * r + j] = v;
    }
  }
}

void project_out_avx2(ColMajorView q, double* u, double* scratch) {
  gemv_t_avx2(q, u, scratch);
  for (std::size_t j = 0; j < q.cols; ++j) axpy_avx2(-scratch[j], q.col(j), u, q.rows);
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{Isa::kAvx2,    dot_avx2,           axpy_avx2,
                             hadamard_avx2, gemv_t_avx2,        weighted_gram_avx2,
                             project_out_avx2};
  return t;
}

}  // namespace hclm::kernels::detail
