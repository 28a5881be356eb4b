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

// aarch64 variant. Advanced SIMD is mandatory on aarch64, so no extra compile
// flags are needed.

#include <arm_neon.h>

#include "hclm/kernels.hpp"

namespace hclm::kernels::detail {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void hadamard_neon(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void gemv_t_neon(ColMajorView a, const double* u, double* out) {
  for (std::size_t j = 0; j < a.cols; ++j) out[j] = dot_neon(a.col(j), u, a.rows);
}

void weighted_gram_neon(ColMajorView a, const double* w, double* out, double* scratch) {
  const std::size_t r = a.cols;
  for (std::size_t j = 0; j < r; ++j) {
    hadamard_neon(a.col(j), w, scratch, a.rows);
    for (std::size_t k = j; k < r; ++k) {
      const double v = dot_neon(scratch, a.col(k), a.rows);
      out[j * r + k] = v;
      out[k * r + j] = v;
    }
  }
}

void project_out_neon(ColMajorView q, double* u, double* scratch) {
  gemv_t_neon(q, u, scratch);
  for (std::size_t j = 0; j < q.cols; ++j) axpy_neon(-scratch[j], q.col(j), u, q.rows);
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable t{Isa::kNeon,    dot_neon,           axpy_neon,
                             hadamard_neon, gemv_t_neon,        weighted_gram_neon,
                             project_out_neon};
  return t;
}

}  // namespace hclm::kernels::detail
