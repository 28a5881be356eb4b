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

#include "hclm/kernels.hpp"

namespace hclm::kernels::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void hadamard_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void gemv_t_scalar(ColMajorView a, const double* u, double* out) {
  for (std::size_t j = 0; j < a.cols; ++j) out[j] = dot_scalar(a.col(j), u, a.rows);
}

void weighted_gram_scalar(ColMajorView a, const double* w, double* out, double* scratch) {
  const std::size_t r = a.cols;
  for (std::size_t j = 0; j < r; ++j) {
    hadamard_scalar(a.col(j), w, scratch, a.rows);
    for (std::size_t k = j; k < r; ++k) {
      const double v = dot_scalar(scratch, a.col(k), a.rows);
      out[j * r + k] = v;
      out[k * r + j] = v;
    }
  }
}

void project_out_scalar(ColMajorView q, double* u, double* scratch) {
  gemv_t_scalar(q, u, scratch);
  for (std::size_t j = 0; j < q.cols; ++j) axpy_scalar(-scratch[j], q.col(j), u, q.rows);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::kScalar,     dot_scalar,           axpy_scalar,
                             hadamard_scalar,  gemv_t_scalar,        weighted_gram_scalar,
                             project_out_scalar};
  return t;
}

}  // namespace hclm::kernels::detail
