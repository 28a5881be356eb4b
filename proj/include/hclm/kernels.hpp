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

#pragma once

// Data-parallel inner loops shared by the projection, statistic and bootstrap
// code. Every kernel has a scalar reference implementation; AVX2+FMA (x86-64)
// and NEON (aarch64) variants are selected at runtime and are tested for
// equivalence against the reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace hclm::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

/// Non-owning view of a column-major block. Column j starts at data + j * ld.
struct ColMajorView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t ld = 0;

  const double* col(std::size_t j) const { return data + j * ld; }
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = x .* y (out may alias x or y)
  void (*hadamard)(const double* x, const double* y, double* out, std::size_t n);
  // out[j] = A(:, j)' u for j < A.cols
  void (*gemv_t)(ColMajorView a, const double* u, double* out);
  // out = A' diag(w) A, written as a full symmetric A.cols x A.cols
  // column-major matrix with leading dimension A.cols. `scratch` holds A.rows
  // doubles.
  void (*weighted_gram)(ColMajorView a, const double* w, double* out, double* scratch);
  // u -= Q (Q' u); `scratch` holds Q.cols doubles.
  void (*project_out)(ColMajorView q, double* u, double* scratch);
};

std::string_view name(Isa isa);

/// Parses "scalar", "avx2", "neon" or "auto". "auto" maps to the best
/// supported ISA. Throws InputError on anything else.
Isa parse_isa(std::string_view text);

/// True when the variant was compiled in and the running CPU supports it.
bool supported(Isa isa);

/// The best ISA available on this machine.
Isa best_available();

/// Table for a specific ISA; throws InputError if it is not supported.
const KernelTable& table(Isa isa);

/// Table used by the library. Defaults to best_available(), or to the value of
/// the HCLM_KERNELS environment variable when set.
const KernelTable& active();

/// Switches the process-wide kernel table. Intended for start-up
/// configuration and tests; callers must not race it against running work.
void select(Isa isa);

// Convenience wrappers over active().

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> out);

namespace detail {
const KernelTable& scalar_table();
#if defined(HCLM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(HCLM_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace hclm::kernels
