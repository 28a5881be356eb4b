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

#include <atomic>
#include <cstdlib>
#include <string>

#include "hclm/error.hpp"
#include "hclm/kernels.hpp"

namespace hclm::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(HCLM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("HCLM_KERNELS");
  if (env != nullptr && *env != '\0') return &table(parse_isa(env));
  return &table(best_available());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view text) {
  if (text == "scalar") return Isa::kScalar;
  if (text == "avx2") return Isa::kAvx2;
  if (text == "neon") return Isa::kNeon;
  if (text == "auto") return best_available();
  throw InputError("unknown kernel ISA '" + std::string(text) + "' (expected scalar, avx2, neon or auto)");
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2: return cpu_has_avx2();
    case Isa::kNeon:
#if defined(HCLM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_available() {
  if (supported(Isa::kAvx2)) return Isa::kAvx2;
  if (supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw InputError("kernel ISA '" + std::string(name(isa)) + "' is not available on this machine");
  }
  switch (isa) {
#if defined(HCLM_HAVE_AVX2)
    case Isa::kAvx2: return detail::avx2_table();
#endif
#if defined(HCLM_HAVE_NEON)
    case Isa::kNeon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_release); }

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("dot: length mismatch");
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InputError("axpy: length mismatch");
  active().axpy(a, x.data(), y.data(), x.size());
}

void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  if (x.size() != y.size() || out.size() != x.size()) throw InputError("hadamard: length mismatch");
  active().hadamard(x.data(), y.data(), out.data(), x.size());
}

}  // namespace hclm::kernels
