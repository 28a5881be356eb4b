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

#include <cstdint>
#include <initializer_list>

namespace hclm {

/// Counter-based 64-bit generator: the i-th output of the stream with key k is
/// splitmix64(k + (i + 1) * 0x9E3779B97F4A7C15), where splitmix64 is the
/// finalizer
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31).
/// Substreams for (seed, cell, replication, ...) are keyed with derive(), so
/// results never depend on how work is scheduled across threads.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z);
  /// Folds a sequence of integers into one stream key.
  static std::uint64_t derive(std::initializer_list<std::uint64_t> parts);

  std::uint64_t next() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
  double uniform();
  /// Standard normal via the inverse CDF of uniform().
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hclm
