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

#include <stdexcept>
#include <string>
#include <vector>

namespace hclm {

/// Bad user input: malformed files, invalid arguments, inconsistent shapes.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that cannot proceed on the given data (rank loss, singular
/// inner matrices, non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column-rank failure of a regressor matrix. `columns` lists the offending
/// column indices (or labels, when known) in the input ordering.
class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(const std::string& what, std::vector<std::string> columns)
      : NumericalError(what), columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

}  // namespace hclm
