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

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

namespace hclm {

/// Rectangular table of named real columns.
struct Dataset {
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> columns;
  std::string source;  // path the data was read from, if any

  Eigen::Index rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t cols() const { return columns.size(); }

  bool has(std::string_view name) const;
  /// Throws InputError naming the missing column.
  const Eigen::VectorXd& at(std::string_view name) const;
  /// Appends a column; throws on duplicate names or length mismatch.
  void add(std::string name, Eigen::VectorXd values);
};

}  // namespace hclm
