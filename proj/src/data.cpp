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

#include "hclm/data.hpp"

#include <algorithm>

#include "hclm/error.hpp"

namespace hclm {

bool Dataset::has(std::string_view name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const Eigen::VectorXd& Dataset::at(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InputError("no column named '" + std::string(name) + "'");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

void Dataset::add(std::string name, Eigen::VectorXd values) {
  if (has(name)) throw InputError("duplicate column name '" + name + "'");
  if (!columns.empty() && values.size() != rows()) {
    throw InputError("column '" + name + "' has " + std::to_string(values.size()) + " rows, expected " +
                     std::to_string(rows()));
  }
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

}  // namespace hclm
