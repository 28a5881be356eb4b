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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hclm/data.hpp"

namespace hclm::cli {

/// Reads a comma-separated table with a header row. Every cell must parse as a
/// finite real; errors name the offending line and column.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in, const std::string& source = "<stream>");

/// Maps each named column affinely onto [-1, 1]. Constant columns are left
/// untouched.
void rescale_columns(Dataset& data, const std::vector<std::string>& names);

}  // namespace hclm::cli
