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

#include <iosfwd>

#include "json.hpp"

#include "hclm/cli/run_config.hpp"
#include "hclm/data.hpp"

namespace hclm::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalError = 3 };

/// Each command prints a human-readable report to `out` and returns the
/// machine-readable result, which is also written to config.out when set.
nlohmann::json cmd_test(const Dataset& data, const RunConfig& config, std::ostream& out);
nlohmann::json cmd_tune(const Dataset& data, const RunConfig& config, std::ostream& out);
nlohmann::json cmd_simulate(const RunConfig& config, std::ostream& out);

/// Loads config.data (applying --rescale) for the data commands.
Dataset load_dataset(const RunConfig& config);

/// Six significant digits.
std::string screen(double value);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace hclm::cli
