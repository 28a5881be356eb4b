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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hclm/bootstrap.hpp"
#include "hclm/design.hpp"
#include "hclm/mc.hpp"
#include "hclm/tuning.hpp"

namespace hclm::cli {

struct BootstrapSettings {
  bool enabled = false;
  int replications = 399;
  MultiplierKind dist = MultiplierKind::kRademacher;
};

/// The candidate grid replaces the term count of every series and
/// alternative basis.
struct TuningSettings {
  bool enabled = false;
  std::vector<int> grid;
  double c = 3.0;
  SelectionCriterion criterion = SelectionCriterion::kMallowsCp;
};

struct SimulationSettings {
  std::vector<int> sample_sizes{1000};
  int replications = 1000;
  int a_min = 4;
  int a_max = 9;
  std::vector<BasisFamily> families{BasisFamily::kPower};
  std::vector<std::string> variants{"korolev_hc"};
  std::vector<Hypothesis> hypotheses{Hypothesis::kNull, Hypothesis::kAlternative};
};

struct RunConfig {
  std::string data;
  std::string response = "y";
  ModelSpec model;
  std::string variant = "korolev_hc";
  std::vector<double> levels{0.05};
  BootstrapSettings bootstrap;
  TuningSettings tuning;
  SimulationSettings simulation;
  bool rescale = false;
  std::uint64_t seed = 20191107;
  int threads = 0;
  std::string out;  // result path (test, tune) or output stem (simulate)

  void validate() const;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::string> data;
  std::optional<std::string> response;
  std::optional<std::string> variant;
  std::vector<int> sample_sizes;
  std::optional<int> replications;
  std::optional<int> a_min;
  std::optional<int> a_max;
  std::vector<std::string> families;
  std::vector<std::string> variants;
  std::optional<int> bootstrap;
  std::optional<std::string> dist;
  std::optional<std::uint64_t> seed;
  std::vector<double> levels;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::string> criterion;
  std::optional<double> c;
  std::vector<int> grid;
  bool rescale = false;
};

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& config, const Overrides& overrides);

}  // namespace hclm::cli
