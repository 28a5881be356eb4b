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


#include "hclm/cli/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <string>

#include "hclm/error.hpp"
#include "hclm/lmtest.hpp"

namespace hclm::cli {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw InputError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InputError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

std::vector<double> read_levels(const json& value) {
  if (value.is_number()) return {value.get<double>()};
  return value.get<std::vector<double>>();
}

SeriesTerm term_from_json(const json& obj) {
  check_keys(obj, "series term", {"var", "family", "terms", "order"});
  SeriesTerm t;
  t.var = obj.at("var").get<std::string>();
  if (obj.contains("family")) t.basis.family = parse_basis_family(obj.at("family").get<std::string>());
  t.basis.terms = obj.at("terms").get<int>();
  read(obj, "order", t.basis.spline_order);
  return t;
}

json term_to_json(const SeriesTerm& t) {
  return {{"var", t.var},
          {"family", std::string(to_string(t.basis.family))},
          {"terms", t.basis.terms},
          {"order", t.basis.spline_order}};
}

}  // namespace

void RunConfig::validate() const {
  parse_variant(variant);
  validate_levels(levels);
  if (bootstrap.replications < 1) throw InputError("bootstrap replications must be positive");
  if (bootstrap.enabled && variant != "korolev_hc") {
    throw InputError("the wild bootstrap is defined for korolev_hc only");
  }
  if (tuning.enabled) {
    if (tuning.grid.empty()) throw InputError("tuning grid is empty");
    for (std::size_t i = 1; i < tuning.grid.size(); ++i) {
      if (tuning.grid[i] <= tuning.grid[i - 1]) throw InputError("tuning grid must be strictly increasing");
    }
  }
  if (tuning.c < 1.0) throw InputError("penalty constant c must be at least 1");
  if (threads < 0) throw InputError("threads must be non-negative");
}

RunConfig config_from_json(const json& doc) {
  RunConfig cfg;
  try {
    check_keys(doc, "config", {"data", "y", "model", "variant", "alpha", "bootstrap", "tuning", "simulate", "rescale",
                               "seed", "threads", "out"});
    read(doc, "data", cfg.data);
    read(doc, "y", cfg.response);
    read(doc, "variant", cfg.variant);
    read(doc, "rescale", cfg.rescale);
    read(doc, "seed", cfg.seed);
    read(doc, "threads", cfg.threads);
    read(doc, "out", cfg.out);
    if (doc.contains("alpha")) cfg.levels = read_levels(doc.at("alpha"));

    if (doc.contains("model")) {
      const json& m = doc.at("model");
      check_keys(m, "model", {"linear", "series", "recipe", "alternative", "custom", "screen_tol"});
      read(m, "linear", cfg.model.linear_vars);
      if (m.contains("series")) {
        for (const auto& t : m.at("series")) cfg.model.series_vars.push_back(term_from_json(t));
      }
      if (m.contains("recipe")) cfg.model.recipe = parse_alternative_recipe(m.at("recipe").get<std::string>());
      if (m.contains("alternative")) {
        for (const auto& t : m.at("alternative")) cfg.model.alternative_bases.push_back(term_from_json(t));
      }
      read(m, "custom", cfg.model.custom_columns);
      read(m, "screen_tol", cfg.model.screen_tol);
    }
    if (doc.contains("bootstrap")) {
      const json& b = doc.at("bootstrap");
      check_keys(b, "bootstrap", {"enabled", "B", "dist"});
      read(b, "enabled", cfg.bootstrap.enabled);
      read(b, "B", cfg.bootstrap.replications);
      if (b.contains("dist")) cfg.bootstrap.dist = parse_multiplier_kind(b.at("dist").get<std::string>());
    }
    if (doc.contains("tuning")) {
      const json& t = doc.at("tuning");
      check_keys(t, "tuning", {"enabled", "grid", "c", "criterion"});
      read(t, "enabled", cfg.tuning.enabled);
      read(t, "grid", cfg.tuning.grid);
      read(t, "c", cfg.tuning.c);
      if (t.contains("criterion")) {
        cfg.tuning.criterion = parse_selection_criterion(t.at("criterion").get<std::string>());
      }
    }
    if (doc.contains("simulate")) {
      const json& s = doc.at("simulate");
      check_keys(s, "simulate", {"n", "reps", "a_min", "a_max", "families", "variants", "hypotheses"});
      SimulationSettings& sim = cfg.simulation;
      if (s.contains("n")) {
        sim.sample_sizes = s.at("n").is_number() ? std::vector<int>{s.at("n").get<int>()} : s.at("n").get<std::vector<int>>();
      }
      read(s, "reps", sim.replications);
      read(s, "a_min", sim.a_min);
      read(s, "a_max", sim.a_max);
      if (s.contains("families")) {
        sim.families.clear();
        for (const auto& f : s.at("families")) sim.families.push_back(parse_basis_family(f.get<std::string>()));
      }
      read(s, "variants", sim.variants);
      if (s.contains("hypotheses")) {
        sim.hypotheses.clear();
        for (const auto& h : s.at("hypotheses")) sim.hypotheses.push_back(parse_hypothesis(h.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json series = json::array();
  for (const auto& t : cfg.model.series_vars) series.push_back(term_to_json(t));
  json alternative = json::array();
  for (const auto& t : cfg.model.alternative_bases) alternative.push_back(term_to_json(t));
  json families = json::array();
  for (const auto f : cfg.simulation.families) families.push_back(std::string(to_string(f)));
  json hypotheses = json::array();
  for (const auto h : cfg.simulation.hypotheses) hypotheses.push_back(std::string(to_string(h)));
  return {{"data", cfg.data},
          {"y", cfg.response},
          {"model",
           {{"linear", cfg.model.linear_vars},
            {"series", series},
            {"recipe", std::string(to_string(cfg.model.recipe))},
            {"alternative", alternative},
            {"custom", cfg.model.custom_columns},
            {"screen_tol", cfg.model.screen_tol}}},
          {"variant", cfg.variant},
          {"alpha", cfg.levels},
          {"bootstrap",
           {{"enabled", cfg.bootstrap.enabled},
            {"B", cfg.bootstrap.replications},
            {"dist", std::string(to_string(cfg.bootstrap.dist))}}},
          {"tuning",
           {{"enabled", cfg.tuning.enabled},
            {"grid", cfg.tuning.grid},
            {"c", cfg.tuning.c},
            {"criterion", std::string(to_string(cfg.tuning.criterion))}}},
          {"simulate",
           {{"n", cfg.simulation.sample_sizes},
            {"reps", cfg.simulation.replications},
            {"a_min", cfg.simulation.a_min},
            {"a_max", cfg.simulation.a_max},
            {"families", families},
            {"variants", cfg.simulation.variants},
            {"hypotheses", hypotheses}}},
          {"rescale", cfg.rescale},
          {"seed", cfg.seed},
          {"threads", cfg.threads},
          {"out", cfg.out}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.data) cfg.data = *o.data;
  if (o.response) cfg.response = *o.response;
  if (o.variant) cfg.variant = *o.variant;
  if (!o.sample_sizes.empty()) cfg.simulation.sample_sizes = o.sample_sizes;
  if (o.replications) cfg.simulation.replications = *o.replications;
  if (o.a_min) cfg.simulation.a_min = *o.a_min;
  if (o.a_max) cfg.simulation.a_max = *o.a_max;
  if (!o.families.empty()) {
    cfg.simulation.families.clear();
    for (const auto& f : o.families) cfg.simulation.families.push_back(parse_basis_family(f));
  }
  if (!o.variants.empty()) cfg.simulation.variants = o.variants;
  if (o.bootstrap) {
    if (*o.bootstrap < 0) throw InputError("--bootstrap must be non-negative");
    cfg.bootstrap.enabled = *o.bootstrap > 0;
    if (*o.bootstrap > 0) cfg.bootstrap.replications = *o.bootstrap;
  }
  if (o.dist) cfg.bootstrap.dist = parse_multiplier_kind(*o.dist);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.levels.empty()) cfg.levels = o.levels;
  if (o.out) cfg.out = *o.out;
  if (o.threads) cfg.threads = *o.threads;
  if (o.criterion) cfg.tuning.criterion = parse_selection_criterion(*o.criterion);
  if (o.c) cfg.tuning.c = *o.c;
  if (!o.grid.empty()) {
    cfg.tuning.grid = o.grid;
    cfg.tuning.enabled = true;
  }
  if (o.rescale) cfg.rescale = true;
  cfg.validate();
}

}  // namespace hclm::cli
