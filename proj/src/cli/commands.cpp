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


#include "hclm/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "hclm/bootstrap.hpp"
#include "hclm/cli/dataset.hpp"
#include "hclm/error.hpp"
#include "hclm/lmtest.hpp"
#include "hclm/mc.hpp"
#include "hclm/parallel.hpp"
#include "hclm/regress.hpp"
#include "hclm/tuning.hpp"

namespace hclm::cli {
namespace {

using nlohmann::json;

json result_to_json(const TestResult& r) {
  json decisions = json::array();
  for (const auto& d : r.decisions) {
    decisions.push_back({{"alpha", d.alpha},
                         {"normal_critical", d.normal_critical},
                         {"chisq_critical", d.chisq_critical},
                         {"reject_normal", d.reject_normal},
                         {"reject_chisq", d.reject_chisq},
                         {"reject", r.rejects(d.alpha)}});
  }
  return {{"variant", r.variant},
          {"xi", r.xi},
          {"m", r.m},
          {"r", r.r},
          {"k", r.k},
          {"t", r.t},
          {"p_normal", r.p_normal},
          {"p_chisq", r.p_chisq},
          {"chisq_df", r.chisq_df},
          {"headline", r.headline == DecisionRule::kNormal ? "normal" : "chisq"},
          {"floor_applied", r.floor_applied},
          {"decisions", decisions}};
}

void print_result(const TestResult& r, std::ostream& out) {
  out << "  m_n = " << r.m << "   r_n = " << r.r << "   k_n = " << r.k << "\n"
      << "  xi        " << screen(r.xi) << "\n"
      << "  t         " << screen(r.t) << "\n"
      << "  p normal  " << screen(r.p_normal) << "\n"
      << "  p chisq   " << screen(r.p_chisq) << "  (df " << r.chisq_df << ")\n";
  if (r.floor_applied) out << "  note: variance weights floored\n";
  const bool normal = r.headline == DecisionRule::kNormal;
  out << "  " << std::left << std::setw(8) << "alpha" << std::setw(12) << (normal ? "z crit" : "chi2 crit")
      << "decision\n";
  for (const auto& d : r.decisions) {
    out << "  " << std::setw(8) << screen(d.alpha) << std::setw(12)
        << screen(normal ? d.normal_critical : d.chisq_critical)
        << (r.rejects(d.alpha) ? "reject" : "do not reject") << "\n";
  }
  out << std::right;
}

void print_labels(std::string_view title, const std::vector<std::string>& labels, std::ostream& out) {
  if (labels.empty()) return;
  out << "  " << title << ":";
  for (const auto& l : labels) out << " " << l;
  out << "\n";
}

const Eigen::VectorXd& response(const Dataset& data, const RunConfig& cfg) { return data.at(cfg.response); }

void finish(const json& doc, const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) return;
  write_json(doc, cfg.out);
  out << "  result written to " << cfg.out << "\n";
}

}  // namespace

std::string screen(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << doc.dump(2) << "\n";
  if (!f) throw InputError("failed writing '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.data.empty()) throw InputError("no dataset given (use --data or the config key \"data\")");
  Dataset data = load_csv(cfg.data);
  if (cfg.rescale) {
    std::vector<std::string> names;
    for (const auto& t : cfg.model.series_vars) names.push_back(t.var);
    for (const auto& t : cfg.model.alternative_bases) names.push_back(t.var);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    rescale_columns(data, names);
  }
  return data;
}

json cmd_test(const Dataset& data, const RunConfig& cfg, std::ostream& out) {
  if (cfg.tuning.enabled) return cmd_tune(data, cfg, out);
  cfg.validate();
  cfg.model.validate();
  const Variant variant = parse_variant(cfg.variant);
  const Eigen::VectorXd& y = response(data, cfg);
  const DesignPair design = build_partially_linear(data, cfg.model);

  std::optional<Eigen::VectorXd> sigma2;
  if (variant.infeasible) {
    if (!data.has("sigma2")) throw InputError("infeasible variants need the true variances in a column 'sigma2'");
    sigma2 = data.at("sigma2");
  }
  const TestResult result = run_test(y, design.W, design.Z, variant, cfg.levels, sigma2);

  out << "test " << result.variant << " on " << (data.source.empty() ? "<data>" : data.source) << " (n = "
      << data.rows() << ", y = " << cfg.response << ")\n";
  print_result(result, out);
  print_labels("dropped as redundant", design.dropped, out);

  json doc = {{"command", "test"},
              {"n", data.rows()},
              {"result", result_to_json(result)},
              {"w_labels", design.w_labels},
              {"z_labels", design.z_labels},
              {"dropped", design.dropped}};

  if (cfg.bootstrap.enabled) {
    const FitResult fit = ols_fit(design.W, y, design.w_labels);
    const Eigen::MatrixXd zt = residualize_block(*fit.projection, design.Z);
    BootstrapOptions opts;
    opts.replications = cfg.bootstrap.replications;
    opts.dist = cfg.bootstrap.dist;
    opts.seed = cfg.seed;
    opts.threads = resolve_threads(cfg.threads);
    opts.levels = cfg.levels;
    const BootstrapResult boot = wild_bootstrap(fit, zt, result.t, opts);
    out << "  wild bootstrap: B = " << boot.B << " (" << to_string(cfg.bootstrap.dist) << ", seed " << boot.seed
        << ", skipped " << boot.skipped << ")\n"
        << "  p boot    " << screen(boot.p_value) << "\n";
    json crit = json::array();
    for (const auto& [alpha, c] : boot.critical_values) {
      out << "  " << std::left << std::setw(8) << screen(alpha) << std::setw(12) << screen(c)
          << (boot.rejects(alpha) ? "reject" : "do not reject") << std::right << "\n";
      crit.push_back({{"alpha", alpha}, {"critical", c}, {"reject", boot.rejects(alpha)}});
    }
    doc["bootstrap"] = {{"B", boot.B},
                        {"dist", std::string(to_string(cfg.bootstrap.dist))},
                        {"seed", boot.seed},
                        {"skipped", boot.skipped},
                        {"p_value", boot.p_value},
                        {"critical_values", crit}};
  }
  doc["config"] = config_to_json(cfg);
  finish(doc, cfg, out);
  return doc;
}

json cmd_tune(const Dataset& data, const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  cfg.model.validate();
  std::vector<int> grid = cfg.tuning.grid;
  if (grid.empty()) throw InputError("tuning needs a candidate grid (use --grid or tuning.grid)");
  const Eigen::VectorXd& y = response(data, cfg);

  std::vector<DesignPair> candidates;
  for (const int terms : grid) {
    ModelSpec spec = cfg.model;
    for (auto& t : spec.series_vars) t.basis.terms = terms;
    for (auto& t : spec.alternative_bases) t.basis.terms = terms;
    candidates.push_back(build_partially_linear(data, spec));
  }
  const DataDrivenResult dd =
      data_driven_test(y, candidates, cfg.tuning.criterion, cfg.levels, cfg.tuning.c, cfg.model.screen_tol);

  out << "tune " << dd.test.variant << " on " << (data.source.empty() ? "<data>" : data.source) << " (n = "
      << data.rows() << ", y = " << cfg.response << ", c = " << screen(cfg.tuning.c) << ")\n"
      << "  " << std::left << std::setw(8) << "terms" << std::setw(6) << "m_n" << std::setw(6) << "r_n"
      << "score\n";
  json table = json::array();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    out << "  " << std::setw(8) << grid[j] << std::setw(6) << candidates[j].m() << std::setw(6) << candidates[j].r()
        << screen(dd.null_scores[j]) << (j == dd.null_index ? "  <- null" : "") << "\n";
    table.push_back({{"terms", grid[j]},
                     {"m", candidates[j].m()},
                     {"r", candidates[j].r()},
                     {"score", dd.null_scores[j]}});
  }
  out << std::right << "  r grid:";
  json by_r = json::array();
  for (const auto& [r, xi] : dd.xi_by_r) {
    out << " " << r << ":" << screen(xi);
    by_r.push_back({{"r", r}, {"xi", xi}});
  }
  out << "\n  selected null terms = " << grid[dd.null_index] << ", r_hat = " << dd.r_hat
      << ", r_min = " << dd.r_min << "\n";
  print_result(dd.test, out);

  json doc = {{"command", "tune"},
              {"n", data.rows()},
              {"criterion", std::string(to_string(cfg.tuning.criterion))},
              {"candidates", table},
              {"null_terms", grid[dd.null_index]},
              {"null_index", dd.null_index},
              {"r_hat", dd.r_hat},
              {"r_min", dd.r_min},
              {"xi_by_r", by_r},
              {"result", result_to_json(dd.test)},
              {"config", config_to_json(cfg)}};
  finish(doc, cfg, out);
  return doc;
}

json cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  McConfig mc;
  mc.replications = cfg.simulation.replications;
  mc.sample_sizes = cfg.simulation.sample_sizes;
  mc.a_min = cfg.simulation.a_min;
  mc.a_max = cfg.simulation.a_max;
  mc.families = cfg.simulation.families;
  mc.variants = cfg.simulation.variants;
  mc.hypotheses = cfg.simulation.hypotheses;
  mc.levels = cfg.levels;
  mc.bootstrap_replications = cfg.bootstrap.replications;
  mc.dist = cfg.bootstrap.dist;
  mc.penalty_c = cfg.tuning.c;
  mc.seed = cfg.seed;
  mc.threads = cfg.threads;
  const McReport report = run_mc(mc);

  out << "simulate: M = " << mc.replications << ", seed = " << mc.seed << "\n"
      << "  " << std::left << std::setw(24) << "variant" << std::setw(8) << "family" << std::setw(7) << "n"
      << std::setw(5) << "a_n" << std::setw(13) << "hypothesis" << std::setw(8) << "alpha" << std::setw(11)
      << "rate" << "se\n";
  json cells = json::array();
  for (const auto& cell : report.cells) {
    for (std::size_t l = 0; l < mc.levels.size(); ++l) {
      out << "  " << std::setw(24) << cell.variant << std::setw(8) << to_string(cell.family) << std::setw(7)
          << cell.n << std::setw(5) << cell.a_n << std::setw(13) << to_string(cell.hypothesis) << std::setw(8)
          << screen(mc.levels[l]) << std::setw(11) << (cell.aborted ? "aborted" : screen(cell.rate(l)))
          << screen(cell.standard_error(l)) << "\n";
    }
    cells.push_back({{"variant", cell.variant},
                     {"family", std::string(to_string(cell.family))},
                     {"n", cell.n},
                     {"a_n", cell.a_n},
                     {"hypothesis", std::string(to_string(cell.hypothesis))},
                     {"rejections", cell.rejections},
                     {"completed", cell.completed},
                     {"failed", cell.failed},
                     {"aborted", cell.aborted},
                     {"mean_xi", cell.mean_xi}});
  }
  out << std::right;
  json doc = {{"command", "simulate"}, {"cells", cells}, {"config", config_to_json(cfg)}};
  if (!cfg.out.empty()) {
    emit_report(report, cfg.out);
    out << "  wrote " << cfg.out << ".csv and " << cfg.out << ".dat\n";
  }
  return doc;
}

}  // namespace hclm::cli
