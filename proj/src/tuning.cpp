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

#include "hclm/tuning.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hclm/error.hpp"
#include "hclm/regress.hpp"

namespace hclm {
namespace {

std::size_t argmin_parsimonious(const std::vector<double>& scores, const std::vector<Eigen::MatrixXd>& designs) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    const double tol = 1e-12 * std::max(std::fabs(scores[j]), std::fabs(scores[best]));
    if (scores[j] < scores[best] - tol) {
      best = j;
    } else if (std::fabs(scores[j] - scores[best]) <= tol && designs[j].cols() < designs[best].cols()) {
      best = j;
    }
  }
  return best;
}

void check_candidates(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs) {
  if (designs.empty()) throw InputError("model selection needs at least one candidate");
  for (const auto& d : designs) {
    if (d.rows() != y.size()) throw InputError("candidate design has the wrong number of rows");
    if (d.rows() <= d.cols()) throw InputError("candidate design has no fewer columns than observations");
  }
}

}  // namespace

std::string_view to_string(SelectionCriterion criterion) {
  return criterion == SelectionCriterion::kMallowsCp ? "cp" : "gcv";
}

SelectionCriterion parse_selection_criterion(std::string_view text) {
  if (text == "cp" || text == "mallows_cp") return SelectionCriterion::kMallowsCp;
  if (text == "gcv") return SelectionCriterion::kGcv;
  throw InputError("unknown selection criterion '" + std::string(text) + "' (expected cp or gcv)");
}

std::vector<double> residual_sums_of_squares(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs) {
  check_candidates(y, designs);
  std::vector<double> rss;
  rss.reserve(designs.size());
  for (const auto& d : designs) {
    const Projection proj(d);
    rss.push_back(annihilate(proj, y).squaredNorm());
  }
  return rss;
}

std::vector<double> mallows_cp_scores(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs) {
  const auto rss = residual_sums_of_squares(y, designs);
  const double n = static_cast<double>(y.size());
  std::size_t largest = 0;
  for (std::size_t j = 1; j < designs.size(); ++j) {
    if (designs[j].cols() > designs[largest].cols()) largest = j;
  }
  const double sigma2 = rss[largest] / (n - static_cast<double>(designs[largest].cols()));
  std::vector<double> scores(designs.size());
  for (std::size_t j = 0; j < designs.size(); ++j) {
    scores[j] = rss[j] / n + 2.0 * sigma2 * static_cast<double>(designs[j].cols()) / n;
  }
  return scores;
}

std::vector<double> gcv_scores(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs) {
  const auto rss = residual_sums_of_squares(y, designs);
  const double n = static_cast<double>(y.size());
  std::vector<double> scores(designs.size());
  for (std::size_t j = 0; j < designs.size(); ++j) {
    const double dof = n - static_cast<double>(designs[j].cols());
    scores[j] = n * rss[j] / (dof * dof);
  }
  return scores;
}

std::size_t mallows_cp(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs) {
  return argmin_parsimonious(mallows_cp_scores(y, designs), designs);
}

std::size_t gcv(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs) {
  return argmin_parsimonious(gcv_scores(y, designs), designs);
}

std::size_t select_null_model(SelectionCriterion criterion, const Eigen::VectorXd& y,
                              const std::vector<Eigen::MatrixXd>& designs) {
  return criterion == SelectionCriterion::kMallowsCp ? mallows_cp(y, designs) : gcv(y, designs);
}

double restriction_penalty_gamma(std::size_t cardinality, double c) {
  if (cardinality < 1) throw InputError("restriction grid is empty");
  return c * std::sqrt(2.0 * std::log(static_cast<double>(cardinality)));
}

int select_r(const std::map<int, double>& xi_by_r, double c) {
  if (xi_by_r.empty()) throw InputError("select_r: empty restriction grid");
  if (c < 1.0) throw InputError("select_r: penalty constant must be at least 1");
  const double gamma = restriction_penalty_gamma(xi_by_r.size(), c);
  const int r_min = xi_by_r.begin()->first;
  int best = r_min;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& [r, xi] : xi_by_r) {
    const double value = xi - r - gamma * std::sqrt(2.0 * (r - r_min));
    // Keys are visited in increasing r, so a strict comparison keeps the
    // smallest r among ties.
    if (value > best_value) {
      best_value = value;
      best = r;
    }
  }
  return best;
}

DataDrivenResult data_driven_test(const Eigen::VectorXd& y, const std::vector<DesignPair>& candidates,
                                  SelectionCriterion criterion, std::span<const double> levels, double c,
                                  double screen_tol) {
  validate_levels(levels);
  if (candidates.empty()) throw InputError("data-driven test needs at least one candidate design");
  std::vector<Eigen::MatrixXd> nulls;
  nulls.reserve(candidates.size());
  for (const auto& d : candidates) nulls.push_back(d.W);

  DataDrivenResult res;
  res.null_scores = criterion == SelectionCriterion::kMallowsCp ? mallows_cp_scores(y, nulls) : gcv_scores(y, nulls);
  res.null_index = select_null_model(criterion, y, nulls);
  const DesignPair& chosen = candidates[res.null_index];
  const FitResult fit = ols_fit(chosen.W, y, chosen.w_labels);
  const VarianceWeights weights = VarianceWeights::from_residuals(fit.residuals);

  for (const auto& cand : candidates) {
    DesignPair alt;
    alt.W = chosen.W;
    alt.w_labels = chosen.w_labels;
    alt.Z.resize(y.size(), cand.W.cols() + cand.Z.cols());
    alt.Z << cand.W, cand.Z;
    alt.z_labels = cand.w_labels;
    alt.z_labels.insert(alt.z_labels.end(), cand.z_labels.begin(), cand.z_labels.end());
    const DesignPair screened = screen_collinear(alt, screen_tol);
    const int r = screened.r();
    if (r < 1 || res.xi_by_r.count(r) != 0) continue;
    if (y.size() <= screened.k()) continue;
    const Eigen::MatrixXd zt = residualize_block(*fit.projection, screened.Z);
    res.xi_by_r.emplace(r, xi_hc(fit.residuals, zt, weights));
  }
  if (res.xi_by_r.empty()) throw InputError("no candidate alternative adds columns to the selected null model");

  res.r_hat = select_r(res.xi_by_r, c);
  res.r_min = res.xi_by_r.begin()->first;
  res.test = summarize("data_driven_" + std::string(to_string(criterion)), res.xi_by_r.at(res.r_hat), res.r_hat,
                       chosen.m(), levels, res.r_min);
  res.test.headline = DecisionRule::kChiSquare;
  res.test.floor_applied = weights.floor_applied;
  return res;
}

}  // namespace hclm
