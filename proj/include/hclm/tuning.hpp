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

// Data-driven tuning: the number of null terms by Mallows's Cp or generalized
// cross-validation, the number of restrictions by a penalized maximization of
// xi_HC over candidate alternatives.

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "hclm/design.hpp"
#include "hclm/lmtest.hpp"

namespace hclm {

enum class SelectionCriterion { kMallowsCp, kGcv };

std::string_view to_string(SelectionCriterion criterion);
SelectionCriterion parse_selection_criterion(std::string_view text);

/// Residual sums of squares of y on each candidate design.
std::vector<double> residual_sums_of_squares(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs);

/// Cp score RSS(m)/n + 2 sigma2 m / n, sigma2 = RSS(m_max) / (n - m_max) taken
/// from the candidate with the most columns.
std::vector<double> mallows_cp_scores(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs);
/// GCV score n RSS(m) / (n - m)^2.
std::vector<double> gcv_scores(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs);

/// Index of the minimizing candidate; ties (relative 1e-12) go to the
/// candidate with fewer columns, then to the earlier one.
std::size_t mallows_cp(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs);
std::size_t gcv(const Eigen::VectorXd& y, const std::vector<Eigen::MatrixXd>& designs);
std::size_t select_null_model(SelectionCriterion criterion, const Eigen::VectorXd& y,
                              const std::vector<Eigen::MatrixXd>& designs);

/// Penalty multiplier c sqrt(2 ln card).
double restriction_penalty_gamma(std::size_t cardinality, double c);

/// argmax over r of xi(r) - r - gamma sqrt(2 (r - r_min)), gamma =
/// c sqrt(2 ln #grid), r_min = smallest key. Ties go to the smaller r.
int select_r(const std::map<int, double>& xi_by_r, double c = 3.0);

struct DataDrivenResult {
  TestResult test;  // xi = xi(r_hat), r = r_hat, chi-square rule with r_min df
  std::size_t null_index = 0;
  int r_hat = 0;
  int r_min = 0;
  std::map<int, double> xi_by_r;
  std::vector<double> null_scores;
};

/// Candidate j supplies the null design candidates[j].W and the alternative
/// span [candidates[j].W, candidates[j].Z]. The null model is chosen by
/// `criterion`; each alternative is then screened against the chosen W
/// (columns it already spans are dropped) and xi_HC is evaluated on the
/// survivors. When two alternatives give the same r the earlier one is kept.
DataDrivenResult data_driven_test(const Eigen::VectorXd& y, const std::vector<DesignPair>& candidates,
                                  SelectionCriterion criterion, std::span<const double> levels, double c = 3.0,
                                  double screen_tol = 1e-10);

}  // namespace hclm
