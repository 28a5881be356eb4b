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

// Null design W (regressors of the semiparametric model) and alternative-only
// design Z (series terms that may enter only when the null is false).

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "hclm/basis.hpp"
#include "hclm/data.hpp"

namespace hclm {

enum class AlternativeRecipe { kFullTensor, kRestrictedTensor, kAdditiveOnly, kCustom };

std::string_view to_string(AlternativeRecipe recipe);
AlternativeRecipe parse_alternative_recipe(std::string_view text);

struct SeriesTerm {
  std::string var;
  BasisSpec basis;
};

/// Partially linear null model plus the recipe for the alternative.
///
/// Null: W = [1, linear_vars..., non-constant columns of each series_vars basis].
/// Alternative: P = [1, non-constant columns of each alternative_bases basis]
/// plus pairwise tensor interactions (full_tensor uses the bases as given,
/// restricted_tensor shrinks each to restricted_interaction_order(terms)
/// terms), or the explicit `custom_columns` list. Z is P minus anything W
/// already spans.
struct ModelSpec {
  std::vector<std::string> linear_vars;
  std::vector<SeriesTerm> series_vars;
  AlternativeRecipe recipe = AlternativeRecipe::kRestrictedTensor;
  std::vector<SeriesTerm> alternative_bases;
  // Monomial products such as "x1^2*x2"; used by the custom recipe.
  std::vector<std::string> custom_columns;
  double screen_tol = 1e-10;

  void validate() const;
};

struct DesignPair {
  Eigen::MatrixXd W;  // n x m_n
  Eigen::MatrixXd Z;  // n x r_n
  std::vector<std::string> w_labels;
  std::vector<std::string> z_labels;
  std::vector<std::string> dropped;  // alternative columns removed as redundant

  Eigen::Index n() const { return W.rows(); }
  int m() const { return static_cast<int>(W.cols()); }
  int r() const { return static_cast<int>(Z.cols()); }
  int k() const { return m() + r(); }
};

struct ScreenReport {
  std::vector<std::string> dropped;
};

/// Greedily drops Z columns whose squared residual after projecting on W and
/// the Z columns kept so far is below tol times the column's squared norm.
/// W columns are never dropped: a W column failing the same test raises
/// RankDeficientError.
DesignPair screen_collinear(const DesignPair& design, double tol, ScreenReport* report = nullptr);

/// Builds W and Z for a partially linear model from named data columns.
DesignPair build_partially_linear(const Dataset& data, const ModelSpec& spec);

/// The simulation recipe: W = [1, x1, Q(x2) without constant] and Z = powers
/// 2..a-1 of x1 plus the restricted tensor interactions, giving
/// k = 2a - 1 + (abar - 1)^2.
ModelSpec simulation_model_spec(int terms, BasisFamily family);
DesignPair simulation_design(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, int terms,
                             BasisFamily family);

/// Evaluates a monomial expression like "x1^2*x2" over the dataset.
Eigen::VectorXd evaluate_monomial(const Dataset& data, std::string_view expression);

}  // namespace hclm
