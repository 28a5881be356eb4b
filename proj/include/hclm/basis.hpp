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

// Univariate series bases (power series, truncated-power splines) and
// tensor-product interaction terms. Every basis starts with a constant column.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hclm {

enum class BasisFamily { kPower, kSpline };

enum class KnotRule { kEmpiricalQuantile };

std::string_view to_string(BasisFamily family);
BasisFamily parse_basis_family(std::string_view text);

struct BasisSpec {
  BasisFamily family = BasisFamily::kPower;
  int terms = 1;         // number of columns, constant included
  int spline_order = 3;  // degree s of the truncated powers
  KnotRule knot_rule = KnotRule::kEmpiricalQuantile;

  /// Number of interior knots implied for the spline family.
  int knot_count() const { return family == BasisFamily::kSpline ? terms - spline_order - 1 : 0; }

  /// Throws InputError unless terms >= 1 and, for splines, terms >= order + 1.
  void validate() const;
};

struct BasisMatrix {
  Eigen::MatrixXd values;           // n x terms
  std::vector<std::string> labels;  // one per column; "1" for the constant

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Columns 1, v, v^2, ..., v^(terms-1).
BasisMatrix power_basis(std::span<const double> v, int terms, std::string_view var = "x");

/// Empirical quantiles of `v` at levels k/(count+1), k = 1..count, using order
/// statistics with linear interpolation between adjacent values.
std::vector<double> quantile_knots(std::span<const double> v, int count);

/// Columns 1, v, ..., v^order followed by 1{v > t}(v - t)^order for every knot
/// t. Requires knots.size() == terms - order - 1 and nondecreasing knots.
BasisMatrix spline_basis(std::span<const double> v, int terms, int order,
                         std::span<const double> knots, std::string_view var = "x");

/// Builds the basis described by `spec`; spline knots come from quantile_knots.
BasisMatrix make_basis(std::span<const double> v, const BasisSpec& spec, std::string_view var = "x");

/// Number of univariate terms entering interactions when the univariate
/// expansions have `terms` terms: a if a <= 5, 5 if 5 < a <= 7, floor(a^0.9)
/// otherwise.
int restricted_interaction_order(int terms);

/// All elementwise products of the non-constant columns of `lhs` and `rhs`,
/// ordered with the rhs index varying fastest. Both inputs must carry the
/// constant as column 0.
BasisMatrix tensor_interactions(const BasisMatrix& lhs, const BasisMatrix& rhs);

}  // namespace hclm
