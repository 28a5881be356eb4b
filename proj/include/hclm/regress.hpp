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

// Least-squares projection onto the null design: restricted fit, the
// annihilator M_W = I - W (W'W)^-1 W' and residualized alternative regressors.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hclm {

/// Pivoted-QR factorization of a full-column-rank W, kept so that M_W can be
/// applied repeatedly without forming the n x n projector. Immutable after
/// construction; all methods are safe to call concurrently.
class Projection {
 public:
  /// Relative pivot threshold below which W is declared rank deficient.
  static constexpr double kRankThreshold = 1e-12;

  /// Throws RankDeficientError (naming columns via `labels` when given) if W
  /// loses rank, InputError if W has no more rows than columns.
  explicit Projection(const Eigen::MatrixXd& W, const std::vector<std::string>& labels = {});

  Eigen::Index rows() const { return q_.rows(); }
  Eigen::Index cols() const { return q_.cols(); }

  /// Orthonormal basis of span(W), n x m.
  const Eigen::MatrixXd& basis() const { return q_; }

  /// Least-squares coefficients of y on W.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& y) const;

  /// u <- M_W u. `scratch` must hold cols() doubles.
  void annihilate_in_place(std::span<double> u, std::span<double> scratch) const;

 private:
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::MatrixXd q_;
};

struct FitResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  std::shared_ptr<const Projection> projection;
};

FitResult ols_fit(const Eigen::MatrixXd& W, const Eigen::VectorXd& y, const std::vector<std::string>& labels = {});

/// M_W u.
Eigen::VectorXd annihilate(const Projection& projection, const Eigen::VectorXd& u);

/// M_W Z, column by column.
Eigen::MatrixXd residualize_block(const Projection& projection, const Eigen::MatrixXd& Z);

}  // namespace hclm
