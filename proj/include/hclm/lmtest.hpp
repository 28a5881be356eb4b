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

// Heteroskedasticity-robust LM statistic xi_HC, its comparators, and the
// normal / chi-square decision rules.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hclm {

enum class Statistic {
  kKorolevHc,       // e'Zt (Zt' S Zt)^-1 Zt'e, S = diag(e^2)
  kKorolevAltLong,  // OLS residuals with the "long" (full-moment) variance block
  kGuptaFglsLong,   // FGLS residuals, long variance block
  kGuptaFglsShort,  // FGLS residuals, short variance (residualized Z only)
};

struct Variant {
  Statistic statistic = Statistic::kKorolevHc;
  bool infeasible = false;  // use the true error variances instead of e^2

  friend bool operator==(const Variant&, const Variant&) = default;
};

/// "korolev_hc", "korolev_alt_long", "gupta_fgls_long", "gupta_fgls_short",
/// with an "infeasible_" prefix for the true-variance mirrors.
std::string to_string(Variant variant);
Variant parse_variant(std::string_view text);

/// Per-observation variances entering the statistic. Entries are floored at
/// kFloorFraction * mean(entries) so inverse weights stay finite.
struct VarianceWeights {
  static constexpr double kFloorFraction = 1e-12;

  Eigen::VectorXd sigma2;
  double floor = 0.0;
  bool floor_applied = false;

  /// Feasible weights e_i^2.
  static VarianceWeights from_residuals(const Eigen::VectorXd& residuals);
  /// Infeasible weights from known variances; throws InputError on
  /// non-positive or non-finite entries.
  static VarianceWeights known(const Eigen::VectorXd& sigma2);
};

/// Evaluates b' A^-1 b for symmetric positive definite A after unit-diagonal
/// rescaling. Throws NumericalError when A is singular at working tolerance.
double spd_quadratic_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Reusable evaluator of xi_HC for a fixed residualized alternative block Zt.
/// Holds workspace, so one instance per thread.
class HcStatistic {
 public:
  explicit HcStatistic(const Eigen::MatrixXd& zt);

  /// xi with weights e_i^2 (the feasible statistic).
  double operator()(std::span<const double> residuals);
  /// xi with explicit per-observation weights.
  double with_weights(std::span<const double> residuals, std::span<const double> weights);

  int restrictions() const { return static_cast<int>(zt_.cols()); }

 private:
  const Eigen::MatrixXd& zt_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd score_;
  Eigen::VectorXd squares_;
  Eigen::VectorXd scratch_;
};

/// Restricted FGLS residuals Y - W b, b = (W' S^-1 W)^-1 W' S^-1 Y with
/// S = diag(weights), computed from the OLS residuals (Y - W b equals the
/// S^-1-weighted annihilator applied to them). W' S^-1 e_fgls = 0.
Eigen::VectorXd fgls_residuals(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& W,
                               const VarianceWeights& weights);

/// e' Zt (Zt' diag(w) Zt)^-1 Zt' e.
double xi_hc(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& zt, const VarianceWeights& weights);

/// n R^2 from the uncentered regression of 1 on the rows of diag(e) Zt.
double xi_via_nR2(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& zt);

/// The statistic named by `variant`'s Statistic using `weights` as Sigma.
/// `residuals` are the OLS residuals; the Gupta statistics replace them with
/// fgls_residuals before forming the quadratic form. `zt` must equal M_W Z.
double xi_variant(Statistic statistic, const Eigen::VectorXd& residuals, const Eigen::MatrixXd& W,
                  const Eigen::MatrixXd& Z, const Eigen::MatrixXd& zt, const VarianceWeights& weights);
/// Same, residualizing Z internally.
double xi_variant(Statistic statistic, const Eigen::VectorXd& residuals, const Eigen::MatrixXd& W,
                  const Eigen::MatrixXd& Z, const VarianceWeights& weights);

/// (xi - r) / sqrt(2 r).
double normalize(double xi, int restrictions);
/// (xi - k) / sqrt(2 k); the comparator without the degrees-of-freedom
/// correction.
double normalize_kn(double xi, int total_terms);

enum class DecisionRule { kNormal, kChiSquare };

struct LevelDecision {
  double alpha = 0.05;
  double normal_critical = 0.0;  // z_{1-alpha}
  double chisq_critical = 0.0;   // chi2_{1-alpha}(chisq_df)
  bool reject_normal = false;    // t > z_{1-alpha}
  bool reject_chisq = false;     // xi > chi2_{1-alpha}
};

struct TestResult {
  std::string variant;
  double xi = 0.0;
  int r = 0;  // restrictions
  int m = 0;  // null terms
  int k = 0;  // m + r
  double t = 0.0;
  double p_normal = 1.0;
  double p_chisq = 1.0;
  int chisq_df = 0;
  DecisionRule headline = DecisionRule::kNormal;
  bool floor_applied = false;
  std::vector<LevelDecision> decisions;

  /// Decision at `alpha` under the headline rule; throws if alpha was not
  /// requested.
  bool rejects(double alpha) const;
};

void validate_levels(std::span<const double> levels);

/// Fills t, p-values and per-level decisions for a computed statistic.
TestResult summarize(std::string variant, double xi, int r, int m, std::span<const double> levels,
                     int chisq_df = 0);

/// Fits the null model, residualizes Z and computes the requested statistic.
/// Infeasible variants need the true variances.
TestResult run_test(const Eigen::VectorXd& y, const Eigen::MatrixXd& W, const Eigen::MatrixXd& Z, Variant variant,
                    std::span<const double> levels, const std::optional<Eigen::VectorXd>& true_sigma2 = std::nullopt);

}  // namespace hclm
