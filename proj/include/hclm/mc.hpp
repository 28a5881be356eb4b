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

// Monte Carlo harness for the partially linear simulation design: DGPs,
// replication driver, rejection-rate tables and plot data.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hclm/basis.hpp"
#include "hclm/bootstrap.hpp"
#include "hclm/rng.hpp"
#include "hclm/tuning.hpp"

namespace hclm {

enum class Hypothesis { kNull, kAlternative };

std::string_view to_string(Hypothesis h);
Hypothesis parse_hypothesis(std::string_view text);

namespace dgp {
/// X1 = -2 + 4 (0.8 V1 + 0.2 V2), X2 = -2 + 4 (0.2 V1 + 0.8 V2).
double x1_from(double v1, double v2);
double x2_from(double v1, double v2);
/// 3 + 2 x1 + 2 (exp(x2) - 2 ln(x2 + 3)).
double null_mean(double x1, double x2);
/// 1.21 cos(x1 - 2) sin(0.75 x2), added under the alternative.
double deviation(double x1, double x2);
/// 1 + 1.75 exp(0.75 (x1 + x2)).
double error_variance(double x1, double x2);
}  // namespace dgp

struct DgpSpec {
  int n = 1000;
  Hypothesis hypothesis = Hypothesis::kNull;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Sample {
  Eigen::VectorXd y;
  Eigen::VectorXd x1;
  Eigen::VectorXd x2;
  Eigen::VectorXd sigma2;  // true error variances
};

/// Each observation consumes V1, V2 (uniform) and one standard normal from
/// `rng`, in that order.
Sample gen_sample(int n, Hypothesis hypothesis, CounterRng& rng);
/// Uses the stream CounterRng(spec.seed).
Sample gen_sample(const DgpSpec& spec);

/// Monte Carlo test variants:
///   korolev_hc           t_HC with r_n centering, normal critical value
///   korolev_hc_kn        same xi centred and scaled by k_n
///   korolev_hc_chisq     xi against chi2(r_n)
///   korolev_hc_boot      wild bootstrap p-value of t_HC
///   korolev_alt_long, gupta_fgls_long, gupta_fgls_short
///   infeasible_<statistic> for the four statistics, true variances
///   data_driven_cp, data_driven_gcv   tuned over the whole a_n grid
const std::vector<std::string>& known_mc_variants();
bool is_data_driven(std::string_view variant);

struct McConfig {
  int replications = 1000;
  std::vector<int> sample_sizes{1000};
  int a_min = 4;
  int a_max = 9;
  std::vector<BasisFamily> families{BasisFamily::kPower};
  std::vector<std::string> variants{"korolev_hc"};
  std::vector<Hypothesis> hypotheses{Hypothesis::kNull, Hypothesis::kAlternative};
  std::vector<double> levels{0.05};
  int bootstrap_replications = 399;
  MultiplierKind dist = MultiplierKind::kRademacher;
  double penalty_c = 3.0;
  std::uint64_t seed = 20191107;
  int threads = 0;

  void validate() const;
};

struct McCell {
  std::string variant;
  BasisFamily family = BasisFamily::kPower;
  int n = 0;
  int a_n = 0;  // a_max of the grid for data-driven variants
  Hypothesis hypothesis = Hypothesis::kNull;
  std::vector<int> rejections;  // per level
  int completed = 0;
  int failed = 0;
  bool aborted = false;
  double mean_xi = 0.0;
  int r_n = 0;  // restrictions of the last completed replication (0 if data driven)
  int k_n = 0;

  double rate(std::size_t level) const;
  /// sqrt(p (1 - p) / M) with M = completed replications.
  double standard_error(std::size_t level) const;
};

struct McReport {
  McConfig config;
  std::vector<McCell> cells;

  /// Throws InputError when the cell is not part of the report.
  const McCell& find(std::string_view variant, BasisFamily family, int n, int a_n, Hypothesis hypothesis) const;
};

/// Replication b of the (n, hypothesis) group draws its data from the stream
/// derive({seed, n, hypothesis, b}); every family, a_n and variant reuses that
/// draw. Bootstrap draws use derive({seed, n, hypothesis, b, family, a_n}).
/// A cell whose numerical failures exceed 1% of M is marked aborted.
McReport run_mc(const McConfig& config);

/// Tidy CSV: variant,family,n,a_n,hypothesis,alpha,reject_rate,mc_se,M,seed
void write_report_csv(const McReport& report, std::ostream& out);
/// gnuplot data: one indexed block per (variant, family, n, hypothesis,
/// alpha) with columns "a_n reject_rate mc_se".
void write_plot_data(const McReport& report, std::ostream& out);
/// Writes <stem>.csv and <stem>.dat.
void emit_report(const McReport& report, const std::filesystem::path& stem);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace hclm
