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

// Wild bootstrap for t_HC. Bootstrap residuals are M_W (V* .* e): the null
// model is never refit, the stored projection is reused for every draw.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hclm/regress.hpp"
#include "hclm/rng.hpp"

namespace hclm {

enum class MultiplierKind { kRademacher, kMammen };

std::string_view to_string(MultiplierKind kind);
MultiplierKind parse_multiplier_kind(std::string_view text);

namespace mammen {
inline const double kLow = (1.0 - 2.2360679774997896964) / 2.0;   // (1 - sqrt 5) / 2
inline const double kHigh = (1.0 + 2.2360679774997896964) / 2.0;  // (1 + sqrt 5) / 2
/// Probability of kHigh: (sqrt 5 - 1) / (2 sqrt 5).
inline const double kHighProbability = (2.2360679774997896964 - 1.0) / (2.0 * 2.2360679774997896964);
}  // namespace mammen

/// Fills `out` with i.i.d. mean-zero, unit-variance two-point draws.
void draw_multipliers(MultiplierKind kind, std::span<double> out, CounterRng& rng);

struct BootstrapOptions {
  int replications = 399;
  MultiplierKind dist = MultiplierKind::kRademacher;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<double> levels{0.05};
  /// Draws whose inner matrix is singular are skipped up to this fraction of
  /// B; beyond it the bootstrap aborts with NumericalError.
  double max_skip_fraction = 0.01;
};

struct BootstrapResult {
  std::vector<double> t_star;  // length B, NaN for skipped draws
  double p_value = 1.0;        // (#{t* >= t} + 1) / (B_used + 1)
  std::vector<std::pair<double, double>> critical_values;  // (alpha, (1 - alpha) quantile of t*)
  int B = 0;
  int skipped = 0;
  std::uint64_t seed = 0;

  bool rejects(double alpha) const { return p_value <= alpha; }
};

/// Writes the multipliers for draw `b` into `out`. May be called concurrently
/// from several threads.
using MultiplierSource = std::function<void(std::uint64_t b, std::span<double> out)>;

/// Draw b uses the substream CounterRng(derive({seed, b})), so the result does
/// not depend on the number of threads.
BootstrapResult wild_bootstrap(const FitResult& fit, const Eigen::MatrixXd& zt, double t_observed,
                               const BootstrapOptions& options);

/// Same procedure with caller-supplied multipliers.
BootstrapResult wild_bootstrap(const FitResult& fit, const Eigen::MatrixXd& zt, double t_observed,
                               const BootstrapOptions& options, const MultiplierSource& multipliers);

/// Bootstrap p-value with +1 smoothing. Draws within 1e-9 (relative) of
/// t_observed count as exceedances. NaN entries are ignored.
double bootstrap_p_value(std::span<const double> t_star, double t_observed);

/// Order statistic ceil((B + 1)(1 - alpha)) of the valid draws, clamped to
/// [1, B].
double bootstrap_critical_value(std::span<const double> t_star, double alpha);

}  // namespace hclm
