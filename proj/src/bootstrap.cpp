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

#include "hclm/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "hclm/error.hpp"
#include "hclm/kernels.hpp"
#include "hclm/lmtest.hpp"
#include "hclm/parallel.hpp"

namespace hclm {

std::string_view to_string(MultiplierKind kind) {
  return kind == MultiplierKind::kRademacher ? "rademacher" : "mammen";
}

MultiplierKind parse_multiplier_kind(std::string_view text) {
  if (text == "rademacher") return MultiplierKind::kRademacher;
  if (text == "mammen") return MultiplierKind::kMammen;
  throw InputError("unknown multiplier distribution '" + std::string(text) + "' (expected rademacher or mammen)");
}

void draw_multipliers(MultiplierKind kind, std::span<double> out, CounterRng& rng) {
  if (kind == MultiplierKind::kRademacher) {
    for (auto& v : out) v = (rng.next() >> 63) != 0 ? 1.0 : -1.0;
  } else {
    for (auto& v : out) v = rng.uniform() < mammen::kHighProbability ? mammen::kHigh : mammen::kLow;
  }
}

double bootstrap_p_value(std::span<const double> t_star, double t_observed) {
  const double cut = t_observed - 1e-9 * std::max(1.0, std::fabs(t_observed));
  std::size_t valid = 0;
  std::size_t exceed = 0;
  for (const double t : t_star) {
    if (std::isnan(t)) continue;
    ++valid;
    if (t >= cut) ++exceed;
  }
  return static_cast<double>(exceed + 1) / static_cast<double>(valid + 1);
}

double bootstrap_critical_value(std::span<const double> t_star, double alpha) {
  std::vector<double> sorted;
  sorted.reserve(t_star.size());
  for (const double t : t_star) {
    if (!std::isnan(t)) sorted.push_back(t);
  }
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::ceil(static_cast<double>(sorted.size() + 1) * (1.0 - alpha));
  const auto idx = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(sorted.size())));
  return sorted[idx - 1];
}

BootstrapResult wild_bootstrap(const FitResult& fit, const Eigen::MatrixXd& zt, double t_observed,
                               const BootstrapOptions& options) {
  const MultiplierKind kind = options.dist;
  const std::uint64_t seed = options.seed;
  return wild_bootstrap(fit, zt, t_observed, options, [kind, seed](std::uint64_t b, std::span<double> out) {
    CounterRng rng(CounterRng::derive({seed, b}));
    draw_multipliers(kind, out, rng);
  });
}

BootstrapResult wild_bootstrap(const FitResult& fit, const Eigen::MatrixXd& zt, double t_observed,
                               const BootstrapOptions& options, const MultiplierSource& multipliers) {
  if (options.replications < 1) throw InputError("bootstrap needs at least one replication");
  if (!fit.projection) throw InputError("bootstrap needs a fitted null model");
  validate_levels(options.levels);
  const Eigen::Index n = fit.residuals.size();
  if (zt.rows() != n) throw InputError("bootstrap: residualized alternative block has the wrong row count");
  const int r = static_cast<int>(zt.cols());
  const auto B = static_cast<std::size_t>(options.replications);

  struct Workspace {
    Eigen::VectorXd v, e, scratch;
    std::unique_ptr<HcStatistic> stat;
  };
  const unsigned workers = std::min<std::size_t>(resolve_threads(options.threads), B);
  std::vector<Workspace> spaces(workers);
  for (auto& w : spaces) {
    w.v.resize(n);
    w.e.resize(n);
    w.scratch.resize(fit.projection->cols());
    w.stat = std::make_unique<HcStatistic>(zt);
  }

  BootstrapResult res;
  res.B = options.replications;
  res.seed = options.seed;
  res.t_star.assign(B, std::numeric_limits<double>::quiet_NaN());
  const auto& kern = kernels::active();

  parallel_for(B, static_cast<int>(workers), [&](std::size_t b, unsigned worker) {
    Workspace& w = spaces[worker];
    multipliers(b, {w.v.data(), static_cast<std::size_t>(n)});
    kern.hadamard(w.v.data(), fit.residuals.data(), w.e.data(), static_cast<std::size_t>(n));
    fit.projection->annihilate_in_place({w.e.data(), static_cast<std::size_t>(n)},
                                        {w.scratch.data(), static_cast<std::size_t>(w.scratch.size())});
    try {
      const double xi = (*w.stat)({w.e.data(), static_cast<std::size_t>(n)});
      res.t_star[b] = normalize(xi, r);
    } catch (const NumericalError&) {
      // left as NaN and counted below
    }
  });

  res.skipped = static_cast<int>(std::count_if(res.t_star.begin(), res.t_star.end(), [](double t) { return std::isnan(t); }));
  if (res.skipped > options.max_skip_fraction * static_cast<double>(B)) {
    throw NumericalError("wild bootstrap: " + std::to_string(res.skipped) + " of " + std::to_string(B) +
                         " draws had a singular inner matrix");
  }
  res.p_value = bootstrap_p_value(res.t_star, t_observed);
  for (const double a : options.levels) res.critical_values.emplace_back(a, bootstrap_critical_value(res.t_star, a));
  return res;
}

}  // namespace hclm
