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

#include "hclm/mc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include "hclm/design.hpp"
#include "hclm/distributions.hpp"
#include "hclm/error.hpp"
#include "hclm/lmtest.hpp"
#include "hclm/parallel.hpp"
#include "hclm/regress.hpp"

namespace hclm {
namespace {

constexpr double kMaxFailureFraction = 0.01;

enum class Kind { kHc, kHcKn, kHcChisq, kHcBoot, kStatistic, kDataDriven };

struct VariantPlan {
  std::string name;
  Kind kind = Kind::kHc;
  Variant variant;  // for kStatistic
  SelectionCriterion criterion = SelectionCriterion::kMallowsCp;
};

VariantPlan plan_for(const std::string& name) {
  VariantPlan p;
  p.name = name;
  if (name == "korolev_hc") p.kind = Kind::kHc;
  else if (name == "korolev_hc_kn") p.kind = Kind::kHcKn;
  else if (name == "korolev_hc_chisq") p.kind = Kind::kHcChisq;
  else if (name == "korolev_hc_boot") p.kind = Kind::kHcBoot;
  else if (name == "data_driven_cp") p.kind = Kind::kDataDriven, p.criterion = SelectionCriterion::kMallowsCp;
  else if (name == "data_driven_gcv") p.kind = Kind::kDataDriven, p.criterion = SelectionCriterion::kGcv;
  else {
    p.kind = Kind::kStatistic;
    p.variant = parse_variant(name);
  }
  return p;
}

// Outcome of one variant in one replication.
struct Outcome {
  bool failed = true;
  double xi = 0.0;
  int r = 0;
  int k = 0;
  std::vector<char> reject;
};

struct CellKey {
  std::size_t plan;
  std::size_t family;
  int a_n;
};

}  // namespace

std::string_view to_string(Hypothesis h) { return h == Hypothesis::kNull ? "null" : "alternative"; }

Hypothesis parse_hypothesis(std::string_view text) {
  if (text == "null" || text == "h0") return Hypothesis::kNull;
  if (text == "alternative" || text == "alt" || text == "h1") return Hypothesis::kAlternative;
  throw InputError("unknown hypothesis '" + std::string(text) + "' (expected null or alternative)");
}

namespace dgp {
double x1_from(double v1, double v2) { return -2.0 + 4.0 * (0.8 * v1 + 0.2 * v2); }
double x2_from(double v1, double v2) { return -2.0 + 4.0 * (0.2 * v1 + 0.8 * v2); }
double null_mean(double x1, double x2) { return 3.0 + 2.0 * x1 + 2.0 * (std::exp(x2) - 2.0 * std::log(x2 + 3.0)); }
double deviation(double x1, double x2) { return 1.21 * std::cos(x1 - 2.0) * std::sin(0.75 * x2); }
double error_variance(double x1, double x2) { return 1.0 + 1.75 * std::exp(0.75 * (x1 + x2)); }
}  // namespace dgp

void DgpSpec::validate() const {
  if (n < 50) throw InputError("simulation sample size must be at least 50, got " + std::to_string(n));
}

Sample gen_sample(int n, Hypothesis hypothesis, CounterRng& rng) {
  DgpSpec{n, hypothesis, 0}.validate();
  Sample s;
  s.y.resize(n);
  s.x1.resize(n);
  s.x2.resize(n);
  s.sigma2.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v1 = rng.uniform();
    const double v2 = rng.uniform();
    const double z = rng.normal();
    const double x1 = dgp::x1_from(v1, v2);
    const double x2 = dgp::x2_from(v1, v2);
    const double var = dgp::error_variance(x1, x2);
    double mean = dgp::null_mean(x1, x2);
    if (hypothesis == Hypothesis::kAlternative) mean += dgp::deviation(x1, x2);
    s.x1[i] = x1;
    s.x2[i] = x2;
    s.sigma2[i] = var;
    s.y[i] = mean + std::sqrt(var) * z;
  }
  return s;
}

Sample gen_sample(const DgpSpec& spec) {
  spec.validate();
  CounterRng rng(spec.seed);
  return gen_sample(spec.n, spec.hypothesis, rng);
}

const std::vector<std::string>& known_mc_variants() {
  static const std::vector<std::string> v{"korolev_hc",
                                          "korolev_hc_kn",
                                          "korolev_hc_chisq",
                                          "korolev_hc_boot",
                                          "korolev_alt_long",
                                          "gupta_fgls_long",
                                          "gupta_fgls_short",
                                          "infeasible_korolev_hc",
                                          "infeasible_korolev_alt_long",
                                          "infeasible_gupta_fgls_long",
                                          "infeasible_gupta_fgls_short",
                                          "data_driven_cp",
                                          "data_driven_gcv"};
  return v;
}

bool is_data_driven(std::string_view variant) { return variant.substr(0, 12) == "data_driven_"; }

void McConfig::validate() const {
  if (replications < 1) throw InputError("Monte Carlo needs at least one replication");
  if (sample_sizes.empty()) throw InputError("no sample sizes given");
  for (const int n : sample_sizes) DgpSpec{n, Hypothesis::kNull, 0}.validate();
  if (a_min < 4 || a_max < a_min) {
    throw InputError("series terms range must satisfy 4 <= a_min <= a_max");
  }
  if (families.empty()) throw InputError("no basis families given");
  if (variants.empty()) throw InputError("no test variants given");
  const auto& known = known_mc_variants();
  for (const auto& v : variants) {
    if (std::find(known.begin(), known.end(), v) == known.end()) {
      throw InputError("unknown Monte Carlo variant '" + v + "'");
    }
  }
  if (hypotheses.empty()) throw InputError("no hypotheses given");
  if (levels.empty()) throw InputError("no significance levels given");
  validate_levels(levels);
  if (bootstrap_replications < 1) throw InputError("bootstrap needs at least one replication");
  if (penalty_c < 1.0) throw InputError("penalty constant must be at least 1");
}

double McCell::rate(std::size_t level) const {
  if (aborted || completed == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(rejections.at(level)) / completed;
}

double McCell::standard_error(std::size_t level) const {
  const double p = rate(level);
  return std::sqrt(p * (1.0 - p) / completed);
}

const McCell& McReport::find(std::string_view variant, BasisFamily family, int n, int a_n,
                             Hypothesis hypothesis) const {
  for (const auto& c : cells) {
    if (c.variant == variant && c.family == family && c.n == n && c.a_n == a_n && c.hypothesis == hypothesis) return c;
  }
  throw InputError("no Monte Carlo cell for " + std::string(variant) + "/" + std::string(to_string(family)) +
                   "/n=" + std::to_string(n) + "/a=" + std::to_string(a_n) + "/" + std::string(to_string(hypothesis)));
}

McReport run_mc(const McConfig& config) {
  config.validate();
  McReport report;
  report.config = config;

  std::vector<VariantPlan> plans;
  for (const auto& v : config.variants) plans.push_back(plan_for(v));
  const bool any_dd = std::any_of(plans.begin(), plans.end(), [](const auto& p) { return p.kind == Kind::kDataDriven; });
  const bool any_per_a = std::any_of(plans.begin(), plans.end(), [](const auto& p) { return p.kind != Kind::kDataDriven; });

  std::vector<CellKey> keys;
  for (std::size_t f = 0; f < config.families.size(); ++f) {
    for (std::size_t p = 0; p < plans.size(); ++p) {
      if (plans[p].kind == Kind::kDataDriven) {
        keys.push_back({p, f, config.a_max});
      } else {
        for (int a = config.a_min; a <= config.a_max; ++a) keys.push_back({p, f, a});
      }
    }
  }
  const std::size_t levels = config.levels.size();
  std::vector<double> z_crit(levels);
  for (std::size_t l = 0; l < levels; ++l) z_crit[l] = normal_quantile(1.0 - config.levels[l]);

  for (const int n : config.sample_sizes) {
    for (const Hypothesis hyp : config.hypotheses) {
      const auto M = static_cast<std::size_t>(config.replications);
      std::vector<std::vector<Outcome>> outcomes(M);

      parallel_for(M, config.threads, [&](std::size_t b, unsigned) {
        CounterRng data_rng(CounterRng::derive({config.seed, static_cast<std::uint64_t>(n),
                                                static_cast<std::uint64_t>(hyp), b}));
        const Sample s = gen_sample(n, hyp, data_rng);
        std::vector<Outcome> out(keys.size());
        for (auto& o : out) o.reject.assign(levels, 0);

        for (std::size_t f = 0; f < config.families.size(); ++f) {
          const BasisFamily family = config.families[f];
          std::map<int, std::optional<DesignPair>> designs;
          for (int a = config.a_min; a <= config.a_max; ++a) {
            try {
              designs[a] = simulation_design(s.x1, s.x2, a, family);
            } catch (const NumericalError&) {
              designs[a] = std::nullopt;
            }
          }

          if (any_per_a) {
            for (int a = config.a_min; a <= config.a_max; ++a) {
              if (!designs[a]) continue;
              const DesignPair& d = *designs[a];
              try {
                const FitResult fit = ols_fit(d.W, s.y, d.w_labels);
                const Eigen::MatrixXd zt = residualize_block(*fit.projection, d.Z);
                const VarianceWeights feasible = VarianceWeights::from_residuals(fit.residuals);
                std::optional<VarianceWeights> known;
                std::optional<double> xi_hc_value;
                auto hc = [&]() {
                  if (!xi_hc_value) xi_hc_value = xi_hc(fit.residuals, zt, feasible);
                  return *xi_hc_value;
                };
                for (std::size_t c = 0; c < keys.size(); ++c) {
                  if (keys[c].family != f || keys[c].a_n != a) continue;
                  const VariantPlan& plan = plans[keys[c].plan];
                  if (plan.kind == Kind::kDataDriven) continue;
                  Outcome& o = out[c];
                  try {
                    o.r = d.r();
                    o.k = d.k();
                    switch (plan.kind) {
                      case Kind::kHc:
                      case Kind::kHcKn:
                      case Kind::kHcChisq: {
                        o.xi = hc();
                        for (std::size_t l = 0; l < levels; ++l) {
                          if (plan.kind == Kind::kHc) o.reject[l] = normalize(o.xi, d.r()) > z_crit[l];
                          else if (plan.kind == Kind::kHcKn) o.reject[l] = normalize_kn(o.xi, d.k()) > z_crit[l];
                          else o.reject[l] = o.xi > chisq_quantile(1.0 - config.levels[l], d.r());
                        }
                        break;
                      }
                      case Kind::kHcBoot: {
                        o.xi = hc();
                        BootstrapOptions opts;
                        opts.replications = config.bootstrap_replications;
                        opts.dist = config.dist;
                        opts.threads = 1;
                        opts.levels = config.levels;
                        opts.seed = CounterRng::derive({config.seed, static_cast<std::uint64_t>(n),
                                                        static_cast<std::uint64_t>(hyp), b,
                                                        static_cast<std::uint64_t>(family),
                                                        static_cast<std::uint64_t>(a)});
                        const BootstrapResult boot = wild_bootstrap(fit, zt, normalize(o.xi, d.r()), opts);
                        for (std::size_t l = 0; l < levels; ++l) o.reject[l] = boot.rejects(config.levels[l]);
                        break;
                      }
                      case Kind::kStatistic: {
                        const VarianceWeights* w = &feasible;
                        if (plan.variant.infeasible) {
                          if (!known) known = VarianceWeights::known(s.sigma2);
                          w = &*known;
                        }
                        o.xi = plan.variant.statistic == Statistic::kKorolevHc && !plan.variant.infeasible
                                   ? hc()
                                   : xi_variant(plan.variant.statistic, fit.residuals, d.W, d.Z, zt, *w);
                        for (std::size_t l = 0; l < levels; ++l) o.reject[l] = normalize(o.xi, d.r()) > z_crit[l];
                        break;
                      }
                      case Kind::kDataDriven: break;
                    }
                    o.failed = false;
                  } catch (const NumericalError&) {
                    o.failed = true;
                  }
                }
              } catch (const NumericalError&) {
                // whole (family, a) design failed; outcomes stay failed
              }
            }
          }

          if (any_dd) {
            std::vector<DesignPair> grid;
            for (auto& [a, d] : designs) {
              if (d) grid.push_back(*d);
            }
            for (std::size_t c = 0; c < keys.size(); ++c) {
              if (keys[c].family != f || plans[keys[c].plan].kind != Kind::kDataDriven) continue;
              Outcome& o = out[c];
              try {
                if (grid.empty()) throw NumericalError("no usable design in the grid");
                const DataDrivenResult dd =
                    data_driven_test(s.y, grid, plans[keys[c].plan].criterion, config.levels, config.penalty_c);
                o.xi = dd.test.xi;
                o.r = dd.r_hat;
                o.k = dd.test.k;
                for (std::size_t l = 0; l < levels; ++l) o.reject[l] = dd.test.decisions[l].reject_chisq;
                o.failed = false;
              } catch (const NumericalError&) {
                o.failed = true;
              }
            }
          }
        }
        outcomes[b] = std::move(out);
      });

      for (std::size_t c = 0; c < keys.size(); ++c) {
        McCell cell;
        cell.variant = plans[keys[c].plan].name;
        cell.family = config.families[keys[c].family];
        cell.n = n;
        cell.a_n = keys[c].a_n;
        cell.hypothesis = hyp;
        cell.rejections.assign(levels, 0);
        double xi_sum = 0.0;
        for (std::size_t b = 0; b < M; ++b) {
          const Outcome& o = outcomes[b][c];
          if (o.failed) {
            ++cell.failed;
            continue;
          }
          ++cell.completed;
          xi_sum += o.xi;
          cell.r_n = o.r;
          cell.k_n = o.k;
          for (std::size_t l = 0; l < levels; ++l) cell.rejections[l] += o.reject[l];
        }
        cell.mean_xi = cell.completed > 0 ? xi_sum / cell.completed : std::numeric_limits<double>::quiet_NaN();
        cell.aborted = cell.failed > kMaxFailureFraction * static_cast<double>(M);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void write_report_csv(const McReport& report, std::ostream& out) {
  out << "variant,family,n,a_n,hypothesis,alpha,reject_rate,mc_se,M,seed\n";
  for (const auto& c : report.cells) {
    for (std::size_t l = 0; l < report.config.levels.size(); ++l) {
      out << c.variant << ',' << to_string(c.family) << ',' << c.n << ',' << c.a_n << ',' << to_string(c.hypothesis)
          << ',' << format_double(report.config.levels[l]) << ',' << format_double(c.rate(l)) << ','
          << format_double(c.standard_error(l)) << ',' << c.completed << ',' << report.config.seed << '\n';
    }
  }
}

void write_plot_data(const McReport& report, std::ostream& out) {
  // Group cells by everything except a_n, preserving first-seen order.
  std::vector<std::vector<const McCell*>> series;
  for (const auto& c : report.cells) {
    auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) {
      const McCell& h = *s.front();
      return h.variant == c.variant && h.family == c.family && h.n == c.n && h.hypothesis == c.hypothesis;
    });
    if (it == series.end()) series.push_back({&c});
    else it->push_back(&c);
  }
  out << "# columns: a_n reject_rate mc_se\n";
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t l = 0; l < report.config.levels.size(); ++l) {
      if (!first) out << "\n\n";
      first = false;
      const McCell& h = *s.front();
      out << "# " << h.variant << ' ' << to_string(h.family) << " n=" << h.n << ' ' << to_string(h.hypothesis)
          << " alpha=" << format_double(report.config.levels[l]) << '\n';
      for (const McCell* c : s) {
        out << c->a_n << ' ' << format_double(c->rate(l)) << ' ' << format_double(c->standard_error(l)) << '\n';
      }
    }
  }
}

void emit_report(const McReport& report, const std::filesystem::path& stem) {
  auto with_ext = [&](const char* ext) {
    std::filesystem::path p = stem;
    p += ext;
    return p;
  };
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::ofstream csv(with_ext(".csv"), std::ios::binary);
  if (!csv) throw InputError("cannot write " + with_ext(".csv").string());
  write_report_csv(report, csv);
  std::ofstream dat(with_ext(".dat"), std::ios::binary);
  if (!dat) throw InputError("cannot write " + with_ext(".dat").string());
  write_plot_data(report, dat);
}

}  // namespace hclm
