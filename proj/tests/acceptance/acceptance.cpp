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


// Acceptance run. Prints one PASS/FAIL line per criterion. Statistical
// criteria are reported but only deterministic ones (1, 6, 7) decide the exit
// status unless --strict is given.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hclm/basis.hpp"
#include "hclm/bootstrap.hpp"
#include "hclm/design.hpp"
#include "hclm/distributions.hpp"
#include "hclm/kernels.hpp"
#include "hclm/lmtest.hpp"
#include "hclm/mc.hpp"
#include "hclm/regress.hpp"
#include "hclm/rng.hpp"

using namespace hclm;

namespace {

struct Outcome {
  int id;
  bool pass;
  bool deterministic;
  std::string detail;
};

std::vector<Outcome> outcomes;

void record(int id, bool pass, bool deterministic, const std::string& detail) {
  outcomes.push_back({id, pass, deterministic, detail});
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

Eigen::MatrixXd noise_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t key) {
  CounterRng rng(key);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

// 1 ---------------------------------------------------------------------------

void term_counts() {
  const int expected[6][3] = {{5, 16, 11}, {6, 25, 19}, {7, 27, 20}, {8, 29, 21}, {9, 40, 31}, {10, 53, 43}};
  CounterRng rng(1);
  const Sample s = gen_sample(1000, Hypothesis::kNull, rng);
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string got;
  for (int a = 4; a <= 9; ++a) {
    const DesignPair d = simulation_design(s.x1, s.x2, a, BasisFamily::kPower);
    const int* e = expected[a - 4];
    ok = ok && d.m() == e[0] && d.k() == e[1] && d.r() == e[2];
    got += " (" + std::to_string(d.m()) + "," + std::to_string(d.k()) + "," + std::to_string(d.r()) + ")";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record(1, ok && secs < 1.0, true, "(m,k,r) for a=4..9:" + got + fmt(", %.3f s", secs));
}

// 2, 3 ------------------------------------------------------------------------

void size_and_comparators() {
  McConfig cfg;
  cfg.replications = 1000;
  cfg.sample_sizes = {1000};
  cfg.a_min = 4;
  cfg.a_max = 9;
  cfg.variants = {"korolev_hc", "korolev_hc_kn", "gupta_fgls_long"};
  cfg.levels = {0.05};
  const McReport rep = run_mc(cfg);
  auto rate = [&](const char* v, int a, Hypothesis h) {
    return rep.find(v, BasisFamily::kPower, 1000, a, h).rate(0);
  };

  bool size_ok = true;
  std::string sizes;
  for (int a = 4; a <= 9; ++a) {
    const double r = rate("korolev_hc", a, Hypothesis::kNull);
    size_ok = size_ok && r >= 0.03 && r <= 0.07;
    sizes += fmt(" %.3f", r);
  }
  record(2, size_ok, false, "size at alpha=.05, a=4..9, in [0.03,0.07]:" + sizes);

  bool kn_ok = true, gupta_ok = true, power_ok = true;
  std::string kn, gupta, power;
  for (int a = 4; a <= 9; ++a) {
    const double k = rate("korolev_hc_kn", a, Hypothesis::kNull);
    kn_ok = kn_ok && k <= 0.03;
    kn += fmt(" %.3f", k);
    const double g = rate("gupta_fgls_long", a, Hypothesis::kAlternative) - rate("gupta_fgls_long", a, Hypothesis::kNull);
    gupta_ok = gupta_ok && std::abs(g) <= 0.05;
    gupta += fmt(" %+.3f", g);
    if (a <= 7) {
      const double p = rate("korolev_hc", a, Hypothesis::kAlternative);
      power_ok = power_ok && p >= 0.90;
      power += fmt(" %.3f", p);
    }
  }
  record(3, kn_ok && gupta_ok && power_ok, false,
         "k_n-scaled size <= 0.03:" + kn + "; fgls long power-size within 0.05:" + gupta +
             "; power a=4..7 >= 0.90:" + power);
}

// 4 ---------------------------------------------------------------------------

void data_driven() {
  McConfig cfg;
  cfg.replications = 1000;
  cfg.sample_sizes = {250, 1000};
  cfg.a_min = 4;
  cfg.a_max = 9;
  cfg.families = {BasisFamily::kPower, BasisFamily::kSpline};
  cfg.variants = {"data_driven_cp", "data_driven_gcv"};
  cfg.levels = {0.05};
  const McReport rep = run_mc(cfg);

  struct Target {
    int n;
    BasisFamily family;
    const char* variant;
    double size;
    double power;
  };
  const Target targets[] = {
      {250, BasisFamily::kPower, "data_driven_cp", 0.037, 0.390},
      {250, BasisFamily::kPower, "data_driven_gcv", 0.035, 0.393},
      {250, BasisFamily::kSpline, "data_driven_cp", 0.039, 0.391},
      {250, BasisFamily::kSpline, "data_driven_gcv", 0.039, 0.394},
      {1000, BasisFamily::kPower, "data_driven_cp", 0.047, 0.991},
      {1000, BasisFamily::kPower, "data_driven_gcv", 0.047, 0.991},
      {1000, BasisFamily::kSpline, "data_driven_cp", 0.048, 0.991},
      {1000, BasisFamily::kSpline, "data_driven_gcv", 0.048, 0.991},
  };
  bool ok = true;
  std::string detail;
  for (const auto& t : targets) {
    const double sz = rep.find(t.variant, t.family, t.n, 9, Hypothesis::kNull).rate(0);
    const double pw = rep.find(t.variant, t.family, t.n, 9, Hypothesis::kAlternative).rate(0);
    const bool cell_ok = std::abs(sz - t.size) <= 0.02 && std::abs(pw - t.power) <= 0.05;
    ok = ok && cell_ok;
    detail += " [n=" + std::to_string(t.n) + " " + std::string(to_string(t.family)) + " " +
              std::string(t.variant).substr(12) + fmt(" size %.3f", sz) + fmt("/%.3f", t.size) +
              fmt(" power %.3f", pw) + fmt("/%.3f", t.power) + (cell_ok ? "" : " x") + "]";
  }
  record(4, ok, false, "data-driven size +-0.02, power +-0.05:" + detail);
}

// 5 ---------------------------------------------------------------------------

void bootstrap_agreement() {
  McConfig cfg;
  cfg.replications = 500;
  cfg.sample_sizes = {250};
  cfg.a_min = 5;
  cfg.a_max = 5;
  cfg.variants = {"korolev_hc", "korolev_hc_boot"};
  cfg.hypotheses = {Hypothesis::kNull};
  cfg.levels = {0.05};
  cfg.bootstrap_replications = 399;
  const McReport rep = run_mc(cfg);
  const double asym = rep.find("korolev_hc", BasisFamily::kPower, 250, 5, Hypothesis::kNull).rate(0);
  const double boot = rep.find("korolev_hc_boot", BasisFamily::kPower, 250, 5, Hypothesis::kNull).rate(0);
  record(5, std::abs(boot - asym) <= 0.03, false,
         fmt("bootstrap size %.3f", boot) + fmt(" vs asymptotic %.3f", asym) + ", |diff| <= 0.03");
}

// 6 ---------------------------------------------------------------------------

void properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* name) {
    if (!ok) failed.emplace_back(name);
  };

  const int n = 80;
  Eigen::MatrixXd W = noise_matrix(n, 5, 10);
  W.col(0).setOnes();
  const Eigen::MatrixXd Z = noise_matrix(n, 4, 11);
  const Eigen::VectorXd y = noise_matrix(n, 1, 12).col(0).cwiseProduct((1.0 + W.col(1).array().abs()).matrix());
  const FitResult fit = ols_fit(W, y);
  const Eigen::VectorXd& e = fit.residuals;
  check((W.transpose() * e).cwiseAbs().maxCoeff() <= 1e-10 * W.norm() * y.norm(), "orthogonality");

  const Eigen::MatrixXd M = residualize_block(*fit.projection, Eigen::MatrixXd::Identity(n, n));
  check((M * M - M).cwiseAbs().maxCoeff() <= 1e-12, "idempotence");
  check((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "symmetry");

  const Eigen::MatrixXd zt = residualize_block(*fit.projection, Z);
  const VarianceWeights w = VarianceWeights::from_residuals(e);
  const double xi = xi_hc(e, zt, w);
  bool nonneg = xi >= 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Eigen::VectorXd u = annihilate(*fit.projection, noise_matrix(n, 1, 100 + k).col(0));
    nonneg = nonneg && xi_hc(u, zt, VarianceWeights::from_residuals(u)) >= 0.0;
  }
  check(nonneg, "xi >= 0");

  const Eigen::MatrixXd A = noise_matrix(4, 4, 13) + 4.0 * Eigen::MatrixXd::Identity(4, 4);
  check(rel(xi_hc(e, zt * A, w), xi) <= 1e-8, "Z reparameterization");
  const Eigen::MatrixXd B = noise_matrix(5, 5, 14) + 5.0 * Eigen::MatrixXd::Identity(5, 5);
  const FitResult fit_b = ols_fit(W * B, y);
  const Eigen::MatrixXd zt_b = residualize_block(*fit_b.projection, Z);
  check(rel(xi_hc(fit_b.residuals, zt_b, VarianceWeights::from_residuals(fit_b.residuals)), xi) <= 1e-8,
        "W reparameterization");
  check(rel(xi_via_nR2(e, zt), xi) <= 1e-8, "nR2 identity");

  std::vector<double> v(200);
  for (int i = 0; i < 200; ++i) v[i] = -1.0 + 2.0 * (i + 0.5) / 200;
  const BasisMatrix sp = spline_basis(v, 4, 3, quantile_knots(v, 0));
  const BasisMatrix pw = power_basis(v, 4);
  check((sp.values - pw.values).cwiseAbs().maxCoeff() <= 1e-14, "spline without knots equals power");

  const long draws = 1000000;
  for (const auto kind : {MultiplierKind::kRademacher, MultiplierKind::kMammen}) {
    CounterRng rng(15);
    std::vector<double> m(draws);
    draw_multipliers(kind, m, rng);
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s6 = 0;
    long positive = 0;
    for (const double x : m) {
      s1 += x;
      s2 += x * x;
      s3 += x * x * x;
      s4 += x * x * x * x;
      s6 += x * x * x * x * x * x;
      positive += x > 0;
    }
    const double N = draws;
    const double var2 = s4 / N - 1.0;
    const double m3 = kind == MultiplierKind::kMammen ? 1.0 : 0.0;
    const double var3 = s6 / N - m3 * m3;
    check(std::abs(s1 / N) <= 4.0 / std::sqrt(N), "multiplier mean");
    check(std::abs(s2 / N - 1.0) <= 4.0 * std::sqrt(std::max(var2, 0.0) / N) + 1e-12, "multiplier variance");
    check(std::abs(s3 / N - m3) <= 4.0 * std::sqrt(var3 / N), "third moment");
    if (kind == MultiplierKind::kMammen) {
      const double p = positive / N;
      check(std::abs(p - 0.2764) <= 4.0 * std::sqrt(0.2764 * 0.7236 / N) + 5e-5, "Mammen probability");
    }
  }

  bool shortcut = true;
  for (std::uint64_t b = 0; b < 5; ++b) {
    CounterRng rng(b);
    std::vector<double> m(n);
    draw_multipliers(MultiplierKind::kMammen, m, rng);
    const Eigen::VectorXd e_star = Eigen::Map<Eigen::VectorXd>(m.data(), n).cwiseProduct(e);
    const Eigen::VectorXd refit = ols_fit(W, W * fit.beta + e_star).residuals;
    shortcut = shortcut && (annihilate(*fit.projection, e_star) - refit).norm() <= 1e-10 * refit.norm();
  }
  check(shortcut, "shortcut equals refit");

  bool round = true;
  for (const double p : {1e-6, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999}) {
    round = round && std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-8;
    for (const double df : {1.0, 4.0, 11.0, 43.0}) round = round && std::abs(chisq_cdf(chisq_quantile(p, df), df) - p) <= 1e-8;
  }
  check(round, "cdf(quantile(p)) round trip");
  check(std::abs(normal_quantile(0.95) - 1.645) <= 5e-4, "normal 0.95 quantile");

  // The a=4 sieve leaves visible approximation error in the residuals, so the
  // mean is checked at a=6 and the a=4 value is only reported.
  McConfig cfg;
  cfg.replications = 1000;
  cfg.sample_sizes = {1000};
  cfg.a_min = 4;
  cfg.a_max = 6;
  cfg.variants = {"infeasible_korolev_hc"};
  cfg.hypotheses = {Hypothesis::kNull};
  const McReport rep = run_mc(cfg);
  const McCell& cell = rep.find("infeasible_korolev_hc", BasisFamily::kPower, 1000, 6, Hypothesis::kNull);
  const McCell& coarse = rep.find("infeasible_korolev_hc", BasisFamily::kPower, 1000, 4, Hypothesis::kNull);
  const double bound = 4.0 * std::sqrt(2.0 * cell.r_n / cell.completed);
  check(std::abs(cell.mean_xi - cell.r_n) <= bound, "infeasible xi mean");

  std::string detail = fmt("infeasible mean xi %.3f", cell.mean_xi) + " vs r=" + std::to_string(cell.r_n) +
                       fmt(" +- %.3f", bound) + fmt(" (a=4: %.3f", coarse.mean_xi) + " vs " +
                       std::to_string(coarse.r_n) + ")";
  for (const auto& f : failed) detail += "; failed: " + f;
  record(6, failed.empty(), true, detail);
}

// 7 ---------------------------------------------------------------------------

McConfig golden_config(int threads) {
  McConfig cfg;
  cfg.replications = 40;
  cfg.sample_sizes = {200};
  cfg.a_min = 5;
  cfg.a_max = 5;
  cfg.families = {BasisFamily::kPower};
  cfg.variants = {"korolev_hc"};
  cfg.hypotheses = {Hypothesis::kNull, Hypothesis::kAlternative};
  cfg.levels = {0.05, 0.1};
  cfg.seed = 424242;
  cfg.threads = threads;
  return cfg;
}

void determinism() {
  const std::filesystem::path path = std::filesystem::path(HCLM_TEST_DATA_DIR) / "golden_mc.csv";
  std::ifstream in(path, std::ios::binary);
  std::ostringstream golden;
  golden << in.rdbuf();
  bool ok = in.good() || in.eof();
  int runs = 0;
  for (const auto isa : {kernels::best_available(), kernels::Isa::kScalar}) {
    kernels::select(isa);
    for (const int threads : {1, 1, 2, 4, 0}) {
      std::ostringstream os;
      write_report_csv(run_mc(golden_config(threads)), os);
      ok = ok && os.str() == golden.str() && !golden.str().empty();
      ++runs;
    }
  }
  kernels::select(kernels::best_available());
  record(7, ok, true, std::to_string(runs) + " runs over thread counts {1,1,2,4,auto} and two kernel sets vs " +
                          path.filename().string());
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) strict = true;
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::function<void()> steps[] = {term_counts, size_and_comparators, data_driven, bootstrap_agreement,
                                         properties, determinism};
  const int first_id[] = {1, 2, 4, 5, 6, 7};
  for (int k = 0; k < 6; ++k) {
    if (only == 0 || only == first_id[k] || (only == 3 && first_id[k] == 2)) steps[k]();
  }

  int status = 0;
  for (const auto& o : outcomes) {
    if (!o.pass && (strict || o.deterministic)) status = 1;
  }
  return status;
}
