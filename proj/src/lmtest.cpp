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

#include "hclm/lmtest.hpp"

#include <cmath>

#include "hclm/distributions.hpp"
#include "hclm/error.hpp"
#include "hclm/kernels.hpp"
#include "hclm/regress.hpp"

namespace hclm {
namespace {

// Smallest admissible squared Cholesky pivot of the unit-diagonal matrix.
constexpr double kPivotTolerance = 1e-13;

kernels::ColMajorView view_of(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
          static_cast<std::size_t>(m.rows())};
}

void check_rows(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& z, const char* who) {
  if (residuals.size() != z.rows()) {
    throw InputError(std::string(who) + ": residuals have length " + std::to_string(residuals.size()) +
                     " but the alternative block has " + std::to_string(z.rows()) + " rows");
  }
  if (z.cols() < 1) throw InputError(std::string(who) + ": need at least one restriction");
  if (z.rows() <= z.cols()) throw InputError(std::string(who) + ": need more observations than restrictions");
}

// Short form b' (X' diag(w) X)^-1 b with b = X' (v .* e).
double short_form(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals, const Eigen::VectorXd& w_var,
                  const Eigen::VectorXd& w_score) {
  const auto& k = kernels::active();
  const Eigen::Index r = x.cols();
  Eigen::MatrixXd gram(r, r);
  Eigen::VectorXd scratch(x.rows());
  k.weighted_gram(view_of(x), w_var.data(), gram.data(), scratch.data());
  Eigen::VectorXd weighted = residuals.cwiseProduct(w_score);
  Eigen::VectorXd b(r);
  k.gemv_t(view_of(x), weighted.data(), b.data());
  return spd_quadratic_form(gram, b);
}

// Long form b' S^-1 b with S = Z'ΣZ - Z'ΣW (W'ΣW)^-1 W'ΣZ, where Σ = diag(w_var).
// S is evaluated as X'X with X the residual of Σ^1/2 Z on Σ^1/2 W.
double long_form(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Z, const Eigen::VectorXd& residuals,
                 const Eigen::VectorXd& w_var, const Eigen::VectorXd& w_score) {
  const Eigen::VectorXd root = w_var.cwiseSqrt();
  const Eigen::MatrixXd ws = root.asDiagonal() * W;
  const Eigen::MatrixXd zs = root.asDiagonal() * Z;
  const Projection proj(ws);
  const Eigen::MatrixXd x = residualize_block(proj, zs);
  const Eigen::MatrixXd s = x.transpose() * x;
  const Eigen::VectorXd b = Z.transpose() * residuals.cwiseProduct(w_score);
  return spd_quadratic_form(s, b);
}

}  // namespace

std::string to_string(Variant variant) {
  std::string base;
  switch (variant.statistic) {
    case Statistic::kKorolevHc: base = "korolev_hc"; break;
    case Statistic::kKorolevAltLong: base = "korolev_alt_long"; break;
    case Statistic::kGuptaFglsLong: base = "gupta_fgls_long"; break;
    case Statistic::kGuptaFglsShort: base = "gupta_fgls_short"; break;
  }
  return variant.infeasible ? "infeasible_" + base : base;
}

Variant parse_variant(std::string_view text) {
  Variant v;
  constexpr std::string_view prefix = "infeasible_";
  if (text.substr(0, prefix.size()) == prefix) {
    v.infeasible = true;
    text.remove_prefix(prefix.size());
  }
  if (text == "korolev_hc") v.statistic = Statistic::kKorolevHc;
  else if (text == "korolev_alt_long") v.statistic = Statistic::kKorolevAltLong;
  else if (text == "gupta_fgls_long") v.statistic = Statistic::kGuptaFglsLong;
  else if (text == "gupta_fgls_short") v.statistic = Statistic::kGuptaFglsShort;
  else throw InputError("unknown test variant '" + std::string(text) + "'");
  return v;
}

VarianceWeights VarianceWeights::from_residuals(const Eigen::VectorXd& residuals) {
  VarianceWeights w;
  w.sigma2 = residuals.array().square().matrix();
  const double mean = w.sigma2.size() > 0 ? w.sigma2.mean() : 0.0;
  w.floor = kFloorFraction * mean;
  if (!(w.floor > 0.0)) throw NumericalError("residuals are identically zero; variance weights undefined");
  for (Eigen::Index i = 0; i < w.sigma2.size(); ++i) {
    if (w.sigma2[i] < w.floor) {
      w.sigma2[i] = w.floor;
      w.floor_applied = true;
    }
  }
  return w;
}

VarianceWeights VarianceWeights::known(const Eigen::VectorXd& sigma2) {
  for (Eigen::Index i = 0; i < sigma2.size(); ++i) {
    if (!(sigma2[i] > 0.0) || !std::isfinite(sigma2[i])) {
      throw InputError("true variances must be positive and finite (index " + std::to_string(i) + ")");
    }
  }
  VarianceWeights w;
  w.sigma2 = sigma2;
  w.floor = sigma2.size() > 0 ? sigma2.minCoeff() : 0.0;
  return w;
}

double spd_quadratic_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index r = a.rows();
  if (a.cols() != r || b.size() != r) throw InputError("quadratic form: dimension mismatch");
  Eigen::VectorXd scale(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!(a(i, i) > 0.0) || !std::isfinite(a(i, i))) {
      throw NumericalError("inner variance matrix is singular (zero diagonal entry " + std::to_string(i) +
                           "); check for collinear alternative terms or too many restrictions");
    }
    scale[i] = 1.0 / std::sqrt(a(i, i));
  }
  const Eigen::MatrixXd scaled = scale.asDiagonal() * a * scale.asDiagonal();
  const Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("inner variance matrix is not positive definite");
  }
  const auto diag = llt.matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < r; ++i) {
    if (diag[i] * diag[i] < kPivotTolerance) {
      throw NumericalError("inner variance matrix is numerically singular; check for collinear alternative "
                           "terms or too many restrictions");
    }
  }
  const Eigen::VectorXd sb = scale.cwiseProduct(b);
  const Eigen::VectorXd half = llt.matrixL().solve(sb);
  return half.squaredNorm();
}

HcStatistic::HcStatistic(const Eigen::MatrixXd& zt)
    : zt_(zt), gram_(zt.cols(), zt.cols()), score_(zt.cols()), squares_(zt.rows()), scratch_(zt.rows()) {
  if (zt.cols() < 1) throw InputError("xi_hc: need at least one restriction");
}

double HcStatistic::operator()(std::span<const double> residuals) {
  if (static_cast<Eigen::Index>(residuals.size()) != zt_.rows()) throw InputError("xi_hc: length mismatch");
  kernels::active().hadamard(residuals.data(), residuals.data(), squares_.data(), residuals.size());
  return with_weights(residuals, {squares_.data(), static_cast<std::size_t>(squares_.size())});
}

double HcStatistic::with_weights(std::span<const double> residuals, std::span<const double> weights) {
  if (static_cast<Eigen::Index>(residuals.size()) != zt_.rows() || weights.size() != residuals.size()) {
    throw InputError("xi_hc: length mismatch");
  }
  const auto& k = kernels::active();
  k.weighted_gram(view_of(zt_), weights.data(), gram_.data(), scratch_.data());
  k.gemv_t(view_of(zt_), residuals.data(), score_.data());
  return spd_quadratic_form(gram_, score_);
}

Eigen::VectorXd fgls_residuals(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& W,
                               const VarianceWeights& weights) {
  check_rows(residuals, W, "fgls_residuals");
  if (weights.sigma2.size() != residuals.size()) throw InputError("fgls_residuals: weights have the wrong length");
  const Eigen::VectorXd root = weights.sigma2.cwiseSqrt().cwiseInverse();
  const Projection proj(root.asDiagonal() * W);
  const Eigen::VectorXd u = root.cwiseProduct(residuals);
  return annihilate(proj, u).cwiseQuotient(root);
}

double xi_hc(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& zt, const VarianceWeights& weights) {
  check_rows(residuals, zt, "xi_hc");
  if (weights.sigma2.size() != residuals.size()) throw InputError("xi_hc: weights have the wrong length");
  HcStatistic stat(zt);
  return stat.with_weights({residuals.data(), static_cast<std::size_t>(residuals.size())},
                           {weights.sigma2.data(), static_cast<std::size_t>(weights.sigma2.size())});
}

double xi_via_nR2(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& zt) {
  check_rows(residuals, zt, "xi_via_nR2");
  const Eigen::MatrixXd x = residuals.asDiagonal() * zt;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(Projection::kRankThreshold);
  if (qr.rank() < x.cols()) {
    throw NumericalError("xi_via_nR2: regressors e_i * Zt_i are collinear");
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(x.rows());
  const Eigen::VectorXd fitted = x * qr.solve(ones);
  // Uncentered R^2 = fitted'fitted / n, so n R^2 = fitted'fitted.
  return fitted.squaredNorm();
}

double xi_variant(Statistic statistic, const Eigen::VectorXd& residuals, const Eigen::MatrixXd& W,
                  const Eigen::MatrixXd& Z, const Eigen::MatrixXd& zt, const VarianceWeights& weights) {
  check_rows(residuals, Z, "xi_variant");
  if (W.rows() != Z.rows() || zt.rows() != Z.rows() || zt.cols() != Z.cols()) {
    throw InputError("xi_variant: W, Z and residualized Z have inconsistent shapes");
  }
  if (weights.sigma2.size() != residuals.size()) throw InputError("xi_variant: weights have the wrong length");
  if (weights.sigma2.minCoeff() <= 0.0) throw InputError("xi_variant: weights must be strictly positive");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(residuals.size());
  switch (statistic) {
    case Statistic::kKorolevHc:
      return xi_hc(residuals, zt, weights);
    case Statistic::kKorolevAltLong:
      return long_form(W, Z, residuals, weights.sigma2, ones);
    case Statistic::kGuptaFglsLong: {
      const Eigen::VectorXd inv = weights.sigma2.cwiseInverse();
      return long_form(W, Z, fgls_residuals(residuals, W, weights), inv, inv);
    }
    case Statistic::kGuptaFglsShort: {
      const Eigen::VectorXd inv = weights.sigma2.cwiseInverse();
      return short_form(zt, fgls_residuals(residuals, W, weights), inv, inv);
    }
  }
  throw InputError("xi_variant: unknown statistic");
}

double xi_variant(Statistic statistic, const Eigen::VectorXd& residuals, const Eigen::MatrixXd& W,
                  const Eigen::MatrixXd& Z, const VarianceWeights& weights) {
  const Projection proj(W);
  return xi_variant(statistic, residuals, W, Z, residualize_block(proj, Z), weights);
}

double normalize(double xi, int restrictions) {
  if (restrictions < 1) throw InputError("normalize: need at least one restriction");
  return (xi - restrictions) / std::sqrt(2.0 * restrictions);
}

double normalize_kn(double xi, int total_terms) {
  if (total_terms < 1) throw InputError("normalize_kn: need at least one term");
  return (xi - total_terms) / std::sqrt(2.0 * total_terms);
}

bool TestResult::rejects(double alpha) const {
  for (const auto& d : decisions) {
    if (d.alpha == alpha) return headline == DecisionRule::kNormal ? d.reject_normal : d.reject_chisq;
  }
  throw InputError("level " + std::to_string(alpha) + " was not evaluated");
}

void validate_levels(std::span<const double> levels) {
  for (const double a : levels) {
    if (!(a > 0.0 && a < 1.0)) throw InputError("significance levels must lie in (0, 1), got " + std::to_string(a));
  }
}

TestResult summarize(std::string variant, double xi, int r, int m, std::span<const double> levels, int chisq_df) {
  validate_levels(levels);
  TestResult res;
  res.variant = std::move(variant);
  res.xi = xi;
  res.r = r;
  res.m = m;
  res.k = m + r;
  res.chisq_df = chisq_df > 0 ? chisq_df : r;
  res.t = normalize(xi, r);
  res.p_normal = normal_sf(res.t);
  res.p_chisq = chisq_sf(xi, res.chisq_df);
  for (const double a : levels) {
    LevelDecision d;
    d.alpha = a;
    d.normal_critical = normal_quantile(1.0 - a);
    d.chisq_critical = chisq_quantile(1.0 - a, res.chisq_df);
    d.reject_normal = res.t > d.normal_critical;
    d.reject_chisq = xi > d.chisq_critical;
    res.decisions.push_back(d);
  }
  return res;
}

TestResult run_test(const Eigen::VectorXd& y, const Eigen::MatrixXd& W, const Eigen::MatrixXd& Z, Variant variant,
                    std::span<const double> levels, const std::optional<Eigen::VectorXd>& true_sigma2) {
  validate_levels(levels);
  if (Z.rows() != W.rows()) throw InputError("run_test: W and Z have different row counts");
  if (W.rows() <= W.cols() + Z.cols()) throw InputError("run_test: need more observations than parameters");
  const FitResult fit = ols_fit(W, y);
  const Eigen::MatrixXd zt = residualize_block(*fit.projection, Z);
  VarianceWeights weights;
  if (variant.infeasible) {
    if (!true_sigma2) throw InputError("infeasible variants need the true error variances");
    if (true_sigma2->size() != y.size()) throw InputError("true variances have the wrong length");
    weights = VarianceWeights::known(*true_sigma2);
  } else {
    weights = VarianceWeights::from_residuals(fit.residuals);
  }
  const double xi = xi_variant(variant.statistic, fit.residuals, W, Z, zt, weights);
  TestResult res = summarize(to_string(variant), xi, static_cast<int>(Z.cols()), static_cast<int>(W.cols()), levels);
  res.floor_applied = weights.floor_applied;
  return res;
}

}  // namespace hclm
