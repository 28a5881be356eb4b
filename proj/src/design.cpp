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

#include "hclm/design.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "hclm/error.hpp"
#include "hclm/kernels.hpp"

namespace hclm {
namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

const Eigen::VectorXd& finite_column(const Dataset& data, std::string_view name) {
  const auto& col = data.at(name);
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (!std::isfinite(col[i])) {
      throw InputError("column '" + std::string(name) + "' has a non-finite value at row " + std::to_string(i + 1));
    }
  }
  return col;
}

// Spline bases too short to carry knots are plain power bases.
BasisSpec interaction_spec(const BasisSpec& base, int terms) {
  BasisSpec s = base;
  s.terms = terms;
  if (s.family == BasisFamily::kSpline && terms <= s.spline_order + 1) s.family = BasisFamily::kPower;
  return s;
}

struct ColumnSet {
  std::vector<Eigen::VectorXd> cols;
  std::vector<std::string> labels;

  void add(Eigen::VectorXd c, std::string label) {
    cols.push_back(std::move(c));
    labels.push_back(std::move(label));
  }
  void add_nonconstant(const BasisMatrix& b) {
    for (Eigen::Index j = 1; j < b.cols(); ++j) add(b.values.col(j), b.labels[j]);
  }
  Eigen::MatrixXd matrix(Eigen::Index n) const {
    Eigen::MatrixXd m(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cols[j];
    return m;
  }
};

// Incrementally built orthonormal basis used by the collinearity screen.
class OrthoBasis {
 public:
  OrthoBasis(Eigen::Index n, Eigen::Index capacity) : q_(n, std::max<Eigen::Index>(capacity, 1)), scratch_(q_.cols()) {}

  // Relative squared residual of `v` after projection; on acceptance the
  // normalized residual is appended.
  bool try_add(const Eigen::VectorXd& v, double tol) {
    const double norm2 = v.squaredNorm();
    if (!(norm2 > 0.0)) return false;
    Eigen::VectorXd res = v;
    const auto& k = kernels::active();
    const kernels::ColMajorView view{q_.data(), static_cast<std::size_t>(q_.rows()), static_cast<std::size_t>(used_),
                                     static_cast<std::size_t>(q_.rows())};
    // Two passes of classical Gram-Schmidt keep the basis orthogonal to
    // working precision.
    k.project_out(view, res.data(), scratch_.data());
    k.project_out(view, res.data(), scratch_.data());
    const double res2 = res.squaredNorm();
    if (res2 < tol * norm2) return false;
    q_.col(used_++) = res / std::sqrt(res2);
    return true;
  }

 private:
  Eigen::MatrixXd q_;
  Eigen::VectorXd scratch_;
  Eigen::Index used_ = 0;
};

}  // namespace

std::string_view to_string(AlternativeRecipe recipe) {
  switch (recipe) {
    case AlternativeRecipe::kFullTensor: return "full_tensor";
    case AlternativeRecipe::kRestrictedTensor: return "restricted_tensor";
    case AlternativeRecipe::kAdditiveOnly: return "additive_only";
    case AlternativeRecipe::kCustom: return "custom";
  }
  return "unknown";
}

AlternativeRecipe parse_alternative_recipe(std::string_view text) {
  if (text == "full_tensor") return AlternativeRecipe::kFullTensor;
  if (text == "restricted_tensor") return AlternativeRecipe::kRestrictedTensor;
  if (text == "additive_only") return AlternativeRecipe::kAdditiveOnly;
  if (text == "custom") return AlternativeRecipe::kCustom;
  throw InputError("unknown alternative recipe '" + std::string(text) + "'");
}

void ModelSpec::validate() const {
  std::set<std::string> seen;
  for (const auto& v : linear_vars) {
    if (!seen.insert(v).second) throw InputError("variable '" + v + "' listed twice in the null model");
  }
  for (const auto& s : series_vars) {
    if (!seen.insert(s.var).second) throw InputError("variable '" + s.var + "' listed twice in the null model");
    s.basis.validate();
  }
  if (seen.empty()) throw InputError("model has no variables");
  std::set<std::string> alt_seen;
  for (const auto& s : alternative_bases) {
    if (!alt_seen.insert(s.var).second) throw InputError("variable '" + s.var + "' has two alternative bases");
    s.basis.validate();
  }
  if (recipe == AlternativeRecipe::kCustom) {
    if (custom_columns.empty()) throw InputError("custom alternative recipe needs a column list");
  } else if (alternative_bases.empty()) {
    throw InputError("alternative recipe '" + std::string(to_string(recipe)) + "' needs alternative bases");
  }
  if (!(screen_tol > 0.0)) throw InputError("screening tolerance must be positive");
}

DesignPair screen_collinear(const DesignPair& design, double tol, ScreenReport* report) {
  if (!(tol > 0.0)) throw InputError("screen_collinear: tolerance must be positive");
  if (design.Z.rows() != design.W.rows() && design.Z.cols() > 0) {
    throw InputError("screen_collinear: W and Z have different row counts");
  }
  const Eigen::Index n = design.W.rows();
  OrthoBasis basis(n, design.W.cols() + design.Z.cols());

  std::vector<std::string> deficient;
  for (Eigen::Index j = 0; j < design.W.cols(); ++j) {
    if (!basis.try_add(design.W.col(j), tol)) {
      deficient.push_back(j < static_cast<Eigen::Index>(design.w_labels.size()) ? design.w_labels[j]
                                                                                 : "W[" + std::to_string(j) + "]");
    }
  }
  if (!deficient.empty()) {
    std::string msg = "null design W is rank deficient; redundant columns:";
    for (const auto& d : deficient) msg += " " + d;
    throw RankDeficientError(msg, deficient);
  }

  DesignPair out;
  out.W = design.W;
  out.w_labels = design.w_labels;
  out.dropped = design.dropped;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < design.Z.cols(); ++j) {
    const std::string label =
        j < static_cast<Eigen::Index>(design.z_labels.size()) ? design.z_labels[j] : "Z[" + std::to_string(j) + "]";
    if (basis.try_add(design.Z.col(j), tol)) {
      keep.push_back(j);
    } else {
      out.dropped.push_back(label);
      if (report != nullptr) report->dropped.push_back(label);
    }
  }
  out.Z.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.Z.col(static_cast<Eigen::Index>(c)) = design.Z.col(keep[c]);
    out.z_labels.push_back(keep[c] < static_cast<Eigen::Index>(design.z_labels.size())
                               ? design.z_labels[keep[c]]
                               : "Z[" + std::to_string(keep[c]) + "]");
  }
  return out;
}

Eigen::VectorXd evaluate_monomial(const Dataset& data, std::string_view expression) {
  const Eigen::Index n = data.rows();
  Eigen::VectorXd out = Eigen::VectorXd::Ones(n);
  if (expression.empty()) throw InputError("empty column expression");
  std::size_t start = 0;
  while (start <= expression.size()) {
    const std::size_t stop = std::min(expression.find('*', start), expression.size());
    std::string_view factor = expression.substr(start, stop - start);
    int power = 1;
    if (const auto caret = factor.find('^'); caret != std::string_view::npos) {
      const auto digits = factor.substr(caret + 1);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), power);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || power < 1) {
        throw InputError("bad exponent in column expression '" + std::string(expression) + "'");
      }
      factor = factor.substr(0, caret);
    }
    if (factor.empty()) throw InputError("bad column expression '" + std::string(expression) + "'");
    const auto& col = finite_column(data, factor);
    for (int p = 0; p < power; ++p) out.array() *= col.array();
    start = stop + 1;
  }
  return out;
}

DesignPair build_partially_linear(const Dataset& data, const ModelSpec& spec) {
  spec.validate();
  const Eigen::Index n = data.rows();
  if (n < 2) throw InputError("dataset needs at least two rows");

  ColumnSet w;
  w.add(Eigen::VectorXd::Ones(n), "1");
  for (const auto& v : spec.linear_vars) w.add(finite_column(data, v), v);
  for (const auto& s : spec.series_vars) {
    w.add_nonconstant(make_basis(as_span(finite_column(data, s.var)), s.basis, s.var));
  }

  ColumnSet p;
  if (spec.recipe == AlternativeRecipe::kCustom) {
    for (const auto& expr : spec.custom_columns) p.add(evaluate_monomial(data, expr), expr);
  } else {
    std::vector<BasisMatrix> univariate;
    for (const auto& s : spec.alternative_bases) {
      univariate.push_back(make_basis(as_span(finite_column(data, s.var)), s.basis, s.var));
      p.add_nonconstant(univariate.back());
    }
    if (spec.recipe != AlternativeRecipe::kAdditiveOnly) {
      std::vector<BasisMatrix> shrunk;
      for (std::size_t i = 0; i < spec.alternative_bases.size(); ++i) {
        const auto& s = spec.alternative_bases[i];
        if (spec.recipe == AlternativeRecipe::kFullTensor) {
          shrunk.push_back(univariate[i]);
        } else {
          const int abar = restricted_interaction_order(s.basis.terms);
          shrunk.push_back(abar == s.basis.terms
                               ? univariate[i]
                               : make_basis(as_span(finite_column(data, s.var)), interaction_spec(s.basis, abar), s.var));
        }
      }
      for (std::size_t i = 0; i < shrunk.size(); ++i) {
        for (std::size_t j = i + 1; j < shrunk.size(); ++j) {
          const auto inter = tensor_interactions(shrunk[i], shrunk[j]);
          for (Eigen::Index c = 0; c < inter.cols(); ++c) p.add(inter.values.col(c), inter.labels[c]);
        };
      }
    }
  }

  DesignPair raw;
  raw.W = w.matrix(n);
  raw.w_labels = w.labels;
  const std::set<std::string> w_names(w.labels.begin(), w.labels.end());
  ColumnSet z;
  for (std::size_t j = 0; j < p.cols.size(); ++j) {
    if (w_names.count(p.labels[j]) != 0) {
      raw.dropped.push_back(p.labels[j]);
    } else {
      z.add(std::move(p.cols[j]), p.labels[j]);
    }
  }
  raw.Z = z.matrix(n);
  raw.z_labels = z.labels;

  DesignPair out = screen_collinear(raw, spec.screen_tol);
  if (out.Z.cols() == 0) throw InputError("alternative adds no columns beyond the null design");
  if (n <= out.k()) {
    throw InputError("need more observations than parameters: n = " + std::to_string(n) +
                     ", k = " + std::to_string(out.k()));
  }
  return out;
}

ModelSpec simulation_model_spec(int terms, BasisFamily family) {
  if (terms < 4) throw InputError("simulation design needs at least 4 univariate terms, got " + std::to_string(terms));
  ModelSpec spec;
  const BasisSpec basis{family, terms, 3, KnotRule::kEmpiricalQuantile};
  spec.linear_vars = {"x1"};
  spec.series_vars = {{"x2", basis}};
  spec.recipe = AlternativeRecipe::kRestrictedTensor;
  spec.alternative_bases = {{"x1", basis}, {"x2", basis}};
  return spec;
}

DesignPair simulation_design(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, int terms, BasisFamily family) {
  const ModelSpec spec = simulation_model_spec(terms, family);
  Dataset data;
  data.add("x1", x1);
  data.add("x2", x2);
  return build_partially_linear(data, spec);
}

}  // namespace hclm
