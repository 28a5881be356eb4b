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

#include "hclm/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hclm/error.hpp"

namespace hclm {
namespace {

void require_finite(std::span<const double> v, const char* who) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw InputError(std::string(who) + ": non-finite input at index " + std::to_string(i));
    }
  }
}

std::string power_label(std::string_view var, int degree) {
  if (degree == 0) return "1";
  if (degree == 1) return std::string(var);
  return std::string(var) + "^" + std::to_string(degree);
}

std::string knot_label(std::string_view var, double knot, int order) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", knot);
  return "(" + std::string(var) + "-" + buf + ")+^" + std::to_string(order);
}

bool is_constant_column(const BasisMatrix& b) {
  if (b.cols() == 0) return false;
  return (b.values.col(0).array() == 1.0).all();
}

}  // namespace

std::string_view to_string(BasisFamily family) {
  return family == BasisFamily::kPower ? "power" : "spline";
}

BasisFamily parse_basis_family(std::string_view text) {
  if (text == "power") return BasisFamily::kPower;
  if (text == "spline" || text == "splines") return BasisFamily::kSpline;
  throw InputError("unknown basis family '" + std::string(text) + "' (expected power or spline)");
}

void BasisSpec::validate() const {
  if (terms < 1) throw InputError("basis needs at least one term, got " + std::to_string(terms));
  if (family == BasisFamily::kSpline) {
    if (spline_order < 1) throw InputError("spline order must be positive");
    if (terms < spline_order + 1) {
      throw InputError("spline basis of order " + std::to_string(spline_order) + " needs at least " +
                       std::to_string(spline_order + 1) + " terms, got " + std::to_string(terms));
    }
  }
}

BasisMatrix power_basis(std::span<const double> v, int terms, std::string_view var) {
  if (terms < 1) throw InputError("power_basis: number of terms must be >= 1");
  if (v.empty()) throw InputError("power_basis: empty input");
  require_finite(v, "power_basis");
  const auto n = static_cast<Eigen::Index>(v.size());
  BasisMatrix out;
  out.values.resize(n, terms);
  out.values.col(0).setOnes();
  for (int j = 1; j < terms; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out.values(i, j) = out.values(i, j - 1) * v[i];
  }
  out.labels.reserve(terms);
  for (int j = 0; j < terms; ++j) out.labels.push_back(power_label(var, j));
  return out;
}

std::vector<double> quantile_knots(std::span<const double> v, int count) {
  if (count < 0) throw InputError("quantile_knots: negative knot count");
  if (count == 0) return {};
  if (static_cast<std::size_t>(count) >= v.size()) {
    throw InputError("quantile_knots: need more observations than knots");
  }
  require_finite(v, "quantile_knots");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw InputError("quantile_knots: all observations are equal, knots are not identified");
  }
  const double last = static_cast<double>(sorted.size() - 1);
  std::vector<double> knots(count);
  for (int k = 1; k <= count; ++k) {
    const double h = last * static_cast<double>(k) / static_cast<double>(count + 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    knots[k - 1] = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  }
  return knots;
}

BasisMatrix spline_basis(std::span<const double> v, int terms, int order, std::span<const double> knots,
                         std::string_view var) {
  BasisSpec spec{BasisFamily::kSpline, terms, order, KnotRule::kEmpiricalQuantile};
  spec.validate();
  if (static_cast<int>(knots.size()) != spec.knot_count()) {
    throw InputError("spline_basis: expected " + std::to_string(spec.knot_count()) + " knots, got " +
                     std::to_string(knots.size()));
  }
  if (!std::is_sorted(knots.begin(), knots.end())) throw InputError("spline_basis: knots must be nondecreasing");
  require_finite(knots, "spline_basis");

  BasisMatrix out = power_basis(v, order + 1, var);
  const auto n = out.rows();
  out.values.conservativeResize(n, terms);
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(order + 1 + k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = v[i] - knots[k];
      double p = 0.0;
      if (d > 0.0) {
        p = 1.0;
        for (int e = 0; e < order; ++e) p *= d;
      }
      out.values(i, col) = p;
    }
    out.labels.push_back(knot_label(var, knots[k], order));
  }
  return out;
}

BasisMatrix make_basis(std::span<const double> v, const BasisSpec& spec, std::string_view var) {
  spec.validate();
  if (spec.family == BasisFamily::kPower) return power_basis(v, spec.terms, var);
  const auto knots = quantile_knots(v, spec.knot_count());
  return spline_basis(v, spec.terms, spec.spline_order, knots, var);
}

int restricted_interaction_order(int terms) {
  if (terms <= 5) return terms;
  if (terms <= 7) return 5;
  // floor(a^0.9); nudged so exact integer powers are not lost to rounding.
  return static_cast<int>(std::floor(std::pow(static_cast<double>(terms), 0.9) + 1e-12));
}

BasisMatrix tensor_interactions(const BasisMatrix& lhs, const BasisMatrix& rhs) {
  if (lhs.rows() != rhs.rows()) {
    throw InputError("tensor_interactions: row counts differ (" + std::to_string(lhs.rows()) + " vs " +
                     std::to_string(rhs.rows()) + ")");
  }
  if (!is_constant_column(lhs) || !is_constant_column(rhs)) {
    throw InputError("tensor_interactions: both bases must carry the constant as column 0");
  }
  const Eigen::Index p = lhs.cols() - 1;
  const Eigen::Index q = rhs.cols() - 1;
  BasisMatrix out;
  out.values.resize(lhs.rows(), p * q);
  out.labels.reserve(static_cast<std::size_t>(p * q));
  Eigen::Index c = 0;
  for (Eigen::Index i = 1; i <= p; ++i) {
    for (Eigen::Index j = 1; j <= q; ++j, ++c) {
      out.values.col(c) = lhs.values.col(i).cwiseProduct(rhs.values.col(j));
      out.labels.push_back(lhs.labels[i] + "*" + rhs.labels[j]);
    }
  }
  return out;
}

}  // namespace hclm
