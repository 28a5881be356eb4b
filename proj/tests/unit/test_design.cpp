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


#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "hclm/design.hpp"
#include "hclm/error.hpp"
#include "hclm/mc.hpp"
#include "hclm/rng.hpp"

using namespace hclm;

namespace {

Sample draw(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  return gen_sample(n, Hypothesis::kNull, rng);
}

Eigen::Index rank_of(const Eigen::MatrixXd& m) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  return qr.rank();
}

Eigen::MatrixXd joined(const DesignPair& d) {
  Eigen::MatrixXd p(d.n(), d.k());
  p << d.W, d.Z;
  return p;
}

}  // namespace

TEST_CASE("simulation design term counts") {
  const Sample s = draw(1000, 1);
  const std::array<std::array<int, 4>, 6> expected{{{4, 5, 16, 11},
                                                    {5, 6, 25, 19},
                                                    {6, 7, 27, 20},
                                                    {7, 8, 29, 21},
                                                    {8, 9, 40, 31},
                                                    {9, 10, 53, 43}}};
  for (BasisFamily family : {BasisFamily::kPower, BasisFamily::kSpline}) {
    for (const auto& row : expected) {
      CAPTURE(row[0]);
      const DesignPair d = simulation_design(s.x1, s.x2, row[0], family);
      CHECK(d.m() == row[1]);
      CHECK(d.k() == row[2]);
      CHECK(d.r() == row[3]);
      const int abar = restricted_interaction_order(row[0]);
      CHECK(d.k() == 2 * row[0] - 1 + (abar - 1) * (abar - 1));
      for (const auto& label : d.dropped) {
        CHECK(std::find(d.w_labels.begin(), d.w_labels.end(), label) != d.w_labels.end());
      }
      CHECK(static_cast<int>(d.w_labels.size()) == d.m());
      CHECK(static_cast<int>(d.z_labels.size()) == d.r());
    }
  }
}

TEST_CASE("simulation design with four terms spans the full tensor product") {
  const Sample s = draw(300, 2);
  const DesignPair d = simulation_design(s.x1, s.x2, 4, BasisFamily::kPower);
  Eigen::MatrixXd full(300, 16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      full.col(4 * i + j) = (s.x1.array().pow(i) * s.x2.array().pow(j)).matrix();
    }
  }
  const Eigen::MatrixXd p = joined(d);
  Eigen::MatrixXd both(300, 32);
  both << p, full;
  CHECK(rank_of(p) == 16);
  CHECK(rank_of(full) == 16);
  CHECK(rank_of(both) == 16);
}

TEST_CASE("simulation design rejects too few terms") {
  const Sample s = draw(100, 3);
  CHECK_THROWS_AS(simulation_design(s.x1, s.x2, 3, BasisFamily::kPower), InputError);
}

TEST_CASE("additive alternative in the linear variable") {
  Dataset data;
  data.add("x", (Eigen::VectorXd(6) << -1.0, -0.5, 0.0, 0.5, 1.0, 2.0).finished());
  ModelSpec spec;
  spec.linear_vars = {"x"};
  spec.recipe = AlternativeRecipe::kAdditiveOnly;
  spec.alternative_bases = {{"x", BasisSpec{BasisFamily::kPower, 4}}};
  const DesignPair d = build_partially_linear(data, spec);
  CHECK(d.w_labels == std::vector<std::string>{"1", "x"});
  CHECK(d.z_labels == std::vector<std::string>{"x^2", "x^3"});
  const Eigen::VectorXd& x = data.at("x");
  CHECK(d.Z.col(0) == x.cwiseProduct(x));
  CHECK(d.Z.col(1) == x.cwiseProduct(x).cwiseProduct(x));
}

TEST_CASE("build_partially_linear reproduces the simulation recipe") {
  const Sample s = draw(500, 4);
  Dataset data;
  data.add("x1", s.x1);
  data.add("x2", s.x2);
  for (int a = 4; a <= 9; ++a) {
    const DesignPair via_spec = build_partially_linear(data, simulation_model_spec(a, BasisFamily::kPower));
    const DesignPair direct = simulation_design(s.x1, s.x2, a, BasisFamily::kPower);
    CHECK(via_spec.W == direct.W);
    CHECK(via_spec.Z == direct.Z);
    CHECK(via_spec.z_labels == direct.z_labels);
  }
  const DesignPair again = build_partially_linear(data, simulation_model_spec(6, BasisFamily::kSpline));
  const DesignPair again2 = build_partially_linear(data, simulation_model_spec(6, BasisFamily::kSpline));
  CHECK(again.W == again2.W);
  CHECK(again.Z == again2.Z);
  CHECK(again.z_labels == again2.z_labels);
}

TEST_CASE("model spec validation and design errors") {
  Dataset data;
  data.add("x", test::random_vector(20, 1));
  data.add("z", test::random_vector(20, 2));

  ModelSpec empty;
  CHECK_THROWS_AS(empty.validate(), InputError);

  ModelSpec dup;
  dup.linear_vars = {"x"};
  dup.series_vars = {{"x", BasisSpec{BasisFamily::kPower, 3}}};
  CHECK_THROWS_AS(dup.validate(), InputError);

  ModelSpec missing;
  missing.linear_vars = {"nope"};
  missing.recipe = AlternativeRecipe::kCustom;
  missing.custom_columns = {"x^2"};
  CHECK_THROWS_AS(build_partially_linear(data, missing), InputError);

  Dataset wide;
  ModelSpec too_big;
  too_big.recipe = AlternativeRecipe::kCustom;
  for (int j = 0; j < 19; ++j) {
    const std::string name = "c" + std::to_string(j);
    wide.add(name, test::random_vector(20, 300 + j));
    if (j == 0) too_big.linear_vars.push_back(name);
    else too_big.custom_columns.push_back(name);
  }
  CHECK_THROWS_AS(build_partially_linear(wide, too_big), InputError);

  ModelSpec nothing_new;
  nothing_new.linear_vars = {"x"};
  nothing_new.recipe = AlternativeRecipe::kCustom;
  nothing_new.custom_columns = {"x"};
  CHECK_THROWS_AS(build_partially_linear(data, nothing_new), InputError);
}

TEST_CASE("custom columns are monomials") {
  Dataset data;
  data.add("a", (Eigen::VectorXd(4) << 1, 2, 3, 4).finished());
  data.add("b", (Eigen::VectorXd(4) << 2, 1, 0, -1).finished());
  const Eigen::VectorXd v = evaluate_monomial(data, "a^2*b");
  CHECK(v == (Eigen::VectorXd(4) << 2, 4, 0, -16).finished());
  CHECK(evaluate_monomial(data, "b") == data.at("b"));
  CHECK_THROWS_AS(evaluate_monomial(data, "a^x"), InputError);
  CHECK_THROWS_AS(evaluate_monomial(data, ""), InputError);
}

TEST_CASE("screening drops copies and keeps full-rank designs") {
  const Eigen::MatrixXd w = test::random_design(40, 3, 5);
  const Eigen::MatrixXd z0 = test::random_matrix(40, 4, 6);

  DesignPair d;
  d.W = w;
  d.w_labels = {"1", "w1", "w2"};
  d.Z.resize(40, 6);
  d.Z << z0, w.col(1), z0.col(2);
  d.z_labels = {"z0", "z1", "z2", "z3", "copy_w1", "copy_z2"};
  ScreenReport report;
  const DesignPair s = screen_collinear(d, 1e-10, &report);
  CHECK(s.r() == 4);
  CHECK(s.z_labels == std::vector<std::string>{"z0", "z1", "z2", "z3"});
  CHECK(report.dropped == std::vector<std::string>{"copy_w1", "copy_z2"});
  CHECK(s.dropped == report.dropped);

  DesignPair clean;
  clean.W = w;
  clean.Z = z0;
  const DesignPair kept = screen_collinear(clean, 1e-10);
  CHECK(kept.r() == 4);
  CHECK(rank_of(joined(kept)) == kept.k());

  DesignPair bad_w = clean;
  bad_w.W.col(2) = 2.0 * bad_w.W.col(1);
  CHECK_THROWS_AS(screen_collinear(bad_w, 1e-10), RankDeficientError);
}

TEST_CASE("screened simulation designs are well conditioned") {
  const Sample s = draw(1000, 9);
  const double tol = 1e-10;
  for (int a = 4; a <= 9; ++a) {
    for (BasisFamily family : {BasisFamily::kPower, BasisFamily::kSpline}) {
      CAPTURE(a);
      CAPTURE(to_string(family));
      const DesignPair d = simulation_design(s.x1, s.x2, a, family);
      Eigen::MatrixXd p = joined(d);
      for (Eigen::Index j = 0; j < p.cols(); ++j) p.col(j).normalize();

      // Every survivor keeps a relative residual of at least sqrt(tol) against
      // the columns before it.
      for (Eigen::Index j = d.m(); j < p.cols(); ++j) {
        const Eigen::MatrixXd before = p.leftCols(j);
        const Eigen::VectorXd resid = test::dense_annihilator(before) * p.col(j);
        CHECK(resid.norm() >= std::sqrt(tol));
      }

      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(p);
      const auto& sv = svd.singularValues();
      const double ratio = sv(sv.size() - 1) / sv(0);
      CHECK(ratio > tol);
      // The nine-term spline design carries closely spaced truncated powers and
      // sits just below the sqrt(tol) ratio.
      if (family == BasisFamily::kPower || a <= 8) CHECK(ratio > std::sqrt(tol));
    }
  }
}

TEST_CASE("recipe names") {
  CHECK(parse_alternative_recipe("full_tensor") == AlternativeRecipe::kFullTensor);
  CHECK(parse_alternative_recipe("restricted_tensor") == AlternativeRecipe::kRestrictedTensor);
  CHECK(parse_alternative_recipe("additive_only") == AlternativeRecipe::kAdditiveOnly);
  CHECK(parse_alternative_recipe("custom") == AlternativeRecipe::kCustom);
  CHECK(to_string(AlternativeRecipe::kFullTensor) == "full_tensor");
  CHECK_THROWS_AS(parse_alternative_recipe("other"), InputError);
}
