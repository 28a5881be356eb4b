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
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "hclm/error.hpp"
#include "hclm/regress.hpp"

using namespace hclm;

TEST_CASE("mean fit") {
  const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 1);
  const Eigen::VectorXd y = (Eigen::VectorXd(3) << 1, 2, 3).finished();
  const FitResult fit = ols_fit(w, y);
  CHECK(fit.beta(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(fit.residuals(0) + 1.0) < 1e-14);
  CHECK(std::abs(fit.residuals(1)) < 1e-14);
  CHECK(std::abs(fit.residuals(2) - 1.0) < 1e-14);
}

TEST_CASE("response in the span of W has zero residuals") {
  const Eigen::MatrixXd w = test::random_design(30, 4, 1);
  const Eigen::VectorXd y = w * Eigen::Vector4d(1.0, -2.0, 0.5, 3.0);
  CHECK(ols_fit(w, y).residuals.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("coefficients match the normal-equations oracle") {
  const Eigen::MatrixXd w = test::random_design(50, 4, 2);
  const Eigen::VectorXd y = test::random_vector(50, 3);
  const Eigen::Matrix4d gram = w.transpose() * w;
  const Eigen::Vector4d oracle = gram.inverse() * (w.transpose() * y);
  const FitResult fit = ols_fit(w, y);
  CHECK(test::rel_diff(fit.beta, oracle) <= 1e-10);
  CHECK(test::rel_diff(fit.residuals, y - w * oracle) <= 1e-10);
}

TEST_CASE("residuals are orthogonal to W") {
  const Eigen::MatrixXd w = test::random_design(200, 6, 4);
  const Eigen::VectorXd y = 5.0 * test::random_vector(200, 5);
  const FitResult fit = ols_fit(w, y);
  const double bound = 1e-8 * w.norm() * y.norm() / 200.0;
  CHECK((w.transpose() * fit.residuals).cwiseAbs().maxCoeff() <= bound);
  CHECK(fit.residuals.norm() <= y.norm());
}

TEST_CASE("annihilator matches the dense projector") {
  const Eigen::MatrixXd w = test::random_design(100, 6, 6);
  const Projection proj(w);
  const Eigen::MatrixXd m = test::dense_annihilator(w);
  const Eigen::VectorXd u = test::random_vector(100, 7);
  CHECK(test::rel_diff(annihilate(proj, u), m * u) <= 1e-10);

  CHECK(annihilate(proj, w.col(3)).norm() <= 1e-12 * w.col(3).norm());
  const Eigen::VectorXd orth = m * test::random_vector(100, 8);
  CHECK(test::rel_diff(annihilate(proj, orth), orth) <= 1e-12);
}

TEST_CASE("annihilator is idempotent and symmetric") {
  const Eigen::MatrixXd w = test::random_design(80, 5, 9);
  const Projection proj(w);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Eigen::VectorXd u = test::random_vector(80, 100 + s);
    const Eigen::VectorXd v = test::random_vector(80, 200 + s);
    const Eigen::VectorXd mu = annihilate(proj, u);
    CHECK(test::rel_diff(annihilate(proj, mu), mu) <= 1e-10);
    CHECK(test::rel_diff(mu.dot(v), u.dot(annihilate(proj, v))) <= 1e-10);
  }
}

TEST_CASE("residuals are invariant to reparameterizing W") {
  const Eigen::MatrixXd w = test::random_design(60, 4, 10);
  const Eigen::MatrixXd a = test::random_matrix(4, 4, 11) + 3.0 * Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd y = test::random_vector(60, 12);
  CHECK(test::rel_diff(ols_fit(w, y).residuals, ols_fit(w * a, y).residuals) <= 1e-9);
}

TEST_CASE("residualize_block") {
  const Eigen::MatrixXd w = test::random_design(70, 3, 13);
  const Projection proj(w);
  Eigen::MatrixXd z = test::random_matrix(70, 4, 14);
  z.col(1) = w.col(2);
  const Eigen::MatrixXd zt = residualize_block(proj, z);
  CHECK(zt.col(1).norm() <= 1e-12 * w.col(2).norm());
  CHECK((w.transpose() * zt).cwiseAbs().maxCoeff() <= 1e-8 * w.norm() * z.norm());
  CHECK(test::rel_diff(zt, test::dense_annihilator(w) * z) <= 1e-10);
  CHECK(test::rel_diff(residualize_block(proj, zt), zt) <= 1e-12);
}

TEST_CASE("projection errors") {
  Eigen::MatrixXd w = test::random_design(20, 3, 15);
  w.col(2) = w.col(1) * 2.0;
  try {
    Projection p(w, {"1", "a", "b"});
    FAIL("expected rank failure");
  } catch (const RankDeficientError& e) {
    REQUIRE(e.columns().size() == 1);
    const std::string col = e.columns().front();
    CHECK((col == "a" || col == "b"));
  }
  CHECK_THROWS_AS(Projection(Eigen::MatrixXd::Ones(2, 2)), InputError);
  const Projection ok(test::random_design(20, 2, 16));
  CHECK_THROWS_AS(annihilate(ok, Eigen::VectorXd::Ones(19)), InputError);
}
