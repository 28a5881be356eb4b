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
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "hclm/basis.hpp"
#include "hclm/error.hpp"
#include "hclm/rng.hpp"

using namespace hclm;

namespace {

std::vector<double> uniform_draws(int n, double lo, double hi, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

}  // namespace

TEST_CASE("power basis small cases") {
  const std::vector<double> v{2.0};
  const BasisMatrix b = power_basis(v, 3);
  REQUIRE(b.cols() == 3);
  CHECK(b.values(0, 0) == 1.0);
  CHECK(b.values(0, 1) == 2.0);
  CHECK(b.values(0, 2) == 4.0);
  CHECK(b.labels == std::vector<std::string>{"1", "x", "x^2"});

  const std::vector<double> w{0.0, 1.0};
  const BasisMatrix c = power_basis(w, 1);
  CHECK(c.values.rows() == 2);
  CHECK(c.values.cols() == 1);
  CHECK(c.values.isOnes());
}

TEST_CASE("power basis columns equal repeated products") {
  const auto v = uniform_draws(100, -2.0, 2.0, 17);
  const BasisMatrix b = power_basis(v, 5, "z");
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 5; ++j) {
      double p = 1.0;
      for (int t = 0; t < j; ++t) p *= v[i];
      CHECK(b.values(i, j) == doctest::Approx(p).epsilon(1e-15));
    }
  }
  CHECK(b.labels[4] == "z^4");
}

TEST_CASE("power basis rejects bad input") {
  const std::vector<double> v{1.0, NAN};
  CHECK_THROWS_AS(power_basis(v, 3), InputError);
  const std::vector<double> ok{1.0};
  CHECK_THROWS_AS(power_basis(ok, 0), InputError);
}

TEST_CASE("quantile knots") {
  CHECK(quantile_knots(std::vector<double>{1, 2, 3, 4, 5}, 1) == std::vector<double>{3.0});
  CHECK(quantile_knots(std::vector<double>{1, 2, 3, 4}, 0).empty());

  const auto u = uniform_draws(1000, 0.0, 1.0, 5);
  const auto k = quantile_knots(u, 3);
  REQUIRE(k.size() == 3);
  std::vector<double> sorted = u;
  std::sort(sorted.begin(), sorted.end());
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(k[j] - 0.25 * (j + 1)) < 0.05);
    // Linear interpolation between order statistics at h = (n - 1) p.
    const double h = 999.0 * (j + 1) / 4.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double oracle = sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
    CHECK(k[j] == doctest::Approx(oracle).epsilon(1e-14));
  }

  for (int q = 1; q <= 10; ++q) {
    const auto kk = quantile_knots(u, q);
    CHECK(std::is_sorted(kk.begin(), kk.end()));
    CHECK(kk.front() >= sorted.front());
    CHECK(kk.back() <= sorted.back());
  }

  CHECK_THROWS_AS(quantile_knots(u, -1), InputError);
  CHECK_THROWS_AS(quantile_knots(std::vector<double>{1, 2}, 2), InputError);
  CHECK_THROWS_AS(quantile_knots(std::vector<double>{3, 3, 3}, 1), InputError);
  CHECK(quantile_knots(std::vector<double>{3, 3, 3}, 0).empty());
}

TEST_CASE("spline basis without knots equals the power basis") {
  const std::vector<double> v{-2, -1, 0, 1, 2, 3};
  const BasisMatrix s = spline_basis(v, 4, 3, {});
  const BasisMatrix p = power_basis(v, 4);
  CHECK(s.values == p.values);
  CHECK(s.labels == p.labels);

  BasisSpec spec{BasisFamily::kSpline, 4};
  CHECK(make_basis(v, spec).values == p.values);
}

TEST_CASE("spline basis truncated power evaluation") {
  const std::vector<double> v{0.0, 2.0};
  const std::vector<double> knots{1.0};
  const BasisMatrix s = spline_basis(v, 5, 3, knots);
  Eigen::MatrixXd expected(2, 5);
  expected << 1, 0, 0, 0, 0, 1, 2, 4, 8, 1;
  CHECK(s.values == expected);
  CHECK(s.labels.back() == "(x-1)+^3");
}

TEST_CASE("spline basis matches pointwise oracle") {
  const auto v = uniform_draws(200, -2.0, 2.0, 23);
  const auto knots = quantile_knots(v, 2);
  const BasisMatrix s = spline_basis(v, 6, 3, knots);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j <= 3; ++j) CHECK(s.values(i, j) == doctest::Approx(std::pow(v[i], j)).epsilon(1e-14));
    for (int k = 0; k < 2; ++k) {
      const double d = v[i] - knots[k];
      CHECK(s.values(i, 4 + k) == doctest::Approx(d > 0 ? d * d * d : 0.0).epsilon(1e-14));
    }
  }
  const BasisMatrix viaspec = make_basis(v, BasisSpec{BasisFamily::kSpline, 6});
  CHECK(test::rel_diff(viaspec.values, s.values) == 0.0);
}

TEST_CASE("spline basis argument checks") {
  const std::vector<double> v{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(spline_basis(v, 5, 3, {}), InputError);
  const std::vector<double> bad{1.5, 0.5};
  CHECK_THROWS_AS(spline_basis(v, 6, 3, bad), InputError);
  CHECK_THROWS_AS(BasisSpec({BasisFamily::kSpline, 3}).validate(), InputError);
  CHECK(BasisSpec{BasisFamily::kSpline, 7}.knot_count() == 3);
  CHECK(BasisSpec{BasisFamily::kPower, 7}.knot_count() == 0);
}

TEST_CASE("restricted interaction order") {
  CHECK(restricted_interaction_order(4) == 4);
  CHECK(restricted_interaction_order(5) == 5);
  CHECK(restricted_interaction_order(6) == 5);
  CHECK(restricted_interaction_order(7) == 5);
  CHECK(restricted_interaction_order(8) == 6);
  CHECK(restricted_interaction_order(9) == 7);
  int prev = 0;
  for (int a = 1; a <= 200; ++a) {
    const int r = restricted_interaction_order(a);
    CHECK(r >= prev);
    CHECK(r <= a);
    prev = r;
  }
}

TEST_CASE("tensor interactions") {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{4, 5, 6};
  const BasisMatrix t = tensor_interactions(power_basis(x, 2, "x"), power_basis(y, 2, "y"));
  REQUIRE(t.cols() == 1);
  CHECK(t.values(1, 0) == 10.0);
  CHECK(t.labels[0] == "x*y");

  const auto u = uniform_draws(50, -2, 2, 1);
  const auto w = uniform_draws(50, -2, 2, 2);
  CHECK(tensor_interactions(power_basis(u, 5), power_basis(w, 5)).cols() == 16);

  const BasisMatrix a = power_basis(u, 3, "u");
  const BasisMatrix b = power_basis(w, 4, "w");
  const BasisMatrix ab = tensor_interactions(a, b);
  REQUIRE(ab.cols() == 6);
  int c = 0;
  for (int i = 1; i < 3; ++i) {
    for (int j = 1; j < 4; ++j, ++c) {
      for (int r = 0; r < 50; ++r) CHECK(ab.values(r, c) == a.values(r, i) * b.values(r, j));
    }
  }
  CHECK_THROWS_AS(tensor_interactions(a, power_basis(std::vector<double>{1.0}, 2)), InputError);
}

TEST_CASE("basis family names") {
  CHECK(parse_basis_family("power") == BasisFamily::kPower);
  CHECK(parse_basis_family("spline") == BasisFamily::kSpline);
  CHECK(to_string(BasisFamily::kSpline) == "spline");
  CHECK_THROWS_AS(parse_basis_family("fourier"), InputError);
}
