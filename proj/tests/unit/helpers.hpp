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

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "hclm/rng.hpp"

namespace hclm::test {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) { return random_matrix(n, 1, seed).col(0); }

/// Design with an intercept column followed by standard normal columns.
inline Eigen::MatrixXd random_design(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Eigen::MatrixXd w = random_matrix(rows, cols, seed);
  w.col(0).setOnes();
  return w;
}

/// I - W (W'W)^-1 W' formed explicitly.
inline Eigen::MatrixXd dense_annihilator(const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  const Eigen::MatrixXd gram_inv = (w.transpose() * w).inverse();
  return Eigen::MatrixXd::Identity(n, n) - w * gram_inv * w.transpose();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

}  // namespace hclm::test
