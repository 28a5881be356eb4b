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

#include "hclm/regress.hpp"

#include "hclm/error.hpp"
#include "hclm/kernels.hpp"

namespace hclm {

Projection::Projection(const Eigen::MatrixXd& W, const std::vector<std::string>& labels) {
  const Eigen::Index n = W.rows();
  const Eigen::Index m = W.cols();
  if (m == 0) throw InputError("null design has no columns");
  if (n <= m) {
    throw InputError("need more observations than null regressors (n = " + std::to_string(n) +
                     ", m = " + std::to_string(m) + ")");
  }
  if (!W.allFinite()) throw InputError("null design contains non-finite values");
  qr_.setThreshold(kRankThreshold);
  qr_.compute(W);
  if (qr_.rank() < m) {
    std::vector<std::string> bad;
    const auto& perm = qr_.colsPermutation().indices();
    for (Eigen::Index j = qr_.rank(); j < m; ++j) {
      const auto col = static_cast<std::size_t>(perm[j]);
      bad.push_back(col < labels.size() ? labels[col] : "W[" + std::to_string(col) + "]");
    }
    std::string msg = "null design W is rank deficient (rank " + std::to_string(qr_.rank()) + " of " +
                      std::to_string(m) + "); offending columns:";
    for (const auto& b : bad) msg += " " + b;
    throw RankDeficientError(msg, std::move(bad));
  }
  q_ = qr_.householderQ() * Eigen::MatrixXd::Identity(n, m);
}

Eigen::VectorXd Projection::coefficients(const Eigen::VectorXd& y) const {
  if (y.size() != rows()) throw InputError("coefficients: length mismatch");
  return qr_.solve(y);
}

void Projection::annihilate_in_place(std::span<double> u, std::span<double> scratch) const {
  if (static_cast<Eigen::Index>(u.size()) != rows()) {
    throw InputError("annihilate: vector has length " + std::to_string(u.size()) + ", expected " +
                     std::to_string(rows()));
  }
  if (static_cast<Eigen::Index>(scratch.size()) < cols()) throw InputError("annihilate: scratch too small");
  const kernels::ColMajorView view{q_.data(), static_cast<std::size_t>(q_.rows()), static_cast<std::size_t>(q_.cols()),
                                   static_cast<std::size_t>(q_.rows())};
  kernels::active().project_out(view, u.data(), scratch.data());
}

FitResult ols_fit(const Eigen::MatrixXd& W, const Eigen::VectorXd& y, const std::vector<std::string>& labels) {
  if (y.size() != W.rows()) throw InputError("ols_fit: Y and W have different row counts");
  if (!y.allFinite()) throw InputError("ols_fit: response contains non-finite values");
  FitResult fit;
  auto proj = std::make_shared<const Projection>(W, labels);
  fit.beta = proj->coefficients(y);
  fit.residuals = annihilate(*proj, y);
  fit.projection = std::move(proj);
  return fit;
}

Eigen::VectorXd annihilate(const Projection& projection, const Eigen::VectorXd& u) {
  Eigen::VectorXd out = u;
  Eigen::VectorXd scratch(projection.cols());
  projection.annihilate_in_place({out.data(), static_cast<std::size_t>(out.size())},
                                 {scratch.data(), static_cast<std::size_t>(scratch.size())});
  return out;
}

Eigen::MatrixXd residualize_block(const Projection& projection, const Eigen::MatrixXd& Z) {
  if (Z.rows() != projection.rows() && Z.cols() > 0) {
    throw InputError("residualize_block: Z has " + std::to_string(Z.rows()) + " rows, expected " +
                     std::to_string(projection.rows()));
  }
  Eigen::MatrixXd out = Z;
  Eigen::VectorXd scratch(projection.cols());
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    projection.annihilate_in_place({out.col(j).data(), static_cast<std::size_t>(out.rows())},
                                   {scratch.data(), static_cast<std::size_t>(scratch.size())});
  }
  return out;
}

}  // namespace hclm
