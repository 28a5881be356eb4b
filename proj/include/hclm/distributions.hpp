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

// Reference distributions for the test statistics.

namespace hclm {

double normal_cdf(double x);
/// 1 - normal_cdf(x), computed without cancellation.
double normal_sf(double x);
/// Inverse of normal_cdf on (0, 1); throws InputError outside.
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

double chisq_cdf(double x, double df);
double chisq_sf(double x, double df);
/// x with chisq_cdf(x, df) = p; throws InputError unless 0 < p < 1, df > 0.
double chisq_quantile(double p, double df);

}  // namespace hclm
