//
// Copyright 2026 The dpjl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Bias-corrected squared-distance estimators over pairs of private sketches.
//
// For output perturbation with noise eta_* ~ D on each of the k coordinates,
//
//   E = ||u - v||^2 - 2k E[eta_*^2]
//   Var E = Var ||S(x - y)||^2 + 8 E[eta_*^2] ||x - y||^2
//           + 2k (E[eta_*^4] + E[eta_*^2]^2).
//
// For input perturbation of the FJLT with N(0, sigma^2) on each of the d
// input coordinates the bias is 2 d sigma^2.

#ifndef DPJL_ESTIMATORS_HPP_
#define DPJL_ESTIMATORS_HPP_

#include <cstddef>
#include <optional>
#include <string>

#include "dpjl/privacy.hpp"

namespace dpjl {

enum class Scheme { kSjltOut, kFjltOut, kFjltIn, kIidOut };

const char* scheme_name(Scheme scheme) noexcept;
Scheme scheme_of(const PrivateSketch& sketch);

enum class VarianceKind { kExact, kBound };

const char* variance_kind_name(VarianceKind kind) noexcept;

// E[eta^n]: n! b^n for Laplace, (n-1)!! sigma^n for Gaussian; 0 for odd n.
// Throws kInvalidArgument for n < 1.
double noise_moment(const NoiseSpec& spec, int n);

// 2k E[eta^2] for output-perturbed schemes, 2 d sigma^2 for fjlt_in.
// Throws kSchemeMismatch if fjlt_in is paired with Laplace noise.
double bias_term(Scheme scheme, const NoiseSpec& spec, std::size_t k,
                 std::size_t d);

struct AnalyticVariance {
  double value = 0.0;
  double transform_term = 0.0;
  double noise_term = 0.0;
  VarianceKind kind = VarianceKind::kExact;
};

// dist_sq is ||x - y||_2^2. norm4_4 (||x - y||_4^4) makes the SJLT transform
// term exact; without it the (2/k)||x - y||^4 bound is used. s_or_d is the
// SJLT sparsity (unused in the formula) or, for fjlt_in, the input dim d.
//
// FJLT rows are upper bounds, valid when q >= 1 / (d_pad/9 + 1). The fjlt_in
// bound is (3/k) E||z + w||^4 + 8 sigma^2 ||z||^2 + 8 d sigma^4 with
// w ~ N(0, 2 sigma^2)^d.
AnalyticVariance analytic_variance(Scheme scheme, const NoiseSpec& spec,
                                   std::size_t k, std::size_t s_or_d,
                                   double dist_sq,
                                   std::optional<double> norm4_4 = {});

struct EstimateReport {
  double estimate = 0.0;
  double bias_term = 0.0;
  std::optional<double> analytic_variance;
  VarianceKind variance_kind = VarianceKind::kExact;
  Scheme scheme = Scheme::kSjltOut;
  std::size_t k = 0;
  std::size_t s = 0;
  double epsilon = 0.0;
  double delta = 0.0;
};

// ||a - b||^2 - bias_term. O(k). Throws kIncompatibleSketches.
// Negative estimates are returned unchanged unless clamp_at_zero is set,
// which gives up unbiasedness.
EstimateReport estimate_sqdist(const PrivateSketch& a, const PrivateSketch& b,
                               bool clamp_at_zero = false);

// ceil(c_opt * nu * epsilon^2 / Delta1^2). Advisory. Throws kInvalidArgument
// unless nu > 0, Delta1 > 0, epsilon > 0.
std::size_t optimal_k(double nu, double epsilon, double delta1,
                      double c_opt = 1.0);

std::string estimate_csv_header();
std::string estimate_csv_row(const EstimateReport& report);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace dpjl

#endif  // DPJL_ESTIMATORS_HPP_
