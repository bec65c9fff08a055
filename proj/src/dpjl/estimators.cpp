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

#include "dpjl/estimators.hpp"

#include <charconv>
#include <cmath>

namespace dpjl {

const char* scheme_name(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::kSjltOut: return "sjlt_out";
    case Scheme::kFjltOut: return "fjlt_out";
    case Scheme::kFjltIn: return "fjlt_in";
    case Scheme::kIidOut: return "iid_out";
  }
  return "?";
}

Scheme scheme_of(const PrivateSketch& sketch) {
  switch (sketch.transform) {
    case TransformType::kSjlt: return Scheme::kSjltOut;
    case TransformType::kIid: return Scheme::kIidOut;
    case TransformType::kFjlt:
      return sketch.site == PerturbationSite::kInput ? Scheme::kFjltIn
                                                     : Scheme::kFjltOut;
  }
  return Scheme::kSjltOut;
}

const char* variance_kind_name(VarianceKind kind) noexcept {
  return kind == VarianceKind::kExact ? "exact" : "bound";
}

double noise_moment(const NoiseSpec& spec, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 1");
  if (n % 2 == 1) return 0.0;
  double coeff = 1.0;
  if (spec.kind == NoiseKind::kLaplace) {
    for (int i = 2; i <= n; ++i) coeff *= i;
  } else {
    for (int i = n - 1; i > 1; i -= 2) coeff *= i;
  }
  return coeff * std::pow(spec.scale, n);
}

double bias_term(Scheme scheme, const NoiseSpec& spec, std::size_t k,
                 std::size_t d) {
  if (scheme == Scheme::kFjltIn) {
    if (spec.kind != NoiseKind::kGaussian) {
      throw Error(ErrorCode::kSchemeMismatch,
                  "fjlt_in is defined for Gaussian input noise only");
    }
    return 2.0 * static_cast<double>(d) * spec.scale * spec.scale;
  }
  return 2.0 * static_cast<double>(k) * noise_moment(spec, 2);
}

AnalyticVariance analytic_variance(Scheme scheme, const NoiseSpec& spec,
                                   std::size_t k, std::size_t s_or_d,
                                   double dist_sq,
                                   std::optional<double> norm4_4) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const double kd = static_cast<double>(k);
  const double z4 = dist_sq * dist_sq;
  AnalyticVariance out;

  if (scheme == Scheme::kFjltIn) {
    if (spec.kind != NoiseKind::kGaussian) {
      throw Error(ErrorCode::kSchemeMismatch,
                  "fjlt_in is defined for Gaussian input noise only");
    }
    const double d = static_cast<double>(s_or_d);
    const double s2 = spec.scale * spec.scale;
    const double s4 = s2 * s2;
    // ||z + w||^2 with w ~ N(0, 2 sigma^2)^d: mean ||z||^2 + 2 d sigma^2,
    // variance 8 sigma^2 ||z||^2 + 8 d sigma^4.
    const double v_mean = dist_sq + 2.0 * d * s2;
    const double v_var = 8.0 * s2 * dist_sq + 8.0 * d * s4;
    out.transform_term = 3.0 / kd * z4;
    out.value = 3.0 / kd * (v_mean * v_mean + v_var) + v_var;
    out.noise_term = out.value - out.transform_term;
    out.kind = VarianceKind::kBound;
    return out;
  }

  switch (scheme) {
    case Scheme::kSjltOut:
      if (norm4_4) {
        out.transform_term = 2.0 / kd * (z4 - *norm4_4);
        out.kind = VarianceKind::kExact;
      } else {
        out.transform_term = 2.0 / kd * z4;
        out.kind = VarianceKind::kBound;
      }
      break;
    case Scheme::kIidOut:
      out.transform_term = 2.0 / kd * z4;
      out.kind = VarianceKind::kExact;
      break;
    case Scheme::kFjltOut:
      out.transform_term = 3.0 / kd * z4;
      out.kind = VarianceKind::kBound;
      break;
    case Scheme::kFjltIn:
      break;
  }
  const double m2 = noise_moment(spec, 2);
  const double m4 = noise_moment(spec, 4);
  out.noise_term = 8.0 * m2 * dist_sq + 2.0 * kd * (m4 + m2 * m2);
  out.value = out.transform_term + out.noise_term;
  return out;
}

EstimateReport estimate_sqdist(const PrivateSketch& a, const PrivateSketch& b,
                               bool clamp_at_zero) {
  check_combinable(a, b);
  EstimateReport r;
  r.scheme = scheme_of(a);
  r.k = a.k();
  r.s = a.s;
  r.epsilon = a.epsilon;
  r.delta = a.delta;
  r.bias_term = bias_term(r.scheme, a.noise, a.k(), a.d);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.k(); ++i) {
    const double diff = a.values[i] - b.values[i];
    acc += diff * diff;
  }
  r.estimate = acc - r.bias_term;
  if (clamp_at_zero && r.estimate < 0.0) r.estimate = 0.0;
  return r;
}

std::size_t optimal_k(double nu, double epsilon, double delta1, double c_opt) {
  if (!(nu > 0.0)) throw Error(ErrorCode::kInvalidArgument, "nu must be > 0");
  if (!(epsilon > 0.0) || !(delta1 > 0.0) || !(c_opt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "epsilon, Delta1 and c_opt must be > 0");
  }
  const double k = std::ceil(c_opt * nu * epsilon * epsilon / (delta1 * delta1));
  return static_cast<std::size_t>(std::max(k, 1.0));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string estimate_csv_header() {
  return "scheme,k,s,epsilon,delta,estimate,bias_term,analytic_variance,"
         "variance_kind";
}

std::string estimate_csv_row(const EstimateReport& r) {
  std::string row = scheme_name(r.scheme);
  row += ',' + std::to_string(r.k) + ',' + std::to_string(r.s) + ',' +
         format_double(r.epsilon) + ',' + format_double(r.delta) + ',' +
         format_double(r.estimate) + ',' + format_double(r.bias_term) + ',';
  if (r.analytic_variance) {
    row += format_double(*r.analytic_variance);
    row += ',';
    row += variance_kind_name(r.variance_kind);
  } else {
    row += ',';
  }
  return row;
}

}  // namespace dpjl
