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

// Noise calibration against exact column sensitivities, the Laplace/Gaussian
// choice, and construction of private sketches.
//
// Noise is drawn from floating-point samplers. Continuous-noise guarantees do
// not transfer exactly to doubles (the least-significant-bit attack on naive
// Laplace samplers applies here); this library does not mitigate it.
//
// Each call to privatize() releases a fresh noisy view of x and spends
// privacy budget. Nothing here tracks composition across releases.

#ifndef DPJL_PRIVACY_HPP_
#define DPJL_PRIVACY_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "dpjl/core.hpp"
#include "dpjl/transforms.hpp"

namespace dpjl {

struct PrivacyParams {
  double epsilon = 1.0;
  // 0 means pure DP, which forces the Laplace mechanism.
  double delta = 0.0;
};

// Throws kInvalidPrivacy unless epsilon > 0 and 0 <= delta < 1.
void validate(const PrivacyParams& pp);

enum class NoiseKind { kLaplace, kGaussian };

const char* noise_kind_name(NoiseKind kind) noexcept;

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kLaplace;
  // Laplace b or Gaussian sigma. Zero means no noise is added.
  double scale = 0.0;

  static NoiseSpec laplace(double b) { return {NoiseKind::kLaplace, b}; }
  static NoiseSpec gaussian(double sigma) {
    return {NoiseKind::kGaussian, sigma};
  }

  // E[eta^2]: 2 b^2 or sigma^2.
  double second_moment() const noexcept;

  bool operator==(const NoiseSpec&) const = default;
};

struct SensitivityPair {
  double delta1 = 0.0;
  double delta2 = 0.0;

  // min(Delta1, Delta2 sqrt(ln(1/delta))); Delta1 when delta == 0.
  double m(double delta) const;
};

SensitivityPair sensitivities(const Transform& t);

// Laplace iff delta == 0 or Delta1 <= Delta2 sqrt(ln(1/delta)), i.e.
// delta <= exp(-Delta1^2 / Delta2^2). Ties go to Laplace.
NoiseKind select_mechanism(const SensitivityPair& sens, const PrivacyParams& pp);

// b = Delta1 / epsilon. Throws kInvalidPrivacy if epsilon <= 0,
// kInvalidArgument if delta1 < 0.
NoiseSpec calibrate_laplace(double delta1, double epsilon);

// sigma = Delta2 / epsilon * sqrt(2 ln(1.25 / delta)).
// Throws kGaussianNeedsDelta if delta == 0, kInvalidPrivacy if epsilon <= 0
// or delta outside (0, 1). epsilon >= 1 is accepted; see
// gaussian_outside_classical_regime().
NoiseSpec calibrate_gaussian(double delta2, double epsilon, double delta);

// The Gaussian calibration above is the classical one for epsilon < 1.
// Larger epsilon is allowed for benchmarking but flagged on the sketch.
constexpr bool gaussian_outside_classical_regime(double epsilon) noexcept {
  return epsilon >= 1.0;
}

enum class PerturbationSite { kOutput, kInput };

const char* site_name(PerturbationSite site) noexcept;

struct PrivateSketch {
  RealVector values;
  std::string transform_fingerprint;
  TransformType transform = TransformType::kSjlt;
  std::size_t d = 0;
  std::size_t s = 0;
  NoiseSpec noise;
  PerturbationSite site = PerturbationSite::kOutput;
  double epsilon = 0.0;
  double delta = 0.0;
  // Only "lpp" exists: every transform stores E||Tx||^2 = ||x||^2 values.
  std::string normalization = "lpp";
  bool gaussian_regime_flag = false;
  bool zero_noise_debug = false;

  std::size_t k() const noexcept { return values.size(); }
  bool pure_dp() const noexcept { return noise.kind == NoiseKind::kLaplace; }
};

// values = apply_transform(t, x) + eta with eta_i i.i.d. from spec. The
// caller is responsible for spec being calibrated to sensitivities(t).
// `fingerprint`, when non-empty, must be transform_fingerprint(t); passing it
// skips re-serializing t in loops over many inputs.
PrivateSketch privatize(const Transform& t, std::span<const double> x,
                        const NoiseSpec& spec, const PrivacyParams& pp,
                        Rng& rng, std::string_view fingerprint = {});

// sqrt(2 ln(1.25/delta)) / epsilon: the Gaussian scale for a map with
// l2-sensitivity 1.
double gaussian_sigma_floor(double epsilon, double delta);

// (1/sqrt(k)) Phi (x + eta) for a given input-space noise vector eta (dim d).
RealVector apply_with_input_noise(const FjltTransform& t,
                                  std::span<const double> x,
                                  std::span<const double> eta);

// Input perturbation: eta ~ N(0, sigma^2)^d is added to x before padding.
// Throws kInvalidScale if sigma is below gaussian_sigma_floor(pp).
PrivateSketch privatize_input_fjlt(const FjltTransform& t,
                                   std::span<const double> x, double sigma,
                                   const PrivacyParams& pp, Rng& rng,
                                   std::string_view fingerprint = {});

struct SketchOptions {
  PrivacyParams privacy;
  PerturbationSite site = PerturbationSite::kOutput;
  // Unset: choose with select_mechanism().
  std::optional<NoiseKind> mechanism;
  // Debug only: calibrate as usual but add no noise.
  bool zero_noise = false;
};

// Sensitivities, mechanism choice, calibration and privatization in one step.
// Input perturbation requires an FJLT and delta > 0.
PrivateSketch make_private_sketch(const Transform& t, std::span<const double> x,
                                  const SketchOptions& options, Rng& rng);

// Throws kIncompatibleSketches naming the first mismatched field.
void check_combinable(const PrivateSketch& a, const PrivateSketch& b);

std::string serialize_sketch(const PrivateSketch& sketch);
PrivateSketch parse_sketch(std::string_view json_text);

}  // namespace dpjl

#endif  // DPJL_PRIVACY_HPP_
