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

#include "dpjl/privacy.hpp"

#include <cmath>

#include "json.hpp"

namespace dpjl {

void validate(const PrivacyParams& pp) {
  if (!(pp.epsilon > 0.0) || !std::isfinite(pp.epsilon)) {
    throw Error(ErrorCode::kInvalidPrivacy, "epsilon must be > 0");
  }
  if (!(pp.delta >= 0.0 && pp.delta < 1.0)) {
    throw Error(ErrorCode::kInvalidPrivacy, "delta must lie in [0, 1)");
  }
}

const char* noise_kind_name(NoiseKind kind) noexcept {
  return kind == NoiseKind::kLaplace ? "laplace" : "gaussian";
}

const char* site_name(PerturbationSite site) noexcept {
  return site == PerturbationSite::kOutput ? "output" : "input";
}

double NoiseSpec::second_moment() const noexcept {
  return kind == NoiseKind::kLaplace ? 2.0 * scale * scale : scale * scale;
}

double SensitivityPair::m(double delta) const {
  if (delta <= 0.0) return delta1;
  return std::min(delta1, delta2 * std::sqrt(std::log(1.0 / delta)));
}

SensitivityPair sensitivities(const Transform& t) {
  return {column_sensitivity(t, 1), column_sensitivity(t, 2)};
}

NoiseKind select_mechanism(const SensitivityPair& sens,
                           const PrivacyParams& pp) {
  if (pp.delta <= 0.0) return NoiseKind::kLaplace;
  return sens.delta1 <= sens.delta2 * std::sqrt(std::log(1.0 / pp.delta))
             ? NoiseKind::kLaplace
             : NoiseKind::kGaussian;
}

NoiseSpec calibrate_laplace(double delta1, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidPrivacy, "epsilon must be > 0");
  }
  if (!(delta1 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Delta1 must be >= 0");
  }
  return NoiseSpec::laplace(delta1 / epsilon);
}

double gaussian_sigma_floor(double epsilon, double delta) {
  if (delta == 0.0) {
    throw Error(ErrorCode::kGaussianNeedsDelta,
                "the Gaussian mechanism needs delta > 0");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidPrivacy, "epsilon must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidPrivacy, "delta must lie in (0, 1)");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

NoiseSpec calibrate_gaussian(double delta2, double epsilon, double delta) {
  const double floor = gaussian_sigma_floor(epsilon, delta);
  if (!(delta2 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Delta2 must be >= 0");
  }
  return NoiseSpec::gaussian(delta2 * floor);
}

namespace {

void add_noise(std::span<double> values, const NoiseSpec& spec, Rng& rng) {
  if (spec.scale == 0.0) return;
  if (spec.kind == NoiseKind::kLaplace) {
    for (double& v : values) v += sample_laplace(spec.scale, rng);
  } else {
    for (double& v : values) v += sample_gaussian(spec.scale, rng);
  }
}

PrivateSketch sketch_shell(TransformType type, std::size_t d, std::size_t s,
                           std::string fingerprint, const NoiseSpec& spec,
                           const PrivacyParams& pp, PerturbationSite site) {
  PrivateSketch out;
  out.transform_fingerprint = std::move(fingerprint);
  out.transform = type;
  out.d = d;
  out.s = s;
  out.noise = spec;
  out.site = site;
  out.epsilon = pp.epsilon;
  out.delta = pp.delta;
  out.gaussian_regime_flag = spec.kind == NoiseKind::kGaussian &&
                             gaussian_outside_classical_regime(pp.epsilon);
  return out;
}

}  // namespace

PrivateSketch privatize(const Transform& t, std::span<const double> x,
                        const NoiseSpec& spec, const PrivacyParams& pp,
                        Rng& rng, std::string_view fingerprint) {
  validate(pp);
  if (!(spec.scale >= 0.0) || !std::isfinite(spec.scale)) {
    throw Error(ErrorCode::kInvalidScale, "noise scale must be >= 0");
  }
  PrivateSketch out =
      sketch_shell(transform_type(t), input_dim(t), sparsity(t),
                   fingerprint.empty() ? transform_fingerprint(t)
                                       : std::string(fingerprint),
                   spec, pp, PerturbationSite::kOutput);
  out.values = apply_transform(t, x);
  add_noise(out.values, spec, rng);
  return out;
}

RealVector apply_with_input_noise(const FjltTransform& t,
                                  std::span<const double> x,
                                  std::span<const double> eta) {
  if (x.size() != t.d() || eta.size() != t.d()) {
    throw Error(ErrorCode::kDimMismatch, "input and noise must have dim d");
  }
  RealVector noisy(x.begin(), x.end());
  for (std::size_t j = 0; j < noisy.size(); ++j) noisy[j] += eta[j];
  return t.apply(noisy);
}

PrivateSketch privatize_input_fjlt(const FjltTransform& t,
                                   std::span<const double> x, double sigma,
                                   const PrivacyParams& pp, Rng& rng,
                                   std::string_view fingerprint) {
  validate(pp);
  const double floor = gaussian_sigma_floor(pp.epsilon, pp.delta);
  if (!(sigma >= floor)) {
    throw Error(ErrorCode::kInvalidScale,
                "sigma " + std::to_string(sigma) +
                    " is below the calibration floor " + std::to_string(floor));
  }
  RealVector eta(t.d());
  for (double& e : eta) e = sample_gaussian(sigma, rng);
  PrivateSketch out = sketch_shell(
      TransformType::kFjlt, t.d(), 0,
      fingerprint.empty() ? transform_fingerprint(Transform(t))
                          : std::string(fingerprint),
      NoiseSpec::gaussian(sigma), pp, PerturbationSite::kInput);
  out.values = apply_with_input_noise(t, x, eta);
  return out;
}

PrivateSketch make_private_sketch(const Transform& t, std::span<const double> x,
                                  const SketchOptions& options, Rng& rng) {
  const PrivacyParams& pp = options.privacy;
  validate(pp);
  if (options.site == PerturbationSite::kInput) {
    const auto* fjlt = std::get_if<FjltTransform>(&t);
    if (fjlt == nullptr) {
      throw Error(ErrorCode::kSchemeMismatch,
                  "input perturbation is only defined for the FJLT");
    }
    if (options.mechanism == NoiseKind::kLaplace) {
      throw Error(ErrorCode::kSchemeMismatch,
                  "input perturbation uses the Gaussian mechanism");
    }
    const double sigma = gaussian_sigma_floor(pp.epsilon, pp.delta);
    if (!options.zero_noise) return privatize_input_fjlt(*fjlt, x, sigma, pp, rng);
    PrivateSketch out = sketch_shell(
        TransformType::kFjlt, fjlt->d(), 0, transform_fingerprint(t),
        NoiseSpec::gaussian(sigma), pp, PerturbationSite::kInput);
    out.values = fjlt->apply(x);
    out.noise.scale = 0.0;
    out.zero_noise_debug = true;
    return out;
  }

  const SensitivityPair sens = sensitivities(t);
  const NoiseKind kind = options.mechanism.value_or(select_mechanism(sens, pp));
  const NoiseSpec spec = kind == NoiseKind::kLaplace
                             ? calibrate_laplace(sens.delta1, pp.epsilon)
                             : calibrate_gaussian(sens.delta2, pp.epsilon, pp.delta);
  if (!options.zero_noise) return privatize(t, x, spec, pp, rng);
  PrivateSketch out = privatize(t, x, NoiseSpec{spec.kind, 0.0}, pp, rng);
  out.zero_noise_debug = true;
  return out;
}

void check_combinable(const PrivateSketch& a, const PrivateSketch& b) {
  auto fail = [](const char* field) {
    throw Error(ErrorCode::kIncompatibleSketches,
                std::string("sketches differ in ") + field);
  };
  if (a.transform_fingerprint != b.transform_fingerprint) {
    fail("transform_fingerprint");
  }
  if (a.values.size() != b.values.size()) fail("k");
  if (a.noise.kind != b.noise.kind) fail("kind");
  if (a.noise.scale != b.noise.scale) fail("scale");
  if (a.site != b.site) fail("site");
  if (a.normalization != b.normalization) fail("normalization");
}

std::string serialize_sketch(const PrivateSketch& sketch) {
  nlohmann::json j{
      {"version", 1},
      {"transform_fingerprint", sketch.transform_fingerprint},
      {"transform_type", transform_type_name(sketch.transform)},
      {"kind", noise_kind_name(sketch.noise.kind)},
      {"scale", sketch.noise.scale},
      {"site", site_name(sketch.site)},
      {"epsilon", sketch.epsilon},
      {"delta", sketch.delta},
      {"k", sketch.k()},
      {"d", sketch.d},
      {"s", sketch.s},
      {"normalization", sketch.normalization},
      {"pure_dp", sketch.pure_dp()},
      {"gaussian_eps_ge_1", sketch.gaussian_regime_flag},
      {"zero_noise_debug", sketch.zero_noise_debug},
      {"values", sketch.values},
  };
  return j.dump();
}

PrivateSketch parse_sketch(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kParse, "unsupported sketch version");
    }
    PrivateSketch s;
    s.transform_fingerprint = j.at("transform_fingerprint").get<std::string>();
    const std::string type = j.at("transform_type").get<std::string>();
    if (type == "sjlt") {
      s.transform = TransformType::kSjlt;
    } else if (type == "fjlt") {
      s.transform = TransformType::kFjlt;
    } else if (type == "iid") {
      s.transform = TransformType::kIid;
    } else {
      throw Error(ErrorCode::kParse, "unknown transform_type '" + type + "'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "laplace" && kind != "gaussian") {
      throw Error(ErrorCode::kParse, "unknown noise kind '" + kind + "'");
    }
    s.noise.kind = kind == "laplace" ? NoiseKind::kLaplace : NoiseKind::kGaussian;
    s.noise.scale = j.at("scale").get<double>();
    const std::string site = j.at("site").get<std::string>();
    if (site != "output" && site != "input") {
      throw Error(ErrorCode::kParse, "unknown site '" + site + "'");
    }
    s.site = site == "output" ? PerturbationSite::kOutput
                              : PerturbationSite::kInput;
    s.epsilon = j.at("epsilon").get<double>();
    s.delta = j.at("delta").get<double>();
    s.d = j.at("d").get<std::size_t>();
    s.s = j.value("s", std::size_t{0});
    s.normalization = j.value("normalization", std::string("lpp"));
    s.gaussian_regime_flag = j.value("gaussian_eps_ge_1", false);
    s.zero_noise_debug = j.value("zero_noise_debug", false);
    s.values = j.at("values").get<RealVector>();
    if (s.values.size() != j.at("k").get<std::size_t>()) {
      throw Error(ErrorCode::kParse, "sketch k does not match values length");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("sketch JSON: ") + e.what());
  }
}

}  // namespace dpjl
