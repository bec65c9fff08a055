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

#include "dpjl/core.hpp"

#include <cmath>
#include <string>

namespace dpjl {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorCode::kInvalidScale: return "InvalidScale";
    case ErrorCode::kInvalidAccuracy: return "InvalidAccuracy";
    case ErrorCode::kInvalidBlockStructure: return "InvalidBlockStructure";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kInvalidPrivacy: return "InvalidPrivacy";
    case ErrorCode::kGaussianNeedsDelta: return "GaussianNeedsDelta";
    case ErrorCode::kSchemeMismatch: return "SchemeMismatch";
    case ErrorCode::kIncompatibleSketches: return "IncompatibleSketches";
    case ErrorCode::kTooManyConfigs: return "TooManyConfigs";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

void check_real_vector(std::span<const double> v, const char* what) {
  if (v.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": vector must have dim >= 1");
  }
  for (double e : v) {
    if (!std::isfinite(e)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + ": non-finite entry");
    }
  }
}

std::uint64_t derive_stream(std::string_view purpose, std::uint64_t trial,
                            std::uint64_t block) noexcept {
  // FNV-1a over the label, then fold in the indices.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h = mix64(h ^ mix64(trial));
  return mix64(h ^ mix64(block + 0x632be59bd9b4e019ULL));
}

Rng::Rng(std::uint64_t root_seed, std::uint64_t stream_id)
    : root_seed_(root_seed),
      stream_id_(stream_id),
      engine_(mix64(root_seed ^ mix64(stream_id))) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_centered() { return 0.5 - uniform(); }

int Rng::sign() { return (engine_() >> 63) ? 1 : -1; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection; unbiased.
  std::uint64_t x = engine_();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<unsigned __int128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double laplace_from_uniform(double u, double b) {
  if (u == 0.0) return 0.0;
  const double s = u > 0.0 ? 1.0 : -1.0;
  return -b * s * std::log1p(-2.0 * std::fabs(u));
}

double sample_laplace(double b, Rng& rng) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInvalidScale, "Laplace scale b must be > 0");
  }
  double u = rng.uniform_centered();
  // u = 1/2 maps to ln(0); probability 2^-53, redraw.
  while (u == 0.5) u = rng.uniform_centered();
  return laplace_from_uniform(u, b);
}

double sample_gaussian(double sigma, Rng& rng) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidScale, "Gaussian sigma must be > 0");
  }
  double u, v, r2;
  do {
    u = 2.0 * rng.uniform() - 1.0;
    v = 2.0 * rng.uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  return sigma * u * std::sqrt(-2.0 * std::log(r2) / r2);
}

std::size_t next_pow2(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_pow2(n)) {
    throw Error(ErrorCode::kNotPowerOfTwo,
                "fwht: dimension " + std::to_string(n) +
                    " is not a power of two");
  }
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& e : v) e *= scale;
}

RealVector fwht(std::span<const double> v) {
  RealVector out(v.begin(), v.end());
  fwht_inplace(out);
  return out;
}

RealVector pad_pow2(std::span<const double> v) {
  RealVector out(v.begin(), v.end());
  out.resize(next_pow2(v.size()), 0.0);
  return out;
}

double norm2_sq(std::span<const double> v) noexcept {
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return acc;
}

double norm4_4(std::span<const double> v) noexcept {
  double acc = 0.0;
  for (double e : v) acc += (e * e) * (e * e);
  return acc;
}

}  // namespace dpjl
