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

// Seeded randomness, continuous noise samplers and the normalized fast
// Walsh-Hadamard transform.

#ifndef DPJL_CORE_HPP_
#define DPJL_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "dpjl/error.hpp"

namespace dpjl {

using RealVector = std::vector<double>;

// Throws kInvalidArgument if v is empty or holds a non-finite entry.
void check_real_vector(std::span<const double> v, const char* what);

// SplitMix64 finalizer. Used for seed derivation and as the keyed hash
// behind the SJLT's PRF mode.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable stream label for (purpose, trial, block). Depends only on its
// arguments, so Monte Carlo trials get the same stream regardless of which
// worker runs them.
std::uint64_t derive_stream(std::string_view purpose, std::uint64_t trial = 0,
                            std::uint64_t block = 0) noexcept;

// Single-owner deterministic generator. mt19937_64's output sequence is fixed
// by the standard, and every distribution built on top of it lives in this
// file, so the value stream is identical across platforms.
class Rng {
 public:
  Rng(std::uint64_t root_seed, std::uint64_t stream_id);

  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  Rng(Rng&&) = default;
  Rng& operator=(Rng&&) = default;

  std::uint64_t root_seed() const noexcept { return root_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (-1/2, 1/2].
  double uniform_centered();
  // +1 or -1 with equal probability.
  int sign();
  // Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t root_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// Inverse-CDF map for Lap(0, b): -b * sign(u) * ln(1 - 2|u|), u in (-1/2, 1/2].
double laplace_from_uniform(double u, double b);

// One draw from Lap(0, b). Throws kInvalidScale if b <= 0.
double sample_laplace(double b, Rng& rng);

// One draw from N(0, sigma^2) by the Marsaglia polar method; the second
// variate of each accepted pair is discarded so the stream position only
// depends on the number of calls. Throws kInvalidScale if sigma <= 0.
double sample_gaussian(double sigma, Rng& rng);

constexpr bool is_pow2(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

std::size_t next_pow2(std::size_t n) noexcept;

// In-place normalized Walsh-Hadamard transform (butterflies scaled by
// 1/sqrt(d) at the end). Throws kNotPowerOfTwo.
void fwht_inplace(std::span<double> v);

RealVector fwht(std::span<const double> v);

// Zero-pads v up to the next power of two; unchanged if already one.
RealVector pad_pow2(std::span<const double> v);

double norm2_sq(std::span<const double> v) noexcept;
double norm4_4(std::span<const double> v) noexcept;

}  // namespace dpjl

#endif  // DPJL_CORE_HPP_
