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

// Ground-truth engines used to check the estimators: exhaustive enumeration
// of the SJLT randomness on tiny instances, and seeded Monte Carlo.

#ifndef DPJL_ORACLE_HPP_
#define DPJL_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "dpjl/core.hpp"
#include "dpjl/privacy.hpp"

namespace dpjl {

struct OracleResult {
  double mean = 0.0;
  double variance = 0.0;
  std::uint64_t count = 0;
  // Set for Monte Carlo (sample std / sqrt(N)), absent for enumeration.
  std::optional<double> std_error;
};

inline constexpr double kMaxOracleConfigs = 1e7;

// (2 k/s)^(s d): every bucket and sign choice for every (block, column).
double sjlt_config_count(std::size_t d, std::size_t k, std::size_t s);

enum class OracleStatistic {
  // ||Sx||^2.
  kNormSq,
  // The bias-corrected estimator for a pair with difference x and output
  // noise `noise`. Noise is folded in through its closed-form moments.
  kEstimateWithNoiseMoments,
};

// Exact mean and variance over the fully independent hash model, each of the
// (2k/s)^(sd) assignments weighted equally. Throws kTooManyConfigs above
// kMaxOracleConfigs, kInvalidBlockStructure for bad (k, s).
OracleResult enumerate_sjlt_moments(
    std::size_t d, std::size_t k, std::size_t s, std::span<const double> x,
    OracleStatistic statistic = OracleStatistic::kNormSq,
    const NoiseSpec& noise = NoiseSpec::laplace(0.0));

// Runs trial(rng, index) for index in [0, n), each with
// Rng(seed, derive_stream(purpose, index)). Results are returned in index
// order, so the output does not depend on threads.
template <typename T>
std::vector<T> mc_collect(const std::function<T(Rng&, std::uint64_t)>& trial,
                          std::uint64_t n, std::uint64_t seed,
                          std::string_view purpose = "mc",
                          unsigned threads = 0) {
  std::vector<T> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, std::max<std::uint64_t>(n, 1)));
  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng rng(seed, derive_stream(purpose, i));
      out[i] = trial(rng, i);
    }
  };
  if (threads <= 1) {
    run(0, n);
    return out;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = t * chunk;
    const std::uint64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(run, begin, end);
  }
  for (auto& th : pool) th.join();
  return out;
}

// Sample mean, unbiased sample variance and standard error of `samples`.
OracleResult summarize(std::span<const double> samples);

// Throws kInvalidArgument if n < 1000.
OracleResult mc_moments(const std::function<double(Rng&)>& trial,
                        std::uint64_t n, std::uint64_t seed,
                        unsigned threads = 0);

}  // namespace dpjl

#endif  // DPJL_ORACLE_HPP_
