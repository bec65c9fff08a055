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

// Benchmark drivers behind the bench-variance, bench-time and oracle-check
// subcommands. Output is CSV; everything except wall times is a pure
// function of the configuration.

#ifndef DPJL_HARNESS_HPP_
#define DPJL_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpjl/estimators.hpp"
#include "dpjl/oracle.hpp"

namespace dpjl {

// Bench scheme labels:
//   sjlt_laplace, sjlt_gaussian, sjlt_auto  SJLT with output noise
//   iid_gaussian                            i.i.d. baseline, Gaussian noise
//   fjlt_out                                FJLT with output Gaussian noise
//   fjlt_in                                 FJLT with input Gaussian noise
bool is_bench_scheme(const std::string& name);

struct BenchVarianceConfig {
  std::vector<std::string> schemes{"sjlt_laplace", "sjlt_gaussian"};
  double dist_sq = 100.0;
  std::vector<double> delta_grid{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double epsilon = 1.0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t d = 16;
  std::size_t k = 18;
  std::size_t s = 9;
  // FJLT sparsity parameter: q = min(c_q ln^2(1/beta) / d_pad, 1).
  double fjlt_beta = 0.01;
  double c_q = 1.0;
  bool timing = true;
  unsigned threads = 0;
};

struct BenchRow {
  std::string scheme;
  std::string mechanism;
  double scale = 0.0;
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t s = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double dist_sq_true = 0.0;
  std::optional<double> est_mean;
  std::optional<double> est_var_empirical;
  double est_var_analytic = 0.0;
  double analytic_noise_term = 0.0;
  VarianceKind variance_kind = VarianceKind::kExact;
  std::uint64_t n_trials = 0;
  std::optional<std::int64_t> wall_time_ns;
};

// The pair is x = 0 and y with every coordinate sqrt(dist_sq / d). Each
// trial draws a fresh transform and fresh noise. Dense-transform schemes
// (iid_gaussian, fjlt_out) calibrate sigma once, against the exact Delta2
// of a reference transform drawn from the seed, and hold it fixed across
// trials so the analytic variance applies as written.
std::vector<BenchRow> bench_variance(const BenchVarianceConfig& config);

std::string bench_rows_csv(const std::vector<BenchRow>& rows);

struct CrossoverLine {
  double delta = 0.0;
  std::string laplace_scheme;
  std::string gaussian_scheme;
  // What select_mechanism picks for the Laplace row's SJLT at this delta.
  NoiseKind selected = NoiseKind::kLaplace;
  double laplace_noise_term = 0.0;
  double gaussian_noise_term = 0.0;
  NoiseKind analytic_winner = NoiseKind::kLaplace;
  std::optional<NoiseKind> empirical_winner;
};

// For every delta, compares each Laplace row against each Gaussian row.
std::vector<CrossoverLine> crossover_analysis(const std::vector<BenchRow>& rows);

std::string crossover_csv(const std::vector<CrossoverLine>& lines);

struct BenchTimeConfig {
  std::size_t d = 8192;
  std::size_t k = 512;
  std::vector<std::size_t> sparsity_grid{8};
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  // Only used for the FJLT's q and the heuristic interval.
  double alpha = 0.25;
  double beta = 0.01;
  double c_q = 1.0;
  bool timing = true;
};

struct TimeRow {
  std::string op;
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t s = 0;
  std::string input;
  std::size_t nnz = 0;
  std::size_t reps = 0;
  std::optional<std::int64_t> median_ns;
};

struct BenchTimeResult {
  std::vector<TimeRow> rows;
  // FJLT-faster-than-SJLT interval with all hidden constants set to 1:
  // ln^2(1/beta)/alpha < d < beta^(-1/alpha).
  double heuristic_lower = 0.0;
  double heuristic_upper = 0.0;
  bool d_in_interval = false;
};

// Times sjlt_apply, fjlt_apply and iid_apply on one dense and one 1-sparse
// input, plus fwht on a doubling grid up to d_pad.
BenchTimeResult bench_time(const BenchTimeConfig& config);

std::string bench_time_csv(const BenchTimeResult& result);

// Median wall time in ns of fn() over reps runs.
std::int64_t median_time_ns(const std::function<void()>& fn, std::size_t reps);

struct OracleCheck {
  OracleResult result;
  double analytic_mean = 0.0;
  double analytic_variance = 0.0;
  double max_abs_diff = 0.0;
};

// Enumerates the SJLT moments of ||Sx||^2 and compares them with ||x||^2
// and (2/k)(||x||_2^4 - ||x||_4^4).
OracleCheck oracle_check(std::size_t k, std::size_t s,
                         std::span<const double> x);

}  // namespace dpjl

#endif  // DPJL_HARNESS_HPP_
