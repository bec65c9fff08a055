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

#include "dpjl/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "dpjl/estimators.hpp"

namespace dpjl {

double sjlt_config_count(std::size_t d, std::size_t k, std::size_t s) {
  const double digits = static_cast<double>(s) * static_cast<double>(d);
  return std::pow(2.0 * static_cast<double>(k / s), digits);
}

OracleResult enumerate_sjlt_moments(std::size_t d, std::size_t k,
                                    std::size_t s, std::span<const double> x,
                                    OracleStatistic statistic,
                                    const NoiseSpec& noise) {
  if (s == 0 || k == 0 || s > k || k % s != 0) {
    throw Error(ErrorCode::kInvalidBlockStructure,
                "k must be a positive multiple of s");
  }
  if (x.size() != d || d == 0) {
    throw Error(ErrorCode::kDimMismatch, "x must have dim d >= 1");
  }
  const double configs = sjlt_config_count(d, k, s);
  if (configs > kMaxOracleConfigs) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.3g configurations exceed the limit of %.0g",
                  configs, kMaxOracleConfigs);
    throw Error(ErrorCode::kTooManyConfigs, buf);
  }

  const std::size_t block = k / s;
  const std::size_t base = 2 * block;  // bucket * 2 + sign bit
  const std::size_t n_digits = s * d;
  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(s));
  const double m2 = noise_moment(noise, 2);
  const double m4 = noise_moment(noise, 4);
  const bool with_noise = statistic == OracleStatistic::kEstimateWithNoiseMoments;

  // Digit (r, j) lives at index r * d + j.
  std::vector<std::size_t> digit(n_digits, 0);
  std::vector<double> y(k);

  // Welford over conditional means; conditional variances are averaged.
  long double mean = 0.0L;
  long double m2_acc = 0.0L;
  long double cond_var_sum = 0.0L;
  std::uint64_t count = 0;

  while (true) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t r = 0; r < s; ++r) {
      for (std::size_t j = 0; j < d; ++j) {
        const std::size_t v = digit[r * d + j];
        const double sgn = (v & 1) ? -1.0 : 1.0;
        y[r * block + v / 2] += sgn * x[j] * inv_sqrt_s;
      }
    }
    long double value = 0.0L;
    for (double e : y) value += static_cast<long double>(e) * e;
    if (with_noise) {
      cond_var_sum += 8.0L * m2 * value +
                      2.0L * static_cast<long double>(k) * (m4 + m2 * m2);
    }
    ++count;
    const long double delta = value - mean;
    mean += delta / static_cast<long double>(count);
    m2_acc += delta * (value - mean);

    std::size_t pos = 0;
    while (pos < n_digits && ++digit[pos] == base) {
      digit[pos] = 0;
      ++pos;
    }
    if (pos == n_digits) break;
  }

  OracleResult out;
  out.count = count;
  out.mean = static_cast<double>(mean);
  long double var = m2_acc / static_cast<long double>(count);
  if (with_noise) var += cond_var_sum / static_cast<long double>(count);
  out.variance = static_cast<double>(var);
  return out;
}

OracleResult summarize(std::span<const double> samples) {
  OracleResult out;
  out.count = samples.size();
  if (samples.empty()) return out;
  long double sum = 0.0L;
  for (double v : samples) sum += v;
  const long double mean = sum / static_cast<long double>(samples.size());
  long double ss = 0.0L;
  for (double v : samples) {
    const long double dv = v - mean;
    ss += dv * dv;
  }
  out.mean = static_cast<double>(mean);
  out.variance = samples.size() > 1
                     ? static_cast<double>(ss / (samples.size() - 1))
                     : 0.0;
  out.std_error =
      std::sqrt(out.variance / static_cast<double>(samples.size()));
  return out;
}

OracleResult mc_moments(const std::function<double(Rng&)>& trial,
                        std::uint64_t n, std::uint64_t seed, unsigned threads) {
  if (n < 1000) {
    throw Error(ErrorCode::kInvalidArgument,
                "Monte Carlo needs at least 1000 trials");
  }
  const std::function<double(Rng&, std::uint64_t)> wrapped =
      [&trial](Rng& rng, std::uint64_t) { return trial(rng); };
  const auto samples = mc_collect<double>(wrapped, n, seed, "mc", threads);
  return summarize(samples);
}

}  // namespace dpjl
