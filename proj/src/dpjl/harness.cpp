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

#include "dpjl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

namespace dpjl {
namespace {

constexpr const char* kBenchSchemes[] = {"sjlt_laplace", "sjlt_gaussian",
                                         "sjlt_auto",    "iid_gaussian",
                                         "fjlt_out",     "fjlt_in"};

volatile double g_sink = 0.0;

std::string opt_double(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

struct SchemeSetup {
  TransformType transform = TransformType::kSjlt;
  Scheme scheme = Scheme::kSjltOut;
  NoiseSpec spec;
  std::size_t s_column = 0;
};

SchemeSetup setup_scheme(const std::string& name,
                         const BenchVarianceConfig& cfg, double delta,
                         std::size_t scheme_index) {
  SchemeSetup out;
  const PrivacyParams pp{cfg.epsilon, delta};
  if (name.rfind("sjlt_", 0) == 0) {
    out.transform = TransformType::kSjlt;
    out.scheme = Scheme::kSjltOut;
    out.s_column = cfg.s;
    const SensitivityPair sens{std::sqrt(static_cast<double>(cfg.s)), 1.0};
    NoiseKind kind = NoiseKind::kLaplace;
    if (name == "sjlt_gaussian") kind = NoiseKind::kGaussian;
    if (name == "sjlt_auto") kind = select_mechanism(sens, pp);
    out.spec = kind == NoiseKind::kLaplace
                   ? calibrate_laplace(sens.delta1, cfg.epsilon)
                   : calibrate_gaussian(sens.delta2, cfg.epsilon, delta);
    return out;
  }
  if (name == "fjlt_in") {
    out.transform = TransformType::kFjlt;
    out.scheme = Scheme::kFjltIn;
    out.spec = NoiseSpec::gaussian(gaussian_sigma_floor(cfg.epsilon, delta));
    return out;
  }
  // Dense-transform output schemes: sigma from a reference transform.
  const std::uint64_t ref_seed =
      Rng(cfg.seed, derive_stream("bench-reference", scheme_index)).next_u64();
  double delta2 = 0.0;
  if (name == "iid_gaussian") {
    out.transform = TransformType::kIid;
    out.scheme = Scheme::kIidOut;
    delta2 = column_sensitivity(
        Transform(IidGaussianTransform(cfg.d, cfg.k, ref_seed)), 2);
  } else {
    out.transform = TransformType::kFjlt;
    out.scheme = Scheme::kFjltOut;
    delta2 = column_sensitivity(
        Transform(FjltTransform::create(0.0, cfg.fjlt_beta, cfg.d, cfg.k,
                                        cfg.c_q, ref_seed)),
        2);
  }
  out.spec = calibrate_gaussian(delta2, cfg.epsilon, delta);
  return out;
}

Transform make_transform(TransformType type, const BenchVarianceConfig& cfg,
                         std::uint64_t seed) {
  switch (type) {
    case TransformType::kSjlt:
      return SjltTransform(cfg.d, cfg.k, cfg.s, seed);
    case TransformType::kIid:
      return IidGaussianTransform(cfg.d, cfg.k, seed);
    case TransformType::kFjlt:
      break;
  }
  return FjltTransform::create(0.0, cfg.fjlt_beta, cfg.d, cfg.k, cfg.c_q, seed);
}

}  // namespace

bool is_bench_scheme(const std::string& name) {
  return std::find(std::begin(kBenchSchemes), std::end(kBenchSchemes), name) !=
         std::end(kBenchSchemes);
}

std::vector<BenchRow> bench_variance(const BenchVarianceConfig& cfg) {
  if (!(cfg.dist_sq >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dist_sq must be >= 0");
  }
  if (cfg.d == 0) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  for (const auto& name : cfg.schemes) {
    if (!is_bench_scheme(name)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown scheme '" + name + "'");
    }
  }
  const RealVector x(cfg.d, 0.0);
  const RealVector y(cfg.d, std::sqrt(cfg.dist_sq / static_cast<double>(cfg.d)));
  const double z4 = norm4_4(y);

  std::vector<BenchRow> rows;
  for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
    const std::string& name = cfg.schemes[si];
    for (std::size_t di = 0; di < cfg.delta_grid.size(); ++di) {
      const double delta = cfg.delta_grid[di];
      const PrivacyParams pp{cfg.epsilon, delta};
      validate(pp);
      const SchemeSetup setup = setup_scheme(name, cfg, delta, si);

      BenchRow row;
      row.scheme = name;
      row.mechanism = noise_kind_name(setup.spec.kind);
      row.scale = setup.spec.scale;
      row.d = cfg.d;
      row.k = cfg.k;
      row.s = setup.s_column;
      row.epsilon = cfg.epsilon;
      row.delta = delta;
      row.dist_sq_true = cfg.dist_sq;
      row.n_trials = cfg.trials;
      const std::size_t s_or_d =
          setup.scheme == Scheme::kFjltIn ? cfg.d : setup.s_column;
      const AnalyticVariance av =
          analytic_variance(setup.scheme, setup.spec, cfg.k, s_or_d,
                            cfg.dist_sq, std::optional<double>(z4));
      row.est_var_analytic = av.value;
      row.analytic_noise_term = av.noise_term;
      row.variance_kind = av.kind;

      if (cfg.trials > 0) {
        const std::function<double(Rng&, std::uint64_t)> trial =
            [&](Rng& rng, std::uint64_t) {
              const std::uint64_t tseed = rng.next_u64();
              const Transform t = make_transform(setup.transform, cfg, tseed);
              // Both sketches share t by construction; a per-trial token
              // pairs them without serializing t.
              const std::string fp = "bench-" + std::to_string(tseed);
              if (setup.scheme == Scheme::kFjltIn) {
                const auto& f = std::get<FjltTransform>(t);
                const double sigma = setup.spec.scale;
                const auto a = privatize_input_fjlt(f, x, sigma, pp, rng, fp);
                const auto b = privatize_input_fjlt(f, y, sigma, pp, rng, fp);
                return estimate_sqdist(a, b).estimate;
              }
              const auto a = privatize(t, x, setup.spec, pp, rng, fp);
              const auto b = privatize(t, y, setup.spec, pp, rng, fp);
              return estimate_sqdist(a, b).estimate;
            };
        const std::string purpose =
            "bench-variance/" + name + "/" + std::to_string(di);
        const auto start = std::chrono::steady_clock::now();
        const auto samples =
            mc_collect<double>(trial, cfg.trials, cfg.seed, purpose, cfg.threads);
        const auto stop = std::chrono::steady_clock::now();
        const OracleResult r = summarize(samples);
        row.est_mean = r.mean;
        if (cfg.trials > 1) row.est_var_empirical = r.variance;
        if (cfg.timing) {
          row.wall_time_ns =
              std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
                  .count();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string bench_rows_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "# dpjl-bench v1\n"
     << "scheme,mechanism,scale,d,k,s,epsilon,delta,dist_sq_true,est_mean,"
        "est_var_empirical,est_var_analytic,analytic_noise_term,variance_kind,"
        "n_trials,wall_time_ns\n";
  for (const auto& r : rows) {
    os << r.scheme << ',' << r.mechanism << ',' << format_double(r.scale) << ','
       << r.d << ',' << r.k << ',' << r.s << ',' << format_double(r.epsilon)
       << ',' << format_double(r.delta) << ',' << format_double(r.dist_sq_true)
       << ',' << opt_double(r.est_mean) << ','
       << opt_double(r.est_var_empirical) << ','
       << format_double(r.est_var_analytic) << ','
       << format_double(r.analytic_noise_term) << ','
       << variance_kind_name(r.variance_kind) << ',' << r.n_trials << ',';
    if (r.wall_time_ns) os << *r.wall_time_ns;
    os << '\n';
  }
  return os.str();
}

std::vector<CrossoverLine> crossover_analysis(const std::vector<BenchRow>& rows) {
  std::vector<double> deltas;
  for (const auto& r : rows) {
    if (std::find(deltas.begin(), deltas.end(), r.delta) == deltas.end()) {
      deltas.push_back(r.delta);
    }
  }
  std::vector<CrossoverLine> out;
  for (double delta : deltas) {
    for (const auto& lap : rows) {
      if (lap.delta != delta || lap.mechanism != "laplace") continue;
      for (const auto& gau : rows) {
        if (gau.delta != delta || gau.mechanism != "gaussian") continue;
        CrossoverLine line;
        line.delta = delta;
        line.laplace_scheme = lap.scheme;
        line.gaussian_scheme = gau.scheme;
        const SensitivityPair sens{std::sqrt(static_cast<double>(lap.s)), 1.0};
        line.selected = select_mechanism(sens, {lap.epsilon, delta});
        line.laplace_noise_term = lap.analytic_noise_term;
        line.gaussian_noise_term = gau.analytic_noise_term;
        line.analytic_winner = lap.analytic_noise_term <= gau.analytic_noise_term
                                   ? NoiseKind::kLaplace
                                   : NoiseKind::kGaussian;
        if (lap.est_var_empirical && gau.est_var_empirical) {
          line.empirical_winner =
              *lap.est_var_empirical <= *gau.est_var_empirical
                  ? NoiseKind::kLaplace
                  : NoiseKind::kGaussian;
        }
        out.push_back(line);
      }
    }
  }
  return out;
}

std::string crossover_csv(const std::vector<CrossoverLine>& lines) {
  std::ostringstream os;
  os << "# dpjl-crossover v1\n"
     << "delta,laplace_scheme,gaussian_scheme,select_mechanism,"
        "laplace_noise_term,gaussian_noise_term,analytic_winner,"
        "empirical_winner,agree\n";
  for (const auto& l : lines) {
    os << format_double(l.delta) << ',' << l.laplace_scheme << ','
       << l.gaussian_scheme << ',' << noise_kind_name(l.selected) << ','
       << format_double(l.laplace_noise_term) << ','
       << format_double(l.gaussian_noise_term) << ','
       << noise_kind_name(l.analytic_winner) << ',';
    if (l.empirical_winner) {
      os << noise_kind_name(*l.empirical_winner) << ','
         << (*l.empirical_winner == l.analytic_winner ? "yes" : "no");
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

std::int64_t median_time_ns(const std::function<void()>& fn, std::size_t reps) {
  if (reps == 0) reps = 1;
  std::vector<std::int64_t> times(reps);
  for (auto& t : times) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    t = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
  }
  std::nth_element(times.begin(), times.begin() + reps / 2, times.end());
  return times[reps / 2];
}

BenchTimeResult bench_time(const BenchTimeConfig& cfg) {
  if (cfg.d == 0 || cfg.k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "d and k must be >= 1");
  }
  BenchTimeResult result;
  const double l = std::log(1.0 / cfg.beta);
  result.heuristic_lower = l * l / cfg.alpha;
  result.heuristic_upper = std::pow(cfg.beta, -1.0 / cfg.alpha);
  const double dd = static_cast<double>(cfg.d);
  result.d_in_interval =
      result.heuristic_lower < dd && dd < result.heuristic_upper;

  Rng rng(cfg.seed, derive_stream("bench-time-input"));
  RealVector dense(cfg.d);
  for (double& v : dense) v = sample_gaussian(1.0, rng);
  RealVector sparse(cfg.d, 0.0);
  sparse[0] = 1.0;

  auto time_apply = [&](const std::string& op, const Transform& t,
                        std::size_t s) {
    for (int which = 0; which < 2; ++which) {
      const RealVector& x = which == 0 ? dense : sparse;
      TimeRow row;
      row.op = op;
      row.d = cfg.d;
      row.k = cfg.k;
      row.s = s;
      row.input = which == 0 ? "dense" : "sparse";
      row.nnz = which == 0 ? cfg.d : 1;
      row.reps = cfg.trials;
      if (cfg.timing) {
        row.median_ns = median_time_ns(
            [&] { g_sink = g_sink + apply_transform(t, x)[0]; }, cfg.trials);
      }
      result.rows.push_back(row);
    }
  };

  for (std::size_t s : cfg.sparsity_grid) {
    time_apply("sjlt_apply", SjltTransform(cfg.d, cfg.k, s, cfg.seed), s);
  }
  time_apply("fjlt_apply",
             FjltTransform::create(cfg.alpha, cfg.beta, cfg.d, cfg.k, cfg.c_q,
                                   cfg.seed),
             0);
  time_apply("iid_apply", IidGaussianTransform(cfg.d, cfg.k, cfg.seed), 0);

  const std::size_t d_pad = next_pow2(cfg.d);
  for (std::size_t n = std::min<std::size_t>(1024, d_pad); n <= d_pad; n <<= 1) {
    TimeRow row;
    row.op = "fwht";
    row.d = n;
    row.input = "dense";
    row.nnz = n;
    row.reps = cfg.trials;
    if (cfg.timing) {
      RealVector buf(n);
      for (std::size_t i = 0; i < n; ++i) buf[i] = dense[i % dense.size()];
      row.median_ns = median_time_ns(
          [&] {
            fwht_inplace(buf);
            g_sink = g_sink + buf[0];
          },
          cfg.trials);
    }
    result.rows.push_back(row);
  }
  return result;
}

std::string bench_time_csv(const BenchTimeResult& r) {
  std::ostringstream os;
  os << "# dpjl-bench-time v1\n"
     << "# heuristic (constants=1): fjlt faster than sjlt when "
     << format_double(r.heuristic_lower) << " < d < "
     << format_double(r.heuristic_upper)
     << "; d_in_interval=" << (r.d_in_interval ? "true" : "false") << '\n'
     << "op,d,k,s,input,nnz,reps,median_ns\n";
  for (const auto& row : r.rows) {
    os << row.op << ',' << row.d << ',' << row.k << ',' << row.s << ','
       << row.input << ',' << row.nnz << ',' << row.reps << ',';
    if (row.median_ns) os << *row.median_ns;
    os << '\n';
  }
  return os.str();
}

OracleCheck oracle_check(std::size_t k, std::size_t s,
                         std::span<const double> x) {
  OracleCheck out;
  out.result = enumerate_sjlt_moments(x.size(), k, s, x);
  const double n2 = norm2_sq(x);
  out.analytic_mean = n2;
  out.analytic_variance = 2.0 / static_cast<double>(k) * (n2 * n2 - norm4_4(x));
  out.max_abs_diff = std::max(std::fabs(out.result.mean - out.analytic_mean),
                              std::fabs(out.result.variance - out.analytic_variance));
  return out;
}

}  // namespace dpjl
