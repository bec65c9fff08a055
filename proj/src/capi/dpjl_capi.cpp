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

#include "dpjl/dpjl.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "dpjl/estimators.hpp"
#include "dpjl/harness.hpp"
#include "dpjl/oracle.hpp"
#include "dpjl/privacy.hpp"
#include "dpjl/transforms.hpp"

struct dpjl_transform {
  dpjl::Transform t;
};

struct dpjl_sketch {
  dpjl::PrivateSketch s;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
dpjl_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return DPJL_OK;
  } catch (const dpjl::Error& e) {
    g_last_error = e.what();
    return static_cast<dpjl_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DPJL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DPJL_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) {
    throw dpjl::Error(dpjl::ErrorCode::kInvalidArgument,
                      std::string(what) + " must not be null");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw dpjl::Error(dpjl::ErrorCode::kIo,
                      std::string("cannot open '") + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw dpjl::Error(dpjl::ErrorCode::kIo,
                      std::string("cannot write '") + path + "'");
  }
  out << text << '\n';
  if (!out) {
    throw dpjl::Error(dpjl::ErrorCode::kIo,
                      std::string("write failed for '") + path + "'");
  }
}

void copy_fingerprint(const std::string& fp, char (&dst)[17]) {
  std::memset(dst, 0, sizeof(dst));
  std::memcpy(dst, fp.data(), std::min(fp.size(), sizeof(dst) - 1));
}

dpjl_transform_type c_type(dpjl::TransformType t) {
  switch (t) {
    case dpjl::TransformType::kSjlt: return DPJL_SJLT;
    case dpjl::TransformType::kFjlt: return DPJL_FJLT;
    case dpjl::TransformType::kIid: return DPJL_IID;
  }
  return DPJL_SJLT;
}

// Hash of the raw input bytes, folded into the noise stream.
std::uint64_t input_hash(std::span<const double> x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : x) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h = dpjl::mix64(h ^ bits);
  }
  return h;
}

dpjl::Transform build_transform(const dpjl_transform_config& c) {
  const double c_k = c.c_k > 0.0 ? c.c_k : 2.0;
  const double c_s = c.c_s > 0.0 ? c.c_s : 1.0;
  const double c_q = c.c_q > 0.0 ? c.c_q : 1.0;
  if (c.d == 0) {
    throw dpjl::Error(dpjl::ErrorCode::kInvalidArgument, "d must be >= 1");
  }
  const bool need_params =
      c.k == 0 || (c.type == DPJL_SJLT && c.s == 0);
  dpjl::SketchParams params;
  if (need_params) {
    params = dpjl::params_from_accuracy(c.alpha, c.beta, c.d, c_k, c_s);
  }
  dpjl::AccuracyMeta meta;
  if (need_params) meta = {c.alpha, c.beta, c_k, c_s, 0.0};

  switch (c.type) {
    case DPJL_SJLT: {
      if ((c.k == 0) != (c.s == 0)) {
        throw dpjl::Error(dpjl::ErrorCode::kInvalidArgument,
                          "give both k and s, or neither");
      }
      const std::size_t k = c.k ? c.k : params.k;
      const std::size_t s = c.s ? c.s : params.s;
      const dpjl::HashMode mode = c.hash_degree > 0
                                      ? dpjl::HashMode::polynomial(c.hash_degree)
                                      : dpjl::HashMode::prf();
      dpjl::SjltTransform t(c.d, k, s, c.seed, mode);
      t.meta = meta;
      return t;
    }
    case DPJL_FJLT: {
      const std::size_t k = c.k ? c.k : params.k;
      dpjl::FjltTransform t =
          dpjl::FjltTransform::create(c.alpha, c.beta, c.d, k, c_q, c.seed);
      t.meta.c_q = c_q;
      if (need_params) {
        t.meta.c_k = c_k;
        t.meta.c_s = c_s;
      }
      return t;
    }
    case DPJL_IID: {
      const std::size_t k = c.k ? c.k : params.k;
      return dpjl::IidGaussianTransform(c.d, k, c.seed);
    }
  }
  throw dpjl::Error(dpjl::ErrorCode::kInvalidArgument, "unknown transform type");
}

std::vector<std::string> split_csv(const char* list) {
  std::vector<std::string> out;
  std::string cur;
  for (const char* p = list; *p; ++p) {
    if (*p == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (*p != ' ') {
      cur += *p;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

extern "C" {

const char* dpjl_last_error(void) { return g_last_error.c_str(); }

const char* dpjl_status_name(dpjl_status status) {
  if (status == DPJL_OK) return "Ok";
  if (status == DPJL_ERR_INTERNAL) return "Internal";
  return dpjl::error_code_name(static_cast<dpjl::ErrorCode>(status));
}

const char* dpjl_version(void) { return "0.1.0"; }

void dpjl_free_string(char* s) { std::free(s); }

dpjl_status dpjl_params_from_accuracy(double alpha, double beta, size_t d,
                                      double c_k, double c_s, size_t* k,
                                      size_t* s) {
  return guarded([&] {
    require(k && s, "k and s");
    const auto p = dpjl::params_from_accuracy(alpha, beta, d,
                                              c_k > 0 ? c_k : 2.0,
                                              c_s > 0 ? c_s : 1.0);
    *k = p.k;
    *s = p.s;
  });
}

void dpjl_transform_config_init(dpjl_transform_config* config) {
  if (config) *config = dpjl_transform_config{};
}

dpjl_status dpjl_transform_create(const dpjl_transform_config* config,
                                  dpjl_transform** out) {
  return guarded([&] {
    require(config && out, "config and out");
    *out = new dpjl_transform{build_transform(*config)};
  });
}

dpjl_status dpjl_transform_from_json(const char* json, dpjl_transform** out) {
  return guarded([&] {
    require(json && out, "json and out");
    *out = new dpjl_transform{dpjl::parse_transform(json)};
  });
}

dpjl_status dpjl_transform_load(const char* path, dpjl_transform** out) {
  return guarded([&] {
    require(path && out, "path and out");
    *out = new dpjl_transform{dpjl::parse_transform(read_file(path))};
  });
}

dpjl_status dpjl_transform_save(const dpjl_transform* t, const char* path) {
  return guarded([&] {
    require(t && path, "transform and path");
    write_file(path, dpjl::serialize_transform(t->t));
  });
}

dpjl_status dpjl_transform_to_json(const dpjl_transform* t, char** json) {
  return guarded([&] {
    require(t && json, "transform and json");
    *json = dup_string(dpjl::serialize_transform(t->t));
  });
}

void dpjl_transform_free(dpjl_transform* t) { delete t; }

dpjl_status dpjl_transform_get_info(const dpjl_transform* t,
                                    dpjl_transform_info* info) {
  return guarded([&] {
    require(t && info, "transform and info");
    dpjl_transform_info r{};
    r.type = c_type(dpjl::transform_type(t->t));
    r.d = dpjl::input_dim(t->t);
    r.k = dpjl::output_dim(t->t);
    r.s = dpjl::sparsity(t->t);
    if (const auto* f = std::get_if<dpjl::FjltTransform>(&t->t)) {
      r.d_pad = f->d_pad();
      r.q = f->q();
    }
    std::visit([&](const auto& x) { r.seed = x.seed(); }, t->t);
    const auto sens = dpjl::sensitivities(t->t);
    r.delta1 = sens.delta1;
    r.delta2 = sens.delta2;
    copy_fingerprint(dpjl::transform_fingerprint(t->t), r.fingerprint);
    *info = r;
  });
}

dpjl_status dpjl_transform_apply(const dpjl_transform* t, const double* x,
                                 size_t d, double* out, size_t k) {
  return guarded([&] {
    require(t && x && out, "transform, x and out");
    if (k != dpjl::output_dim(t->t)) {
      throw dpjl::Error(dpjl::ErrorCode::kDimMismatch,
                        "output buffer length must equal k");
    }
    const auto y = dpjl::apply_transform(t->t, std::span<const double>(x, d));
    std::copy(y.begin(), y.end(), out);
  });
}

dpjl_status dpjl_sjlt_update(const dpjl_transform* t, double* acc, size_t k,
                             size_t j, double delta) {
  return guarded([&] {
    require(t && acc, "transform and acc");
    const auto* s = std::get_if<dpjl::SjltTransform>(&t->t);
    if (s == nullptr) {
      throw dpjl::Error(dpjl::ErrorCode::kSchemeMismatch,
                        "streaming updates need an SJLT");
    }
    if (k != s->k()) {
      throw dpjl::Error(dpjl::ErrorCode::kDimMismatch,
                        "accumulator length must equal k");
    }
    s->update(std::span<double>(acc, k), j, delta);
  });
}

void dpjl_sketch_options_init(dpjl_sketch_options* options) {
  if (!options) return;
  *options = dpjl_sketch_options{};
  options->epsilon = 1.0;
  options->mechanism = DPJL_MECH_AUTO;
  options->site = DPJL_SITE_OUTPUT;
}

dpjl_status dpjl_sketch_create(const dpjl_transform* t, const double* x,
                               size_t d, const dpjl_sketch_options* options,
                               dpjl_sketch** out) {
  return guarded([&] {
    require(t && x && options && out, "transform, x, options and out");
    const std::span<const double> xs(x, d);
    dpjl::SketchOptions o;
    o.privacy = {options->epsilon, options->delta};
    o.site = options->site == DPJL_SITE_INPUT ? dpjl::PerturbationSite::kInput
                                              : dpjl::PerturbationSite::kOutput;
    if (options->mechanism == DPJL_MECH_LAPLACE) {
      o.mechanism = dpjl::NoiseKind::kLaplace;
    } else if (options->mechanism == DPJL_MECH_GAUSSIAN) {
      o.mechanism = dpjl::NoiseKind::kGaussian;
    }
    o.zero_noise = options->zero_noise != 0;
    dpjl::Rng rng(options->seed,
                  dpjl::derive_stream("sketch-noise", input_hash(xs)));
    *out = new dpjl_sketch{dpjl::make_private_sketch(t->t, xs, o, rng)};
  });
}

dpjl_status dpjl_sketch_from_json(const char* json, dpjl_sketch** out) {
  return guarded([&] {
    require(json && out, "json and out");
    *out = new dpjl_sketch{dpjl::parse_sketch(json)};
  });
}

dpjl_status dpjl_sketch_load(const char* path, dpjl_sketch** out) {
  return guarded([&] {
    require(path && out, "path and out");
    *out = new dpjl_sketch{dpjl::parse_sketch(read_file(path))};
  });
}

dpjl_status dpjl_sketch_save(const dpjl_sketch* sketch, const char* path) {
  return guarded([&] {
    require(sketch && path, "sketch and path");
    write_file(path, dpjl::serialize_sketch(sketch->s));
  });
}

dpjl_status dpjl_sketch_to_json(const dpjl_sketch* sketch, char** json) {
  return guarded([&] {
    require(sketch && json, "sketch and json");
    *json = dup_string(dpjl::serialize_sketch(sketch->s));
  });
}

void dpjl_sketch_free(dpjl_sketch* sketch) { delete sketch; }

dpjl_status dpjl_sketch_get_info(const dpjl_sketch* sketch,
                                 dpjl_sketch_info* info) {
  return guarded([&] {
    require(sketch && info, "sketch and info");
    const auto& s = sketch->s;
    dpjl_sketch_info r{};
    r.transform = c_type(s.transform);
    r.site = s.site == dpjl::PerturbationSite::kInput ? DPJL_SITE_INPUT
                                                      : DPJL_SITE_OUTPUT;
    r.mechanism = s.noise.kind == dpjl::NoiseKind::kLaplace ? DPJL_MECH_LAPLACE
                                                            : DPJL_MECH_GAUSSIAN;
    r.scale = s.noise.scale;
    r.epsilon = s.epsilon;
    r.delta = s.delta;
    r.k = s.k();
    r.d = s.d;
    r.s = s.s;
    r.pure_dp = s.pure_dp() ? 1 : 0;
    r.gaussian_regime_flag = s.gaussian_regime_flag ? 1 : 0;
    r.zero_noise_debug = s.zero_noise_debug ? 1 : 0;
    copy_fingerprint(s.transform_fingerprint, r.fingerprint);
    *info = r;
  });
}

dpjl_status dpjl_sketch_values(const dpjl_sketch* sketch, double* out,
                               size_t k) {
  return guarded([&] {
    require(sketch && out, "sketch and out");
    if (k != sketch->s.k()) {
      throw dpjl::Error(dpjl::ErrorCode::kDimMismatch,
                        "output buffer length must equal k");
    }
    std::copy(sketch->s.values.begin(), sketch->s.values.end(), out);
  });
}

dpjl_status dpjl_estimate(const dpjl_sketch* a, const dpjl_sketch* b,
                          int clamp_at_zero, dpjl_estimate_report* report) {
  return guarded([&] {
    require(a && b && report, "sketches and report");
    const auto r = dpjl::estimate_sqdist(a->s, b->s, clamp_at_zero != 0);
    *report = {r.estimate, r.bias_term, r.k, r.s, r.epsilon, r.delta};
  });
}

dpjl_status dpjl_estimate_csv(const dpjl_sketch* a, const dpjl_sketch* b,
                              char** csv) {
  return guarded([&] {
    require(a && b && csv, "sketches and csv");
    const auto r = dpjl::estimate_sqdist(a->s, b->s);
    *csv = dup_string(dpjl::estimate_csv_header() + "\n" +
                      dpjl::estimate_csv_row(r) + "\n");
  });
}

void dpjl_bench_variance_config_init(dpjl_bench_variance_config* config) {
  if (!config) return;
  static const double kGrid[] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const dpjl::BenchVarianceConfig d;
  *config = dpjl_bench_variance_config{};
  config->schemes = "sjlt_laplace,sjlt_gaussian";
  config->dist_sq = d.dist_sq;
  config->delta_grid = kGrid;
  config->n_delta = 5;
  config->epsilon = d.epsilon;
  config->trials = d.trials;
  config->seed = d.seed;
  config->d = d.d;
  config->k = d.k;
  config->s = d.s;
  config->fjlt_beta = d.fjlt_beta;
  config->c_q = d.c_q;
  config->timing = 1;
  config->threads = 0;
}

dpjl_status dpjl_bench_variance(const dpjl_bench_variance_config* config,
                                char** rows_csv, char** crossover_csv) {
  return guarded([&] {
    require(config && config->schemes, "config and schemes");
    require(config->n_delta == 0 || config->delta_grid, "delta_grid");
    dpjl::BenchVarianceConfig c;
    c.schemes = split_csv(config->schemes);
    c.dist_sq = config->dist_sq;
    c.delta_grid.assign(config->delta_grid,
                        config->delta_grid + config->n_delta);
    c.epsilon = config->epsilon;
    c.trials = config->trials;
    c.seed = config->seed;
    c.d = config->d;
    c.k = config->k;
    c.s = config->s;
    c.fjlt_beta = config->fjlt_beta;
    c.c_q = config->c_q;
    c.timing = config->timing != 0;
    c.threads = config->threads;
    const auto rows = dpjl::bench_variance(c);
    std::string a = dpjl::bench_rows_csv(rows);
    std::string b = dpjl::crossover_csv(dpjl::crossover_analysis(rows));
    if (rows_csv) *rows_csv = dup_string(a);
    if (crossover_csv) *crossover_csv = dup_string(b);
  });
}

void dpjl_bench_time_config_init(dpjl_bench_time_config* config) {
  if (!config) return;
  static const size_t kGrid[] = {8};
  const dpjl::BenchTimeConfig d;
  *config = dpjl_bench_time_config{};
  config->d = d.d;
  config->k = d.k;
  config->sparsity_grid = kGrid;
  config->n_sparsity = 1;
  config->trials = d.trials;
  config->seed = d.seed;
  config->alpha = d.alpha;
  config->beta = d.beta;
  config->c_q = d.c_q;
  config->timing = 1;
}

dpjl_status dpjl_bench_time(const dpjl_bench_time_config* config, char** csv) {
  return guarded([&] {
    require(config && csv, "config and csv");
    require(config->n_sparsity == 0 || config->sparsity_grid, "sparsity_grid");
    dpjl::BenchTimeConfig c;
    c.d = config->d;
    c.k = config->k;
    c.sparsity_grid.assign(config->sparsity_grid,
                           config->sparsity_grid + config->n_sparsity);
    c.trials = config->trials;
    c.seed = config->seed;
    c.alpha = config->alpha;
    c.beta = config->beta;
    c.c_q = config->c_q;
    c.timing = config->timing != 0;
    *csv = dup_string(dpjl::bench_time_csv(dpjl::bench_time(c)));
  });
}

dpjl_status dpjl_oracle_check(size_t k, size_t s, const double* x, size_t d,
                              dpjl_oracle_report* report) {
  return guarded([&] {
    require(x && report, "x and report");
    const auto r = dpjl::oracle_check(k, s, std::span<const double>(x, d));
    *report = {r.result.mean,     r.result.variance,  r.result.count,
               r.analytic_mean,   r.analytic_variance, r.max_abs_diff};
  });
}

}  // extern "C"
