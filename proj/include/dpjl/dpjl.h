/*
 * Copyright 2026 The dpjl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libdpjl: differentially private Johnson-Lindenstrauss
 * sketches for squared-distance estimation.
 *
 * Conventions:
 *   - Every fallible call returns a dpjl_status. On failure, outputs are
 *     left untouched and dpjl_last_error() describes the problem. The
 *     message is thread-local and valid until the next call on that thread.
 *   - Handles are opaque and owned by the caller; release them with the
 *     matching *_free function. Passing NULL to a *_free function is a
 *     no-op.
 *   - Strings returned through char** are heap-allocated by the library
 *     and must be released with dpjl_free_string().
 *   - Handles are immutable after creation and may be shared across
 *     threads for reading.
 */

#ifndef DPJL_DPJL_H_
#define DPJL_DPJL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DPJL_BUILDING_LIBRARY)
#define DPJL_API __attribute__((visibility("default")))
#else
#define DPJL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpjl_status {
  DPJL_OK = 0,
  DPJL_ERR_NOT_POWER_OF_TWO = 1,
  DPJL_ERR_INVALID_SCALE = 2,
  DPJL_ERR_INVALID_ACCURACY = 3,
  DPJL_ERR_INVALID_BLOCK_STRUCTURE = 4,
  DPJL_ERR_DIM_MISMATCH = 5,
  DPJL_ERR_INVALID_PRIVACY = 6,
  DPJL_ERR_GAUSSIAN_NEEDS_DELTA = 7,
  DPJL_ERR_SCHEME_MISMATCH = 8,
  DPJL_ERR_INCOMPATIBLE_SKETCHES = 9,
  DPJL_ERR_TOO_MANY_CONFIGS = 10,
  DPJL_ERR_INVALID_ARGUMENT = 11,
  DPJL_ERR_IO = 12,
  DPJL_ERR_PARSE = 13,
  DPJL_ERR_INTERNAL = 99
} dpjl_status;

typedef enum dpjl_transform_type {
  DPJL_SJLT = 0,
  DPJL_FJLT = 1,
  DPJL_IID = 2
} dpjl_transform_type;

typedef enum dpjl_mechanism {
  DPJL_MECH_AUTO = -1,
  DPJL_MECH_LAPLACE = 0,
  DPJL_MECH_GAUSSIAN = 1
} dpjl_mechanism;

typedef enum dpjl_site { DPJL_SITE_OUTPUT = 0, DPJL_SITE_INPUT = 1 } dpjl_site;

typedef struct dpjl_transform dpjl_transform;
typedef struct dpjl_sketch dpjl_sketch;

DPJL_API const char* dpjl_last_error(void);
DPJL_API const char* dpjl_status_name(dpjl_status status);
DPJL_API const char* dpjl_version(void);
DPJL_API void dpjl_free_string(char* s);

/* ---- Transforms ---------------------------------------------------------- */

/* s = ceil(c_s/alpha ln(1/beta)), k = ceil(c_k/alpha^2 ln(1/beta)) rounded up
 * to a multiple of s. */
DPJL_API dpjl_status dpjl_params_from_accuracy(double alpha, double beta,
                                               size_t d, double c_k,
                                               double c_s, size_t* k,
                                               size_t* s);

typedef struct dpjl_transform_config {
  dpjl_transform_type type;
  size_t d;
  double alpha;
  double beta;
  /* 0 derives the value from (alpha, beta). For the SJLT, k and s must be
   * given together or not at all. */
  size_t k;
  size_t s;
  double c_k; /* 0 means 2 */
  double c_s; /* 0 means 1 */
  double c_q; /* FJLT only; 0 means 1 */
  uint64_t seed;
  /* SJLT only: 0 for the keyed PRF hash, otherwise the degree of the
   * polynomial hash family. */
  int hash_degree;
} dpjl_transform_config;

/* Fills *config with the defaults above (type SJLT, everything else 0). */
DPJL_API void dpjl_transform_config_init(dpjl_transform_config* config);

DPJL_API dpjl_status dpjl_transform_create(const dpjl_transform_config* config,
                                           dpjl_transform** out);
DPJL_API dpjl_status dpjl_transform_load(const char* path,
                                         dpjl_transform** out);
DPJL_API dpjl_status dpjl_transform_from_json(const char* json,
                                              dpjl_transform** out);
DPJL_API dpjl_status dpjl_transform_save(const dpjl_transform* t,
                                         const char* path);
DPJL_API dpjl_status dpjl_transform_to_json(const dpjl_transform* t,
                                            char** json);
DPJL_API void dpjl_transform_free(dpjl_transform* t);

typedef struct dpjl_transform_info {
  dpjl_transform_type type;
  size_t d;
  size_t k;
  size_t s;     /* SJLT only */
  size_t d_pad; /* FJLT only */
  double q;     /* FJLT only */
  double delta1;
  double delta2;
  uint64_t seed;
  char fingerprint[17];
} dpjl_transform_info;

DPJL_API dpjl_status dpjl_transform_get_info(const dpjl_transform* t,
                                             dpjl_transform_info* info);

/* out[0..k) = T x. */
DPJL_API dpjl_status dpjl_transform_apply(const dpjl_transform* t,
                                          const double* x, size_t d,
                                          double* out, size_t k);

/* acc[0..k) += T (delta e_j). SJLT only; touches exactly s entries. */
DPJL_API dpjl_status dpjl_sjlt_update(const dpjl_transform* t, double* acc,
                                      size_t k, size_t j, double delta);

/* ---- Private sketches ---------------------------------------------------- */

typedef struct dpjl_sketch_options {
  double epsilon;
  double delta;
  dpjl_site site;
  dpjl_mechanism mechanism;
  /* Debug only: calibrate as usual but add no noise. */
  int zero_noise;
  /* Noise stream; combined with a hash of x so that distinct inputs sketched
   * under the same seed get independent noise. */
  uint64_t seed;
} dpjl_sketch_options;

/* epsilon 1, delta 0, output site, automatic mechanism, seed 0. */
DPJL_API void dpjl_sketch_options_init(dpjl_sketch_options* options);

DPJL_API dpjl_status dpjl_sketch_create(const dpjl_transform* t,
                                        const double* x, size_t d,
                                        const dpjl_sketch_options* options,
                                        dpjl_sketch** out);
DPJL_API dpjl_status dpjl_sketch_load(const char* path, dpjl_sketch** out);
DPJL_API dpjl_status dpjl_sketch_from_json(const char* json,
                                           dpjl_sketch** out);
DPJL_API dpjl_status dpjl_sketch_save(const dpjl_sketch* sketch,
                                      const char* path);
DPJL_API dpjl_status dpjl_sketch_to_json(const dpjl_sketch* sketch,
                                         char** json);
DPJL_API void dpjl_sketch_free(dpjl_sketch* sketch);

typedef struct dpjl_sketch_info {
  dpjl_transform_type transform;
  dpjl_site site;
  dpjl_mechanism mechanism;
  double scale;
  double epsilon;
  double delta;
  size_t k;
  size_t d;
  size_t s;
  int pure_dp;
  /* Gaussian noise with epsilon >= 1, outside the classical analysis. */
  int gaussian_regime_flag;
  int zero_noise_debug;
  char fingerprint[17];
} dpjl_sketch_info;

DPJL_API dpjl_status dpjl_sketch_get_info(const dpjl_sketch* sketch,
                                          dpjl_sketch_info* info);

/* Copies the k released values into out. */
DPJL_API dpjl_status dpjl_sketch_values(const dpjl_sketch* sketch, double* out,
                                        size_t k);

/* ---- Estimation ---------------------------------------------------------- */

typedef struct dpjl_estimate_report {
  double estimate;
  double bias_term;
  size_t k;
  size_t s;
  double epsilon;
  double delta;
} dpjl_estimate_report;

/* ||a - b||^2 minus the noise bias. Fails with
 * DPJL_ERR_INCOMPATIBLE_SKETCHES if the sketches cannot be paired. */
DPJL_API dpjl_status dpjl_estimate(const dpjl_sketch* a, const dpjl_sketch* b,
                                   int clamp_at_zero,
                                   dpjl_estimate_report* report);

/* Header line and one data row, newline-terminated. */
DPJL_API dpjl_status dpjl_estimate_csv(const dpjl_sketch* a,
                                       const dpjl_sketch* b, char** csv);

/* ---- Benchmarks and oracle ----------------------------------------------- */

typedef struct dpjl_bench_variance_config {
  /* Comma-separated: sjlt_laplace, sjlt_gaussian, sjlt_auto, iid_gaussian,
   * fjlt_out, fjlt_in. */
  const char* schemes;
  double dist_sq;
  const double* delta_grid;
  size_t n_delta;
  double epsilon;
  uint64_t trials;
  uint64_t seed;
  size_t d;
  size_t k;
  size_t s;
  double fjlt_beta;
  double c_q;
  int timing;
  unsigned threads; /* 0 uses every hardware thread */
} dpjl_bench_variance_config;

DPJL_API void dpjl_bench_variance_config_init(
    dpjl_bench_variance_config* config);

/* rows_csv receives the BenchRow table, crossover_csv the per-delta
 * comparison. Either may be NULL. */
DPJL_API dpjl_status dpjl_bench_variance(
    const dpjl_bench_variance_config* config, char** rows_csv,
    char** crossover_csv);

typedef struct dpjl_bench_time_config {
  size_t d;
  size_t k;
  const size_t* sparsity_grid;
  size_t n_sparsity;
  size_t trials;
  uint64_t seed;
  double alpha;
  double beta;
  double c_q;
  int timing;
} dpjl_bench_time_config;

DPJL_API void dpjl_bench_time_config_init(dpjl_bench_time_config* config);
DPJL_API dpjl_status dpjl_bench_time(const dpjl_bench_time_config* config,
                                     char** csv);

typedef struct dpjl_oracle_report {
  double mean;
  double variance;
  uint64_t count;
  double analytic_mean;
  double analytic_variance;
  double max_abs_diff;
} dpjl_oracle_report;

/* Exhaustive SJLT moments of ||Sx||^2. Fails with DPJL_ERR_TOO_MANY_CONFIGS
 * when (2k/s)^(s d) exceeds 1e7. */
DPJL_API dpjl_status dpjl_oracle_check(size_t k, size_t s, const double* x,
                                       size_t d, dpjl_oracle_report* report);

#ifdef __cplusplus
}
#endif

#endif /* DPJL_DPJL_H_ */
