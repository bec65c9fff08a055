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

// The three Johnson-Lindenstrauss transforms:
//
//  * SjltTransform: sparse block construction. The output is s blocks of
//    k/s rows; column j has exactly one entry +-1/sqrt(s) per block, at row
//    h_r(j) of block r with sign phi_r(j).
//  * FjltTransform: (1/sqrt(k)) P H D on the zero-padded input, with a random
//    sign diagonal D, the normalized Hadamard matrix H and a sparse Gaussian P
//    whose entries are present with probability q and distributed N(0, 1/q).
//  * IidGaussianTransform: dense k x d matrix with N(0, 1/k) entries.
//
// All three are normalized so that E ||Tx||^2 = ||x||^2.

#ifndef DPJL_TRANSFORMS_HPP_
#define DPJL_TRANSFORMS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpjl/core.hpp"

namespace dpjl {

struct SketchParams {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t s = 0;
  double c_k = 2.0;
  double c_s = 1.0;
};

// s = ceil(c_s / alpha * ln(1/beta)),
// k = ceil(c_k / alpha^2 * ln(1/beta)) rounded up to a multiple of s.
// Throws kInvalidAccuracy unless 0 < alpha, beta < 1/2.
SketchParams params_from_accuracy(double alpha, double beta, std::size_t d,
                                  double c_k = 2.0, double c_s = 1.0);

// Optional record of how a transform's dimensions were derived. Zero means
// "not recorded" (e.g. k and s were given explicitly).
struct AccuracyMeta {
  double alpha = 0.0;
  double beta = 0.0;
  double c_k = 0.0;
  double c_s = 0.0;
  double c_q = 0.0;
};

enum class HashKind { kPrf, kPolynomial };

struct HashMode {
  HashKind kind = HashKind::kPrf;
  // Polynomial degree; the family is (degree + 1)-wise independent.
  int degree = 0;

  static HashMode prf() { return {}; }
  static HashMode polynomial(int degree) {
    return {HashKind::kPolynomial, degree};
  }
};

class SjltTransform {
 public:
  // Throws kInvalidBlockStructure unless 1 <= s <= k and s divides k.
  SjltTransform(std::size_t d, std::size_t k, std::size_t s,
                std::uint64_t seed, HashMode mode = HashMode::prf());

  static SjltTransform from_params(const SketchParams& params,
                                   std::uint64_t seed,
                                   HashMode mode = HashMode::prf());

  std::size_t d() const noexcept { return d_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t s() const noexcept { return s_; }
  std::size_t block_size() const noexcept { return k_ / s_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const HashMode& hash_mode() const noexcept { return mode_; }

  // h_r(j) in [0, k/s) and phi_r(j) in {-1, +1}.
  std::size_t bucket(std::size_t r, std::size_t j) const;
  int sign(std::size_t r, std::size_t j) const;

  RealVector apply(std::span<const double> x) const;

  // acc += S (delta e_j). Touches exactly s coordinates.
  void update(std::span<double> acc, std::size_t j, double delta) const;

  // Column j of S, length k.
  RealVector column(std::size_t j) const;

  AccuracyMeta meta;

 private:
  std::uint64_t poly_eval(std::span<const std::uint64_t> coeffs,
                          std::uint64_t x) const;

  std::size_t d_;
  std::size_t k_;
  std::size_t s_;
  std::uint64_t seed_;
  HashMode mode_;
  // PRF mode only: per-block keys for the bucket and sign hashes.
  std::vector<std::uint64_t> prf_keys_;
  // Polynomial mode only: (degree + 1) coefficients per block, for the
  // bucket hash and the sign hash respectively.
  std::vector<std::uint64_t> bucket_coeffs_;
  std::vector<std::uint64_t> sign_coeffs_;
};

struct SparseEntry {
  std::uint32_t col;
  double value;
};

class FjltTransform {
 public:
  // q = min(c_q * ln^2(1/beta) / d_pad, 1). Throws kInvalidAccuracy unless
  // 0 < beta < 1/2, kInvalidArgument if k == 0 or d == 0.
  static FjltTransform create(double alpha, double beta, std::size_t d,
                              std::size_t k, double c_q, std::uint64_t seed);

  // Builds a transform from explicit parts. Used by deserialization and by
  // tests with hand-fixed P.
  FjltTransform(std::size_t d, std::size_t k, double q, std::uint64_t seed,
                std::vector<int> d_signs,
                std::vector<std::vector<SparseEntry>> p_rows);

  std::size_t d() const noexcept { return d_; }
  std::size_t d_pad() const noexcept { return d_pad_; }
  std::size_t k() const noexcept { return k_; }
  double q() const noexcept { return q_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<int>& d_signs() const noexcept { return d_signs_; }
  const std::vector<std::vector<SparseEntry>>& p_rows() const noexcept {
    return p_rows_;
  }
  std::size_t nnz_p() const noexcept;

  // (1/sqrt(k)) P H D pad(x).
  RealVector apply(std::span<const double> x) const;

  AccuracyMeta meta;

 private:
  std::size_t d_;
  std::size_t d_pad_;
  std::size_t k_;
  double q_;
  std::uint64_t seed_;
  std::vector<int> d_signs_;
  std::vector<std::vector<SparseEntry>> p_rows_;
};

class IidGaussianTransform {
 public:
  IidGaussianTransform(std::size_t d, std::size_t k, std::uint64_t seed);

  std::size_t d() const noexcept { return d_; }
  std::size_t k() const noexcept { return k_; }
  std::uint64_t seed() const noexcept { return seed_; }
  // Row-major k x d.
  const std::vector<double>& matrix() const noexcept { return matrix_; }
  double entry(std::size_t i, std::size_t j) const { return matrix_[i * d_ + j]; }
  double delta2_exact() const noexcept { return delta2_exact_; }

  RealVector apply(std::span<const double> x) const;

 private:
  std::size_t d_;
  std::size_t k_;
  std::uint64_t seed_;
  std::vector<double> matrix_;
  double delta2_exact_;
};

using Transform =
    std::variant<SjltTransform, FjltTransform, IidGaussianTransform>;

enum class TransformType { kSjlt, kFjlt, kIid };

TransformType transform_type(const Transform& t) noexcept;
const char* transform_type_name(TransformType type) noexcept;
std::size_t input_dim(const Transform& t) noexcept;
std::size_t output_dim(const Transform& t) noexcept;
// SJLT sparsity, 0 for the other transforms.
std::size_t sparsity(const Transform& t) noexcept;

// Throws kDimMismatch if x.size() != input_dim(t).
RealVector apply_transform(const Transform& t, std::span<const double> x);

// Delta_p = max_j ||T e_j||_p for p in {1, 2}. Analytic for SJLT (sqrt(s)
// and 1); exact from the realized matrix for the others.
double column_sensitivity(const Transform& t, int p);

// Columns of the realized matrix obtained by applying t to each basis
// vector; result[j] has length output_dim(t).
std::vector<RealVector> materialize_columns(const Transform& t);

std::string serialize_transform(const Transform& t);
Transform parse_transform(std::string_view json_text);

// Hex FNV-1a 64 digest of serialize_transform(t).
std::string transform_fingerprint(const Transform& t);

}  // namespace dpjl

#endif  // DPJL_TRANSFORMS_HPP_
