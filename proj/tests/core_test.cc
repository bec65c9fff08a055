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

#include <bit>
#include <cmath>
#include <set>

#include "dpjl/core.hpp"
#include "test_support.hpp"

namespace dpjl {
namespace {

// Dense normalized Hadamard entry: (-1)^popcount(f & j) / sqrt(n).
RealVector dense_hadamard(const RealVector& v) {
  const std::size_t n = v.size();
  RealVector out(n, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t j = 0; j < n; ++j) {
      const double h = (std::popcount(f & j) % 2 == 0) ? scale : -scale;
      out[f] += h * v[j];
    }
  }
  return out;
}

RealVector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, derive_stream("test-vector"));
  RealVector v(n);
  for (double& x : v) x = sample_gaussian(1.0, rng);
  return v;
}

TEST(Fwht, FirstBasisVectorMapsToConstant) {
  const RealVector out = fwht(RealVector{1, 0, 0, 0});
  for (double v : out) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Fwht, HandEvaluatedPair) {
  const RealVector out = fwht(RealVector{1, 1, 0, 0});
  const RealVector expected{1, 0, 1, 0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out[i], expected[i], 1e-15);
}

TEST(Fwht, MatchesDenseHadamard) {
  for (std::size_t n : {1u, 2u, 8u, 32u, 128u}) {
    const RealVector v = random_vector(n, n);
    const RealVector fast = fwht(v);
    const RealVector slow = dense_hadamard(v);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-12);
  }
}

TEST(Fwht, InvolutionAndNormPreservation) {
  for (std::size_t n = 1; n <= (1u << 12); n <<= 1) {
    const RealVector v = random_vector(n, 100 + n);
    const RealVector once = fwht(v);
    EXPECT_NEAR(norm2_sq(once), norm2_sq(v), 1e-12 * norm2_sq(v));
    const RealVector twice = fwht(once);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(twice[i], v[i], 1e-12);
  }
}

TEST(Fwht, RejectsNonPowerOfTwo) {
  RealVector v(6, 1.0);
  EXPECT_DPJL_ERROR(fwht_inplace(v), ErrorCode::kNotPowerOfTwo);
  RealVector empty;
  EXPECT_DPJL_ERROR(fwht_inplace(empty), ErrorCode::kNotPowerOfTwo);
}

TEST(PadPow2, Examples) {
  EXPECT_EQ(pad_pow2(RealVector{1, 2, 3, 4}), (RealVector{1, 2, 3, 4}));
  EXPECT_EQ(pad_pow2(RealVector{1, 2, 3}), (RealVector{1, 2, 3, 0}));
  const RealVector v = random_vector(5, 7);
  const RealVector p = pad_pow2(v);
  EXPECT_EQ(p.size(), 8u);
  EXPECT_DOUBLE_EQ(norm2_sq(p), norm2_sq(v));
}

TEST(NextPow2, Values) {
  EXPECT_EQ(next_pow2(1), 1u);
  EXPECT_EQ(next_pow2(3), 4u);
  EXPECT_EQ(next_pow2(16), 16u);
  EXPECT_EQ(next_pow2(17), 32u);
  EXPECT_TRUE(is_pow2(1024));
  EXPECT_FALSE(is_pow2(0));
  EXPECT_FALSE(is_pow2(12));
}

TEST(Norms, SmallVector) {
  const RealVector v{1, -2, 2};
  EXPECT_DOUBLE_EQ(norm2_sq(v), 9.0);
  EXPECT_DOUBLE_EQ(norm4_4(v), 33.0);
}

TEST(Rng, SameSeedAndStreamRepeat) {
  Rng a(42, derive_stream("x", 3));
  Rng b(42, derive_stream("x", 3));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DistinctStreamsDiffer) {
  EXPECT_NE(derive_stream("a"), derive_stream("b"));
  EXPECT_NE(derive_stream("a", 0), derive_stream("a", 1));
  EXPECT_NE(derive_stream("a", 0, 0), derive_stream("a", 0, 1));
  Rng a(42, derive_stream("x", 0));
  Rng b(42, derive_stream("x", 1));
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, UniformRanges) {
  Rng rng(1, derive_stream("ranges"));
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double c = rng.uniform_centered();
    EXPECT_GT(c, -0.5);
    EXPECT_LE(c, 0.5);
    const int s = rng.sign();
    EXPECT_TRUE(s == 1 || s == -1);
    const std::uint64_t b = rng.below(7);
    EXPECT_LT(b, 7u);
    seen.insert(b);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Laplace, ZeroUniformGivesMedian) {
  EXPECT_EQ(laplace_from_uniform(0.0, 3.0), 0.0);
}

TEST(Laplace, InverseCdfIsOddAndMatchesQuantile) {
  // P(L <= -b ln 2) = 1/4 for Lap(0, b).
  EXPECT_NEAR(laplace_from_uniform(0.25, 2.0), 2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(laplace_from_uniform(-0.25, 2.0), -2.0 * std::log(2.0), 1e-15);
}

TEST(Laplace, RejectsNonPositiveScale) {
  Rng rng(1, 0);
  EXPECT_DPJL_ERROR(sample_laplace(0.0, rng), ErrorCode::kInvalidScale);
  EXPECT_DPJL_ERROR(sample_laplace(-1.0, rng), ErrorCode::kInvalidScale);
  EXPECT_DPJL_ERROR(sample_gaussian(0.0, rng), ErrorCode::kInvalidScale);
}

TEST(Laplace, EmpiricalMoments) {
  constexpr int kN = 1'000'000;
  Rng rng(11, derive_stream("laplace-moments"));
  double abs_sum = 0.0;
  for (int i = 0; i < kN; ++i) abs_sum += std::fabs(sample_laplace(1.0, rng));
  EXPECT_NEAR(abs_sum / kN, 1.0, 0.01);
  double sq_sum = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double l = sample_laplace(2.0, rng);
    sq_sum += l * l;
  }
  EXPECT_NEAR(sq_sum / kN, 8.0, 0.2);
}

TEST(Gaussian, EmpiricalMoments) {
  constexpr int kN = 1'000'000;
  Rng rng(12, derive_stream("gaussian-moments"));
  double sum = 0.0;
  for (int i = 0; i < kN; ++i) sum += sample_gaussian(1.0, rng);
  EXPECT_NEAR(sum / kN, 0.0, 0.01);
  double sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double g = sample_gaussian(3.0, rng);
    sq += g * g;
  }
  EXPECT_NEAR(sq / kN, 9.0, 0.15);
  double fourth = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double g = sample_gaussian(1.0, rng);
    fourth += g * g * g * g;
  }
  EXPECT_NEAR(fourth / kN, 3.0, 0.1);
}

TEST(CheckRealVector, RejectsEmptyAndNonFinite) {
  EXPECT_DPJL_ERROR(check_real_vector(RealVector{}, "x"),
                    ErrorCode::kInvalidArgument);
  EXPECT_DPJL_ERROR(check_real_vector(RealVector{1.0, NAN}, "x"),
                    ErrorCode::kInvalidArgument);
  EXPECT_DPJL_ERROR(check_real_vector(RealVector{INFINITY}, "x"),
                    ErrorCode::kInvalidArgument);
  check_real_vector(RealVector{0.0}, "x");
}

}  // namespace
}  // namespace dpjl
