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

#include "dpjl/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace dpjl {
namespace {

using nlohmann::json;

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 m = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(m) & kMersenne61;
  std::uint64_t hi = static_cast<std::uint64_t>(m >> 61);
  std::uint64_t r = lo + hi;
  if (r >= kMersenne61) r -= kMersenne61;
  return r;
}

// Keyed hash of (seed, block, column, tag), split so the per-block key can
// be computed once: prf = mix64(prf_key(seed, r, tag) ^ j).
std::uint64_t prf_key(std::uint64_t seed, std::size_t r, std::uint64_t tag) {
  const std::uint64_t h = mix64(seed ^ 0x5bd1e9955bd1e995ULL);
  return mix64(h ^ (static_cast<std::uint64_t>(r) << 1 | tag));
}

void check_accuracy(double v, const char* name) {
  if (!(v > 0.0 && v < 0.5)) {
    throw Error(ErrorCode::kInvalidAccuracy,
                std::string(name) + " must lie in (0, 1/2)");
  }
}

void check_dim(std::span<const double> x, std::size_t d) {
  if (x.size() != d) {
    throw Error(ErrorCode::kDimMismatch,
                "input has dim " + std::to_string(x.size()) +
                    ", transform expects " + std::to_string(d));
  }
}

}  // namespace

SketchParams params_from_accuracy(double alpha, double beta, std::size_t d,
                                  double c_k, double c_s) {
  check_accuracy(alpha, "alpha");
  check_accuracy(beta, "beta");
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  if (!(c_k > 0.0) || !(c_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "c_k and c_s must be > 0");
  }
  const double log_inv_beta = std::log(1.0 / beta);
  SketchParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.d = d;
  p.c_k = c_k;
  p.c_s = c_s;
  p.s = static_cast<std::size_t>(std::ceil(c_s / alpha * log_inv_beta));
  const auto k_raw = static_cast<std::size_t>(
      std::ceil(c_k / (alpha * alpha) * log_inv_beta));
  p.k = (k_raw + p.s - 1) / p.s * p.s;
  return p;
}

// ---- SJLT ------------------------------------------------------------------

SjltTransform::SjltTransform(std::size_t d, std::size_t k, std::size_t s,
                             std::uint64_t seed, HashMode mode)
    : d_(d), k_(k), s_(s), seed_(seed), mode_(mode) {
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  if (s == 0 || k == 0 || s > k || k % s != 0) {
    throw Error(ErrorCode::kInvalidBlockStructure,
                "k=" + std::to_string(k) + " is not a positive multiple of s=" +
                    std::to_string(s));
  }
  if (mode_.kind == HashKind::kPrf) {
    prf_keys_.resize(2 * s);
    for (std::size_t r = 0; r < s; ++r) {
      prf_keys_[2 * r] = prf_key(seed, r, 0);
      prf_keys_[2 * r + 1] = prf_key(seed, r, 1);
    }
  }
  if (mode_.kind == HashKind::kPolynomial) {
    if (mode_.degree < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "polynomial hash degree must be >= 0");
    }
    const std::size_t n = static_cast<std::size_t>(mode_.degree) + 1;
    bucket_coeffs_.resize(s * n);
    sign_coeffs_.resize(s * n);
    for (std::size_t r = 0; r < s; ++r) {
      Rng rng(seed, derive_stream("sjlt-poly", r));
      for (std::size_t c = 0; c < n; ++c) {
        bucket_coeffs_[r * n + c] = rng.below(kMersenne61);
        sign_coeffs_[r * n + c] = rng.below(kMersenne61);
      }
    }
  }
}

SjltTransform SjltTransform::from_params(const SketchParams& params,
                                         std::uint64_t seed, HashMode mode) {
  SjltTransform t(params.d, params.k, params.s, seed, mode);
  t.meta.alpha = params.alpha;
  t.meta.beta = params.beta;
  t.meta.c_k = params.c_k;
  t.meta.c_s = params.c_s;
  return t;
}

std::uint64_t SjltTransform::poly_eval(std::span<const std::uint64_t> coeffs,
                                       std::uint64_t x) const {
  x %= kMersenne61;
  std::uint64_t acc = 0;
  for (std::uint64_t c : coeffs) {
    acc = mulmod61(acc, x) + c;
    if (acc >= kMersenne61) acc -= kMersenne61;
  }
  return acc;
}

std::size_t SjltTransform::bucket(std::size_t r, std::size_t j) const {
  const std::uint64_t b = block_size();
  if (mode_.kind == HashKind::kPrf) {
    const std::uint64_t h = mix64(prf_keys_[2 * r] ^ j);
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(h) * b) >> 64);
  }
  const std::size_t n = static_cast<std::size_t>(mode_.degree) + 1;
  const std::span<const std::uint64_t> c(bucket_coeffs_.data() + r * n, n);
  return static_cast<std::size_t>(poly_eval(c, j) % b);
}

int SjltTransform::sign(std::size_t r, std::size_t j) const {
  if (mode_.kind == HashKind::kPrf) {
    return (mix64(prf_keys_[2 * r + 1] ^ j) >> 63) ? 1 : -1;
  }
  const std::size_t n = static_cast<std::size_t>(mode_.degree) + 1;
  const std::span<const std::uint64_t> c(sign_coeffs_.data() + r * n, n);
  return (poly_eval(c, j) & 1) ? 1 : -1;
}

RealVector SjltTransform::apply(std::span<const double> x) const {
  check_dim(x, d_);
  RealVector out(k_, 0.0);
  const double sqrt_s = std::sqrt(static_cast<double>(s_));
  const std::size_t b = block_size();
  for (std::size_t j = 0; j < d_; ++j) {
    if (x[j] == 0.0) continue;
    const double v = x[j] / sqrt_s;
    for (std::size_t r = 0; r < s_; ++r) {
      out[r * b + bucket(r, j)] += sign(r, j) * v;
    }
  }
  return out;
}

void SjltTransform::update(std::span<double> acc, std::size_t j,
                           double delta) const {
  if (j >= d_) {
    throw Error(ErrorCode::kDimMismatch,
                "coordinate " + std::to_string(j) + " out of range for d=" +
                    std::to_string(d_));
  }
  if (acc.size() != k_) {
    throw Error(ErrorCode::kDimMismatch, "accumulator must have length k");
  }
  const double v = delta / std::sqrt(static_cast<double>(s_));
  const std::size_t b = block_size();
  for (std::size_t r = 0; r < s_; ++r) {
    acc[r * b + bucket(r, j)] += sign(r, j) * v;
  }
}

RealVector SjltTransform::column(std::size_t j) const {
  RealVector out(k_, 0.0);
  update(out, j, 1.0);
  return out;
}

// ---- FJLT ------------------------------------------------------------------

FjltTransform FjltTransform::create(double alpha, double beta, std::size_t d,
                                    std::size_t k, double c_q,
                                    std::uint64_t seed) {
  check_accuracy(beta, "beta");
  if (d == 0 || k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "d and k must be >= 1");
  }
  if (!(c_q > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c_q must be > 0");
  const std::size_t d_pad = next_pow2(d);
  const double l = std::log(1.0 / beta);
  const double q = std::min(c_q * l * l / static_cast<double>(d_pad), 1.0);

  Rng sign_rng(seed, derive_stream("fjlt-d"));
  std::vector<int> signs(d_pad);
  for (int& s : signs) s = sign_rng.sign();

  const double p_sigma = 1.0 / std::sqrt(q);
  std::vector<std::vector<SparseEntry>> rows(k);
  Rng rng(seed, derive_stream("fjlt-p"));
  for (std::size_t i = 0; i < k; ++i) {
    if (q >= 1.0) rows[i].reserve(d_pad);
    for (std::size_t f = 0; f < d_pad; ++f) {
      if (q >= 1.0 || rng.uniform() < q) {
        rows[i].push_back(
            {static_cast<std::uint32_t>(f), sample_gaussian(p_sigma, rng)});
      }
    }
  }
  FjltTransform t(d, k, q, seed, std::move(signs), std::move(rows));
  t.meta.alpha = alpha;
  t.meta.beta = beta;
  t.meta.c_q = c_q;
  return t;
}

FjltTransform::FjltTransform(std::size_t d, std::size_t k, double q,
                             std::uint64_t seed, std::vector<int> d_signs,
                             std::vector<std::vector<SparseEntry>> p_rows)
    : d_(d),
      d_pad_(next_pow2(d)),
      k_(k),
      q_(q),
      seed_(seed),
      d_signs_(std::move(d_signs)),
      p_rows_(std::move(p_rows)) {
  if (d_ == 0 || k_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "d and k must be >= 1");
  }
  if (!(q_ > 0.0 && q_ <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "q must lie in (0, 1]");
  }
  if (d_signs_.size() != d_pad_ || p_rows_.size() != k_) {
    throw Error(ErrorCode::kDimMismatch,
                "FJLT needs d_pad signs and k rows of P");
  }
  for (int s : d_signs_) {
    if (s != 1 && s != -1) {
      throw Error(ErrorCode::kInvalidArgument, "D entries must be +-1");
    }
  }
  for (const auto& row : p_rows_) {
    for (const auto& e : row) {
      if (e.col >= d_pad_ || !std::isfinite(e.value)) {
        throw Error(ErrorCode::kInvalidArgument, "bad entry in P");
      }
    }
  }
}

std::size_t FjltTransform::nnz_p() const noexcept {
  std::size_t n = 0;
  for (const auto& row : p_rows_) n += row.size();
  return n;
}

RealVector FjltTransform::apply(std::span<const double> x) const {
  check_dim(x, d_);
  RealVector w(d_pad_, 0.0);
  for (std::size_t j = 0; j < d_; ++j) w[j] = d_signs_[j] * x[j];
  fwht_inplace(w);
  const double norm = 1.0 / std::sqrt(static_cast<double>(k_));
  RealVector out(k_, 0.0);
  for (std::size_t i = 0; i < k_; ++i) {
    double acc = 0.0;
    for (const auto& e : p_rows_[i]) acc += e.value * w[e.col];
    out[i] = norm * acc;
  }
  return out;
}

// ---- i.i.d. Gaussian -------------------------------------------------------

IidGaussianTransform::IidGaussianTransform(std::size_t d, std::size_t k,
                                           std::uint64_t seed)
    : d_(d), k_(k), seed_(seed), matrix_(d * k), delta2_exact_(0.0) {
  if (d == 0 || k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "d and k must be >= 1");
  }
  Rng rng(seed, derive_stream("iid-matrix"));
  const double sigma = 1.0 / std::sqrt(static_cast<double>(k));
  for (double& e : matrix_) e = sample_gaussian(sigma, rng);

  std::vector<double> col_sq(d_, 0.0);
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < d_; ++j) {
      const double e = matrix_[i * d_ + j];
      col_sq[j] += e * e;
    }
  }
  delta2_exact_ = std::sqrt(*std::max_element(col_sq.begin(), col_sq.end()));
}

RealVector IidGaussianTransform::apply(std::span<const double> x) const {
  check_dim(x, d_);
  RealVector out(k_, 0.0);
  for (std::size_t i = 0; i < k_; ++i) {
    const double* row = matrix_.data() + i * d_;
    double acc = 0.0;
    for (std::size_t j = 0; j < d_; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
  return out;
}

// ---- Variant helpers -------------------------------------------------------

TransformType transform_type(const Transform& t) noexcept {
  switch (t.index()) {
    case 0: return TransformType::kSjlt;
    case 1: return TransformType::kFjlt;
    default: return TransformType::kIid;
  }
}

const char* transform_type_name(TransformType type) noexcept {
  switch (type) {
    case TransformType::kSjlt: return "sjlt";
    case TransformType::kFjlt: return "fjlt";
    case TransformType::kIid: return "iid";
  }
  return "?";
}

std::size_t input_dim(const Transform& t) noexcept {
  return std::visit([](const auto& v) { return v.d(); }, t);
}

std::size_t output_dim(const Transform& t) noexcept {
  return std::visit([](const auto& v) { return v.k(); }, t);
}

std::size_t sparsity(const Transform& t) noexcept {
  if (const auto* s = std::get_if<SjltTransform>(&t)) return s->s();
  return 0;
}

RealVector apply_transform(const Transform& t, std::span<const double> x) {
  return std::visit([&](const auto& v) { return v.apply(x); }, t);
}

namespace {

double column_norm_max(const std::vector<double>& acc, int p) {
  const double m = *std::max_element(acc.begin(), acc.end());
  return p == 1 ? m : std::sqrt(m);
}

double fjlt_sensitivity(const FjltTransform& t, int p) {
  // Row i of P H is H applied to the dense row of P (H is symmetric).
  std::vector<double> acc(t.d(), 0.0);
  const double norm = 1.0 / std::sqrt(static_cast<double>(t.k()));
  RealVector row(t.d_pad());
  for (const auto& sparse : t.p_rows()) {
    std::fill(row.begin(), row.end(), 0.0);
    for (const auto& e : sparse) row[e.col] = e.value;
    fwht_inplace(row);
    for (std::size_t j = 0; j < t.d(); ++j) {
      const double v = std::fabs(norm * row[j]);
      acc[j] += p == 1 ? v : v * v;
    }
  }
  return column_norm_max(acc, p);
}

double iid_sensitivity(const IidGaussianTransform& t, int p) {
  if (p == 2) return t.delta2_exact();
  std::vector<double> acc(t.d(), 0.0);
  for (std::size_t i = 0; i < t.k(); ++i) {
    for (std::size_t j = 0; j < t.d(); ++j) acc[j] += std::fabs(t.entry(i, j));
  }
  return column_norm_max(acc, 1);
}

}  // namespace

double column_sensitivity(const Transform& t, int p) {
  if (p != 1 && p != 2) {
    throw Error(ErrorCode::kInvalidArgument, "sensitivity norm must be 1 or 2");
  }
  switch (transform_type(t)) {
    case TransformType::kSjlt: {
      const auto& s = std::get<SjltTransform>(t);
      return p == 1 ? std::sqrt(static_cast<double>(s.s())) : 1.0;
    }
    case TransformType::kFjlt:
      return fjlt_sensitivity(std::get<FjltTransform>(t), p);
    case TransformType::kIid:
      return iid_sensitivity(std::get<IidGaussianTransform>(t), p);
  }
  return 0.0;
}

std::vector<RealVector> materialize_columns(const Transform& t) {
  const std::size_t d = input_dim(t);
  std::vector<RealVector> cols;
  cols.reserve(d);
  RealVector e(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    e[j] = 1.0;
    cols.push_back(apply_transform(t, e));
    e[j] = 0.0;
  }
  return cols;
}

// ---- Serialization ---------------------------------------------------------

namespace {

json meta_json(const AccuracyMeta& m) {
  return json{{"alpha", m.alpha}, {"beta", m.beta}, {"c_k", m.c_k},
              {"c_s", m.c_s},     {"c_q", m.c_q}};
}

AccuracyMeta meta_from_json(const json& j) {
  AccuracyMeta m;
  if (!j.contains("constants")) return m;
  const json& c = j.at("constants");
  m.alpha = c.value("alpha", 0.0);
  m.beta = c.value("beta", 0.0);
  m.c_k = c.value("c_k", 0.0);
  m.c_s = c.value("c_s", 0.0);
  m.c_q = c.value("c_q", 0.0);
  return m;
}

json to_json(const SjltTransform& t) {
  json j{{"type", "sjlt"},
         {"version", 1},
         {"d", t.d()},
         {"k", t.k()},
         {"s", t.s()},
         {"seed", t.seed()},
         {"constants", meta_json(t.meta)}};
  if (t.hash_mode().kind == HashKind::kPrf) {
    j["hash_mode"] = "prf";
  } else {
    j["hash_mode"] = "polynomial";
    j["hash_degree"] = t.hash_mode().degree;
  }
  return j;
}

json to_json(const FjltTransform& t) {
  json rows = json::array();
  for (const auto& row : t.p_rows()) {
    json r = json::array();
    for (const auto& e : row) r.push_back(json::array({e.col, e.value}));
    rows.push_back(std::move(r));
  }
  return json{{"type", "fjlt"},
              {"version", 1},
              {"d", t.d()},
              {"d_pad", t.d_pad()},
              {"k", t.k()},
              {"q", t.q()},
              {"seed", t.seed()},
              {"constants", meta_json(t.meta)},
              {"d_signs", t.d_signs()},
              {"p_rows", std::move(rows)}};
}

json to_json(const IidGaussianTransform& t) {
  // The matrix is reconstructed from the seed; delta2_exact is kept so a
  // loader can detect a reconstruction mismatch.
  return json{{"type", "iid"},       {"version", 1},
              {"d", t.d()},          {"k", t.k()},
              {"seed", t.seed()},    {"entry_variance", "1/k"},
              {"delta2_exact", t.delta2_exact()}};
}

}  // namespace

std::string serialize_transform(const Transform& t) {
  return std::visit([](const auto& v) { return to_json(v).dump(); }, t);
}

Transform parse_transform(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("transform JSON: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    const auto d = j.at("d").get<std::size_t>();
    const auto k = j.at("k").get<std::size_t>();
    const auto seed = j.at("seed").get<std::uint64_t>();
    if (type == "sjlt") {
      HashMode mode;
      if (j.value("hash_mode", std::string("prf")) == "polynomial") {
        mode = HashMode::polynomial(j.at("hash_degree").get<int>());
      }
      SjltTransform t(d, k, j.at("s").get<std::size_t>(), seed, mode);
      t.meta = meta_from_json(j);
      return t;
    }
    if (type == "fjlt") {
      std::vector<std::vector<SparseEntry>> rows;
      for (const auto& r : j.at("p_rows")) {
        std::vector<SparseEntry> row;
        for (const auto& e : r) {
          row.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
        }
        rows.push_back(std::move(row));
      }
      FjltTransform t(d, k, j.at("q").get<double>(), seed,
                      j.at("d_signs").get<std::vector<int>>(), std::move(rows));
      t.meta = meta_from_json(j);
      return t;
    }
    if (type == "iid") {
      IidGaussianTransform t(d, k, seed);
      if (j.contains("delta2_exact") &&
          j.at("delta2_exact").get<double>() != t.delta2_exact()) {
        throw Error(ErrorCode::kParse,
                    "iid transform: reconstructed matrix does not match the "
                    "stored delta2_exact");
      }
      return t;
    }
    throw Error(ErrorCode::kParse, "unknown transform type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("transform JSON: ") + e.what());
  }
}

std::string transform_fingerprint(const Transform& t) {
  const std::string text = serialize_transform(t);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dpjl
