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

// dpjl command-line tool. Talks to the library through the C API only.
//
// Exit codes: 0 ok, 1 usage or invalid input, 2 incompatible sketches,
// 3 oracle infeasible. DPJL_SEED, when set, overrides --seed.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpjl/dpjl.h"
#include "json.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kIncompatible = 2, kInfeasible = 3 };

struct Failure {
  int code;
};

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void check(dpjl_status st) {
  if (st == DPJL_OK) return;
  std::cerr << "dpjl: " << dpjl_status_name(st) << ": " << dpjl_last_error()
            << '\n';
  switch (st) {
    case DPJL_ERR_INCOMPATIBLE_SKETCHES: throw Failure{kIncompatible};
    case DPJL_ERR_TOO_MANY_CONFIGS: throw Failure{kInfeasible};
    default: throw Failure{kUsage};
  }
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::cerr << "dpjl: " << msg << '\n';
  throw Failure{kUsage};
}

struct TransformDeleter {
  void operator()(dpjl_transform* t) const { dpjl_transform_free(t); }
};
struct SketchDeleter {
  void operator()(dpjl_sketch* s) const { dpjl_sketch_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { dpjl_free_string(s); }
};
using TransformPtr = std::unique_ptr<dpjl_transform, TransformDeleter>;
using SketchPtr = std::unique_ptr<dpjl_sketch, SketchDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::uint64_t effective_seed(std::uint64_t flag) {
  const char* env = std::getenv("DPJL_SEED");
  if (env == nullptr || *env == '\0') return flag;
  std::uint64_t v = 0;
  const char* end = env + std::strlen(env);
  const auto r = std::from_chars(env, end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    usage_error("DPJL_SEED is not an unsigned integer");
  }
  return v;
}

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) {
    usage_error("cannot parse '" + text + "' in " + where);
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& list,
                                      const std::string& where) {
  std::vector<double> out;
  for (const auto& s : split(list)) out.push_back(parse_double(s, where));
  return out;
}

// A JSON array of numbers, or one decimal per line. Blank lines are skipped.
std::vector<double> read_vector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) usage_error("cannot open input '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string t = trim(text);
  std::vector<double> out;
  if (!t.empty() && t.front() == '[') {
    try {
      const auto j = nlohmann::json::parse(t);
      for (const auto& v : j) {
        if (!v.is_number()) usage_error("non-numeric entry in " + path);
        out.push_back(v.get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      usage_error("invalid JSON in " + path + ": " + e.what());
    }
    return out;
  }
  std::stringstream lines(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    ++n;
    line = trim(line);
    if (line.empty()) continue;
    out.push_back(parse_double(line, path + ":" + std::to_string(n)));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) usage_error("cannot write '" + path + "'");
  out << text;
}

const char* type_name(dpjl_transform_type t) {
  switch (t) {
    case DPJL_SJLT: return "sjlt";
    case DPJL_FJLT: return "fjlt";
    case DPJL_IID: return "iid";
  }
  return "?";
}

// ---- gen-transform ---------------------------------------------------------

struct GenTransformArgs {
  std::string type = "sjlt";
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::size_t s = 0;
  double c_k = 2.0;
  double c_s = 1.0;
  double c_q = 1.0;
  int hash_degree = 0;
  std::string out;
};

int run_gen_transform(const GenTransformArgs& a) {
  dpjl_transform_config c;
  dpjl_transform_config_init(&c);
  if (a.type == "sjlt") {
    c.type = DPJL_SJLT;
  } else if (a.type == "fjlt") {
    c.type = DPJL_FJLT;
  } else if (a.type == "iid") {
    c.type = DPJL_IID;
  } else {
    usage_error("--type must be sjlt, fjlt or iid");
  }
  c.d = a.dim;
  c.alpha = a.alpha;
  c.beta = a.beta;
  c.k = a.k;
  c.s = a.s;
  c.c_k = a.c_k;
  c.c_s = a.c_s;
  c.c_q = a.c_q;
  c.seed = effective_seed(a.seed);
  c.hash_degree = a.hash_degree;

  dpjl_transform* raw = nullptr;
  check(dpjl_transform_create(&c, &raw));
  TransformPtr t(raw);
  check(dpjl_transform_save(t.get(), a.out.c_str()));

  dpjl_transform_info info;
  check(dpjl_transform_get_info(t.get(), &info));
  std::cout << "type=" << type_name(info.type) << " d=" << info.d
            << " k=" << info.k << " s=" << info.s << " q=" << fmt(info.q)
            << " delta1=" << fmt(info.delta1) << " delta2=" << fmt(info.delta2)
            << " fingerprint=" << info.fingerprint << '\n';
  return kOk;
}

// ---- sketch ----------------------------------------------------------------

struct SketchArgs {
  std::string transform;
  std::string input;
  double epsilon = 1.0;
  double delta = 0.0;
  std::string site = "output";
  std::string mechanism = "auto";
  std::uint64_t seed = 0;
  std::string out;
  bool zero_noise = false;
};

int run_sketch(const SketchArgs& a) {
  dpjl_transform* raw = nullptr;
  check(dpjl_transform_load(a.transform.c_str(), &raw));
  TransformPtr t(raw);
  const std::vector<double> x = read_vector(a.input);

  dpjl_sketch_options o;
  dpjl_sketch_options_init(&o);
  o.epsilon = a.epsilon;
  o.delta = a.delta;
  if (a.site == "output") {
    o.site = DPJL_SITE_OUTPUT;
  } else if (a.site == "input") {
    o.site = DPJL_SITE_INPUT;
  } else {
    usage_error("--site must be input or output");
  }
  if (a.mechanism == "auto") {
    o.mechanism = DPJL_MECH_AUTO;
  } else if (a.mechanism == "laplace") {
    o.mechanism = DPJL_MECH_LAPLACE;
  } else if (a.mechanism == "gaussian") {
    o.mechanism = DPJL_MECH_GAUSSIAN;
  } else {
    usage_error("--mechanism must be auto, laplace or gaussian");
  }
  o.zero_noise = a.zero_noise ? 1 : 0;
  o.seed = effective_seed(a.seed);

  dpjl_sketch* sraw = nullptr;
  check(dpjl_sketch_create(t.get(), x.data(), x.size(), &o, &sraw));
  SketchPtr s(sraw);
  check(dpjl_sketch_save(s.get(), a.out.c_str()));

  dpjl_sketch_info info;
  check(dpjl_sketch_get_info(s.get(), &info));
  std::cerr << "mechanism="
            << (info.mechanism == DPJL_MECH_LAPLACE ? "laplace" : "gaussian")
            << " scale=" << fmt(info.scale) << " site="
            << (info.site == DPJL_SITE_INPUT ? "input" : "output")
            << " k=" << info.k << (info.pure_dp ? " pure-dp" : " approx-dp")
            << '\n';
  if (info.gaussian_regime_flag) {
    std::cerr << "warning: Gaussian mechanism with epsilon >= 1 is outside "
                 "the classical calibration regime\n";
  }
  if (info.zero_noise_debug) {
    std::cerr << "warning: zero-noise debug sketch, not private\n";
  }
  return kOk;
}

// ---- estimate --------------------------------------------------------------

int run_estimate(const std::string& path_a, const std::string& path_b) {
  dpjl_sketch* ra = nullptr;
  check(dpjl_sketch_load(path_a.c_str(), &ra));
  SketchPtr a(ra);
  dpjl_sketch* rb = nullptr;
  check(dpjl_sketch_load(path_b.c_str(), &rb));
  SketchPtr b(rb);
  char* csv = nullptr;
  check(dpjl_estimate_csv(a.get(), b.get(), &csv));
  StringPtr owned(csv);
  std::cout << csv;
  return kOk;
}

// ---- bench-variance --------------------------------------------------------

struct BenchVarianceArgs {
  std::string schemes = "sjlt_laplace,sjlt_gaussian";
  double dist_sq = 100.0;
  std::string delta_grid = "1e-2,1e-3,1e-4,1e-5,1e-6";
  double epsilon = 1.0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::string out;
  std::string crossover_out;
  bool no_timing = false;
  std::size_t dim = 16;
  std::size_t k = 18;
  std::size_t s = 9;
  double fjlt_beta = 0.01;
  double c_q = 1.0;
  unsigned threads = 0;
};

int run_bench_variance(const BenchVarianceArgs& a) {
  const std::vector<double> grid = parse_double_list(a.delta_grid, "--delta-grid");
  dpjl_bench_variance_config c;
  dpjl_bench_variance_config_init(&c);
  c.schemes = a.schemes.c_str();
  c.dist_sq = a.dist_sq;
  c.delta_grid = grid.data();
  c.n_delta = grid.size();
  c.epsilon = a.epsilon;
  c.trials = a.trials;
  c.seed = effective_seed(a.seed);
  c.d = a.dim;
  c.k = a.k;
  c.s = a.s;
  c.fjlt_beta = a.fjlt_beta;
  c.c_q = a.c_q;
  c.timing = a.no_timing ? 0 : 1;
  c.threads = a.threads;

  char* rows = nullptr;
  char* cross = nullptr;
  check(dpjl_bench_variance(&c, &rows, &cross));
  StringPtr owned_rows(rows);
  StringPtr owned_cross(cross);
  write_text(a.out, rows);
  if (!a.crossover_out.empty()) {
    write_text(a.crossover_out, cross);
  } else {
    if (a.out.empty() || a.out == "-") std::cout << '\n';
    std::cout << cross;
  }
  return kOk;
}

// ---- bench-time ------------------------------------------------------------

struct BenchTimeArgs {
  std::size_t dim = 8192;
  std::size_t k = 512;
  std::string sparsity_grid = "8";
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double alpha = 0.25;
  double beta = 0.01;
  bool no_timing = false;
  std::string out;
};

int run_bench_time(const BenchTimeArgs& a) {
  std::vector<std::size_t> grid;
  for (double v : parse_double_list(a.sparsity_grid, "--sparsity-grid")) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      usage_error("--sparsity-grid entries must be positive integers");
    }
    grid.push_back(static_cast<std::size_t>(v));
  }
  dpjl_bench_time_config c;
  dpjl_bench_time_config_init(&c);
  c.d = a.dim;
  c.k = a.k;
  c.sparsity_grid = grid.data();
  c.n_sparsity = grid.size();
  c.trials = a.trials;
  c.seed = effective_seed(a.seed);
  c.alpha = a.alpha;
  c.beta = a.beta;
  c.timing = a.no_timing ? 0 : 1;
  char* csv = nullptr;
  check(dpjl_bench_time(&c, &csv));
  StringPtr owned(csv);
  write_text(a.out, csv);
  return kOk;
}

// ---- oracle-check ----------------------------------------------------------

int run_oracle_check(std::size_t k, std::size_t s, const std::string& x_list,
                     const std::string& input) {
  const std::vector<double> x =
      input.empty() ? parse_double_list(x_list, "--x") : read_vector(input);
  dpjl_oracle_report r;
  check(dpjl_oracle_check(k, s, x.data(), x.size(), &r));
  std::cout << "configs,mean,variance,analytic_mean,analytic_variance,"
               "max_abs_diff\n"
            << r.count << ',' << fmt(r.mean) << ',' << fmt(r.variance) << ','
            << fmt(r.analytic_mean) << ',' << fmt(r.analytic_variance) << ','
            << fmt(r.max_abs_diff) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private JL sketches"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dpjl_version());

  GenTransformArgs gen;
  auto* g = app.add_subcommand("gen-transform", "Generate a transform file");
  g->add_option("--type", gen.type, "sjlt, fjlt or iid")->default_val("sjlt");
  g->add_option("--alpha", gen.alpha, "Accuracy alpha in (0, 1/2)");
  g->add_option("--beta", gen.beta, "Failure probability beta in (0, 1/2)");
  g->add_option("--dim", gen.dim, "Input dimension d")->required();
  g->add_option("--seed", gen.seed, "Transform seed")->required();
  g->add_option("--k", gen.k, "Explicit output dimension");
  g->add_option("--s", gen.s, "Explicit SJLT sparsity");
  g->add_option("--c-k", gen.c_k, "Constant in k")->default_val(2.0);
  g->add_option("--c-s", gen.c_s, "Constant in s")->default_val(1.0);
  g->add_option("--c-q", gen.c_q, "FJLT density constant")->default_val(1.0);
  g->add_option("--hash-degree", gen.hash_degree,
                "SJLT polynomial hash degree (0: keyed PRF)");
  g->add_option("--out", gen.out, "Output file")->required();

  SketchArgs sk;
  auto* s = app.add_subcommand("sketch", "Release a private sketch of a vector");
  s->add_option("--transform", sk.transform, "Transform file")->required();
  s->add_option("--input", sk.input, "Vector file")->required();
  s->add_option("--epsilon", sk.epsilon, "Privacy epsilon")->required();
  s->add_option("--delta", sk.delta, "Privacy delta (default 0)");
  s->add_option("--site", sk.site, "output or input")->default_val("output");
  s->add_option("--mechanism", sk.mechanism, "auto, laplace or gaussian")
      ->default_val("auto");
  s->add_option("--seed", sk.seed, "Noise seed")->required();
  s->add_option("--out", sk.out, "Sketch file")->required();
  s->add_flag("--zero-noise", sk.zero_noise, "Debug: add no noise");

  std::string est_a;
  std::string est_b;
  auto* e = app.add_subcommand("estimate", "Estimate ||x - y||^2 from two sketches");
  e->add_option("--a", est_a, "First sketch")->required();
  e->add_option("--b", est_b, "Second sketch")->required();

  BenchVarianceArgs bv;
  auto* v = app.add_subcommand("bench-variance", "Estimator variance benchmark");
  v->add_option("--schemes", bv.schemes, "Comma-separated scheme list");
  v->add_option("--dist-sq", bv.dist_sq, "True squared distance");
  v->add_option("--delta-grid", bv.delta_grid, "Comma-separated deltas");
  v->add_option("--epsilon", bv.epsilon, "Privacy epsilon");
  v->add_option("--trials", bv.trials, "Monte Carlo trials per row");
  v->add_option("--seed", bv.seed, "Root seed");
  v->add_option("--out", bv.out, "Rows CSV (default stdout)");
  v->add_option("--crossover-out", bv.crossover_out,
                "Crossover CSV (default stdout)");
  v->add_flag("--no-timing", bv.no_timing, "Leave wall_time_ns empty");
  v->add_option("--dim", bv.dim, "Input dimension d");
  v->add_option("--k", bv.k, "Output dimension k");
  v->add_option("--s", bv.s, "SJLT sparsity s");
  v->add_option("--fjlt-beta", bv.fjlt_beta, "FJLT beta (sets q)");
  v->add_option("--c-q", bv.c_q, "FJLT density constant");
  v->add_option("--threads", bv.threads, "Worker threads (0: all)");

  BenchTimeArgs bt;
  auto* t = app.add_subcommand("bench-time", "Transform timing benchmark");
  t->add_option("--dim", bt.dim, "Input dimension d");
  t->add_option("--k", bt.k, "Output dimension k");
  t->add_option("--sparsity-grid", bt.sparsity_grid, "Comma-separated s values");
  t->add_option("--trials", bt.trials, "Repetitions per timing");
  t->add_option("--seed", bt.seed, "Root seed");
  t->add_option("--alpha", bt.alpha, "Alpha for the heuristic interval");
  t->add_option("--beta", bt.beta, "Beta for FJLT q and the interval");
  t->add_flag("--no-timing", bt.no_timing, "Leave median_ns empty");
  t->add_option("--out", bt.out, "CSV file (default stdout)");

  std::size_t oc_k = 2;
  std::size_t oc_s = 1;
  std::string oc_x = "1,1";
  std::string oc_input;
  auto* o = app.add_subcommand("oracle-check",
                               "Exhaustive SJLT moments against closed forms");
  o->add_option("--k", oc_k, "Output dimension k");
  o->add_option("--s", oc_s, "Sparsity s");
  o->add_option("--x", oc_x, "Comma-separated vector");
  o->add_option("--input", oc_input, "Vector file (overrides --x)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ok) {
    return app.exit(ok);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (*g) return run_gen_transform(gen);
    if (*s) return run_sketch(sk);
    if (*e) return run_estimate(est_a, est_b);
    if (*v) return run_bench_variance(bv);
    if (*t) return run_bench_time(bt);
    if (*o) return run_oracle_check(oc_k, oc_s, oc_x, oc_input);
  } catch (const Failure& f) {
    return f.code;
  }
  return kUsage;
}
