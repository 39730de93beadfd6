#pragma once

// Experiment configuration, seeded instance generation and the suite runner
// behind the CLI.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kclosed/circle_function.hpp"
#include "kclosed/embeddings.hpp"
#include "kclosed/factorize.hpp"
#include "kclosed/hardy_decomp.hpp"
#include "kclosed/kfunc.hpp"
#include "kclosed/matrix.hpp"
#include "kclosed/matrix_valued.hpp"
#include "kclosed/schatten.hpp"

namespace kclosed::harness {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t grid_n = 32;
  Eigen::Index matrix_n = 4;
  double t_min = 1e-2, t_max = 1e2;
  int points_per_decade = 2;
  double q = 2.0;  // exponent for the (1, q) suites
  double tol = 1e-7;
  long max_iter = 200000;
  std::map<std::string, double> thresholds;  // overrides, keyed by suite name
  double eps_zero = 1e-12;
  double eps_reg = 1e-8;
  int instances = 10;
  int workers = 0;  // 0: hardware concurrency

  convex::SolverOptions solver() const {
    convex::SolverOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return o;
  }

  std::vector<double> t_grid() const { return log_grid(t_min, t_max, points_per_decade); }

  // Ratio guard for K-closedness suites, residual guard for identity suites.
  double threshold(const std::string& suite) const {
    if (auto it = thresholds.find(suite); it != thresholds.end()) return it->second;
    if (suite == "prop25_identity") return 1e-5;
    if (suite == "lemma23_factor") return 1e-8;
    if (suite == "embeddings_42") return 1e-2;
    return 20.0;
  }

  void validate() const {
    require(is_power_of_two(grid_n) && grid_n >= 8, "config: grid_n must be a power of two >= 8");
    require(matrix_n >= 1 && matrix_n <= 16, "config: matrix_n must lie in [1, 16]");
    require(t_min > 0.0 && t_max >= t_min && points_per_decade >= 1, "config: invalid t_grid");
    require(q > 1.0 && std::isfinite(q), "config: q must lie in (1, inf)");
    require(tol > 0.0 && max_iter > 0, "config: solver settings must be positive");
    require(eps_zero > 0.0 && eps_reg > 0.0, "config: epsilons must be positive");
    require(instances >= 1 && workers >= 0, "config: instances must be >= 1");
    for (const auto& [k, v] : thresholds) require(v > 0.0, "config: threshold for " + k + " must be positive");
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"seed", c.seed},
       {"grid_n", c.grid_n},
       {"matrix_n", c.matrix_n},
       {"t_grid", {{"t_min", c.t_min}, {"t_max", c.t_max}, {"points_per_decade", c.points_per_decade}}},
       {"q", c.q},
       {"solver", {{"tol", c.tol}, {"max_iter", c.max_iter}}},
       {"thresholds", c.thresholds},
       {"epsilon", {{"eps_zero", c.eps_zero}, {"eps_reg", c.eps_reg}}},
       {"instances", c.instances},
       {"workers", c.workers}};
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  const auto get = [](const nlohmann::json& o, const char* key, auto& dst) {
    if (o.contains(key)) o.at(key).get_to(dst);
  };
  get(j, "seed", c.seed);
  get(j, "grid_n", c.grid_n);
  get(j, "matrix_n", c.matrix_n);
  get(j, "q", c.q);
  get(j, "instances", c.instances);
  get(j, "workers", c.workers);
  get(j, "thresholds", c.thresholds);
  if (j.contains("t_grid")) {
    const auto& t = j.at("t_grid");
    get(t, "t_min", c.t_min);
    get(t, "t_max", c.t_max);
    get(t, "points_per_decade", c.points_per_decade);
  }
  if (j.contains("solver")) {
    get(j.at("solver"), "tol", c.tol);
    get(j.at("solver"), "max_iter", c.max_iter);
  }
  if (j.contains("epsilon")) {
    get(j.at("epsilon"), "eps_zero", c.eps_zero);
    get(j.at("epsilon"), "eps_reg", c.eps_reg);
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  ExperimentConfig c = nlohmann::json::parse(in).get<ExperimentConfig>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Instances

enum class InstanceKind { analytic_poly, trig_poly, matrix, triangular_matrix, matrix_valued_poly };

inline InstanceKind parse_instance_kind(const std::string& s) {
  static const std::map<std::string, InstanceKind> names{{"analytic_poly", InstanceKind::analytic_poly},
                                                         {"trig_poly", InstanceKind::trig_poly},
                                                         {"matrix", InstanceKind::matrix},
                                                         {"triangular_matrix", InstanceKind::triangular_matrix},
                                                         {"matrix_valued_poly", InstanceKind::matrix_valued_poly}};
  const auto it = names.find(s);
  require(it != names.end(), "unknown instance kind: " + s);
  return it->second;
}

using Instance = std::variant<CircleFunction, MatrixOperator, MatrixFunction>;

// Independent stream per (seed, kind, index), so instances do not depend on
// generation order or worker count.
inline std::mt19937_64 instance_rng(const ExperimentConfig& c, InstanceKind kind, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline cplx complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const double re = nd(rng);
  return {re, nd(rng)};
}

// Coefficients ~ CN(0,1)/(|j| + 1) for 0 <= j <= N/4 (analytic) or
// |j| <= N/4 (trigonometric).
inline CircleFunction random_poly(const ExperimentConfig& c, bool analytic, std::uint64_t index) {
  auto rng = instance_rng(c, analytic ? InstanceKind::analytic_poly : InstanceKind::trig_poly, index);
  const long n = static_cast<long>(c.grid_n), deg = n / 4;
  std::vector<cplx> coeffs(static_cast<std::size_t>(n), 0.0);
  for (long j = analytic ? 0 : -deg; j <= deg; ++j)
    coeffs[static_cast<std::size_t>(j + n / 2)] = complex_gaussian(rng) / static_cast<double>(std::abs(j) + 1);
  return CircleFunction::from_coeffs(coeffs);
}

inline MatrixOperator random_matrix(const ExperimentConfig& c, std::uint64_t index,
                                    InstanceKind kind = InstanceKind::matrix) {
  auto rng = instance_rng(c, kind, index);
  MatrixOperator m(c.matrix_n, c.matrix_n);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = complex_gaussian(rng);
  return m;
}

// Triangular part of a Gaussian matrix; `shift` adds 3 I for invertibility.
inline MatrixOperator random_triangular(const ExperimentConfig& c, std::uint64_t index, bool shift) {
  MatrixOperator m = triangular_part(random_matrix(c, index, InstanceKind::triangular_matrix));
  if (shift) m.diagonal().array() += 3.0;
  return m;
}

// sum_{j <= 2} A_j z^j with Gaussian A_j / (j + 1), on a grid of at most 32 points.
inline MatrixFunction random_matrix_valued(const ExperimentConfig& c, std::uint64_t index) {
  auto rng = instance_rng(c, InstanceKind::matrix_valued_poly, index);
  const Eigen::Index n = std::min<Eigen::Index>(c.matrix_n, 8);
  std::vector<MatrixOperator> a(3, MatrixOperator(n, n));
  for (std::size_t d = 0; d < a.size(); ++d)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) a[d](i, j) = complex_gaussian(rng) / static_cast<double>(d + 1);
  return MatrixFunction::sample_z(std::min<std::size_t>(c.grid_n, 32), [&](cplx z) {
    return MatrixOperator(a[0] + z * a[1] + z * z * a[2]);
  });
}

inline Instance generate_instance(InstanceKind kind, const ExperimentConfig& c, std::uint64_t index = 0) {
  switch (kind) {
    case InstanceKind::analytic_poly: return random_poly(c, true, index);
    case InstanceKind::trig_poly: return random_poly(c, false, index);
    case InstanceKind::matrix: return random_matrix(c, index);
    case InstanceKind::triangular_matrix: return random_triangular(c, index, true);
    case InstanceKind::matrix_valued_poly: return random_matrix_valued(c, index);
  }
  throw std::invalid_argument("unknown instance kind");
}

inline nlohmann::json instance_to_json(const Instance& x) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, CircleFunction>) {
          return v;
        } else if constexpr (std::is_same_v<V, MatrixOperator>) {
          return matrix_to_json(v);
        } else {
          nlohmann::json s = nlohmann::json::array();
          for (const auto& m : v.samples) s.push_back(matrix_to_json(m));
          return {{"grid_n", v.size()}, {"samples", s}};
        }
      },
      x);
}

// ---------------------------------------------------------------------------
// Suites

struct Row {
  std::string instance_id;
  double t = 0.0, ambient_K = 0.0, achieved_cost = 0.0, ratio = 0.0, gap = 0.0, residual = 0.0;
};

struct InstanceOutcome {
  std::vector<Row> rows;
  std::map<std::string, double> metrics;  // aggregated as max over instances
  std::vector<std::string> violations;
  nlohmann::json instance;
};

struct SuiteResult {
  std::string suite;
  ExperimentConfig config;
  std::vector<Row> rows;
  std::map<std::string, double> metrics;
  std::vector<double> c_estimates;  // per-instance max ratio
  nlohmann::json failures = nlohmann::json::array();
  bool passed = true;

  void write_csv(std::ostream& os) const {
    os << "instance_id,t,ambient_K,achieved_cost,ratio,gap,residual\n";
    for (const auto& r : rows) {
      char buf[512];
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.instance_id.c_str(), r.t,
                    r.ambient_K, r.achieved_cost, r.ratio, r.gap, r.residual);
      os << buf;
    }
  }

  nlohmann::json summary() const {
    std::vector<double> sorted = c_estimates;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double a) {
      if (sorted.empty()) return 0.0;
      return sorted[static_cast<std::size_t>(std::lround(a * static_cast<double>(sorted.size() - 1)))];
    };
    return {{"schema", 1},
            {"suite", suite},
            {"config", config},
            {"instances", c_estimates.size()},
            {"threshold", config.threshold(suite)},
            {"c_estimate", {{"max", sorted.empty() ? 0.0 : sorted.back()},
                            {"median", quantile(0.5)},
                            {"min", sorted.empty() ? 0.0 : sorted.front()},
                            {"per_instance", c_estimates}}},
            {"metrics", metrics},
            {"passed", passed},
            {"failures", failures}};
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"jones_h1_hinf",    "prop12_h1_hq",    "thm21_triangular",
                                              "prop25_identity",  "lemma23_factor",  "simultaneous_03",
                                              "simultaneous_21i", "embeddings_42",   "matrix_valued_33"};
  return names;
}

namespace detail {

inline std::string instance_id(const std::string& suite, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%04d", suite.c_str(), i);
  return buf;
}

inline void check(InstanceOutcome& o, bool ok, const std::string& what) {
  if (!ok) o.violations.push_back(what);
}

inline void bump(InstanceOutcome& o, const std::string& key, double v) {
  auto [it, fresh] = o.metrics.emplace(key, v);
  if (!fresh) it->second = std::max(it->second, v);
}

template <class E>
double decomposition_residual(const CoupleDecomposition<E>& d, const E& x) {
  return std::max(d.reconstruction_error(x), d.membership_residual);
}

inline InstanceOutcome jones_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const CircleFunction f = random_poly(c, true, static_cast<std::uint64_t>(i));
  o.instance = f;
  const double thr = c.threshold("jones_h1_hinf");
  std::vector<double> costs, grid = c.t_grid();
  for (double t : grid) {
    const auto d = decompose_h1_hinf(f, t, JonesBackend::oracle, c.solver());
    const double amb = kt_L1_Linf(f, t);
    const Row r{id, t, amb, d.cost, d.cost / amb, d.solver_gap, decomposition_residual(d, f)};
    check(o, r.ratio >= 1.0 - 1e-9 && r.ratio <= thr, "ratio out of [1, threshold] at t=" + std::to_string(t));
    check(o, r.residual <= 1e-6, "certificate residual above 1e-6");
    costs.push_back(d.cost);
    o.rows.push_back(r);
  }
  // norm equivalence of (H1,Hinf)_{1/2,2} and (L1,Linf)_{1/2,2} on the grid
  std::size_t k = 0;
  const auto sub = real_interp_norm([&](double) { return costs[k++]; }, lp_norm(f, 1.0), lp_norm(f, kInf), 0.5, 2.0, grid);
  const auto amb = real_interp_norm(f, CoupleId::lebesgue(1.0, kInf), 0.5, 2.0, grid);
  bump(o, "interp_norm_ratio", sub.value / amb.value);
  return o;
}

inline InstanceOutcome prop12_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const CircleFunction f = random_poly(c, true, static_cast<std::uint64_t>(i));
  o.instance = f;
  const double thr = c.threshold("prop12_h1_hq");
  for (double t : c.t_grid()) {
    const auto s = decompose_h1_hq(f, c.q, t);
    const double amb = kt_ambient(f, CoupleId::hardy(1.0, c.q), t, c.solver());
    const auto& d = s.decomposition;
    const Row r{id, t, amb, d.cost, d.cost / amb, d.solver_gap, decomposition_residual(d, f)};
    check(o, r.ratio <= thr, "ratio above threshold at t=" + std::to_string(t));
    check(o, r.residual <= 1e-8, "certificate residual above 1e-8");
    check(o, s.holder_lhs <= s.holder_rhs + 1e-9, "cross-term Hoelder inequality violated");
    bump(o, "holder_excess", s.holder_lhs - s.holder_rhs);
    bump(o, "squaring_residual", s.squaring_residual);
    bump(o, "tol_factor", s.tol_factor);
    o.rows.push_back(r);
  }
  return o;
}

inline InstanceOutcome thm21_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const MatrixOperator x = random_triangular(c, static_cast<std::uint64_t>(i), false);
  o.instance = matrix_to_json(x);
  const double thr = c.threshold("thm21_triangular");
  for (double t : c.t_grid()) {
    const auto s = decompose_t1_tq(x, c.q, t, c.eps_reg);
    const double amb = kt_schatten(x, 1.0, c.q, t, c.solver());
    const auto& d = s.decomposition;
    const Row r{id, t, amb, d.cost, d.cost / amb, d.solver_gap, decomposition_residual(d, x)};
    check(o, r.ratio <= thr, "ratio above threshold at t=" + std::to_string(t));
    check(o, r.residual <= 1e-8, "certificate residual above 1e-8");
    check(o, s.expansion_residual <= 1e-6, "squaring expansion does not reproduce x");
    bump(o, "expansion_residual", s.expansion_residual);
    bump(o, "holder_excess", s.holder_lhs - s.holder_rhs);
    o.rows.push_back(r);
  }
  return o;
}

inline InstanceOutcome prop25_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const MatrixOperator x = random_matrix(c, static_cast<std::uint64_t>(i));
  o.instance = matrix_to_json(x);
  const double thr = c.threshold("prop25_identity");
  const MatrixOperator ax = abs_operator(x);
  for (double t : c.t_grid()) {
    const double closed = kt_closed_form(singular_values(x), t);
    const double via_abs = kt_schatten(ax, 1.0, kInf, t);
    const auto bf = kt_bruteforce(x, CoupleId::schatten(1.0, kInf), t, c.solver());
    const double res = std::max(std::abs(bf.value - closed), std::abs(via_abs - closed));
    const Row r{id, t, closed, bf.value, bf.value / closed, bf.value - bf.lower_bound, res};
    check(o, res <= thr, "identity residual above threshold at t=" + std::to_string(t));
    o.rows.push_back(r);
  }
  return o;
}

inline InstanceOutcome lemma23_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const MatrixOperator x = random_triangular(c, static_cast<std::uint64_t>(i), true);
  o.instance = matrix_to_json(x);
  const double thr = c.threshold("lemma23_factor");
  const double triples[3][3] = {{1.0, 2.0, 2.0}, {2.0, 3.0, 6.0}, {2.0, 6.0, 3.0}};
  for (int k = 0; k < 3; ++k) {
    const auto [p, r, q] = triples[k];
    const auto f = triangular_factor(x, p, r, q);
    const double xp = schatten_norm(x, p);
    const double prod = schatten_norm(f.a, r) * schatten_norm(f.b, q);
    const double res = std::max({f.norm_residual, f.product_residual, f.triangularity});
    // t records the exponent triple index
    o.rows.push_back({id, static_cast<double>(k + 1), xp, prod, prod / xp, 0.0, res});
    check(o, res <= thr, "factorization residual above threshold");
  }
  return o;
}

inline InstanceOutcome sim03_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const CircleFunction f = random_poly(c, false, static_cast<std::uint64_t>(i));
  o.instance = f;
  const auto s = simultaneous_approx(f, c.solver());
  // t = 1: a single row; ambient_K holds the ideal value 1
  o.rows.push_back({id, 1.0, 1.0, s.K_achieved, s.K_achieved, s.gap, s.h.negative_coeff_max()});
  check(o, s.K_achieved <= c.threshold("simultaneous_03"), "K_achieved above threshold");
  check(o, s.h.negative_coeff_max() <= 1e-8, "approximant not analytic");
  return o;
}

inline InstanceOutcome sim21_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const MatrixOperator x = random_matrix(c, static_cast<std::uint64_t>(i));
  o.instance = matrix_to_json(x);
  const auto s = simultaneous_triangular_approx(x, c.solver());
  o.rows.push_back({id, 1.0, 1.0, s.K_achieved, s.K_achieved, s.gap, triangularity_residual(s.x_hat)});
  check(o, s.K_achieved <= c.threshold("simultaneous_21i"), "K_achieved above threshold");
  return o;
}

inline InstanceOutcome embeddings_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const CircleFunction f = random_poly(c, false, static_cast<std::uint64_t>(i));
  o.instance = f;
  double prev_sup = 0.0;
  for (long n_max = 1000; n_max <= 16000; n_max *= 2) {
    const auto e = kq_embed(f, c.q, n_max);
    // t records n_max
    o.rows.push_back({id, static_cast<double>(n_max), e.target, e.sup, e.sup / e.target, e.tail_bound, e.residual});
    check(o, e.sup >= prev_sup * (1.0 - 1e-14), "sup decreased as n_max grew");
    check(o, e.sup <= e.target * (1.0 + 1e-12), "sup exceeds the integral of |F|^q");
    prev_sup = e.sup;
  }
  check(o, o.rows.back().residual <= c.threshold("embeddings_42"), "final residual above threshold");
  return o;
}

inline InstanceOutcome matrix_valued_instance(const ExperimentConfig& c, int i, const std::string& id) {
  InstanceOutcome o;
  const MatrixFunction f = random_matrix_valued(c, static_cast<std::uint64_t>(i));
  o.instance = instance_to_json(f);
  const double thr = c.threshold("matrix_valued_33");
  for (double t : c.t_grid()) {
    const auto s = matrix_valued_split(f, 1.0, 1.0, kInf, kInf, t, 1e-6, c.solver());
    const auto& d = s.decomposition;
    const Row r{id, t, s.ambient_K, d.cost, s.ratio, s.ambient_gap, decomposition_residual(d, f)};
    check(o, r.ratio <= thr, "ratio above threshold at t=" + std::to_string(t));
    check(o, r.residual <= 1e-8, "certificate residual above 1e-8");
    bump(o, "factor_residual", s.factor_residual);
    bump(o, "product_residual", s.product_residual);
    bump(o, "delta", s.delta);
    if (!s.factor_converged) bump(o, "factor_nonconverged", 1.0);
    o.rows.push_back(r);
  }
  return o;
}

}  // namespace detail

// Runs `instances` seeded inputs through the suite pipeline. Instances are
// processed in parallel; results are assembled in index order.
inline SuiteResult run_suite(const std::string& suite, const ExperimentConfig& config) {
  config.validate();
  using Fn = InstanceOutcome (*)(const ExperimentConfig&, int, const std::string&);
  static const std::map<std::string, Fn> table{{"jones_h1_hinf", detail::jones_instance},
                                               {"prop12_h1_hq", detail::prop12_instance},
                                               {"thm21_triangular", detail::thm21_instance},
                                               {"prop25_identity", detail::prop25_instance},
                                               {"lemma23_factor", detail::lemma23_instance},
                                               {"simultaneous_03", detail::sim03_instance},
                                               {"simultaneous_21i", detail::sim21_instance},
                                               {"embeddings_42", detail::embeddings_instance},
                                               {"matrix_valued_33", detail::matrix_valued_instance}};
  const auto it = table.find(suite);
  require(it != table.end(), "unknown suite: " + suite);

  const int n = config.instances;
  std::vector<InstanceOutcome> outcomes(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  const auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      const std::string id = detail::instance_id(suite, i);
      try {
        outcomes[static_cast<std::size_t>(i)] = it->second(config, i, id);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
  };
  int workers = config.workers > 0 ? config.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  SuiteResult res;
  res.suite = suite;
  res.config = config;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    auto& o = outcomes[ui];
    if (!errors[ui].empty()) o.violations.push_back("error: " + errors[ui]);
    double c_est = 0.0;
    for (const auto& r : o.rows) c_est = std::max(c_est, r.ratio);
    res.c_estimates.push_back(c_est);
    res.rows.insert(res.rows.end(), o.rows.begin(), o.rows.end());
    for (const auto& [k, v] : o.metrics) {
      auto [m, fresh] = res.metrics.emplace(k, v);
      if (!fresh) m->second = std::max(m->second, v);
    }
    if (!o.violations.empty()) {
      res.passed = false;
      res.failures.push_back(
          {{"instance_id", detail::instance_id(suite, i)}, {"violations", o.violations}, {"instance", o.instance}});
    }
  }
  return res;
}

// Writes <suite>.csv and <suite>.json into `dir`.
inline void write_suite(const SuiteResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / (r.suite + ".csv"));
  r.write_csv(csv);
  std::ofstream js(dir / (r.suite + ".json"));
  js << r.summary().dump(2) << '\n';
  if (!csv || !js) throw std::runtime_error("failed to write suite output to " + dir.string());
}

}  // namespace kclosed::harness
