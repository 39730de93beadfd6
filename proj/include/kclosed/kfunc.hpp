#pragma once

// K- and J-functionals for the couples in scope: closed forms where the
// rearrangement formula applies, convex brute force everywhere else, the
// (theta, q) real-interpolation norm and K-closedness ratio reports.

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kclosed/circle_function.hpp"
#include "kclosed/common.hpp"
#include "kclosed/convex_engine.hpp"
#include "kclosed/matrix.hpp"

namespace kclosed {

using Sequence = Eigen::VectorXcd;

enum class CoupleKind { lebesgue, sequence, schatten, hardy, triangular };

struct CoupleId {
  CoupleKind kind = CoupleKind::lebesgue;
  double p0 = 1.0;
  double p1 = kInf;

  CoupleId() = default;
  CoupleId(CoupleKind k, double a, double b) : kind(k), p0(a), p1(b) {
    require(a >= 1.0 && b >= 1.0, "CoupleId: exponents must lie in [1, inf]");
  }

  static CoupleId lebesgue(double a, double b) { return {CoupleKind::lebesgue, a, b}; }
  static CoupleId sequence(double a, double b) { return {CoupleKind::sequence, a, b}; }
  static CoupleId schatten(double a, double b) { return {CoupleKind::schatten, a, b}; }
  static CoupleId hardy(double a, double b) { return {CoupleKind::hardy, a, b}; }
  static CoupleId triangular(double a, double b) { return {CoupleKind::triangular, a, b}; }

  bool is_subspace() const { return kind == CoupleKind::hardy || kind == CoupleKind::triangular; }

  CoupleId ambient() const {
    switch (kind) {
      case CoupleKind::hardy: return lebesgue(p0, p1);
      case CoupleKind::triangular: return schatten(p0, p1);
      default: return *this;
    }
  }

  bool is_l1_linf() const { return p0 == 1.0 && std::isinf(p1); }

  std::string name() const {
    const auto e = [](double p) {
      if (std::isinf(p)) return std::string("inf");
      std::ostringstream os;
      os << p;
      return os.str();
    };
    static const char* names[] = {"lebesgue", "sequence", "schatten", "hardy", "triangular"};
    return std::string(names[static_cast<int>(kind)]) + "(" + e(p0) + "," + e(p1) + ")";
  }
};

// Parses "1", "2.5", "inf"/"Linf"/"L1" style exponents.
inline double parse_exponent(std::string s) {
  if (!s.empty() && (s[0] == 'L' || s[0] == 'l' || s[0] == 'H' || s[0] == 'C' || s[0] == 'T'))
    s.erase(0, 1);
  if (s == "inf" || s == "Inf" || s == "infty" || s == "oo") return kInf;
  std::size_t pos = 0;
  const double p = std::stod(s, &pos);
  require(pos == s.size() && p >= 1.0, "invalid exponent: " + s);
  return p;
}

// ---------------------------------------------------------------------------
// Element traits: how each element type is flattened for the convex engine
// and which norms/subspaces it carries.

template <class E>
struct ElementTraits;

template <>
struct ElementTraits<CircleFunction> {
  static convex::FieldShape shape(const CircleFunction& f) {
    return convex::FieldShape::grid(static_cast<Eigen::Index>(f.size()));
  }
  static convex::Vec flatten(const CircleFunction& f) {
    return Eigen::Map<const convex::Vec>(f.samples().data(), static_cast<Eigen::Index>(f.size()));
  }
  static CircleFunction unflatten(const convex::Vec& v, const CircleFunction&) {
    return CircleFunction(std::vector<cplx>(v.data(), v.data() + v.size()));
  }
  static convex::Norm norm_spec(const CircleFunction& f, double p) {
    return convex::Norm::lebesgue(p, static_cast<Eigen::Index>(f.size()));
  }
  static double norm(const CircleFunction& f, double p) { return lp_norm(f, p); }
  static bool accepts(CoupleKind k) { return k == CoupleKind::lebesgue || k == CoupleKind::hardy; }
  static convex::Subspace subspace(const CircleFunction& f, CoupleKind k) {
    return k == CoupleKind::hardy ? convex::Subspace::hardy(shape(f)) : convex::Subspace::whole();
  }
  static double membership_residual(const CircleFunction& f, CoupleKind k) {
    return k == CoupleKind::hardy ? f.negative_coeff_max() : 0.0;
  }
  static CircleFunction zero_like(const CircleFunction& f) { return CircleFunction::constant(f.size(), 0.0); }
  static CircleFunction sum(const CircleFunction& a, const CircleFunction& b) { return a + b; }
  static double sup_entry(const CircleFunction& f) { return f.sup_modulus(); }
};

template <>
struct ElementTraits<MatrixOperator> {
  static convex::FieldShape shape(const MatrixOperator& x) { return convex::FieldShape::matrix(x.rows()); }
  static convex::Vec flatten(const MatrixOperator& x) {
    return Eigen::Map<const convex::Vec>(x.data(), x.size());
  }
  static MatrixOperator unflatten(const convex::Vec& v, const MatrixOperator& like) {
    return Eigen::Map<const MatrixOperator>(v.data(), like.rows(), like.cols());
  }
  static convex::Norm norm_spec(const MatrixOperator&, double p) { return convex::Norm::schatten(p); }
  static double norm(const MatrixOperator& x, double p) { return schatten_norm(x, p); }
  static bool accepts(CoupleKind k) { return k == CoupleKind::schatten || k == CoupleKind::triangular; }
  static convex::Subspace subspace(const MatrixOperator& x, CoupleKind k) {
    return k == CoupleKind::triangular ? convex::Subspace::upper_triangular(shape(x))
                                       : convex::Subspace::whole();
  }
  static double membership_residual(const MatrixOperator& x, CoupleKind k) {
    if (k != CoupleKind::triangular) return 0.0;
    double m = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = j + 1; i < x.rows(); ++i) m = std::max(m, std::abs(x(i, j)));
    return m;
  }
  static MatrixOperator zero_like(const MatrixOperator& x) { return MatrixOperator::Zero(x.rows(), x.cols()); }
  static MatrixOperator sum(const MatrixOperator& a, const MatrixOperator& b) { return a + b; }
  static double sup_entry(const MatrixOperator& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }
};

template <>
struct ElementTraits<Sequence> {
  static convex::FieldShape shape(const Sequence& x) { return convex::FieldShape::sequence(x.size()); }
  static convex::Vec flatten(const Sequence& x) { return x; }
  static Sequence unflatten(const convex::Vec& v, const Sequence&) { return v; }
  static convex::Norm norm_spec(const Sequence&, double p) { return convex::Norm::sequence(p); }
  static double norm(const Sequence& x, double p) { return lp_of_values(x.cwiseAbs(), p); }
  static bool accepts(CoupleKind k) { return k == CoupleKind::sequence; }
  static convex::Subspace subspace(const Sequence&, CoupleKind) { return convex::Subspace::whole(); }
  static double membership_residual(const Sequence&, CoupleKind) { return 0.0; }
  static Sequence zero_like(const Sequence& x) { return Sequence::Zero(x.size()); }
  static Sequence sum(const Sequence& a, const Sequence& b) { return a + b; }
  static double sup_entry(const Sequence& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }
};

// ---------------------------------------------------------------------------

template <class E>
struct CoupleDecomposition {
  E x0, x1;
  CoupleId couple;
  double t = 1.0;
  double norm0 = 0.0;  // |x0|_{A0}
  double norm1 = 0.0;  // |x1|_{A1}
  double cost = 0.0;   // norm0 + t norm1
  double membership_residual = 0.0;
  double solver_gap = 0.0;  // 0 for purely constructive decompositions

  // Recomputes norms, cost and membership from the parts.
  static CoupleDecomposition make(E a, E b, const CoupleId& couple, double t) {
    using T = ElementTraits<E>;
    CoupleDecomposition d{std::move(a), std::move(b), couple, t};
    d.norm0 = T::norm(d.x0, couple.p0);
    d.norm1 = T::norm(d.x1, couple.p1);
    d.cost = d.norm0 + t * d.norm1;
    d.membership_residual = std::max(T::membership_residual(d.x0, couple.kind),
                                     T::membership_residual(d.x1, couple.kind));
    return d;
  }

  // Largest entry of x0 + x1 - x.
  double reconstruction_error(const E& x) const {
    using T = ElementTraits<E>;
    const convex::Vec r = T::flatten(x0) + T::flatten(x1) - T::flatten(x);
    return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  }
};

// K_t on (l^1, l^inf) with counting measure:
//   sum_{k < floor(t)} lambda_k + (t - floor(t)) lambda_{floor(t)}.
inline double kt_closed_form(std::vector<double> lambda, double t) {
  require(t > 0.0, "kt_closed_form: t must be positive");
  for (auto& v : lambda) v = std::abs(v);
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  const double ft = std::floor(t);
  double acc = 0.0;
  std::size_t k = 0;
  for (; k < lambda.size() && static_cast<double>(k) < ft; ++k) acc += lambda[k];
  if (k < lambda.size() && static_cast<double>(k) == ft) acc += (t - ft) * lambda[k];
  return acc;
}

// Continuous-measure version: integral of f* over [0, t].
inline double kt_closed_form(const Rearrangement& r, double t) {
  require(t > 0.0, "kt_closed_form: t must be positive");
  return r.integral(t);
}

inline double kt_closed_form(const SingularValues& s, double t) { return kt_closed_form(s.to_vector(), t); }

template <class E>
struct BruteForceResult {
  double value = 0.0;        // primal value (achieved by `decomposition`)
  double lower_bound = 0.0;  // certified dual bound
  bool converged = false;
  long iterations = 0;
  CoupleDecomposition<E> decomposition;
};

// inf |x0|_{A0} + t |x1|_{A1} by direct convex minimisation; the feasible set
// is restricted to the subspace for hardy/triangular couples.
template <class E>
BruteForceResult<E> kt_bruteforce(const E& x, const CoupleId& couple, double t,
                                  const convex::SolverOptions& opt = {}) {
  using T = ElementTraits<E>;
  require(t > 0.0, "kt_bruteforce: t must be positive");
  require(T::accepts(couple.kind), "kt_bruteforce: couple does not match element type");
  const convex::FieldShape shape = T::shape(x);
  require(shape.size() <= 5000, "kt_bruteforce: instance too large for the brute-force oracle");

  convex::SplitProgram sp;
  sp.target = T::flatten(x);
  sp.shape = shape;
  sp.subspace = T::subspace(x, couple.kind);
  sp.norm0 = T::norm_spec(x, couple.p0);
  sp.norm1 = T::norm_spec(x, couple.p1);
  sp.t = t;
  const convex::SplitResult r = convex::solve_split(sp, opt);

  BruteForceResult<E> out;
  out.value = r.certificate.primal;
  out.lower_bound = r.certificate.dual;
  out.converged = r.certificate.converged;
  out.iterations = r.certificate.iterations;
  out.decomposition =
      CoupleDecomposition<E>::make(T::unflatten(r.x0, x), T::unflatten(r.x1, x), couple, t);
  out.decomposition.solver_gap = r.certificate.gap;
  return out;
}

// J_t(x) = max(|x|_{A0}, t |x|_{A1}).
template <class E>
double jt(const E& x, const CoupleId& couple, double t) {
  require(t > 0.0, "jt: t must be positive");
  using T = ElementTraits<E>;
  return std::max(T::norm(x, couple.p0), t * T::norm(x, couple.p1));
}

// Ambient K_t: exact for (1, inf) couples, certified dual bound otherwise.
inline double kt_ambient(const CircleFunction& f, const CoupleId& couple, double t,
                         const convex::SolverOptions& opt = {}) {
  const CoupleId amb = couple.ambient();
  if (amb.is_l1_linf()) return kt_L1_Linf(f, t);
  return kt_bruteforce(f, amb, t, opt).lower_bound;
}

inline double kt_ambient(const Sequence& x, const CoupleId& couple, double t,
                         const convex::SolverOptions& opt = {}) {
  if (couple.is_l1_linf()) {
    std::vector<double> l(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) l[static_cast<std::size_t>(i)] = std::abs(x[i]);
    return kt_closed_form(l, t);
  }
  return kt_bruteforce(x, couple, t, opt).lower_bound;
}

// Log-spaced grid with `per_decade` points per decade, endpoints included.
inline std::vector<double> log_grid(double t_min, double t_max, int per_decade) {
  require(t_min > 0.0 && t_max >= t_min && per_decade >= 1, "log_grid: invalid range");
  const double a = std::log10(t_min), b = std::log10(t_max);
  const int steps = std::max(0, static_cast<int>(std::lround((b - a) * per_decade)));
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(steps + 1));
  for (int k = 0; k <= steps; ++k)
    g.push_back(std::pow(10.0, steps == 0 ? a : a + (b - a) * k / steps));
  return g;
}

struct InterpNorm {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the omitted (0, t_min) and (t_max, inf) contributions
  double t_min = 0.0, t_max = 0.0;
};

// (integral of (t^{-theta} K_t)^q dt/t)^{1/q} by the trapezoid rule in log t
// on the grid; sup over the grid for q = inf. `norm0`, `norm1` are |x|_{A0},
// |x|_{A1}, which bound K_t <= min(|x|_0, t |x|_1) and so control the tails.
inline InterpNorm real_interp_norm(const std::function<double(double)>& kt, double norm0, double norm1,
                                   double theta, double q, const std::vector<double>& t_grid) {
  require(theta > 0.0 && theta < 1.0, "real_interp_norm: theta must lie in (0, 1)");
  require(q >= 1.0, "real_interp_norm: q must be >= 1");
  require(t_grid.size() >= 2, "real_interp_norm: t-grid needs at least two points");
  InterpNorm r{0.0, 0.0, t_grid.front(), t_grid.back()};
  std::vector<double> g(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) g[i] = std::pow(t_grid[i], -theta) * kt(t_grid[i]);
  if (std::isinf(q)) {
    r.value = *std::max_element(g.begin(), g.end());
    // beyond the grid: t^{1-theta}|x|_1 below, t^{-theta}|x|_0 above
    r.tail_bound = std::max(std::pow(r.t_min, 1.0 - theta) * norm1, std::pow(r.t_max, -theta) * norm0);
    return r;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    acc += 0.5 * (std::pow(g[i], q) + std::pow(g[i + 1], q)) * std::log(t_grid[i + 1] / t_grid[i]);
  r.value = std::pow(acc, 1.0 / q);
  const double tail = std::pow(norm1, q) * std::pow(r.t_min, (1.0 - theta) * q) / ((1.0 - theta) * q) +
                      std::pow(norm0, q) * std::pow(r.t_max, -theta * q) / (theta * q);
  r.tail_bound = std::pow(acc + tail, 1.0 / q) - r.value;
  return r;
}

template <class E>
InterpNorm real_interp_norm(const E& x, const CoupleId& couple, double theta, double q,
                            const std::vector<double>& t_grid, const convex::SolverOptions& opt = {}) {
  using T = ElementTraits<E>;
  std::function<double(double)> kt;
  if constexpr (std::is_same_v<E, CircleFunction>) {
    if (couple.is_l1_linf() && couple.kind == CoupleKind::lebesgue)
      kt = [&](double t) { return kt_L1_Linf(x, t); };
  }
  if (!kt) kt = [&](double t) { return kt_bruteforce(x, couple, t, opt).value; };
  return real_interp_norm(kt, T::norm(x, couple.p0), T::norm(x, couple.p1), theta, q, t_grid);
}

// Weak-type quasi-norm sup_s s^{1/p} f*(s) of a grid function.
inline double weak_lp_quasinorm(const CircleFunction& f, double p) {
  const Rearrangement r = rearrange(f);
  double m = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    m = std::max(m, std::pow(static_cast<double>(i + 1) * r.step(), 1.0 / p) * r.values[i]);
  return m;
}

// Minimises cost(level) over level in [0, level_max]: both endpoints, a coarse
// log-spaced scan, then golden-section refinement in log(level) around the
// best scan point.
inline double optimal_level(double level_max, const std::function<double(double)>& cost) {
  if (level_max <= 0.0) return 0.0;
  double best_level = 0.0, best = cost(0.0);
  const auto consider = [&](double l) {
    const double c = cost(l);
    if (c < best) {
      best = c;
      best_level = l;
    }
    return c;
  };
  consider(level_max);
  constexpr int kScan = 48;
  const double lo_log = std::log(level_max) - 12.0 * std::log(10.0), hi_log = std::log(level_max);
  int best_i = -1;
  double scan_best = kInf;
  for (int i = 0; i <= kScan; ++i) {
    const double c = consider(std::exp(lo_log + (hi_log - lo_log) * i / kScan));
    if (c < scan_best) {
      scan_best = c;
      best_i = i;
    }
  }
  double a = lo_log + (hi_log - lo_log) * std::max(0, best_i - 1) / kScan;
  double b = lo_log + (hi_log - lo_log) * std::min(kScan, best_i + 1) / kScan;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
  double f1 = consider(std::exp(c1)), f2 = consider(std::exp(c2));
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (f1 <= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - phi * (b - a);
      f1 = consider(std::exp(c1));
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + phi * (b - a);
      f2 = consider(std::exp(c2));
    }
  }
  return best_level;
}

// ---------------------------------------------------------------------------

struct KReport {
  std::string instance_id;
  CoupleId couple;
  std::vector<double> t_grid;
  std::vector<double> ambient_K;
  std::vector<double> achieved_cost;
  std::vector<double> ratio;
  std::vector<double> gap;       // solver gap of the decomposition (0 if constructive)
  std::vector<double> residual;  // reconstruction/membership residual of the decomposition
  double c_estimate = 1.0;

  // instance_id,t,ambient_K,achieved_cost,ratio,gap,residual
  void write_csv(std::ostream& os, bool header = true) const {
    if (header) os << "instance_id,t,ambient_K,achieved_cost,ratio,gap,residual\n";
    char buf[512];
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", instance_id.c_str(), t_grid[i],
                    ambient_K[i], achieved_cost[i], ratio[i], gap[i], residual[i]);
      os << buf;
    }
  }

  nlohmann::json to_json() const {
    return {{"instance_id", instance_id}, {"couple", couple.name()}, {"t", t_grid},
            {"ambient_K", ambient_K},     {"achieved_cost", achieved_cost},
            {"ratio", ratio},             {"gap", gap},
            {"residual", residual},       {"c_estimate", c_estimate}};
  }
};

// Runs `decompose(x, t)` over the grid and compares each achieved cost with
// the ambient K_t. For x = 0 every ratio is 1 by convention.
template <class E, class Decomposer>
KReport k_closedness_report(const E& x, const CoupleId& subspace_couple, Decomposer&& decompose,
                            const std::vector<double>& t_grid, std::string instance_id = {},
                            const convex::SolverOptions& opt = {}) {
  using T = ElementTraits<E>;
  require(subspace_couple.is_subspace(), "k_closedness_report: couple must be a subspace couple");
  KReport rep;
  rep.instance_id = std::move(instance_id);
  rep.couple = subspace_couple;
  rep.t_grid = t_grid;
  const bool zero = T::sup_entry(x) == 0.0;
  for (double t : t_grid) {
    double amb = 0.0, cost = 0.0, gap = 0.0, res = 0.0;
    if (!zero) {
      if constexpr (std::is_same_v<E, CircleFunction>) {
        amb = kt_ambient(x, subspace_couple, t, opt);
      } else {
        const auto sv = singular_values(x);
        const Sequence s = sv.values.template cast<cplx>();
        amb = kt_ambient(s, CoupleId::sequence(subspace_couple.p0, subspace_couple.p1), t, opt);
      }
      const CoupleDecomposition<E> d = decompose(x, t);
      cost = d.cost;
      gap = d.solver_gap;
      res = std::max(d.reconstruction_error(x), d.membership_residual);
    }
    rep.ambient_K.push_back(amb);
    rep.achieved_cost.push_back(cost);
    rep.ratio.push_back(zero || amb == 0.0 ? 1.0 : cost / amb);
    rep.gap.push_back(gap);
    rep.residual.push_back(res);
  }
  rep.c_estimate = rep.ratio.empty() ? 1.0 : *std::max_element(rep.ratio.begin(), rep.ratio.end());
  return rep;
}

}  // namespace kclosed
