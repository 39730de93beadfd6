#pragma once

// Decompositions f = x0 + x1 with analytic parts for Hardy couples.
//
// Every returned decomposition is exactly feasible: x0 is built analytic and
// x1 = f - x0, so grid aliasing in intermediate products can only cost
// optimality, never validity. Aliasing is reported through tol_factor and the
// squaring residual.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "kclosed/circle_function.hpp"
#include "kclosed/convex_engine.hpp"
#include "kclosed/factorize.hpp"
#include "kclosed/kfunc.hpp"

namespace kclosed {

inline bool is_analytic(const CircleFunction& f, double rel_tol = 1e-10) {
  return f.negative_coeff_max() <= rel_tol * std::max(f.sup_modulus(), 1e-300);
}

// Base case for 1 < p0 < p1 < inf: optimal ambient truncation for
// (L^p0, L^p1), then the Riesz projection of both parts.
inline CoupleDecomposition<CircleFunction> decompose_base(const CircleFunction& f, double p0, double p1,
                                                          double t) {
  require(t > 0.0, "decompose_base: t must be positive");
  require(p0 > 1.0 && p1 > p0 && std::isfinite(p1),
          "decompose_base: exponents must satisfy 1 < p0 < p1 < inf");
  require(is_analytic(f, 1e-8), "decompose_base: f must be analytic");
  const CoupleId couple = CoupleId::hardy(p0, p1);
  if (f.sup_modulus() == 0.0) return CoupleDecomposition<CircleFunction>::make(f, f, couple, t);
  const double level = optimal_level(f.sup_modulus(), [&](double l) {
    const auto [hi, lo] = truncate_at_level(f, l);
    return lp_norm(hi, p0) + t * lp_norm(lo, p1);
  });
  const auto [hi, lo] = truncate_at_level(f, level);
  const CircleFunction x0 = riesz_project(hi);
  return CoupleDecomposition<CircleFunction>::make(x0, f - x0, couple, t);
}

// Squaring algorithm for (H^1, H^q):
//   f = B F^2, F = g0 + g1 split in (H^2, H^{2q}) at sqrt(t),
//   f = B g0^2 + B g1^2 + 2 B g0 g1,
// with the cross term (in H^p, 1/p = 1/2 + 1/(2q)) split by the base case in
// (H^{p'}, H^q), p' = (1 + p)/2.
struct SquaringDecomposition {
  CoupleDecomposition<CircleFunction> decomposition;
  CircleFunction inner, outer;  // B and F on the grid
  CircleFunction g0, g1;
  double tol_factor = 0.0;
  double squaring_residual = 0.0;  // |B (g0 + g1)^2 - f|_inf / |f|_inf
  double cross_exponent = 1.0;     // p
  double holder_lhs = 0.0;         // |2 g0 g1|_p
  double holder_rhs = 0.0;         // 2 |g0|_2 |g1|_{2q}
};

inline SquaringDecomposition decompose_h1_hq(const CircleFunction& f, double q, double t) {
  require(q > 1.0 && std::isfinite(q), "decompose_h1_hq: q must lie in (1, inf)");
  require(t > 0.0, "decompose_h1_hq: t must be positive");
  require(is_analytic(f, 1e-8), "decompose_h1_hq: f must be analytic");
  if (f.sup_modulus() == 0.0) throw std::invalid_argument("decompose_h1_hq: f is identically zero");

  SquaringDecomposition out;
  const SqrtFactorization sf = sqrt_factor(f);
  out.tol_factor = sf.tol_factor;
  out.inner = blaschke_eval(sf.inner, f.size());
  out.outer = sf.outer.boundary;

  const auto split_f = decompose_base(riesz_project(out.outer), 2.0, 2.0 * q, std::sqrt(t));
  out.g0 = split_f.x0;
  out.g1 = split_f.x1;

  const CircleFunction& b = out.inner;
  const CircleFunction cross = cplx(2.0) * out.g0 * out.g1;
  out.squaring_residual =
      lp_norm(b * (out.g0 * out.g0 + out.g1 * out.g1 + cross) - f, kInf) / f.sup_modulus();
  out.cross_exponent = 1.0 / (0.5 + 0.5 / q);
  out.holder_lhs = lp_norm(cross, out.cross_exponent);
  out.holder_rhs = 2.0 * lp_norm(out.g0, 2.0) * lp_norm(out.g1, 2.0 * q);

  CircleFunction x0 = riesz_project(b * out.g0 * out.g0);
  const CircleFunction cross_a = riesz_project(b * cross);
  if (cross_a.sup_modulus() > 0.0) {
    const double p_low = 0.5 * (1.0 + out.cross_exponent);
    x0 = x0 + decompose_base(cross_a, p_low, q, t).x0;
  }
  out.decomposition = CoupleDecomposition<CircleFunction>::make(x0, f - x0, CoupleId::hardy(1.0, q), t);
  return out;
}

enum class JonesBackend { oracle, constructive };

// (H^1, H^inf) decomposition. The oracle backend solves the convex program
// over analytic splits; the constructive backend follows the squaring route
// with the (H^2, H^inf) step supplied by that same program.
inline CoupleDecomposition<CircleFunction> decompose_h1_hinf(const CircleFunction& f, double t,
                                                             JonesBackend backend = JonesBackend::oracle,
                                                             const convex::SolverOptions& opt = {}) {
  require(t > 0.0, "decompose_h1_hinf: t must be positive");
  require(is_analytic(f, 1e-8), "decompose_h1_hinf: f must be analytic");
  const CoupleId couple = CoupleId::hardy(1.0, kInf);
  if (f.sup_modulus() == 0.0) return CoupleDecomposition<CircleFunction>::make(f, f, couple, t);

  if (backend == JonesBackend::oracle) {
    const auto r = kt_bruteforce(f, couple, t, opt);
    CoupleDecomposition<CircleFunction> d = r.decomposition;
    // x1 = f - x0 exactly; re-derive to remove solver rounding
    d = CoupleDecomposition<CircleFunction>::make(d.x0, f - d.x0, couple, t);
    d.solver_gap = r.value - r.lower_bound;
    return d;
  }

  const SqrtFactorization sf = sqrt_factor(f);
  const CircleFunction b = blaschke_eval(sf.inner, f.size());
  const auto split_f = kt_bruteforce(riesz_project(sf.outer.boundary), CoupleId::hardy(2.0, kInf),
                                     std::sqrt(t), opt);
  const CircleFunction& g0 = split_f.decomposition.x0;
  const CircleFunction& g1 = split_f.decomposition.x1;
  const CircleFunction base = riesz_project(b * g0 * g0);
  const CircleFunction cross = riesz_project(cplx(2.0) * b * g0 * g1);

  // cross term: whichever of {all in x0, all in x1, projected truncation} is cheapest
  std::vector<CircleFunction> options{base, base + cross};
  if (cross.sup_modulus() > 0.0) {
    const auto [hi, lo] = truncate_at_level(cross, rearrange(cross).value_at(t));
    options.push_back(base + riesz_project(hi));
  }
  CoupleDecomposition<CircleFunction> best;
  best.cost = kInf;
  for (const auto& x0 : options) {
    auto d = CoupleDecomposition<CircleFunction>::make(x0, f - x0, couple, t);
    if (d.cost < best.cost) best = std::move(d);
  }
  best.solver_gap = split_f.value - split_f.lower_bound;
  return best;
}

// Distance from f to the analytic subspace in L^p (a quotient norm L^p/H^p).
inline convex::SolverCertificate quotient_norm(const CircleFunction& f, double p,
                                               const convex::SolverOptions& opt = {}) {
  using T = ElementTraits<CircleFunction>;
  return convex::solve_distance(T::flatten(f), T::shape(f), convex::Subspace::hardy(T::shape(f)),
                                T::norm_spec(f, p), opt);
}

struct SimultaneousApprox {
  CircleFunction h;           // analytic approximant
  double K_achieved = 1.0;    // max of the two ratios below
  double ratio_1 = 1.0;       // |f - h|_1 / d_1
  double ratio_inf = 1.0;     // |f - h|_inf / d_inf
  double d_1 = 0.0;           // certified lower bounds on the distances
  double d_inf = 0.0;
  double gap = 0.0;           // solver gap of the min-max program
  bool degenerate = false;
};

// One analytic h that is simultaneously near-best in L^1 and L^inf.
inline SimultaneousApprox simultaneous_approx(const CircleFunction& f,
                                              const convex::SolverOptions& opt = {}) {
  using T = ElementTraits<CircleFunction>;
  SimultaneousApprox out;
  if (is_analytic(f, 1e-12)) {
    out.h = f;
    out.degenerate = true;
    return out;
  }
  const auto shape = T::shape(f);
  const auto sub = convex::Subspace::hardy(shape);
  const auto n1 = T::norm_spec(f, 1.0), ninf = T::norm_spec(f, kInf);
  const auto d1 = convex::solve_distance(T::flatten(f), shape, sub, n1, opt);
  const auto dinf = convex::solve_distance(T::flatten(f), shape, sub, ninf, opt);
  out.d_1 = d1.dual;
  out.d_inf = dinf.dual;
  if (out.d_1 < 1e-10 || out.d_inf < 1e-10) {
    out.h = riesz_project(f);
    out.degenerate = true;
    return out;
  }
  const auto mm = convex::solve_minmax_distance(T::flatten(f), shape, sub, {n1, ninf},
                                                {out.d_1, out.d_inf}, opt);
  out.h = T::unflatten(mm.solution, f);
  out.ratio_1 = lp_norm(f - out.h, 1.0) / out.d_1;
  out.ratio_inf = lp_norm(f - out.h, kInf) / out.d_inf;
  out.K_achieved = std::max(out.ratio_1, out.ratio_inf);
  out.gap = mm.gap;
  return out;
}

// |f|_{L2/H2} / (|f|_{L1/H1} |f|_{Linf/Hinf})^{1/2}: the constant in the
// extrapolation inequality at p = 2, measured on one instance.
struct ExtrapolationCheck {
  double q2 = 0.0, q1 = 0.0, qinf = 0.0;
  double constant = 0.0;
};

inline ExtrapolationCheck extrapolation_constant(const CircleFunction& f,
                                                 const convex::SolverOptions& opt = {}) {
  ExtrapolationCheck c;
  c.q2 = lp_norm(f - riesz_project(f), 2.0);
  c.q1 = quotient_norm(f, 1.0, opt).dual;
  c.qinf = quotient_norm(f, kInf, opt).dual;
  c.constant = c.q1 > 0.0 && c.qinf > 0.0 ? c.q2 / std::sqrt(c.q1 * c.qinf) : 0.0;
  return c;
}

}  // namespace kclosed
