#pragma once

// Triangular Schatten classes: triangular factorizations, K-functionals via
// singular values, the squaring decomposition for (T_1, T_q) and distances to
// the triangular subspace.

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "kclosed/common.hpp"
#include "kclosed/convex_engine.hpp"
#include "kclosed/kfunc.hpp"
#include "kclosed/matrix.hpp"

namespace kclosed {

inline bool is_upper_triangular(const MatrixOperator& x, double rel_tol = 1e-12) {
  return triangularity_residual(x) <= rel_tol;
}

// Reversal permutation J (J e_k = e_{n-1-k}).
inline MatrixOperator reversal(Eigen::Index n) { return MatrixOperator::Identity(n, n).rowwise().reverse(); }

// x = a b, a and b triangular, |a|_r |b|_q = |x|_p.
struct TriangularFactorization {
  MatrixOperator a, b;
  double p = 1.0, r = 2.0, q = 2.0;
  int branch = 1;                 // 1: b*b = |x|^{2p/q};  2: aa* = (xx*)^{p/r}
  double triangularity = 0.0;     // worst strictly-lower entry of a, b (relative)
  double product_residual = 0.0;  // |ab - x|_inf,entry / |x|_inf,entry
  double norm_residual = 0.0;     // | |a|_r |b|_q - |x|_p | / |x|_p
};

// Upper-triangular c with c c^* = m, via Cholesky of J m J.
inline MatrixOperator upper_cholesky_left(const MatrixOperator& m) {
  const MatrixOperator j = reversal(m.rows());
  Eigen::LLT<MatrixOperator> llt(j * m * j);
  if (llt.info() != Eigen::Success) throw numerical_error("Cholesky factorization failed (matrix not positive definite)");
  MatrixOperator l = llt.matrixL();
  return j * l * j;
}

// Upper-triangular c with c^* c = m.
inline MatrixOperator upper_cholesky_right(const MatrixOperator& m) {
  Eigen::LLT<MatrixOperator> llt(m);
  if (llt.info() != Eigen::Success) throw numerical_error("Cholesky factorization failed (matrix not positive definite)");
  return llt.matrixU();
}

// force_branch = 0 picks the applicable branch (1 when p/q <= 1/2).
inline TriangularFactorization triangular_factor(const MatrixOperator& x, double p, double r, double q,
                                                 int force_branch = 0) {
  require(x.rows() == x.cols() && x.rows() >= 1, "triangular_factor: x must be square");
  require(p >= 1.0 && r >= 1.0 && q >= 1.0 && std::isfinite(p), "triangular_factor: exponents out of range");
  require(std::abs(1.0 / p - inverse_exponent(r) - inverse_exponent(q)) <= 1e-12,
          "triangular_factor: exponents must satisfy 1/p = 1/r + 1/q");
  require(is_upper_triangular(x), "triangular_factor: x must be upper triangular");
  const SingularValues sv = singular_values(x);
  if (!(sv.values.minCoeff() > 1e-10 * sv.values.maxCoeff()))
    throw numerical_error("triangular_factor: x is singular");

  const double pq = p * inverse_exponent(q), pr = p * inverse_exponent(r);
  int branch = force_branch;
  if (branch == 0) branch = pq <= 0.5 ? 1 : 2;
  require(branch == 1 ? pq <= 0.5 + 1e-12 : pr <= 0.5 + 1e-12, "triangular_factor: branch not applicable");

  TriangularFactorization out;
  out.p = p;
  out.r = r;
  out.q = q;
  out.branch = branch;
  if (branch == 1) {
    out.b = upper_cholesky_right(psd_power(x.adjoint() * x, pq));
    out.a = out.b.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(x);
  } else {
    out.a = upper_cholesky_left(psd_power(x * x.adjoint(), pr));
    out.b = out.a.triangularView<Eigen::Upper>().solve(x);
  }
  out.triangularity = std::max(triangularity_residual(out.a), triangularity_residual(out.b));
  out.a = triangular_part(out.a);
  out.b = triangular_part(out.b);
  const double scale = x.cwiseAbs().maxCoeff();
  out.product_residual = (out.a * out.b - x).cwiseAbs().maxCoeff() / scale;
  const double xp = schatten_norm(x, p);
  out.norm_residual = std::abs(schatten_norm(out.a, r) * schatten_norm(out.b, q) - xp) / xp;
  return out;
}

// K_t(x; C_p0, C_p1) through the singular-value sequence.
inline double kt_schatten(const MatrixOperator& x, double p0, double p1, double t,
                          const convex::SolverOptions& opt = {}) {
  require(t > 0.0, "kt_schatten: t must be positive");
  SingularValues sv = singular_values(x);
  if (sv.size() == 0 || sv.values[0] == 0.0) return 0.0;
  const double cut = 1e-12 * sv.values[0];
  for (Eigen::Index i = 0; i < sv.values.size(); ++i)
    if (sv.values[i] < cut) sv.values[i] = 0.0;
  const CoupleId c = CoupleId::sequence(p0, p1);
  if (c.is_l1_linf()) return kt_closed_form(sv, t);
  return kt_bruteforce(Sequence(sv.values.cast<cplx>()), c, t, opt).value;
}

// Optimal ambient split of x for (C_p0, C_p1) by truncating singular values
// at a common level, followed by the triangular projection of the high part.
// x must be triangular; the result is exactly x0 + x1 = x.
inline CoupleDecomposition<MatrixOperator> triangular_base_split(const MatrixOperator& x, double p0, double p1,
                                                                 double t) {
  require(t > 0.0, "triangular_base_split: t must be positive");
  require(is_upper_triangular(x, 1e-10), "triangular_base_split: x must be upper triangular");
  const CoupleId couple = CoupleId::triangular(p0, p1);
  const MatrixOperator xt = triangular_part(x);
  if (xt.cwiseAbs().maxCoeff() == 0.0) return CoupleDecomposition<MatrixOperator>::make(xt, xt, couple, t);
  Eigen::JacobiSVD<MatrixOperator> svd(xt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const auto parts = [&](double level) {
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>{(s.array() - s.array().min(level)).matrix(),
                                                       s.cwiseMin(level)};
  };
  const double level = optimal_level(s[0], [&](double l) {
    const auto [hi, lo] = parts(l);
    return lp_of_values(hi, p0) + t * lp_of_values(lo, p1);
  });
  const Eigen::VectorXd hi = parts(level).first;
  const MatrixOperator x0 =
      triangular_part(svd.matrixU() * hi.cast<cplx>().asDiagonal() * svd.matrixV().adjoint());
  return CoupleDecomposition<MatrixOperator>::make(x0, xt - x0, couple, t);
}

// Squaring decomposition for (T_1, T_q):
//   x = a b with b upper Cholesky of |x| and a = x b^{-1},
//   a = h0 + h1, b = g0 + g1 split in (T_2, T_{2q}) at sqrt(t),
//   x = h0 g0 + h1 g1 + (h0 g1 + h1 g0),
// the cross term (in T_p, 1/p = 1/2 + 1/(2q)) split in (T_{p'}, T_q),
// p' = (1 + p)/2.
struct TriangularSquaring {
  CoupleDecomposition<MatrixOperator> decomposition;
  MatrixOperator a, b, h0, h1, g0, g1;
  double eps_used = 0.0;            // regularisation added to |x| (0 if x invertible)
  double expansion_residual = 0.0;  // |(h0+h1)(g0+g1) - x| / |x|, entrywise max, extrapolated in eps
  double eps_cost_shift = 0.0;      // |cost(eps) - cost(eps/2)|: the part attributable to eps
  double cross_exponent = 1.0;
  double holder_lhs = 0.0;  // |h0 g1 + h1 g0|_p
  double holder_rhs = 0.0;  // |h0|_2 |g1|_2q + |h1|_2q |g0|_2
};

namespace detail {

inline TriangularSquaring squaring_at(const MatrixOperator& x, double q, double t, double eps) {
  TriangularSquaring out;
  out.eps_used = eps;
  const Eigen::Index n = x.rows();
  out.b = triangular_part(upper_cholesky_right(abs_operator(x) + eps * MatrixOperator::Identity(n, n)));
  out.a = triangular_part(out.b.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(x));
  const double st = std::sqrt(t);
  const auto sa = triangular_base_split(out.a, 2.0, 2.0 * q, st);
  const auto sb = triangular_base_split(out.b, 2.0, 2.0 * q, st);
  out.h0 = sa.x0;
  out.h1 = sa.x1;
  out.g0 = sb.x0;
  out.g1 = sb.x1;
  const MatrixOperator cross = out.h0 * out.g1 + out.h1 * out.g0;
  out.cross_exponent = 1.0 / (0.5 + 0.5 / q);
  out.holder_lhs = schatten_norm(cross, out.cross_exponent);
  out.holder_rhs = schatten_norm(out.h0, 2.0) * schatten_norm(out.g1, 2.0 * q) +
                   schatten_norm(out.h1, 2.0 * q) * schatten_norm(out.g0, 2.0);
  MatrixOperator x0 = triangular_part(out.h0 * out.g0);
  if (cross.cwiseAbs().maxCoeff() > 0.0)
    x0 += triangular_base_split(triangular_part(cross), 0.5 * (1.0 + out.cross_exponent), q, t).x0;
  out.decomposition = CoupleDecomposition<MatrixOperator>::make(x0, x - x0, CoupleId::triangular(1.0, q), t);
  return out;
}

}  // namespace detail

inline TriangularSquaring decompose_t1_tq(const MatrixOperator& x, double q, double t, double eps_reg_rel = 1e-8) {
  require(x.rows() == x.cols() && x.rows() >= 1, "decompose_t1_tq: x must be square");
  require(q > 1.0 && std::isfinite(q), "decompose_t1_tq: q must lie in (1, inf)");
  require(t > 0.0, "decompose_t1_tq: t must be positive");
  require(is_upper_triangular(x, 1e-10), "decompose_t1_tq: x must be upper triangular");
  const MatrixOperator xt = triangular_part(x);
  const double scale = xt.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    TriangularSquaring z;
    z.a = z.b = z.h0 = z.h1 = z.g0 = z.g1 = xt;
    z.decomposition = CoupleDecomposition<MatrixOperator>::make(xt, xt, CoupleId::triangular(1.0, q), t);
    return z;
  }
  const SingularValues sv = singular_values(xt);
  const bool singular = !(sv.values.minCoeff() > 1e-10 * sv.values[0]);
  if (!singular) {
    TriangularSquaring out = detail::squaring_at(xt, q, t, 0.0);
    out.expansion_residual = ((out.h0 + out.h1) * (out.g0 + out.g1) - xt).cwiseAbs().maxCoeff() / scale;
    return out;
  }
  const double eps = eps_reg_rel * sv.values[0];
  TriangularSquaring out = detail::squaring_at(xt, q, t, eps);
  const TriangularSquaring half = detail::squaring_at(xt, q, t, 0.5 * eps);
  const MatrixOperator e1 = (out.h0 + out.h1) * (out.g0 + out.g1);
  const MatrixOperator e2 = (half.h0 + half.h1) * (half.g0 + half.g1);
  out.expansion_residual = (2.0 * e2 - e1 - xt).cwiseAbs().maxCoeff() / scale;
  out.eps_cost_shift = std::abs(out.decomposition.cost - half.decomposition.cost);
  return out;
}

// Distance to the triangular matrices in operator norm:
//   max_k |x[k..n-1, 0..k-1]|_inf (lower-left corners).
inline double dist_triangular_inf(const MatrixOperator& x) {
  double m = 0.0;
  for (Eigen::Index k = 1; k < x.rows(); ++k)
    m = std::max(m, schatten_norm(x.bottomLeftCorner(x.rows() - k, k), kInf));
  return m;
}

struct TriangularDistance {
  double value = 0.0;        // achieved |x - y|
  double lower_bound = 0.0;  // certified by the witness
  MatrixOperator y;          // triangular approximant
  MatrixOperator witness;    // dual witness z: |z|_{p'} <= 1, z annihilates triangular matrices
  bool converged = false;
  long iterations = 0;
};

// min |x - y|_p over triangular y by the convex engine.
inline TriangularDistance dist_triangular(const MatrixOperator& x, double p, const convex::SolverOptions& opt = {}) {
  using T = ElementTraits<MatrixOperator>;
  const auto shape = T::shape(x);
  const auto cert = convex::solve_distance(T::flatten(x), shape, convex::Subspace::upper_triangular(shape),
                                           T::norm_spec(x, p), opt);
  TriangularDistance d;
  d.value = cert.primal;
  d.lower_bound = cert.dual;
  d.y = triangular_part(T::unflatten(cert.solution, x));
  d.witness = cert.dual_witness.empty() ? T::zero_like(x) : T::unflatten(cert.dual_witness.front(), x);
  d.converged = cert.converged;
  d.iterations = cert.iterations;
  return d;
}

inline TriangularDistance dist_triangular_1(const MatrixOperator& x, const convex::SolverOptions& opt = {}) {
  return dist_triangular(x, 1.0, opt);
}

struct SimultaneousTriangular {
  MatrixOperator x_hat;
  double K_achieved = 1.0;
  double ratio_1 = 1.0, ratio_inf = 1.0;
  double d_1 = 0.0, d_inf = 0.0;  // certified lower bounds (d_inf exact via the corner formula)
  double gap = 0.0;
  bool degenerate = false;
};

// One triangular x_hat near-best for x simultaneously in C_1 and C_inf.
inline SimultaneousTriangular simultaneous_triangular_approx(const MatrixOperator& x,
                                                             const convex::SolverOptions& opt = {}) {
  using T = ElementTraits<MatrixOperator>;
  SimultaneousTriangular out;
  const double scale = T::sup_entry(x);
  if (scale == 0.0 || is_upper_triangular(x, 1e-12)) {
    out.x_hat = x;
    out.degenerate = true;
    return out;
  }
  const auto shape = T::shape(x);
  const auto sub = convex::Subspace::upper_triangular(shape);
  const auto n1 = T::norm_spec(x, 1.0), ninf = T::norm_spec(x, kInf);
  out.d_1 = convex::solve_distance(T::flatten(x), shape, sub, n1, opt).dual;
  out.d_inf = dist_triangular_inf(x);
  if (out.d_1 < 1e-10 || out.d_inf < 1e-10) {
    out.x_hat = triangular_part(x);
    out.degenerate = true;
    return out;
  }
  const auto mm = convex::solve_minmax_distance(T::flatten(x), shape, sub, {n1, ninf}, {out.d_1, out.d_inf}, opt);
  out.x_hat = triangular_part(T::unflatten(mm.solution, x));
  out.ratio_1 = schatten_norm(x - out.x_hat, 1.0) / out.d_1;
  out.ratio_inf = schatten_norm(x - out.x_hat, kInf) / out.d_inf;
  out.K_achieved = std::max(out.ratio_1, out.ratio_inf);
  out.gap = mm.gap;
  return out;
}

}  // namespace kclosed
