#pragma once

// Matrix-valued functions on the grid and the squaring decomposition for
// couples of L^p(C_p) spaces of analytic matrix functions.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "kclosed/circle_function.hpp"
#include "kclosed/common.hpp"
#include "kclosed/convex_engine.hpp"
#include "kclosed/kfunc.hpp"
#include "kclosed/matrix.hpp"
#include "kclosed/schatten.hpp"

namespace kclosed {

// Samples f(z_k) of an n x n matrix function at the N grid points.
struct MatrixFunction {
  std::vector<MatrixOperator> samples;

  MatrixFunction() = default;
  explicit MatrixFunction(std::vector<MatrixOperator> s) : samples(std::move(s)) {
    require(is_power_of_two(samples.size()) && samples.size() >= 8,
            "MatrixFunction: grid size must be a power of two >= 8");
    for (const auto& m : samples)
      require(m.rows() == samples.front().rows() && m.cols() == samples.front().rows(),
              "MatrixFunction: samples must be square of equal size");
  }

  template <class Fn>
  static MatrixFunction sample_z(std::size_t n_grid, Fn&& fn) {
    std::vector<MatrixOperator> s(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) s[k] = fn(std::polar(1.0, CircleFunction::angle(k, n_grid)));
    return MatrixFunction(std::move(s));
  }

  static MatrixFunction constant(std::size_t n_grid, const MatrixOperator& m) {
    return MatrixFunction(std::vector<MatrixOperator>(n_grid, m));
  }

  std::size_t size() const { return samples.size(); }
  Eigen::Index dim() const { return samples.empty() ? 0 : samples.front().rows(); }

  CircleFunction entry(Eigen::Index i, Eigen::Index j) const {
    std::vector<cplx> v(size());
    for (std::size_t k = 0; k < size(); ++k) v[k] = samples[k](i, j);
    return CircleFunction(std::move(v));
  }

  void set_entry(Eigen::Index i, Eigen::Index j, const CircleFunction& f) {
    for (std::size_t k = 0; k < size(); ++k) samples[k](i, j) = f.samples()[k];
  }

  double sup_entry() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.cwiseAbs().maxCoeff());
    return m;
  }

  template <class Op>
  static MatrixFunction zip(const MatrixFunction& a, const MatrixFunction& b, Op op) {
    require(a.size() == b.size() && a.dim() == b.dim(), "MatrixFunction: shape mismatch");
    std::vector<MatrixOperator> s(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) s[k] = op(a.samples[k], b.samples[k]);
    return MatrixFunction(std::move(s));
  }

  friend MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b) {
    return zip(a, b, [](const auto& x, const auto& y) -> MatrixOperator { return x + y; });
  }
  friend MatrixFunction operator-(const MatrixFunction& a, const MatrixFunction& b) {
    return zip(a, b, [](const auto& x, const auto& y) -> MatrixOperator { return x - y; });
  }
  // pointwise matrix product
  friend MatrixFunction operator*(const MatrixFunction& a, const MatrixFunction& b) {
    return zip(a, b, [](const auto& x, const auto& y) -> MatrixOperator { return x * y; });
  }
};

inline MatrixFunction riesz_project(const MatrixFunction& f) {
  MatrixFunction out = f;
  for (Eigen::Index i = 0; i < f.dim(); ++i)
    for (Eigen::Index j = 0; j < f.dim(); ++j) out.set_entry(i, j, riesz_project(f.entry(i, j)));
  return out;
}

inline double negative_coeff_max(const MatrixFunction& f) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < f.dim(); ++i)
    for (Eigen::Index j = 0; j < f.dim(); ++j) m = std::max(m, f.entry(i, j).negative_coeff_max());
  return m;
}

// |f|_{L^p(C_p)} = (mean_k |f(z_k)|_p^p)^{1/p}.
inline double lpcp_norm(const MatrixFunction& f, double p) {
  Eigen::VectorXd all(static_cast<Eigen::Index>(f.size()) * f.dim());
  for (std::size_t k = 0; k < f.size(); ++k)
    all.segment(static_cast<Eigen::Index>(k) * f.dim(), f.dim()) = singular_values(f.samples[k]).values;
  if (std::isinf(p)) return all.size() ? all.maxCoeff() : 0.0;
  return lp_of_values(all, p) * std::pow(static_cast<double>(f.size()), -1.0 / p);
}

template <>
struct ElementTraits<MatrixFunction> {
  static convex::FieldShape shape(const MatrixFunction& f) {
    return convex::FieldShape::matrix_grid(static_cast<Eigen::Index>(f.size()), f.dim());
  }
  static convex::Vec flatten(const MatrixFunction& f) {
    const Eigen::Index bs = f.dim() * f.dim();
    convex::Vec v(static_cast<Eigen::Index>(f.size()) * bs);
    for (std::size_t k = 0; k < f.size(); ++k)
      v.segment(static_cast<Eigen::Index>(k) * bs, bs) = Eigen::Map<const convex::Vec>(f.samples[k].data(), bs);
    return v;
  }
  static MatrixFunction unflatten(const convex::Vec& v, const MatrixFunction& like) {
    const Eigen::Index n = like.dim(), bs = n * n;
    std::vector<MatrixOperator> s(like.size());
    for (std::size_t k = 0; k < like.size(); ++k)
      s[k] = Eigen::Map<const MatrixOperator>(v.data() + static_cast<Eigen::Index>(k) * bs, n, n);
    return MatrixFunction(std::move(s));
  }
  static convex::Norm norm_spec(const MatrixFunction& f, double p) {
    return convex::Norm::lebesgue_schatten(p, static_cast<Eigen::Index>(f.size()));
  }
  static double norm(const MatrixFunction& f, double p) { return lpcp_norm(f, p); }
  static bool accepts(CoupleKind k) { return k == CoupleKind::lebesgue || k == CoupleKind::hardy; }
  static convex::Subspace subspace(const MatrixFunction& f, CoupleKind k) {
    return k == CoupleKind::hardy ? convex::Subspace::hardy(shape(f)) : convex::Subspace::whole();
  }
  static double membership_residual(const MatrixFunction& f, CoupleKind k) {
    return k == CoupleKind::hardy ? negative_coeff_max(f) : 0.0;
  }
  static MatrixFunction zero_like(const MatrixFunction& f) {
    return MatrixFunction::constant(f.size(), MatrixOperator::Zero(f.dim(), f.dim()));
  }
  static MatrixFunction sum(const MatrixFunction& a, const MatrixFunction& b) { return a + b; }
  static double sup_entry(const MatrixFunction& f) { return f.sup_entry(); }
};

// ---------------------------------------------------------------------------
// Spectral factorization W = F^* F with F analytic (Wilson's Newton iteration).

struct SpectralFactor {
  MatrixFunction factor;  // F, analytic, F(0) lower triangular
  double residual = 0.0;  // max_k |F^*F - W|_inf / max_k |W|_inf
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Causal part: frequencies 1..N/2-1 kept, lag 0 reduced to
// strictUpper + diag/2, everything else dropped.
inline MatrixFunction causal_part(const MatrixFunction& g) {
  MatrixFunction out = g;
  const std::size_t n = g.size(), half = n / 2;
  for (Eigen::Index i = 0; i < g.dim(); ++i)
    for (Eigen::Index j = 0; j < g.dim(); ++j) {
      std::vector<cplx> c = g.entry(i, j).coeffs();
      for (std::size_t m = 0; m < half; ++m) c[m] = 0.0;
      if (i == j) c[half] *= 0.5;
      else if (i > j) c[half] = 0.0;
      out.set_entry(i, j, CircleFunction::from_coeffs(c));
    }
  return out;
}

}  // namespace detail

// w must be Hermitian positive definite at every grid point.
inline SpectralFactor spectral_factor(const MatrixFunction& w, double tol = 1e-12, int max_iter = 200) {
  const std::size_t n_grid = w.size();
  const Eigen::Index n = w.dim();
  double wmax = 0.0;
  for (const auto& m : w.samples) wmax = std::max(wmax, schatten_norm(m, kInf));
  require(wmax > 0.0, "spectral_factor: weight vanishes");

  // Work with S = W^T = Psi Psi^*, Psi analytic; then F = Psi^T.
  std::vector<MatrixOperator> s(n_grid);
  MatrixOperator mean = MatrixOperator::Zero(n, n);
  for (std::size_t k = 0; k < n_grid; ++k) {
    s[k] = w.samples[k].transpose();
    mean += s[k] / static_cast<double>(n_grid);
  }
  MatrixFunction psi = MatrixFunction::constant(n_grid, upper_cholesky_left(mean));

  SpectralFactor out;
  const MatrixOperator id = MatrixOperator::Identity(n, n);
  for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
    std::vector<MatrixOperator> g(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
      const Eigen::PartialPivLU<MatrixOperator> lu(psi.samples[k]);
      const MatrixOperator a = lu.solve(s[k]);
      g[k] = lu.solve(a.adjoint()).adjoint() + id;  // Psi^{-1} S Psi^{-*} + I
    }
    const MatrixFunction next = riesz_project(psi * detail::causal_part(MatrixFunction(std::move(g))));
    double change = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < n_grid; ++k) {
      change = std::max(change, (next.samples[k] - psi.samples[k]).cwiseAbs().maxCoeff());
      scale = std::max(scale, next.samples[k].cwiseAbs().maxCoeff());
    }
    psi = next;
    if (!std::isfinite(change)) break;
    if (change <= tol * scale) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, max_iter);
  std::vector<MatrixOperator> f(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) {
    f[k] = psi.samples[k].transpose();
    out.residual = std::max(out.residual, schatten_norm(f[k].adjoint() * f[k] - w.samples[k], kInf) / wmax);
  }
  out.factor = MatrixFunction(std::move(f));
  if (!std::isfinite(out.residual)) out.converged = false;
  return out;
}

// Pointwise |f| = (f^* f)^{1/2}.
inline MatrixFunction abs_pointwise(const MatrixFunction& f) {
  std::vector<MatrixOperator> s(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) s[k] = abs_operator(f.samples[k]);
  return MatrixFunction(std::move(s));
}

// ---------------------------------------------------------------------------

struct MatrixValuedSplit {
  CoupleDecomposition<MatrixFunction> decomposition;
  MatrixFunction factor_F, factor_G;  // f ~ G F, F^*F = |f| + eps I
  double ambient_K = 0.0;             // certified lower bound on the ambient K_t
  double ratio = 0.0;                 // cost / ambient_K
  double ambient_gap = 0.0;
  double factor_residual = 0.0;   // |F^*F - (|f| + eps I)| relative
  bool factor_converged = false;
  int factor_iterations = 0;
  double product_residual = 0.0;  // |G F - f| / |f|, entrywise max
  double f_split_cost = 0.0;      // achieved K_{sqrt t}(F) in the doubled couple
  double g_split_cost = 0.0;
  double delta = 0.0;             // f_split_cost / sqrt(ambient_K) - sqrt(2)
};

namespace detail {

// Analytic split of analytic f for (L^p0(C_p0), L^p1(C_p1)): optimal ambient
// truncation of the pointwise singular values at a common level, then the
// Riesz projection of the part above the level.
inline MatrixFunction analytic_split_x0(const MatrixFunction& f, double p0, double p1, double t) {
  const std::size_t n_grid = f.size();
  std::vector<Eigen::JacobiSVD<MatrixOperator>> svd;
  svd.reserve(n_grid);
  Eigen::VectorXd all(static_cast<Eigen::Index>(n_grid) * f.dim());
  for (std::size_t k = 0; k < n_grid; ++k) {
    svd.emplace_back(f.samples[k], Eigen::ComputeFullU | Eigen::ComputeFullV);
    all.segment(static_cast<Eigen::Index>(k) * f.dim(), f.dim()) = svd.back().singularValues();
  }
  const double top = all.size() ? all.maxCoeff() : 0.0;
  if (top == 0.0) return f;
  const auto lpcp = [&](const Eigen::VectorXd& s, double p) {
    if (std::isinf(p)) return s.maxCoeff();
    return lp_of_values(s, p) * std::pow(static_cast<double>(n_grid), -1.0 / p);
  };
  const double level = optimal_level(top, [&](double l) {
    const Eigen::VectorXd lo = all.cwiseMin(l);
    return lpcp(all - lo, p0) + t * lpcp(lo, p1);
  });
  std::vector<MatrixOperator> hi(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) {
    const Eigen::VectorXd s = svd[k].singularValues();
    hi[k] = svd[k].matrixU() * (s - s.cwiseMin(level)).cast<cplx>().asDiagonal() * svd[k].matrixV().adjoint();
  }
  return riesz_project(MatrixFunction(std::move(hi)));
}

}  // namespace detail

// Squaring decomposition for (H^p0(C_p0), H^p1(C_p1)) on matrix functions.
// F and G are split in the doubled couple (L^{2p0}(C_{2p0}), L^{2p1}(C_{2p1}))
// at sqrt(t); the cross term is split directly in the target couple.
inline MatrixValuedSplit matrix_valued_split(const MatrixFunction& f, double p0, double q0, double p1, double q1,
                                             double t, double eps = 1e-6,
                                             const convex::SolverOptions& opt = {}) {
  require(f.dim() >= 1 && f.dim() <= 8 && f.size() <= 32, "matrix_valued_split: desk scale only (n <= 8, N <= 32)");
  require(p0 == q0 && p1 == q1, "matrix_valued_split: only L^p(C_p) exponents (p_i = q_i) are supported");
  require(p0 >= 1.0 && p1 > p0, "matrix_valued_split: exponents must satisfy 1 <= p0 < p1");
  require(t > 0.0 && eps > 0.0, "matrix_valued_split: t and eps must be positive");
  const double scale = f.sup_entry();
  require(negative_coeff_max(f) <= 1e-8 * std::max(scale, 1e-300), "matrix_valued_split: f must be analytic");
  const CoupleId couple = CoupleId::hardy(p0, p1);

  MatrixValuedSplit out;
  if (scale == 0.0) {
    out.decomposition = CoupleDecomposition<MatrixFunction>::make(f, f, couple, t);
    out.factor_F = out.factor_G = f;
    out.ratio = 1.0;
    out.factor_converged = true;
    return out;
  }

  const Eigen::Index n = f.dim();
  MatrixFunction w = abs_pointwise(f);
  for (auto& m : w.samples) m += eps * MatrixOperator::Identity(n, n);
  const SpectralFactor sf = spectral_factor(w);
  out.factor_F = sf.factor;
  out.factor_residual = sf.residual;
  out.factor_converged = sf.converged;
  out.factor_iterations = sf.iterations;

  std::vector<MatrixOperator> g(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    g[k] = out.factor_F.samples[k].adjoint().partialPivLu().solve(f.samples[k].adjoint()).adjoint();  // f F^{-1}
  out.factor_G = riesz_project(MatrixFunction(std::move(g)));
  {
    double m = 0.0;
    const MatrixFunction gf = out.factor_G * out.factor_F;
    for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, (gf.samples[k] - f.samples[k]).cwiseAbs().maxCoeff());
    out.product_residual = m / scale;
  }

  const double st = std::sqrt(t);
  const MatrixFunction f0 = detail::analytic_split_x0(out.factor_F, 2.0 * p0, 2.0 * p1, st);
  const MatrixFunction f1 = out.factor_F - f0;
  const MatrixFunction g0 = detail::analytic_split_x0(out.factor_G, 2.0 * p0, 2.0 * p1, st);
  const MatrixFunction g1 = out.factor_G - g0;
  out.f_split_cost = lpcp_norm(f0, 2.0 * p0) + st * lpcp_norm(f1, 2.0 * p1);
  out.g_split_cost = lpcp_norm(g0, 2.0 * p0) + st * lpcp_norm(g1, 2.0 * p1);

  const MatrixFunction base = riesz_project(g0 * f0);
  const MatrixFunction cross = riesz_project(g0 * f1 + g1 * f0);
  std::vector<MatrixFunction> options{base, base + cross, base + detail::analytic_split_x0(cross, p0, p1, t)};
  out.decomposition.cost = kInf;
  for (const auto& x0 : options) {
    auto d = CoupleDecomposition<MatrixFunction>::make(x0, f - x0, couple, t);
    if (d.cost < out.decomposition.cost) out.decomposition = std::move(d);
  }

  const auto amb = kt_bruteforce(f, CoupleId::lebesgue(p0, p1), t, opt);
  out.ambient_K = amb.lower_bound;
  out.ambient_gap = amb.value - amb.lower_bound;
  out.ratio = out.ambient_K > 0.0 ? out.decomposition.cost / out.ambient_K : 1.0;
  out.delta = out.ambient_K > 0.0 ? out.f_split_cost / std::sqrt(out.ambient_K) - std::sqrt(2.0) : 0.0;
  return out;
}

}  // namespace kclosed
