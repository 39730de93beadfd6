#pragma once

// Primal-dual hybrid gradient solver for the small norm programs used as
// oracles throughout the library:
//
//   minimise  sum_i  w_i |c_i - u|_i        (Coupling::sum)
//   minimise  max_i  w_i |c_i - u|_i        (Coupling::max)
//   subject to u in S (a linear subspace given by its orthogonal projector).
//
// Every norm is an l^p norm of a "spectrum": moduli of the entries for
// scalar blocks, singular values for matrix blocks. Both the norm and its dual
// therefore admit exact ball projections, which is all the iteration needs.
// A valid lower bound (dual value) is produced alongside every primal value,
// so a reported gap is a certificate, not an estimate.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "kclosed/common.hpp"

namespace kclosed::convex {

using Eigen::Index;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Layout of a flattened element: `blocks` consecutive rows x cols blocks,
// each stored column-major. A grid function is N blocks of 1x1, a matrix is a
// single n x n block, a matrix-valued grid function is N blocks of n x n.
struct FieldShape {
  Index blocks = 1;
  Index rows = 1;
  Index cols = 1;

  Index block_size() const { return rows * cols; }
  Index size() const { return blocks * rows * cols; }
  bool scalar_blocks() const { return rows == 1 && cols == 1; }
  Index spectrum_size() const { return blocks * std::min(rows, cols); }

  static FieldShape grid(Index n) { return {n, 1, 1}; }
  static FieldShape matrix(Index n) { return {1, n, n}; }
  static FieldShape sequence(Index n) { return {n, 1, 1}; }
  static FieldShape matrix_grid(Index n_grid, Index n) { return {n_grid, n, n}; }
};

// weight * (l^p norm of the spectrum). Mixing an outer exponent across blocks
// with a different Schatten exponent inside blocks is not representable;
// L^p(C_p) is.
struct Norm {
  double p = 1.0;
  double weight = 1.0;

  // L^p on the N-point grid with normalised counting measure.
  static Norm lebesgue(double p, Index n_grid) {
    return {p, std::isinf(p) ? 1.0 : std::pow(static_cast<double>(n_grid), -1.0 / p)};
  }
  static Norm sequence(double p) { return {p, 1.0}; }
  static Norm schatten(double p) { return {p, 1.0}; }
  // L^p(C_p) for matrix-valued grid functions.
  static Norm lebesgue_schatten(double p, Index n_grid) { return lebesgue(p, n_grid); }

  Norm scaled(double c) const { return {p, weight * c}; }
};

inline double lp_of(const RVec& s, double p) {
  if (s.size() == 0) return 0.0;
  if (std::isinf(p)) return s.maxCoeff();
  if (p == 1.0) return s.sum();
  if (p == 2.0) return s.norm();
  const double m = s.maxCoeff();
  if (m <= 0.0) return 0.0;
  return m * std::pow((s / m).array().pow(p).sum(), 1.0 / p);
}

// Euclidean projection of a non-negative vector onto {x >= 0 : |x|_p <= r}.
inline RVec project_lp_ball(const RVec& s, double p, double r) {
  if (r <= 0.0) return RVec::Zero(s.size());
  if (lp_of(s, p) <= r) return s;
  if (std::isinf(p)) return s.cwiseMin(r);
  if (p == 2.0) return s * (r / s.norm());
  if (p == 1.0) {
    std::vector<double> v(s.data(), s.data() + s.size());
    std::sort(v.begin(), v.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      cum += v[k];
      const double cand = (cum - r) / static_cast<double>(k + 1);
      if (k + 1 == v.size() || v[k + 1] <= cand) {
        theta = cand;
        break;
      }
    }
    return (s.array() - theta).cwiseMax(0.0).matrix();
  }
  // General p: x_i + mu p x_i^{p-1} = s_i, with mu chosen so |x|_p = r.
  const auto solve_coord = [p](double si, double mu) {
    if (si <= 0.0) return 0.0;
    double lo = 0.0, hi = si;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid + mu * p * std::pow(mid, p - 1.0) > si)
        hi = mid;
      else
        lo = mid;
      if (hi - lo <= 1e-16 * si) break;
    }
    return 0.5 * (lo + hi);
  };
  const auto at = [&](double mu) {
    RVec x(s.size());
    for (Index i = 0; i < s.size(); ++i) x[i] = solve_coord(s[i], mu);
    return x;
  };
  double lo = 0.0, hi = 1.0;
  while (lp_of(at(hi), p) > r) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lp_of(at(mid), p) > r)
      lo = mid;
    else
      hi = mid;
  }
  return at(hi);
}

// Spectral decomposition of an element: v = rebuild(spectrum).
class Spectral {
 public:
  Spectral(const Vec& v, const FieldShape& shape) : shape_(shape) {
    spectrum_.resize(shape.spectrum_size());
    if (shape.scalar_blocks()) {
      phase_.resize(shape.blocks);
      for (Index k = 0; k < shape.blocks; ++k) {
        const double m = std::abs(v[k]);
        spectrum_[k] = m;
        phase_[k] = m > 0.0 ? v[k] / m : cplx(1.0, 0.0);
      }
      return;
    }
    const Index r = std::min(shape.rows, shape.cols);
    u_.reserve(static_cast<std::size_t>(shape.blocks));
    v_.reserve(static_cast<std::size_t>(shape.blocks));
    for (Index b = 0; b < shape.blocks; ++b) {
      Eigen::Map<const Eigen::MatrixXcd> block(v.data() + b * shape.block_size(), shape.rows,
                                               shape.cols);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
      spectrum_.segment(b * r, r) = svd.singularValues();
      u_.push_back(svd.matrixU());
      v_.push_back(svd.matrixV());
    }
  }

  const RVec& spectrum() const { return spectrum_; }

  Vec rebuild(const RVec& s) const {
    Vec out(shape_.size());
    if (shape_.scalar_blocks()) {
      for (Index k = 0; k < shape_.blocks; ++k) out[k] = s[k] * phase_[k];
      return out;
    }
    const Index r = std::min(shape_.rows, shape_.cols);
    for (Index b = 0; b < shape_.blocks; ++b) {
      Eigen::Map<Eigen::MatrixXcd> block(out.data() + b * shape_.block_size(), shape_.rows,
                                         shape_.cols);
      const auto& U = u_[static_cast<std::size_t>(b)];
      const auto& V = v_[static_cast<std::size_t>(b)];
      block = U * s.segment(b * r, r).cast<cplx>().asDiagonal() * V.adjoint();
    }
    return out;
  }

 private:
  FieldShape shape_;
  RVec spectrum_;
  std::vector<cplx> phase_;
  std::vector<Eigen::MatrixXcd> u_, v_;
};

inline double norm_value(const Vec& v, const FieldShape& shape, const Norm& n) {
  return n.weight * lp_of(Spectral(v, shape).spectrum(), n.p);
}

// Euclidean projection onto {y : |spectrum(y)|_p <= r}.
inline Vec project_ball(const Vec& v, const FieldShape& shape, double p, double r) {
  Spectral sp(v, shape);
  if (lp_of(sp.spectrum(), p) <= r) return v;
  return sp.rebuild(project_lp_ball(sp.spectrum(), p, r));
}

// A linear subspace given by its orthogonal projector (with respect to the
// real inner product Re<a, b> on the flattened coordinates).
struct Subspace {
  std::string name = "whole";
  std::function<void(Vec&)> project;  // empty means the whole space

  void apply(Vec& v) const {
    if (project) project(v);
  }
  bool is_whole() const { return !project; }

  static Subspace whole() { return {}; }

  // Analytic grid functions: each entry's sequence over the grid keeps only
  // frequencies 0 .. N/2-1.
  static Subspace hardy(const FieldShape& shape) {
    require(shape.blocks >= 2 && is_power_of_two(static_cast<std::size_t>(shape.blocks)),
            "Subspace::hardy: grid size must be a power of two");
    Subspace s;
    s.name = "hardy";
    s.project = [shape](Vec& v) {
      thread_local Eigen::FFT<double> fft;
      const Index n = shape.blocks;
      const Index bs = shape.block_size();
      std::vector<cplx> seq(static_cast<std::size_t>(n)), spec;
      for (Index e = 0; e < bs; ++e) {
        for (Index k = 0; k < n; ++k) seq[static_cast<std::size_t>(k)] = v[k * bs + e];
        fft.fwd(spec, seq);
        for (Index j = n / 2; j < n; ++j) spec[static_cast<std::size_t>(j)] = 0.0;
        fft.inv(seq, spec);
        for (Index k = 0; k < n; ++k) v[k * bs + e] = seq[static_cast<std::size_t>(k)];
      }
    };
    return s;
  }

  // Upper-triangular blocks (diagonal included).
  static Subspace upper_triangular(const FieldShape& shape) {
    Subspace s;
    s.name = "upper_triangular";
    s.project = [shape](Vec& v) {
      for (Index b = 0; b < shape.blocks; ++b) {
        Eigen::Map<Eigen::MatrixXcd> block(v.data() + b * shape.block_size(), shape.rows,
                                           shape.cols);
        block.triangularView<Eigen::StrictlyLower>().setZero();
      }
    };
    return s;
  }

  // Largest entry modulus of v - P v.
  double residual(const Vec& v) const {
    if (is_whole()) return 0.0;
    Vec w = v;
    apply(w);
    return (w - v).cwiseAbs().maxCoeff();
  }
};

enum class Coupling { sum, max };

struct Term {
  Vec center;
  Norm norm;
};

struct Program {
  FieldShape shape;
  std::vector<Term> terms;
  Coupling coupling = Coupling::sum;
  Subspace subspace;

  double objective(const Vec& u) const {
    double acc = 0.0;
    for (const auto& t : terms) {
      const double v = norm_value(t.center - u, shape, t.norm);
      acc = coupling == Coupling::sum ? acc + v : std::max(acc, v);
    }
    return acc;
  }
};

struct SolverOptions {
  double tol = 1e-7;          // relative duality gap
  long max_iter = 200000;
  int check_every = 64;
  double relaxation = 1.5;    // over-relaxation factor in (0, 2)
  std::optional<Vec> initial; // primal starting point (projected onto S)
};

struct SolverCertificate {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  long iterations = 0;
  bool converged = false;
  Vec solution;                  // best primal iterate, lies in S
  std::vector<Vec> dual_witness; // feasible dual point achieving `dual`
};

namespace detail {

inline double dual_norm(const Vec& y, const FieldShape& shape, const Norm& n) {
  return lp_of(Spectral(y, shape).spectrum(), conjugate_exponent(n.p));
}

inline double real_dot(const Vec& a, const Vec& b) { return a.dot(b).real(); }

// Dual objective -sum <y_i, c_i> after repairing y into the feasible set:
// P_S(sum y_i) = 0 and the dual-ball constraints. Returns the best of the
// repairs obtained by moving the projection defect into each term in turn.
inline std::pair<double, std::vector<Vec>> dual_bound(const Program& prog,
                                                      const std::vector<Vec>& y) {
  const std::size_t m = prog.terms.size();
  Vec defect = Vec::Zero(prog.shape.size());
  for (const auto& yi : y) defect += yi;
  prog.subspace.apply(defect);

  double best = 0.0;
  std::vector<Vec> best_y(m, Vec::Zero(prog.shape.size()));
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Vec> cand = y;
    cand[j] -= defect;
    double alpha = 1.0;
    if (prog.coupling == Coupling::sum) {
      for (std::size_t i = 0; i < m; ++i) {
        const double dn = dual_norm(cand[i], prog.shape, prog.terms[i].norm);
        if (dn > prog.terms[i].norm.weight) alpha = std::min(alpha, prog.terms[i].norm.weight / dn);
      }
    } else {
      double load = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        load += dual_norm(cand[i], prog.shape, prog.terms[i].norm) / prog.terms[i].norm.weight;
      if (load > 1.0) alpha = 1.0 / load;
    }
    double value = 0.0;
    for (std::size_t i = 0; i < m; ++i) value -= real_dot(cand[i], prog.terms[i].center);
    value *= alpha;
    if (value > best) {
      best = value;
      for (auto& c : cand) c *= alpha;
      best_y = std::move(cand);
    }
  }
  return {best, best_y};
}

// prox of sigma F^* evaluated at eta, where F couples the terms.
inline void dual_prox(const Program& prog, std::vector<Vec>& eta) {
  const std::size_t m = prog.terms.size();
  if (prog.coupling == Coupling::sum) {
    for (std::size_t i = 0; i < m; ++i) {
      const Norm& n = prog.terms[i].norm;
      eta[i] = project_ball(eta[i], prog.shape, conjugate_exponent(n.p), n.weight);
    }
    return;
  }
  // max coupling: project onto {sum_i |y_i|_{p_i'} / w_i <= 1}. The solution
  // is y_i = eta_i - proj_{(mu/w_i) B_{p_i}}(eta_i) for the multiplier mu
  // making the constraint tight.
  std::vector<Spectral> sp;
  sp.reserve(m);
  double load = 0.0, mu_hi = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sp.emplace_back(eta[i], prog.shape);
    const Norm& n = prog.terms[i].norm;
    load += lp_of(sp[i].spectrum(), conjugate_exponent(n.p)) / n.weight;
    mu_hi = std::max(mu_hi, n.weight * lp_of(sp[i].spectrum(), n.p));
  }
  if (load <= 1.0) return;
  const auto shrunk = [&](std::size_t i, double mu) {
    const Norm& n = prog.terms[i].norm;
    const RVec& s = sp[i].spectrum();
    return RVec(s - project_lp_ball(s, n.p, mu / n.weight));
  };
  const auto load_at = [&](double mu) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      acc += lp_of(shrunk(i, mu), conjugate_exponent(prog.terms[i].norm.p)) /
             prog.terms[i].norm.weight;
    return acc;
  };
  double lo = 0.0, hi = mu_hi;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * mu_hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (load_at(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  for (std::size_t i = 0; i < m; ++i) eta[i] = sp[i].rebuild(shrunk(i, hi));
}

}  // namespace detail

// Solves the program; the result carries the best primal iterate and a
// feasible dual witness. `converged` is false when the iteration budget ran
// out before the relative gap reached `tol`; the best iterate is still
// returned.
inline SolverCertificate solve(const Program& prog_in, const SolverOptions& opt = {}) {
  require(!prog_in.terms.empty(), "solve: program has no terms");
  require(opt.tol > 0.0 && opt.max_iter > 0, "solve: invalid options");
  for (const auto& t : prog_in.terms) {
    require(t.center.size() == prog_in.shape.size(), "solve: term size does not match shape");
    require(t.norm.weight > 0.0 && t.norm.p >= 1.0, "solve: invalid norm");
  }
  const Index dim = prog_in.shape.size();

  double scale = 0.0;
  for (const auto& t : prog_in.terms) scale = std::max(scale, t.center.norm());

  SolverCertificate cert;
  cert.dual_witness.assign(prog_in.terms.size(), Vec::Zero(dim));
  if (scale == 0.0) {
    cert.solution = Vec::Zero(dim);
    cert.converged = true;
    return cert;
  }

  Program prog = prog_in;
  for (auto& t : prog.terms) t.center /= scale;
  const std::size_t m = prog.terms.size();

  Vec u = opt.initial ? Vec(*opt.initial / scale) : Vec(Vec::Zero(dim));
  prog.subspace.apply(u);
  std::vector<Vec> y(m, Vec::Zero(dim));

  // Initial primal weight: Euclidean size of the dual balls over that of the
  // (unit) primal scale.
  double omega = 0.0;
  for (const auto& t : prog.terms) {
    const double pd = conjugate_exponent(t.norm.p);
    const double d = static_cast<double>(prog.shape.spectrum_size());
    const double factor = std::pow(d, std::max(0.0, 0.5 - inverse_exponent(pd)));
    omega += std::pow(t.norm.weight * factor, 2);
  }
  omega = std::sqrt(omega);
  if (!(omega > 0.0)) omega = 1.0;
  const double eta_step = 0.99 / std::sqrt(static_cast<double>(m));

  double best_primal = prog.objective(u);
  Vec best_u = u;
  double best_dual = 0.0;
  std::vector<Vec> best_y(m, Vec::Zero(dim));

  Vec u_sum = Vec::Zero(dim);
  std::vector<Vec> y_sum(m, Vec::Zero(dim));
  long n_avg = 0;
  Vec u_restart = u;
  std::vector<Vec> y_restart = y;
  double gap_restart = kInf, gap_prev = kInf;
  long last_restart = 0;

  const auto evaluate = [&](const Vec& uc, const std::vector<Vec>& yc) {
    const double pv = prog.objective(uc);
    auto [dv, yd] = detail::dual_bound(prog, yc);
    if (pv < best_primal) {
      best_primal = pv;
      best_u = uc;
    }
    if (dv > best_dual) {
      best_dual = dv;
      best_y = std::move(yd);
    }
    return pv - dv;
  };

  const auto done = [&]() {
    const double gap = best_primal - best_dual;
    return gap <= opt.tol * best_primal || gap <= 1e-15;
  };

  long iter = 0;
  if (!done()) {
    std::vector<Vec> eta(m);
    for (iter = 1; iter <= opt.max_iter; ++iter) {
      const double tau = eta_step / omega, sigma = eta_step * omega;
      Vec ysum = Vec::Zero(dim);
      for (const auto& yi : y) ysum += yi;
      Vec u_hat = u - tau * ysum;
      prog.subspace.apply(u_hat);
      const Vec u_bar = 2.0 * u_hat - u;
      for (std::size_t i = 0; i < m; ++i) eta[i] = y[i] + sigma * (u_bar - prog.terms[i].center);
      detail::dual_prox(prog, eta);

      u += opt.relaxation * (u_hat - u);
      for (std::size_t i = 0; i < m; ++i) y[i] += opt.relaxation * (eta[i] - y[i]);

      u_sum += u_hat;
      for (std::size_t i = 0; i < m; ++i) y_sum[i] += eta[i];
      ++n_avg;

      if (iter % opt.check_every != 0) continue;

      const double gap_cur = evaluate(u_hat, eta);
      Vec u_avg = u_sum / static_cast<double>(n_avg);
      std::vector<Vec> y_avg(m);
      for (std::size_t i = 0; i < m; ++i) y_avg[i] = y_sum[i] / static_cast<double>(n_avg);
      const double gap_avg = evaluate(u_avg, y_avg);
      if (done()) break;

      const bool use_avg = gap_avg < gap_cur;
      const double gap_cand = std::min(gap_cur, gap_avg);
      const bool restart = gap_cand <= 0.2 * gap_restart ||
                           (gap_cand <= 0.8 * gap_restart && gap_cand > gap_prev) ||
                           iter - last_restart >= std::max<long>(opt.check_every, iter * 36 / 100);
      gap_prev = gap_cand;
      if (!restart) continue;

      if (use_avg) {
        u = u_avg;
        y = y_avg;
      } else {
        u = u_hat;
        y = eta;
      }
      double du = (u - u_restart).norm(), dy = 0.0;
      for (std::size_t i = 0; i < m; ++i) dy += (y[i] - y_restart[i]).squaredNorm();
      dy = std::sqrt(dy);
      if (du > 1e-12 && dy > 1e-12) omega = std::exp(0.5 * std::log(dy / du) + 0.5 * std::log(omega));
      u_restart = u;
      y_restart = y;
      gap_restart = gap_cand;
      gap_prev = kInf;
      last_restart = iter;
      u_sum.setZero();
      for (auto& s : y_sum) s.setZero();
      n_avg = 0;
    }
  }

  cert.iterations = std::min(iter, opt.max_iter);
  cert.primal = best_primal * scale;
  cert.dual = best_dual * scale;
  cert.gap = cert.primal - cert.dual;
  cert.converged = done();
  cert.solution = best_u * scale;
  cert.dual_witness = best_y;
  return cert;
}

// ---------------------------------------------------------------------------
// The two program families used by the rest of the library.

// minimise |x0|_0 + t |x1|_1 over x = x0 + x1 with both parts in the subspace.
struct SplitProgram {
  Vec target;
  FieldShape shape;
  Subspace subspace;
  Norm norm0;
  Norm norm1;
  double t = 1.0;
};

struct SplitResult {
  SolverCertificate certificate;
  Vec x0, x1;
};

inline SplitResult solve_split(const SplitProgram& sp, const SolverOptions& opt = {}) {
  require(sp.t > 0.0, "solve_split: weight t must be positive");
  require(sp.target.size() == sp.shape.size(), "solve_split: target size does not match shape");
  require(sp.subspace.residual(sp.target) <= 1e-8 * std::max(1.0, sp.target.cwiseAbs().maxCoeff()),
          "solve_split: target does not lie in the subspace");
  Program prog;
  prog.shape = sp.shape;
  prog.subspace = sp.subspace;
  prog.coupling = Coupling::sum;
  prog.terms.push_back({Vec::Zero(sp.shape.size()), sp.norm0});
  prog.terms.push_back({sp.target, sp.norm1.scaled(sp.t)});
  SplitResult r;
  r.certificate = solve(prog, opt);
  r.x0 = r.certificate.solution;
  r.x1 = sp.target - r.x0;
  return r;
}

// minimise max(|x - y|_a / s_a, |x - y|_b / s_b) over y in the subspace.
inline SolverCertificate solve_minmax_distance(const Vec& target, const FieldShape& shape,
                                               const Subspace& subspace,
                                               std::pair<Norm, Norm> norms,
                                               std::pair<double, double> scales,
                                               const SolverOptions& opt = {}) {
  require(scales.first > 0.0 && scales.second > 0.0, "solve_minmax_distance: scales must be positive");
  Program prog;
  prog.shape = shape;
  prog.subspace = subspace;
  prog.coupling = Coupling::max;
  prog.terms.push_back({target, norms.first.scaled(1.0 / scales.first)});
  prog.terms.push_back({target, norms.second.scaled(1.0 / scales.second)});
  return solve(prog, opt);
}

// minimise |x - y| over y in the subspace.
inline SolverCertificate solve_distance(const Vec& target, const FieldShape& shape,
                                        const Subspace& subspace, const Norm& norm,
                                        const SolverOptions& opt = {}) {
  Program prog;
  prog.shape = shape;
  prog.subspace = subspace;
  prog.terms.push_back({target, norm});
  return solve(prog, opt);
}

}  // namespace kclosed::convex
