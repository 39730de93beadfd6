#pragma once

// Inner-outer machinery on the grid model: outer functions from a modulus,
// finite Blaschke products, f = B F^2 and Hoelder splittings f = g h.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include "kclosed/circle_function.hpp"
#include "kclosed/common.hpp"

namespace kclosed {

inline constexpr double kBoundaryMargin = 1e-8;

struct BlaschkeProduct {
  std::vector<cplx> zeros;  // |z| <= 1 - kBoundaryMargin, repeated by multiplicity
  cplx rotation{1.0, 0.0};  // unimodular

  BlaschkeProduct() = default;
  BlaschkeProduct(std::vector<cplx> z, cplx rot) : zeros(std::move(z)), rotation(rot) {
    for (const auto& a : zeros)
      require(std::abs(a) <= 1.0 - kBoundaryMargin,
              "BlaschkeProduct: zero too close to (or outside) the unit circle");
    require(std::abs(std::abs(rotation) - 1.0) <= 1e-12, "BlaschkeProduct: rotation must be unimodular");
  }

  // rotation * prod (|a|/a)(a - z)/(1 - conj(a) z), with the factor z for a = 0.
  cplx operator()(cplx z) const {
    cplx acc = rotation;
    for (const auto& a : zeros) {
      if (a == cplx(0.0)) {
        acc *= z;
        continue;
      }
      acc *= (std::abs(a) / a) * (a - z) / (1.0 - std::conj(a) * z);
    }
    return acc;
  }
};

inline CircleFunction blaschke_eval(const BlaschkeProduct& b, std::size_t n) {
  return CircleFunction::sample_z(n, [&](cplx z) { return b(z); });
}

// O = exp(A) with Re A = log w on the grid and A analytic up to the Nyquist
// mode of log w.
struct OuterFunction {
  CircleFunction logmod;        // log w (real-valued)
  CircleFunction log_boundary;  // the analytic logarithm A
  CircleFunction boundary;      // O on the grid

  // O(0) = exp(mean of log w) > 0.
  double value_at_zero() const { return std::exp(logmod.coeff(0).real()); }
};

// Discrete Herglotz completion: A = c_0 + 2 sum_{0<j<N/2} c_j z^j + c_{-N/2} (-1)^k.
// The Nyquist term keeps |O| = w exact; it is the only non-analytic content.
inline OuterFunction outer_function(const CircleFunction& w) {
  const double scale = std::max(w.sup_modulus(), 1e-300);
  for (const auto& v : w.samples()) {
    if (std::abs(v.imag()) > 1e-12 * scale)
      throw std::invalid_argument("outer_function: weight must be real-valued");
    if (!(v.real() > 0.0))
      throw numerical_error("outer_function: vanishing modulus (regularise the weight first)");
  }
  const CircleFunction logw = w.map([](cplx v) { return cplx(std::log(v.real()), 0.0); });
  std::vector<cplx> c = logw.coeffs();
  const std::size_t half = w.size() / 2;
  for (std::size_t i = 1; i < half; ++i) c[i] = 0.0;  // frequencies -N/2+1 .. -1
  for (std::size_t i = half + 1; i < w.size(); ++i) c[i] *= 2.0;
  c[half] = cplx(c[half].real(), 0.0);
  c[0] = cplx(c[0].real(), 0.0);
  OuterFunction o{logw, CircleFunction::from_coeffs(c), {}};
  o.boundary = o.log_boundary.map([](cplx a) { return std::exp(a); });
  return o;
}

// Exact inner-outer structure of an analytic grid function, which on the grid
// model is a polynomial of degree < N/2:
//   f(z) = K * prod_inner b_a(z) (1 - conj(a) z) * prod_outer (1 - z/r),
// with b_a the normalised Blaschke factor.
class PolynomialFactorization {
 public:
  // Moduli below eps_zero are floored when taking logarithms.
  explicit PolynomialFactorization(const CircleFunction& f, double eps_zero_rel = 1e-12)
      : n_(f.size()), eps_zero_(eps_zero_rel * f.sup_modulus()) {
    const double scale = std::max(f.sup_modulus(), 1e-300);
    if (f.sup_modulus() == 0.0) throw std::invalid_argument("factorization: f is identically zero");
    require(f.negative_coeff_max() <= 1e-8 * scale, "factorization: f is not analytic");

    const std::size_t half = n_ / 2;
    std::vector<cplx> c(f.coeffs().begin() + static_cast<long>(half), f.coeffs().end());
    double cmax = 0.0;
    for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
    const double cut = 1e-13 * cmax;
    std::size_t low = 0, high = c.size() - 1;
    while (std::abs(c[low]) <= cut) ++low;
    while (std::abs(c[high]) <= cut) --high;

    std::vector<cplx> roots(low, cplx(0.0));
    if (high > low) {
      Eigen::VectorXcd poly(static_cast<Eigen::Index>(high - low + 1));
      for (std::size_t j = low; j <= high; ++j) poly[static_cast<Eigen::Index>(j - low)] = c[j];
      Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver;
      solver.compute(poly);
      for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(polish(poly, solver.roots()[i]));
    }

    cplx k = c[high];
    for (const auto& r : roots) {
      const double m = std::abs(r);
      if (m == 0.0) {
        inner_.push_back(r);
      } else if (m < 1.0 - kBoundaryMargin) {
        inner_.push_back(r);
        k *= -r / m;
      } else {
        if (m < 1.0 + kBoundaryMargin) ++boundary_roots_;
        // Boundary-adjacent zeros are pushed onto the circle and absorbed
        // into the outer part.
        const cplx rr = m < 1.0 ? r / m : r;
        outer_.push_back(rr);
        k *= -rr;
      }
    }
    constant_ = k;
  }

  std::size_t grid_size() const { return n_; }
  const std::vector<cplx>& inner_zeros() const { return inner_; }
  const std::vector<cplx>& outer_zeros() const { return outer_; }
  int boundary_roots() const { return boundary_roots_; }

  BlaschkeProduct inner() const { return {inner_, constant_ / std::abs(constant_)}; }

  // Principal-branch logarithm of the outer part; analytic in the disc since
  // every factor has positive real part there.
  cplx log_outer(cplx z) const {
    cplx acc = std::log(std::abs(constant_));
    for (const auto& a : inner_)
      if (a != cplx(0.0)) acc += std::log(1.0 - std::conj(a) * z);
    for (const auto& r : outer_) acc += std::log(1.0 - z / r);
    return acc;
  }

  // Samples of (outer part)^alpha together with their logarithm.
  OuterFunction outer_power(double alpha) const {
    const double floor_log = std::log(std::max(eps_zero_, 1e-300));
    const CircleFunction log_part = CircleFunction::sample_z(n_, [&](cplx z) {
      cplx l = log_outer(z);
      if (!(l.real() >= floor_log)) l = cplx(floor_log, std::isfinite(l.imag()) ? l.imag() : 0.0);
      return alpha * l;
    });
    OuterFunction o;
    o.log_boundary = log_part;
    o.logmod = log_part.map([](cplx a) { return cplx(a.real(), 0.0); });
    o.boundary = log_part.map([](cplx a) { return std::exp(a); });
    return o;
  }

 private:
  static cplx polish(const Eigen::VectorXcd& poly, cplx z) {
    const auto eval = [&](cplx x, cplx& deriv) {
      cplx p = 0.0;
      deriv = 0.0;
      for (Eigen::Index j = poly.size() - 1; j >= 0; --j) {
        deriv = deriv * x + p;
        p = p * x + poly[j];
      }
      return p;
    };
    cplx d;
    double res = std::abs(eval(z, d));
    for (int it = 0; it < 8 && res > 0.0; ++it) {
      const cplx p = eval(z, d);
      if (d == cplx(0.0)) break;
      const cplx cand = z - p / d;
      cplx dd;
      const double r = std::abs(eval(cand, dd));
      if (!(r < res)) break;
      z = cand;
      res = r;
    }
    return z;
  }

  std::size_t n_;
  double eps_zero_;
  std::vector<cplx> inner_, outer_;
  cplx constant_{1.0, 0.0};
  int boundary_roots_ = 0;
};

struct SqrtFactorization {
  BlaschkeProduct inner;
  OuterFunction outer;         // F with |F|^2 = |f|
  double tol_factor = 0.0;     // max |B F^2 - f| / max |f|
  int boundary_roots = 0;      // zeros within kBoundaryMargin of the circle
};

// f = B F^2 with F zero-free: interior zeros of f go into B, the rest into F.
inline SqrtFactorization sqrt_factor(const CircleFunction& f) {
  const PolynomialFactorization pf(f);
  SqrtFactorization out{pf.inner(), pf.outer_power(0.5), 0.0, pf.boundary_roots()};
  const CircleFunction b = blaschke_eval(out.inner, f.size());
  const CircleFunction rebuilt = b * out.outer.boundary * out.outer.boundary;
  out.tol_factor = lp_norm(rebuilt - f, kInf) / f.sup_modulus();
  return out;
}

struct HolderFactorization {
  CircleFunction g;  // B * outer(|f|^{p/r})
  CircleFunction h;  // outer(|f|^{p/s})
  double tol_factor = 0.0;
};

// f = g h with |g| = |f|^{p/r}, |h| = |f|^{p/s}, hence |g|_r |h|_s = |f|_p.
inline HolderFactorization holder_factor(const CircleFunction& f, double p, double r, double s) {
  require(p >= 1.0 && r >= 1.0 && s >= 1.0 && std::isfinite(p),
          "holder_factor: exponents must lie in [1, inf] with p finite");
  require(std::abs(1.0 / p - inverse_exponent(r) - inverse_exponent(s)) <= 1e-12,
          "holder_factor: exponents must satisfy 1/p = 1/r + 1/s");
  const PolynomialFactorization pf(f);
  HolderFactorization out;
  out.g = blaschke_eval(pf.inner(), f.size()) * pf.outer_power(p * inverse_exponent(r)).boundary;
  out.h = pf.outer_power(p * inverse_exponent(s)).boundary;
  out.tol_factor = lp_norm(out.g * out.h - f, kInf) / f.sup_modulus();
  return out;
}

}  // namespace kclosed
