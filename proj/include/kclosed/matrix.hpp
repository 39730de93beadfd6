#pragma once

// Dense finite-dimensional operators with respect to a fixed ordered basis.
// "Triangular" always means upper triangular in that basis.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "kclosed/common.hpp"

namespace kclosed {

using MatrixOperator = Eigen::MatrixXcd;

// Singular values sorted non-increasing.
struct SingularValues {
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  std::vector<double> to_vector() const { return {values.data(), values.data() + values.size()}; }
};

inline SingularValues singular_values(const MatrixOperator& x) {
  if (x.size() == 0) return {};
  Eigen::JacobiSVD<MatrixOperator> svd(x);
  return {svd.singularValues()};
}

inline double lp_of_values(const Eigen::VectorXd& s, double p) {
  require(p >= 1.0, "norm exponent must be >= 1");
  if (s.size() == 0) return 0.0;
  if (std::isinf(p)) return s.maxCoeff();
  const double m = s.maxCoeff();
  if (m <= 0.0) return 0.0;
  return m * std::pow((s / m).array().pow(p).sum(), 1.0 / p);
}

// (tr |x|^p)^{1/p}; operator norm for p = inf.
inline double schatten_norm(const MatrixOperator& x, double p) {
  return lp_of_values(singular_values(x).values, p);
}

// Keeps the upper triangle (diagonal included).
inline MatrixOperator triangular_part(const MatrixOperator& x) {
  MatrixOperator y = x;
  y.triangularView<Eigen::StrictlyLower>().setZero();
  return y;
}

// Largest strictly-lower entry relative to the largest entry (0 for x = 0).
inline double triangularity_residual(const MatrixOperator& x) {
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double m = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = j + 1; i < x.rows(); ++i) m = std::max(m, std::abs(x(i, j)));
  return m / scale;
}

// Hilbert-Schmidt inner product tr(b^* a).
inline cplx trace_inner(const MatrixOperator& a, const MatrixOperator& b) {
  return (b.adjoint() * a).trace();
}

// h^alpha for Hermitian positive semidefinite h (negative eigenvalues from
// rounding are clipped to zero).
inline MatrixOperator psd_power(const MatrixOperator& h, double alpha) {
  Eigen::SelfAdjointEigenSolver<MatrixOperator> es(h);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = ev[i] > 0.0 ? std::pow(ev[i], alpha) : (alpha == 0.0 ? 1.0 : 0.0);
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

// |x| = (x^* x)^{1/2}.
inline MatrixOperator abs_operator(const MatrixOperator& x) { return psd_power(x.adjoint() * x, 0.5); }

inline nlohmann::json matrix_to_json(const MatrixOperator& x) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> r, m;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      r.push_back(x(i, j).real());
      m.push_back(x(i, j).imag());
    }
    re.push_back(r);
    im.push_back(m);
  }
  return {{"n", x.rows()}, {"re", re}, {"im", im}};
}

inline MatrixOperator matrix_from_json(const nlohmann::json& j) {
  const auto n = j.at("n").get<Eigen::Index>();
  require(n >= 1, "MatrixOperator JSON: n must be >= 1");
  const auto re = j.at("re").get<std::vector<std::vector<double>>>();
  const auto im = j.contains("im") ? j.at("im").get<std::vector<std::vector<double>>>()
                                   : std::vector<std::vector<double>>(static_cast<std::size_t>(n),
                                                                      std::vector<double>(static_cast<std::size_t>(n), 0.0));
  require(re.size() == static_cast<std::size_t>(n) && im.size() == static_cast<std::size_t>(n),
          "MatrixOperator JSON: row count mismatch with n");
  MatrixOperator x(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    require(re[ui].size() == static_cast<std::size_t>(n) && im[ui].size() == static_cast<std::size_t>(n),
            "MatrixOperator JSON: column count mismatch with n");
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      x(i, k) = {re[ui][uk], im[ui][uk]};
      require(std::isfinite(re[ui][uk]) && std::isfinite(im[ui][uk]), "MatrixOperator JSON: non-finite entry");
    }
  }
  return x;
}

}  // namespace kclosed
