#include <gtest/gtest.h>

#include <random>

#include "kclosed/matrix_valued.hpp"
#include "oracles.hpp"

using namespace kclosed;

namespace {

double sup_diff(const MatrixFunction& a, const MatrixFunction& b) { return (a - b).sup_entry(); }

// Analytic matrix polynomial sum_{j <= degree} c_j z^j with Gaussian c_j.
MatrixFunction random_matrix_poly(std::size_t n_grid, Eigen::Index n, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MatrixOperator> c;
  for (int j = 0; j <= degree; ++j) c.push_back(oracle::random_matrix(n, rng) / double(j + 1));
  return MatrixFunction::sample_z(n_grid, [&](cplx z) {
    MatrixOperator acc = MatrixOperator::Zero(n, n);
    for (int j = degree; j >= 0; --j) acc = acc * z + c[static_cast<std::size_t>(j)];
    return acc;
  });
}

}  // namespace

TEST(MatrixFunction, ShapeChecksAndAlgebra) {
  EXPECT_THROW(MatrixFunction(std::vector<MatrixOperator>(6, MatrixOperator::Identity(2, 2))), std::invalid_argument);
  const auto f = random_matrix_poly(16, 2, 2, 1), g = random_matrix_poly(16, 2, 2, 2);
  EXPECT_LT(sup_diff((f + g) - g, f), 1e-14);
  EXPECT_LT(negative_coeff_max(f), 1e-14);
  EXPECT_LT(sup_diff(riesz_project(f), f), 1e-14);
  EXPECT_NEAR(lpcp_norm(MatrixFunction::constant(16, MatrixOperator::Identity(3, 3)), 1.0), 3.0, 1e-14);
  auto h = f;
  h.set_entry(0, 1, f.entry(1, 0));
  EXPECT_LT((h.entry(0, 1) - f.entry(1, 0)).sup_modulus(), 1e-15);
}

TEST(SpectralFactor, RandomPositiveWeight) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto p = random_matrix_poly(32, 3, 2, 10 + s);
    MatrixFunction w = p * MatrixFunction::zip(p, p, [](const auto& x, const auto&) -> MatrixOperator { return x.adjoint(); });
    for (auto& m : w.samples) m += 0.5 * MatrixOperator::Identity(3, 3);
    const auto sf = spectral_factor(w);
    EXPECT_TRUE(sf.converged);
    EXPECT_LT(sf.residual, 1e-8);
    EXPECT_LT(negative_coeff_max(sf.factor), 1e-8 * sf.factor.sup_entry());
    // independent residual
    double r = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      r = std::max(r, (sf.factor.samples[k].adjoint() * sf.factor.samples[k] - w.samples[k]).cwiseAbs().maxCoeff());
      scale = std::max(scale, w.samples[k].cwiseAbs().maxCoeff());
    }
    EXPECT_LT(r / scale, 1e-8);
  }
}

TEST(MatrixValuedSplit, ConstantDiagonal) {
  MatrixOperator d = MatrixOperator::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const auto f = MatrixFunction::constant(16, d);
  const double eps = 1e-6;
  for (double t : {0.1, 1.0, 10.0}) {
    const auto r = matrix_valued_split(f, 1.0, 1.0, kInf, kInf, t, eps);
    MatrixOperator fexp = MatrixOperator::Zero(2, 2), gexp = MatrixOperator::Zero(2, 2);
    fexp(0, 0) = std::sqrt(2.0 + eps);
    fexp(1, 1) = std::sqrt(1.0 + eps);
    gexp(0, 0) = 2.0 / fexp(0, 0);
    gexp(1, 1) = 1.0 / fexp(1, 1);
    for (std::size_t k = 0; k < 16; ++k) {
      EXPECT_LT((r.factor_F.samples[k].cwiseAbs() - fexp.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT((r.factor_G.samples[k] * r.factor_F.samples[k] - d).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_LT(r.product_residual, 1e-10);
    EXPECT_LT(r.decomposition.reconstruction_error(f), 1e-10);
    EXPECT_GE(r.ratio, 1.0 - 1e-6);
  }
}

TEST(MatrixValuedSplit, ScalarCaseMatchesOuterFunction) {
  // n = 1, f = z (1 + z/2)^2: |f| + eps = |a + b z|^2 with a b = 1/2 and
  // a^2 + b^2 = 5/4 + eps, so F = a + b z up to a unimodular constant.
  const double eps = 1e-6;
  const auto f1 = MatrixFunction::sample_z(16, [](cplx z) {
    MatrixOperator m(1, 1);
    m(0, 0) = (1.0 + 0.5 * z) * (1.0 + 0.5 * z) * z;
    return m;
  });
  const auto r = matrix_valued_split(f1, 1.0, 1.0, kInf, kInf, 0.5, eps);
  const double s = 1.25 + eps;
  const double a = std::sqrt(0.5 * (s + std::sqrt(s * s - 1.0))), b = 0.5 / a;
  const auto o = CircleFunction::sample_z(16, [a, b](cplx z) { return a + b * z; });
  const cplx c0 = r.factor_F.samples[0](0, 0) / o[0];
  EXPECT_NEAR(std::abs(c0), 1.0, 1e-8);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_LT(std::abs(r.factor_F.samples[k](0, 0) / o[k] - c0), 1e-8);
  EXPECT_LT(r.decomposition.reconstruction_error(f1), 1e-10);
  EXPECT_LT(r.decomposition.membership_residual, 1e-6);
}

TEST(MatrixValuedSplit, RandomTwoByTwoCertificate) {
  // |f| is not a trigonometric polynomial, so the factorization residual is a
  // grid effect that shrinks with N
  const auto f = random_matrix_poly(32, 2, 2, 33);
  for (double t : {0.1, 1.0}) {
    const auto r = matrix_valued_split(f, 1.0, 1.0, kInf, kInf, t, 1e-6);
    EXPECT_LT(r.decomposition.reconstruction_error(f), 1e-10);
    EXPECT_LT(r.decomposition.membership_residual, 1e-6);
    EXPECT_TRUE(r.factor_converged);
    EXPECT_LT(r.factor_residual, 1e-4);
    EXPECT_GE(r.ratio, 1.0 - 1e-6);
    EXPECT_TRUE(std::isfinite(r.ratio));
    EXPECT_TRUE(std::isfinite(r.delta));
    EXPECT_LE(r.ambient_gap, 1e-6 * std::max(1.0, r.ambient_K));
  }
}

TEST(MatrixValuedSplit, Preconditions) {
  const auto f = random_matrix_poly(16, 2, 1, 5);
  EXPECT_THROW(matrix_valued_split(f, 1.0, 2.0, kInf, kInf, 1.0), std::invalid_argument);
  EXPECT_THROW(matrix_valued_split(f, 1.0, 1.0, kInf, kInf, 0.0), std::invalid_argument);
  const auto big = random_matrix_poly(64, 2, 1, 5);
  EXPECT_THROW(matrix_valued_split(big, 1.0, 1.0, kInf, kInf, 1.0), std::invalid_argument);
  const auto zero = MatrixFunction::constant(16, MatrixOperator::Zero(2, 2));
  EXPECT_EQ(matrix_valued_split(zero, 1.0, 1.0, kInf, kInf, 1.0).decomposition.cost, 0.0);
}
