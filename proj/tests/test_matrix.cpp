#include <gtest/gtest.h>

#include <random>

#include "kclosed/matrix.hpp"
#include "oracles.hpp"

using namespace kclosed;

TEST(SchattenNorm, Examples) {
  EXPECT_NEAR(schatten_norm(MatrixOperator::Identity(3, 3), 1.0), 3.0, 1e-14);
  MatrixOperator d = MatrixOperator::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  EXPECT_NEAR(schatten_norm(d, kInf), 3.0, 1e-14);
  EXPECT_NEAR(schatten_norm(d, 2.0), std::sqrt(10.0), 1e-14);
  EXPECT_THROW(schatten_norm(d, 0.5), std::invalid_argument);
}

TEST(SchattenNorm, MatchesEigenvalueOracleAndAdjoint) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixOperator x = oracle::random_matrix(6, rng);
    for (double p : {1.0, 1.5, 2.0, 4.0, kInf}) {
      const double v = schatten_norm(x, p);
      EXPECT_NEAR(v, schatten_norm(x.adjoint(), p), 1e-10 * v);
      EXPECT_NEAR(v, oracle::schatten_eig(x, p), 1e-10 * v);
    }
    const auto s = singular_values(x);
    for (Eigen::Index i = 1; i < s.values.size(); ++i) EXPECT_GE(s.values[i - 1], s.values[i]);
    EXPECT_NEAR(schatten_norm(x, 2.0), x.norm(), 1e-10 * x.norm());
  }
}

TEST(TriangularPart, ExamplesAndOrthogonality) {
  MatrixOperator e21 = MatrixOperator::Zero(2, 2);
  e21(1, 0) = 1.0;
  EXPECT_EQ(triangular_part(e21).cwiseAbs().maxCoeff(), 0.0);
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixOperator x = oracle::random_matrix(5, rng), y = oracle::random_matrix(5, rng);
    const MatrixOperator px = triangular_part(x);
    EXPECT_EQ((triangular_part(px) - px).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(std::abs(trace_inner(x - px, triangular_part(y))), 1e-10);
    EXPECT_LT(triangularity_residual(px), 1e-15);
    EXPECT_GT(triangularity_residual(x), 0.0);
  }
}

TEST(PsdPower, SingularValuePowerIdentity) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixOperator x = oracle::random_matrix(5, rng);
    const auto s = oracle::singular_values_eig(x);
    const MatrixOperator ax = abs_operator(x);
    EXPECT_LT((ax * ax - x.adjoint() * x).cwiseAbs().maxCoeff(), 1e-10 * s[0] * s[0]);
    for (double alpha : {0.5, 2.0}) {
      const auto sa = singular_values(psd_power(ax, alpha));
      for (std::size_t k = 0; k < s.size(); ++k)
        EXPECT_NEAR(sa.values[static_cast<Eigen::Index>(k)], std::pow(s[k], alpha), 1e-8 * std::pow(s[0], alpha));
    }
  }
}

TEST(DiagonalProjection, NormDoesNotIncrease) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixOperator x = oracle::random_matrix(4, rng);
    const MatrixOperator d = x.diagonal().asDiagonal();
    for (double p : {1.0, 2.0, kInf}) EXPECT_LE(schatten_norm(d, p), schatten_norm(x, p) + 1e-10);
  }
}

TEST(MatrixJson, RoundTripAndErrors) {
  std::mt19937_64 rng(5);
  const MatrixOperator x = oracle::random_matrix(3, rng);
  const auto j = matrix_to_json(x);
  EXPECT_EQ(j.at("n").get<int>(), 3);
  EXPECT_EQ((matrix_from_json(j) - x).cwiseAbs().maxCoeff(), 0.0);
  const auto real_only = matrix_from_json(nlohmann::json::parse(R"({"n":2,"re":[[1,2],[0,3]]})"));
  EXPECT_EQ(real_only(0, 1), cplx(2.0));
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"n":2,"re":[[1,2]]})")), std::invalid_argument);
}
