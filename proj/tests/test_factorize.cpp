#include <gtest/gtest.h>

#include <random>

#include "kclosed/factorize.hpp"
#include "oracles.hpp"

using namespace kclosed;

namespace {

CircleFunction z_power(std::size_t n, int k) {
  return CircleFunction::sample_z(n, [k](cplx z) { return std::pow(z, k); });
}

// exp of a random real trigonometric polynomial of the given degree.
CircleFunction smooth_weight(std::size_t n, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> a(static_cast<std::size_t>(degree) + 1), b(a.size());
  for (int j = 1; j <= degree; ++j) {
    a[static_cast<std::size_t>(j)] = nd(rng) / j;
    b[static_cast<std::size_t>(j)] = nd(rng) / j;
  }
  return CircleFunction::sample(n, [&](double th) {
    double acc = 0.0;
    for (int j = 1; j <= degree; ++j)
      acc += a[static_cast<std::size_t>(j)] * std::cos(j * th) + b[static_cast<std::size_t>(j)] * std::sin(j * th);
    return cplx(std::exp(acc), 0.0);
  });
}

CircleFunction random_analytic_poly(std::size_t n, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto c = oracle::random_complex(static_cast<std::size_t>(degree) + 1, rng);
  return CircleFunction::sample_z(n, [&](cplx z) {
    cplx acc = 0.0;
    for (int j = degree; j >= 0; --j) acc = acc * z + c[static_cast<std::size_t>(j)] / double(j + 1);
    return acc;
  });
}

double sup_diff(const CircleFunction& a, const CircleFunction& b) { return (a - b).sup_modulus(); }

}  // namespace

TEST(OuterFunction, ConstantWeight) {
  const auto o = outer_function(CircleFunction::constant(16, 1.0));
  EXPECT_LT(sup_diff(o.boundary, CircleFunction::constant(16, 1.0)), 1e-14);
  EXPECT_NEAR(o.value_at_zero(), 1.0, 1e-14);
}

TEST(OuterFunction, ModulusOfLinearFactors) {
  const std::size_t n = 256;
  const auto w1 = CircleFunction::sample_z(n, [](cplx z) { return cplx(std::abs(1.0 + 0.5 * z)); });
  const auto o1 = outer_function(w1);
  EXPECT_LT(sup_diff(o1.boundary, CircleFunction::sample_z(n, [](cplx z) { return 1.0 + 0.5 * z; })), 1e-6);
  const auto w2 = CircleFunction::sample_z(n, [](cplx z) { return cplx(std::abs(z - 0.5)); });
  const auto o2 = outer_function(w2);
  EXPECT_LT(sup_diff(o2.boundary, CircleFunction::sample_z(n, [](cplx z) { return 1.0 - 0.5 * z; })), 1e-6);
}

TEST(OuterFunction, InvariantsOnSmoothWeights) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto w = smooth_weight(256, 8, 10 + s);
    const auto o = outer_function(w);
    for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(std::abs(o.boundary[k]) / w[k].real(), 1.0, 1e-6);
    EXPECT_LT(o.log_boundary.negative_coeff_max(), 1e-6);
    EXPECT_GT(o.value_at_zero(), 0.0);
    // independent check of |O| = exp(log w) through the direct DFT of log O
    const auto c = oracle::naive_dft(o.log_boundary.sample_vector());
    for (std::size_t j = 1; j < 128; ++j) EXPECT_LT(std::abs(c[j]), 1e-6);
  }
}

TEST(OuterFunction, Multiplicative) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto w1 = smooth_weight(256, 6, 100 + s), w2 = smooth_weight(256, 6, 200 + s);
    const auto prod = outer_function(w1 * w2).boundary;
    const auto split = outer_function(w1).boundary * outer_function(w2).boundary;
    EXPECT_LT(sup_diff(prod, split) / prod.sup_modulus(), 1e-6);
  }
}

TEST(OuterFunction, RejectsNonPositiveWeights) {
  auto w = CircleFunction::constant(16, 1.0).sample_vector();
  w[3] = 0.0;
  EXPECT_THROW(outer_function(CircleFunction(w)), numerical_error);
  w[3] = cplx(1.0, 1.0);
  EXPECT_THROW(outer_function(CircleFunction(w)), std::invalid_argument);
}

TEST(Blaschke, Examples) {
  const BlaschkeProduct rot({}, std::polar(1.0, 0.3));
  EXPECT_LT(sup_diff(blaschke_eval(rot, 16), CircleFunction::constant(16, std::polar(1.0, 0.3))), 1e-15);
  const BlaschkeProduct z({cplx(0.0)}, 1.0);
  EXPECT_LT(sup_diff(blaschke_eval(z, 16), z_power(16, 1)), 1e-15);
  EXPECT_THROW(BlaschkeProduct({cplx(1.0)}, 1.0), std::invalid_argument);
  EXPECT_THROW(BlaschkeProduct({}, 2.0), std::invalid_argument);
}

TEST(Blaschke, UnimodularOnCircleAndVanishesAtZeros) {
  const BlaschkeProduct b({cplx(0.3, 0.4), cplx(-0.5, 0.1), cplx(0.0, -0.9)}, cplx(0.0, 1.0));
  const auto samples = blaschke_eval(b, 64);
  for (const auto& v : samples.samples()) EXPECT_NEAR(std::abs(v), 1.0, 1e-13);
  for (const auto& a : b.zeros) EXPECT_LT(std::abs(b(a)), 1e-15);
  const BlaschkeProduct half({cplx(0.5)}, 1.0);
  EXPECT_LT(std::abs(half(0.5)), 1e-15);
  const auto half_samples = blaschke_eval(half, 16);
  for (const auto& v : half_samples.sample_vector()) EXPECT_NEAR(std::abs(v), 1.0, 1e-8);
}

TEST(SqrtFactor, Examples) {
  const auto r1 = sqrt_factor(CircleFunction::constant(16, 4.0));
  EXPECT_LT(sup_diff(blaschke_eval(r1.inner, 16), CircleFunction::constant(16, 1.0)), 1e-12);
  EXPECT_LT(sup_diff(r1.outer.boundary, CircleFunction::constant(16, 2.0)), 1e-12);

  const std::size_t n = 64;
  const auto f = CircleFunction::sample_z(n, [](cplx z) { return z * (1.0 - 0.5 * z) * (1.0 - 0.5 * z); });
  const auto r2 = sqrt_factor(f);
  EXPECT_LT(sup_diff(blaschke_eval(r2.inner, n), z_power(n, 1)), 1e-6);
  EXPECT_LT(sup_diff(r2.outer.boundary, CircleFunction::sample_z(n, [](cplx z) { return 1.0 - 0.5 * z; })), 1e-6);
  EXPECT_LT(r2.tol_factor, 1e-6);

  const auto r3 = sqrt_factor(z_power(16, 2));
  EXPECT_LT(sup_diff(blaschke_eval(r3.inner, 16), z_power(16, 2)), 1e-12);
  EXPECT_LT(sup_diff(r3.outer.boundary, CircleFunction::constant(16, 1.0)), 1e-12);
}

TEST(SqrtFactor, RandomPolynomials) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = random_analytic_poly(32, 8, 300 + s);
    const auto r = sqrt_factor(f);
    EXPECT_LT(r.tol_factor, 1e-8);
    const auto F = r.outer.boundary;
    for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(std::norm(F[k]), std::abs(f[k]), 1e-8 * f.sup_modulus());
    // F is zero-free in the disc: its winding number around 0 on the circle vanishes
    double wind = 0.0;
    for (std::size_t k = 0; k < 32; ++k) wind += std::arg(F[(k + 1) % 32] / F[k]);
    EXPECT_NEAR(wind, 0.0, 1e-9);
  }
}

TEST(SqrtFactor, RejectsNonAnalytic) {
  const auto f = CircleFunction::sample(16, [](double th) { return std::polar(1.0, -th); });
  EXPECT_THROW(sqrt_factor(f), std::invalid_argument);
  EXPECT_THROW(sqrt_factor(CircleFunction::constant(16, 0.0)), std::invalid_argument);
}

TEST(HolderFactor, ConstantFunction) {
  const auto r = holder_factor(CircleFunction::constant(16, 1.0), 2.0, 4.0, 4.0);
  EXPECT_LT(sup_diff(r.g, CircleFunction::constant(16, 1.0)), 1e-12);
  EXPECT_LT(sup_diff(r.h, CircleFunction::constant(16, 1.0)), 1e-12);
}

TEST(HolderFactor, DoubleZeroGoesToInnerFactor) {
  // g carries the whole Blaschke factor: g = z^2, h = 1. The product and the
  // norm identity |g|_2 |h|_2 = |f|_1 hold as for any admissible split.
  const auto f = z_power(16, 2);
  const auto r = holder_factor(f, 1.0, 2.0, 2.0);
  EXPECT_LT(sup_diff(r.g * r.h, f), 1e-12);
  EXPECT_LT(sup_diff(r.g, f), 1e-12);
  EXPECT_LT(sup_diff(r.h, CircleFunction::constant(16, 1.0)), 1e-12);
  EXPECT_NEAR(lp_norm(r.g, 2.0) * lp_norm(r.h, 2.0), lp_norm(f, 1.0), 1e-12);
}

TEST(HolderFactor, NormIdentityOnRandomPolynomials) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = random_analytic_poly(64, 8, 400 + s);
    for (auto [p, r, q] : {std::tuple{2.0, 4.0, 4.0}, std::tuple{1.0, 2.0, 2.0}, std::tuple{1.0, 3.0, 1.5},
                           std::tuple{2.0, kInf, 2.0}}) {
      const auto h = holder_factor(f, p, r, q);
      EXPECT_LT(h.tol_factor, 1e-8);
      EXPECT_NEAR(lp_norm(h.g, r) * lp_norm(h.h, q), lp_norm(f, p), 1e-6 * lp_norm(f, p));
    }
  }
}

TEST(HolderFactor, RejectsBadExponents) {
  const auto f = CircleFunction::constant(16, 1.0);
  EXPECT_THROW(holder_factor(f, 2.0, 3.0, 3.0), std::invalid_argument);
  EXPECT_THROW(holder_factor(f, 0.5, 1.0, 1.0), std::invalid_argument);
}
