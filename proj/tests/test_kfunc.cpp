#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kclosed/kfunc.hpp"
#include "oracles.hpp"

using namespace kclosed;

namespace {

CircleFunction random_function(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return CircleFunction(oracle::random_complex(n, rng));
}

CircleFunction two_level(std::size_t n) {
  return CircleFunction::sample(n, [](double th) { return th < std::numbers::pi - 1e-12 ? 3.0 : 1.0; });
}

CircleFunction z_function(std::size_t n) {
  return CircleFunction::sample(n, [](double th) { return std::polar(1.0, th); });
}

}  // namespace

TEST(CoupleId, ParsingAndAmbient) {
  EXPECT_TRUE(std::isinf(parse_exponent("Linf")));
  EXPECT_EQ(parse_exponent("H2.5"), 2.5);
  EXPECT_THROW(parse_exponent("0.5"), std::invalid_argument);
  EXPECT_THROW(CoupleId::hardy(0.5, 2.0), std::invalid_argument);
  EXPECT_EQ(CoupleId::hardy(1.0, 2.0).ambient().kind, CoupleKind::lebesgue);
  EXPECT_EQ(CoupleId::triangular(1.0, kInf).ambient().kind, CoupleKind::schatten);
  EXPECT_EQ(CoupleId::hardy(1.0, kInf).name(), "hardy(1,inf)");
}

TEST(KtClosedForm, SequenceExamples) {
  const std::vector<double> l{3.0, 1.0};
  EXPECT_DOUBLE_EQ(kt_closed_form(l, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(kt_closed_form(l, 2.0), 4.0);
  EXPECT_DOUBLE_EQ(kt_closed_form(l, 1.5), 3.5);
  EXPECT_DOUBLE_EQ(kt_closed_form(l, 7.0), 4.0);
  const Sequence x = (Eigen::VectorXcd(2) << 3.0, 1.0).finished();
  const auto r = kt_bruteforce(x, CoupleId::sequence(1.0, kInf), 1.5);
  EXPECT_NEAR(r.value, 3.5, 1e-6);
}

TEST(KtClosedForm, MatchesLevelOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> l(6);
    for (auto& v : l) v = u(rng);
    std::vector<double> sorted = l;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (double t : {0.3, 1.0, 2.5, 4.0, 8.0})
      EXPECT_NEAR(kt_closed_form(sorted, t), oracle::kt_by_levels(l, 1.0, t), 1e-12);
  }
}

TEST(KtBruteforce, Examples) {
  const Sequence zero = Sequence::Zero(3);
  EXPECT_NEAR(kt_bruteforce(zero, CoupleId::sequence(1.0, kInf), 1.0).value, 0.0, 1e-12);
  const Sequence two = Sequence::Constant(1, 2.0);
  EXPECT_NEAR(kt_bruteforce(two, CoupleId::sequence(1.0, kInf), 0.5).value, 1.0, 1e-6);
  const auto one = CircleFunction::constant(16, 1.0);
  EXPECT_NEAR(kt_bruteforce(one, CoupleId::lebesgue(1.0, kInf), 0.5).value, 0.5, 1e-6);
  EXPECT_THROW(kt_bruteforce(one, CoupleId::schatten(1.0, kInf), 0.5), std::invalid_argument);
}

TEST(KtBruteforce, AgreesWithRearrangementFormula) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto f = random_function(32, 20 + s);
    for (double t : {0.05, 0.3, 0.8}) {
      const auto r = kt_bruteforce(f, CoupleId::lebesgue(1.0, kInf), t);
      EXPECT_NEAR(r.value, kt_L1_Linf(f, t), 1e-6);
      EXPECT_LE(r.lower_bound, r.value + 1e-9);
      EXPECT_LT(r.decomposition.reconstruction_error(f), 1e-8);
      EXPECT_NEAR(r.decomposition.cost, r.decomposition.norm0 + t * r.decomposition.norm1, 1e-10);
    }
  }
}

TEST(KtBruteforce, SubspaceDominatesAmbient) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto f = riesz_project(random_function(16, 40 + s));
    for (auto [p0, p1] : {std::pair{1.0, kInf}, std::pair{1.0, 2.0}}) {
      for (double t : {0.1, 0.5}) {
        const auto sub = kt_bruteforce(f, CoupleId::hardy(p0, p1), t);
        const auto amb = kt_bruteforce(f, CoupleId::lebesgue(p0, p1), t);
        EXPECT_GE(sub.value, amb.lower_bound - 1e-9);
        EXPECT_LT(sub.decomposition.membership_residual, 1e-6);
      }
    }
  }
}

TEST(KtBruteforce, MonotoneConcaveAndBelowJ) {
  const auto f = random_function(16, 3);
  const auto couple = CoupleId::lebesgue(1.0, 2.0);
  const std::vector<double> ts{0.1, 0.2, 0.4, 0.8, 1.6};
  std::vector<double> k;
  for (double t : ts) k.push_back(kt_bruteforce(f, couple, t).value);
  for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_GE(k[i], k[i - 1] - 1e-7);
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    const double w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
    EXPECT_GE(k[i], (1.0 - w) * k[i - 1] + w * k[i + 1] - 1e-6);
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double bound = std::min(lp_norm(f, 1.0), ts[i] * lp_norm(f, 2.0));
    EXPECT_LE(k[i], bound + 1e-7);
    EXPECT_LE(bound, jt(f, couple, ts[i]) + 1e-12);
  }
}

TEST(Jt, Examples) {
  const auto one = CircleFunction::constant(16, 1.0);
  EXPECT_DOUBLE_EQ(jt(one, CoupleId::lebesgue(1.0, kInf), 2.0), 2.0);
  EXPECT_DOUBLE_EQ(jt(one, CoupleId::lebesgue(1.0, kInf), 0.5), 1.0);
}

TEST(RealInterpNorm, Examples) {
  const auto grid = log_grid(1e-3, 1e3, 20);
  const auto couple = CoupleId::lebesgue(1.0, kInf);
  const auto one = real_interp_norm(CircleFunction::constant(16, 1.0), couple, 0.5, kInf, grid);
  EXPECT_NEAR(one.value, 1.0, 1e-12);
  EXPECT_NEAR(real_interp_norm(CircleFunction::constant(16, 0.0), couple, 0.5, kInf, grid).value, 0.0, 1e-15);
  const auto f = two_level(16);
  const double weak = weak_lp_quasinorm(f, 2.0);
  EXPECT_NEAR(real_interp_norm(f, couple, 0.5, kInf, grid).value, weak, 0.05 * weak);
  const auto fin = real_interp_norm(f, couple, 0.5, 2.0, grid);
  EXPECT_GT(fin.value, 0.0);
  EXPECT_GE(fin.tail_bound, 0.0);
  EXPECT_THROW(real_interp_norm(f, couple, 1.0, 2.0, grid), std::invalid_argument);
}

TEST(LogGrid, EndpointsAndDensity) {
  const auto g = log_grid(1e-3, 1e3, 20);
  EXPECT_EQ(g.size(), 121u);
  EXPECT_NEAR(g.front(), 1e-3, 1e-15);
  EXPECT_NEAR(g.back(), 1e3, 1e-9);
}

TEST(OptimalLevel, FindsMinimumOfConvexCost) {
  for (double target : {1e-6, 0.3, 2.0, 9.9}) {
    const double l = optimal_level(10.0, [target](double x) { return std::abs(std::log(x + 1e-300) - std::log(target)); });
    EXPECT_NEAR(l, target, 1e-6 * target);
  }
  EXPECT_EQ(optimal_level(10.0, [](double x) { return x; }), 0.0);
}

TEST(KClosednessReport, OracleDecomposerOnZ) {
  const auto z = z_function(16);
  const auto couple = CoupleId::hardy(1.0, kInf);
  const auto grid = log_grid(0.1, 10.0, 2);
  const auto rep = k_closedness_report(
      z, couple, [&](const CircleFunction& f, double t) { return kt_bruteforce(f, couple, t).decomposition; }, grid, "z");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(rep.ambient_K[i], std::min(grid[i], 1.0), 1e-12);
    EXPECT_GE(rep.ratio[i], 1.0 - 1e-6);
    EXPECT_LE(rep.achieved_cost[i], rep.c_estimate * std::min(grid[i], 1.0) + 1e-12);
  }
  std::ostringstream os;
  rep.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "instance_id,t,ambient_K,achieved_cost,ratio,gap,residual");
}

TEST(KClosednessReport, ZeroInputHasUnitRatios) {
  const auto zero = CircleFunction::constant(16, 0.0);
  const auto rep = k_closedness_report(
      zero, CoupleId::hardy(1.0, kInf),
      [](const CircleFunction&, double) -> CoupleDecomposition<CircleFunction> { throw std::logic_error("unused"); },
      log_grid(0.1, 10.0, 1));
  for (double r : rep.ratio) EXPECT_EQ(r, 1.0);
  for (double k : rep.ambient_K) EXPECT_EQ(k, 0.0);
}
