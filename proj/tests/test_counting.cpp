#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <orbitstat/counting.hpp>

#include "oracles.hpp"

using namespace orbitstat;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const Lattice> share(Lattice L) { return std::make_shared<const Lattice>(std::move(L)); }

}  // namespace

TEST(Discrepancy, SmallRadiusValue) {
  auto Z = share(build_sl2z());
  DiscreteOrbit o(Z);
  auto r = discrepancy_experiment(*Z, o, BorelShape::disk(), {1, 0, 0, 1}, {2.0});
  ASSERT_EQ(r.counts.size(), 1u);
  EXPECT_EQ(r.counts[0], 8);
  EXPECT_NEAR(r.discrepancies[0], 8 - 24 / pi, 1e-12);
  EXPECT_NEAR(r.discrepancies[0], 0.36, 0.005);
  EXPECT_DOUBLE_EQ(r.target_exponent, 2 - 2.0 / 3);
}

TEST(Discrepancy, PlumbingMatchesCount) {
  for (auto L : {share(build_sl2z()), share(build_hecke(5)), share(build_congruence(3))}) {
    DiscreteOrbit o(L);
    const auto radii = geometric_radii(3, 300, 25);
    auto r = discrepancy_experiment(*L, o, BorelShape::disk(), {1, 0, 0, 1}, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      EXPECT_EQ(r.counts[i], o.count(radii[i])) << L->name();
      EXPECT_DOUBLE_EQ(r.discrepancies[i], double(r.counts[i]) - c_gamma(*L) * pi * radii[i] * radii[i]);
    }
  }
}

TEST(Discrepancy, RotationInvariantForTheDisk) {
  auto Z = share(build_sl2z());
  DiscreteOrbit o(Z);
  // radii chosen away from circles through primitive points
  std::vector<double> radii;
  for (int k = 1; k <= 30; ++k) radii.push_back(std::sqrt(7.0 * k * k + 0.5));
  auto a = discrepancy_experiment(*Z, o, BorelShape::disk(), {1, 0, 0, 1}, radii);
  auto b = discrepancy_experiment(*Z, o, BorelShape::disk(), rotation(0.77), radii);
  EXPECT_EQ(a.counts, b.counts);
  for (std::size_t i = 0; i < radii.size(); ++i) EXPECT_NEAR(a.discrepancies[i], b.discrepancies[i], 1e-9 * radii[i] * radii[i]);
}

TEST(Discrepancy, FitIsUndefinedWhenEverythingIsZero) {
  auto f = fit_loglog({1, 2, 3}, {0, 0, 0});
  EXPECT_FALSE(f.defined);
  EXPECT_EQ(f.points, 0u);
  EXPECT_TRUE(std::isnan(f.slope));
  auto g = fit_loglog({1, 2, 4, 8}, {3, 12, 48, 192});
  EXPECT_TRUE(g.defined);
  EXPECT_NEAR(g.slope, 2, 1e-12);
  EXPECT_NEAR(std::exp(g.intercept), 3, 1e-12);
  EXPECT_NEAR(g.residual, 0, 1e-12);
}

TEST(Discrepancy, ExponentEnvelope) {
  auto Z = share(build_sl2z());
  DiscreteOrbit o(Z);
  auto r = discrepancy_experiment(*Z, o, BorelShape::disk(), {1, 0, 0, 1}, geometric_radii(200, 2000, 400));
  ASSERT_TRUE(r.fit.defined);
  EXPECT_LE(r.fitted_exponent(), 2 - 2.0 / 3 + 0.2) << "residual " << r.fit.residual;
  EXPECT_EQ(r.fit_from, 200u);
  EXPECT_EQ(r.fit.points + r.zero_excluded + r.sign_excluded, 200u);
}

TEST(Discrepancy, OtherShapesUseTheirArea) {
  auto Z = share(build_sl2z());
  DiscreteOrbit o(Z);
  const Mat2d A = diag(2, 0.5);
  auto r = discrepancy_experiment(*Z, o, BorelShape::square(), A, {10.0, 40.0});
  auto scan = oracle::primitive_scan(80, [](std::int64_t m, std::int64_t n) {
    return std::fabs(2.0 * m) <= 40 && std::fabs(0.5 * n) <= 40;
  });
  EXPECT_EQ(r.counts[1], static_cast<std::int64_t>(scan.size()));
  EXPECT_DOUBLE_EQ(r.main_terms[1], 6 / (pi * pi) * 4 * 1600);
  EXPECT_THROW(discrepancy_experiment(*Z, o, BorelShape::annulus(0.5), A, {10.0}), std::invalid_argument);
  EXPECT_THROW(discrepancy_experiment(*Z, o, BorelShape::disk(), A, {10.0, 5.0}), std::invalid_argument);
  EXPECT_THROW(discrepancy_experiment(*Z, o, BorelShape::disk(), {1, 2, 2, 4}, {10.0}), std::invalid_argument);
}

TEST(SecondMomentDiscrepancy, NonnegativeAndBounded) {
  auto Z = share(build_sl2z());
  DiscreteOrbit o(Z);
  CheckOptions opt;
  opt.n = 20000;
  auto r = second_moment_discrepancy_check(*Z, o, {1e2, 1e3, 1e4}, opt);
  std::map<std::string, double> br(r.breakdown.begin(), r.breakdown.end());
  for (const char* k : {"estimate@100", "estimate@1000", "estimate@10000"}) EXPECT_GE(br[k], 0) << k;
  EXPECT_TRUE(r.pass) << "max/min ratio " << r.estimate;
  EXPECT_LT(r.estimate, 10);
  EXPECT_THROW(second_moment_discrepancy(*Z, o, 0.5, opt), std::invalid_argument);
  EXPECT_THROW(second_moment_discrepancy_check(*Z, o, {1e2}, opt), std::invalid_argument);
}

TEST(Mobius, ConstantForLevelOne) {
  EXPECT_NEAR(congruence_main_constant(1), 6 / (pi * pi), 1e-12);
  EXPECT_NEAR(static_cast<double>(mobius_sum(1, 1000).value), 6 / (pi * pi), 2e-3);
  // sum over d <= 10 of mu(d)/d^2
  const double want = 1 - 0.25 - 1.0 / 9 - 1.0 / 25 + 1.0 / 36 - 1.0 / 49 + 1.0 / 100;
  EXPECT_NEAR(static_cast<double>(mobius_sum(1, 10).value), want, 1e-15);
  EXPECT_NEAR(static_cast<double>(mobius_sum(3, 10).value), 1 - 0.25 - 1.0 / 25 - 1.0 / 49 + 1.0 / 100, 1e-15);
}

TEST(Mobius, ConstantsMatchCGamma) {
  // two routes: the sieve and 2 / (pi V) or 1 / (pi V) from the covolume
  for (int N : {2, 3, 4, 5}) {
    const Lattice L = build_congruence(N);
    EXPECT_NEAR(congruence_main_constant(N), c_gamma(L), 1e-12) << N;
  }
  EXPECT_NEAR(congruence_main_constant(2), 1 / (pi * pi), 1e-12);
}

TEST(CongruenceCount, LevelOneMatchesGcdScan) {
  auto c = congruence_count(1, 0, 200);
  EXPECT_EQ(c.exact_count, oracle::primitive_in_disk(200));
  EXPECT_NEAR(c.main_term, 6 / (pi * pi) * pi * 40000, 1e-6);
  EXPECT_LT(std::fabs(c.error()), 3 * 200);
}

TEST(CongruenceCount, LevelTwo) {
  for (std::size_t cusp = 0; cusp < 3; ++cusp) {
    auto c = congruence_count(2, cusp, 500);
    EXPECT_NEAR(c.constant, 1 / (pi * pi), 1e-12);
    EXPECT_LT(std::fabs(c.error()), 3 * 500) << cusp;
  }
}

TEST(CongruenceCount, BelowShortestVectorIsEmpty) {
  // shortest vector of the scaled orbit at the cusp infinity of Gamma(3) is sqrt(3) (1, 0)
  EXPECT_EQ(congruence_count(3, 0, 1.7).exact_count, 0);
  EXPECT_EQ(congruence_count(3, 0, 1.74).exact_count, 1);
  EXPECT_EQ(congruence_count(2, 0, 0).exact_count, 0);
}

TEST(CongruenceCount, MonotoneAndAgreesWithOrbit) {
  for (int N : {2, 3, 4, 5}) {
    auto L = share(build_congruence(N));
    for (std::size_t cusp = 0; cusp < L->cusps.size(); ++cusp) {
      DiscreteOrbit o(L, cusp);
      std::int64_t prev = 0;
      for (double R = 1; R <= 120; R *= 1.37) {
        const auto c = congruence_count(N, cusp, R);
        EXPECT_GE(c.exact_count, prev);
        prev = c.exact_count;
        EXPECT_EQ(c.exact_count, o.count(R)) << "N=" << N << " cusp " << cusp << " R=" << R;
        EXPECT_EQ(c.exact_count, static_cast<std::int64_t>(o.enumerate_ball(R).size()));
      }
    }
  }
}

TEST(CongruenceCount, Errors) {
  EXPECT_THROW(congruence_count(0, 0, 10), std::invalid_argument);
  EXPECT_THROW(congruence_count(13, 0, 10), std::invalid_argument);
  EXPECT_THROW(congruence_count(2, 7, 10), std::invalid_argument);
  EXPECT_THROW(congruence_count(2, 0, -1), std::invalid_argument);
}
