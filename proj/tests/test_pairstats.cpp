#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <orbitstat/correlation.hpp>
#include <orbitstat/pair_table.hpp>
#include <orbitstat/pairstats.hpp>
#include <orbitstat/shapes.hpp>

#include "oracles.hpp"

using namespace orbitstat;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const Lattice> share(Lattice L) { return std::make_shared<const Lattice>(std::move(L)); }

HolonomySet single(std::shared_ptr<const Lattice> L, std::size_t cusp = 0, double scale = 1) {
  return HolonomySet({{scale, std::make_shared<const DiscreteOrbit>(std::move(L), cusp)}});
}

}  // namespace

TEST(PairTable, Sl2zIsEulerTotient) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 10);
  const std::int64_t want[] = {1, 1, 2, 2, 4, 2, 6, 4, 6, 4};
  ASSERT_EQ(t.size(), 10u);
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(t.phi(n), want[n - 1]) << n;
  EXPECT_TRUE(t.is_homothetic_pair);
  EXPECT_TRUE(t.zero_admissible());

  auto big = build_pair_table(share(build_sl2z()), 0, 0, 1000);
  const auto phi = oracle::totients(1000);
  for (int n = 1; n <= 1000; ++n) EXPECT_EQ(big.phi(n), phi[static_cast<std::size_t>(n)]);
}

TEST(PairTable, HeckeMatchesBoxScan) {
  auto L = share(build_hecke(5));
  const double C = 20;
  auto t = build_pair_table(L, 0, 0, C);
  auto oracle_map = oracle::box_count(L, 0, 0, C);
  ASSERT_EQ(t.size(), oracle_map.size());
  std::size_t i = 0;
  for (const auto& [key, m] : oracle_map) {
    EXPECT_NEAR(t.values[i], key * 1e-8, 1e-7);
    EXPECT_EQ(t.multiplicity[i], m) << "c=" << t.values[i];
    EXPECT_GE(t.multiplicity[i], 1);
    ++i;
  }
  // the smallest determinant is the cusp width, reached once
  EXPECT_EQ(t.multiplicity[0], 1);
  EXPECT_NEAR(t.values[0], L->cusps[0].width.embed(), 1e-12);
  EXPECT_EQ(t.keys[0], L->cusps[0].width);
}

TEST(PairTable, CongruenceCuspPairsMatchBoxScan) {
  auto L = share(build_congruence(2));
  for (std::size_t a = 0; a < L->cusps.size(); ++a)
    for (std::size_t b = 0; b < L->cusps.size(); ++b) {
      auto t = build_pair_table(L, a, b, 30);
      EXPECT_EQ(t.is_homothetic_pair, a == b);
      auto oracle_map = oracle::box_count(L, a, b, 30);
      ASSERT_EQ(t.size(), oracle_map.size()) << a << "," << b;
      std::size_t i = 0;
      for (const auto& [key, m] : oracle_map) {
        EXPECT_NEAR(t.values[i], key * 1e-8, 1e-7);
        EXPECT_EQ(t.multiplicity[i++], m);
      }
    }
}

TEST(PairTable, Errors) {
  EXPECT_THROW(build_pair_table(share(build_congruence(3)), 0, 0, 10), std::invalid_argument);
  EXPECT_THROW(build_pair_table(share(build_sl2z()), 0, 0, 0), std::invalid_argument);
  EXPECT_THROW(build_pair_table(share(build_sl2z()), 0, 1, 10), std::invalid_argument);
}

TEST(PhiFunction, PlateauAtCGamma) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 1e5);
  auto v = phi_function(t, 100, 1e5);
  EXPECT_NEAR(v.value, 6 / (pi * pi), 0.01);
  EXPECT_GE(v.tail_bound, 0);
  // direct totient summation
  const auto phi = oracle::totients(100000);
  double s = 0;
  for (std::size_t c = 100; c <= 100000; ++c) s += double(phi[c]) / (double(c) * double(c) * double(c));
  EXPECT_NEAR(v.value, 100 * (s + 6 / (pi * pi) / 1e5), 1e-12);
  EXPECT_THROW(phi_function(t, 100, 2e5), std::invalid_argument);
  EXPECT_THROW(phi_function(t, 0, 1e5), std::invalid_argument);
}

TEST(PhiFunction, LinearNearZero) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 1e5);
  PhiEvaluator phi(t, 1e5);
  // below the smallest determinant Phi(t) = t sum phi(c)/c^3 = t zeta(2)/zeta(3)
  const double M = phi(0.5).value / 0.5;
  EXPECT_NEAR(M, (pi * pi / 6) / 1.2020569031595942, 1e-6);
  for (double x : {1e-6, 1e-3, 0.1, 0.9}) EXPECT_NEAR(phi(x).value, M * x, 1e-12 * M);
  for (double x : {1.0, 2.0, 5.0, 50.0}) EXPECT_LE(phi(x).value, M * x);
}

TEST(PhiFunction, TailDominatedCase) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 10.5);
  auto v = phi_function(t, 10.5, 10.5);
  EXPECT_NEAR(v.value, 6 / (pi * pi), 1e-15);
}

TEST(PartialSum, Sl2zValues) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 1e4);
  EXPECT_EQ(partial_sum(t, 1.5), 1);
  EXPECT_EQ(partial_sum(t, 1.0), 0);
  EXPECT_EQ(partial_sum(t, 0.3), 0);
  EXPECT_EQ(partial_sum(t, 11), 32);  // 1+1+2+2+4+2+6+4+6+4
  const double T = 1e4;
  EXPECT_NEAR(double(partial_sum(t, T)) / (T * T), 3 / (pi * pi), 0.01 * 3 / (pi * pi));
  EXPECT_THROW(partial_sum(t, 2e4), std::invalid_argument);
}

TEST(PartialSum, HeckeGrowsLikeHalfCGamma) {
  auto L = share(build_hecke(5));
  auto t = build_pair_table(L, 0, 0, 3000);
  const double T = 3000;
  EXPECT_NEAR(double(partial_sum(t, T)) / (T * T), c_gamma(*L) / 2, 0.02 * c_gamma(*L) / 2);
}

TEST(Friends, Sl2zIsUniformlyDiscrete) {
  auto S = single(share(build_sl2z()));
  for (double R : {5.0, 50.0, 300.0}) EXPECT_EQ(friends(S, R, 0.99), 0);
  EXPECT_EQ(friends(HolonomySet(), 10, 1), 0);
  EXPECT_THROW(friends(S, 0, 1), std::invalid_argument);
}

TEST(Friends, MatchBruteForce) {
  auto S = single(share(build_sl2z()));
  EXPECT_EQ(friends(S, 2, 1.01), oracle::friends_brute(S.points(3.01), 2, 1.01));
  EXPECT_GT(friends(S, 2, 1.01), 0);
  auto H = HolonomySet({{1.0, std::make_shared<const DiscreteOrbit>(share(build_hecke(5)))},
                        {1.3, std::make_shared<const DiscreteOrbit>(share(build_hecke(5)))}});
  for (double eta : {0.3, 0.8, 2.0}) EXPECT_EQ(friends(H, 25, eta), oracle::friends_brute(H.points(25 + eta), 25, eta)) << eta;
}

TEST(Friends, RandomCloudsMatchBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int t = 0; t < 5; ++t) {
    std::vector<Vec2d> pts(2000);
    for (auto& p : pts) p = {u(rng), u(rng)};
    for (double eta : {0.05, 0.7, 3.0}) EXPECT_EQ(count_friends(pts, 20, eta), oracle::friends_brute(pts, 20, eta));
  }
}

TEST(Friends, MonotoneInEta) {
  auto S = single(share(build_hecke(5)));
  std::int64_t prev = 0;
  for (double eta = 0.1; eta < 3; eta += 0.2) {
    const auto n = friends(S, 30, eta);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(DetPairs, MatchBruteForce) {
  auto S = single(share(build_sl2z()));
  const auto p2 = S.points(2);
  EXPECT_EQ(det_pairs(S, 2, 0.5, 1), oracle::det_pairs_brute(p2, 2, 0.5, 1));
  // only parallel pairs: x and -x, x itself
  EXPECT_EQ(det_pairs(S, 2, 0.5, 1), 16);
  // D >= R^2 leaves |y| <= |x|
  std::int64_t all = 0;
  for (const auto& x : p2)
    for (const auto& y : p2)
      if (norm(y) <= norm(x) * (1 + 1e-12)) ++all;
  EXPECT_EQ(det_pairs(S, 2, 4, 1), all);
  EXPECT_EQ(det_pairs(HolonomySet(), 5, 1, 1), 0);
  auto H = single(share(build_hecke(5)));
  for (double s : {0.5, 1.0, 2.0})
    for (double D : {0.5, 3.0, 20.0})
      EXPECT_EQ(det_pairs(H, 12, D, s), oracle::det_pairs_brute(H.points(std::max(12.0, 12 * s)), 12, D, s)) << s << " " << D;
}

TEST(DetPairs, RandomCloudsMatchBruteForce) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-15, 15);
  std::vector<Vec2d> pts(1500);
  for (auto& p : pts) p = {u(rng), u(rng)};
  for (double s : {0.3, 1.0})
    for (double D : {0.1, 5.0, 40.0}) EXPECT_EQ(count_det_pairs(pts, pts, 10, D, s), oracle::det_pairs_brute(pts, 10, D, s));
}

TEST(DetPairs, MonotoneInDAndS) {
  auto S = single(share(build_hecke(5)));
  std::int64_t prev = 0;
  for (double D = 0.5; D < 20; D *= 1.6) {
    const auto n = det_pairs(S, 20, D, 1);
    EXPECT_GE(n, prev);
    prev = n;
  }
  prev = 0;
  for (double s = 0.2; s < 3; s += 0.4) {
    const auto n = det_pairs(S, 20, 4, s);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(PairCorrelation, ReducesToFriends) {
  auto S = single(share(build_hecke(5)));
  const double cM = c_gamma(S.components()[0].orbit->lattice());
  const double R = 40, s = 1.2;
  EXPECT_DOUBLE_EQ(pair_correlation(S, R, s, cM), double(friends(S, R, s / std::sqrt(cM))) / double(S.count(R)));
  EXPECT_DOUBLE_EQ(pair_correlation(S, R, s, 4 * cM), pair_correlation(S, R, s / 2, cM));
  auto Z = single(share(build_sl2z()));
  EXPECT_EQ(pair_correlation(Z, 50, 0.5, 6 / (pi * pi)), 0.0);
  EXPECT_THROW(pair_correlation(Z, 0.5, 1, 1), std::invalid_argument);
}

TEST(LengthDensity, Cases) {
  auto S = single(share(build_sl2z()));
  EXPECT_DOUBLE_EQ(length_density(S, {{0, 100}}, 100), 1.0);
  EXPECT_DOUBLE_EQ(length_density(S, {}, 100), 0.0);
  std::vector<Interval> L;
  for (int k = 0; k < 100; ++k) L.push_back({double(k), k + 0.9});
  const double v = length_density(S, L, 100);
  EXPECT_GE(v, 0.85);
  auto pts = S.points(100);
  std::int64_t hit = 0;
  for (const auto& p : pts) {
    const double r = norm(p);
    if (r - std::floor(r) < 0.9) ++hit;
  }
  EXPECT_DOUBLE_EQ(v, double(hit) / double(pts.size()));
  EXPECT_THROW(length_density(S, {}, 0.5), std::invalid_argument);
}

TEST(CorrelationIntegral, ConstantModeGivesVolume) {
  CorrelationOptions opt;
  opt.samples = 400000;
  opt.seed = 3;
  for (const auto& f : {PairRegion::ball_ball(2), PairRegion::ball_ball(1, 3), PairRegion::ball_punctured(3, 0.5),
                        PairRegion::ball_det(3, 1, 1), PairRegion::ball_det(2, 0.2, 2.5)}) {
    auto e = correlation_integral_constant(f, 1.0, opt);
    EXPECT_NEAR(e.value, f.volume(), 5 * e.stderr + 1e-12) << f.name();
  }
}

TEST(CorrelationIntegral, DetRegionVolumeMatchesMonteCarloScan) {
  // rejection sampling over B_R x B_{sR}
  std::mt19937_64 rng(12);
  const auto f = PairRegion::ball_det(2, 0.7, 1.5);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 400000;
  int hit = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2d x{2 * u(rng), 2 * u(rng)}, y{3 * u(rng), 3 * u(rng)};
    if (f.contains(x, y)) ++hit;
  }
  const double box = 16 * 36;
  const double est = box * hit / n, se = box * std::sqrt(double(hit) / n * (1 - double(hit) / n) / n);
  EXPECT_NEAR(f.volume(), est, 5 * se);
}

TEST(CorrelationIntegral, QuadratureAgreesWithMonteCarlo) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 2000);
  PhiEvaluator phi(t, 2000);
  CorrelationOptions opt;
  opt.samples = 300000;
  const auto f = PairRegion::ball_ball(6);
  auto mc = correlation_integral(f, phi, opt);
  auto q = correlation_quadrature(f, phi);
  EXPECT_NEAR(mc.integral.value, q.integral.value, 5 * mc.integral.stderr);
  EXPECT_LT(q.integral.stderr, 1e-6 * q.integral.value);
}

TEST(CorrelationIntegral, ResidualIsLowerOrder) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 1e4);
  PhiEvaluator phi(t, 1e4);
  // the residual is o(volume): bounded by a multiple of R^(4 - delta)
  const double delta = 2.0 / 3.0;
  double first = 0;
  for (double R : {5.0, 20.0, 80.0}) {
    auto q = correlation_quadrature(PairRegion::ball_ball(R), phi);
    const double scaled = std::fabs(q.residual.value) / std::pow(R, 4 - delta);
    if (R == 5.0) first = scaled;
    EXPECT_LE(scaled, 2 * first + 1e-9) << R;
    EXPECT_LT(std::fabs(q.residual.value) / q.constant_part, 0.01) << R;
  }
}

TEST(CorrelationIntegral, DetRegionScalesWithD) {
  auto t = build_pair_table(share(build_sl2z()), 0, 0, 1e4);
  PhiEvaluator phi(t, 1e4);
  CorrelationOptions opt;
  opt.samples = 200000;
  // for D << R^2 the region volume is about 4 D s R^2 pi/... and linear in D
  const double R = 30;
  auto a = correlation_integral(PairRegion::ball_det(R, 2, 1), phi, opt);
  auto b = correlation_integral(PairRegion::ball_det(R, 4, 1), phi, opt);
  const double va = PairRegion::ball_det(R, 2, 1).volume(), vb = PairRegion::ball_det(R, 4, 1).volume();
  EXPECT_NEAR(vb / va, 2, 0.02);
  EXPECT_GT(b.integral.value, a.integral.value);
}

TEST(BorelShape, MonteCarloArea) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& s : {BorelShape::disk(), BorelShape::square(), BorelShape::sector(1.1), BorelShape::annulus(0.4),
                        BorelShape::polygon({{1, 0}, {0.3, 0.9}, {-0.8, 0.2}, {-0.4, -0.7}, {0.5, -0.6}})}) {
    const double r = s.circumradius();
    const int n = 1'000'000;
    int hit = 0;
    for (int i = 0; i < n; ++i)
      if (s.contains({r * u(rng), r * u(rng)})) ++hit;
    const double est = 4 * r * r * hit / n;
    EXPECT_NEAR(est, s.area(), 0.01 * s.area()) << s.name();
  }
  EXPECT_THROW(BorelShape::polygon({{0, 0}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(BorelShape::annulus(1), std::invalid_argument);
  EXPECT_THROW(BorelShape::sector(0), std::invalid_argument);
}

TEST(BorelShape, GaugeMatchesMembership) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const auto& s : {BorelShape::disk(), BorelShape::square(), BorelShape::sector(2.0),
                        BorelShape::polygon({{1, 0}, {0.3, 0.9}, {-0.8, 0.2}, {-0.4, -0.7}, {0.5, -0.6}})}) {
    for (int i = 0; i < 20000; ++i) {
      const Vec2d p{u(rng), u(rng)};
      const double g = s.gauge(p);
      if (std::fabs(g - 1) < 1e-9) continue;
      EXPECT_EQ(g <= 1, s.contains(p)) << s.name();
    }
  }
}
