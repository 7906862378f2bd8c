#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <orbitstat/number_ring.hpp>

using namespace orbitstat;

namespace {

RingElement elem(const NumberRing* r, std::vector<long long> c) {
  RingElement::Coeffs k;
  for (auto v : c) k.push_back(Integer(v));
  while (static_cast<int>(k.size()) < r->degree()) k.push_back(Integer(0));
  return RingElement(r, std::move(k));
}

std::vector<Integer> poly(std::vector<long long> c) {
  std::vector<Integer> p;
  for (auto v : c) p.push_back(Integer(v));
  return p;
}

}  // namespace

TEST(Integer, PromotesOnOverflowAndDemotesBack) {
  Integer big(std::numeric_limits<std::int64_t>::max());
  Integer s = big + Integer(1);
  EXPECT_FALSE(s.is_small());
  EXPECT_EQ(s.str(), "9223372036854775808");
  Integer back = s - Integer(1);
  EXPECT_TRUE(back.is_small());
  EXPECT_EQ(back, big);
  Integer sq = big * big;
  EXPECT_EQ(sq.to_mpz(), mpz_class(big.to_mpz() * big.to_mpz()));
  EXPECT_EQ(Integer::from_string("-123456789012345678901234567890").str(), "-123456789012345678901234567890");
  EXPECT_THROW(Integer::from_string("12x"), std::invalid_argument);
}

TEST(NumberRing, Q3IsTheIntegers) {
  auto r = ring_for_hecke(3);
  EXPECT_EQ(r->degree(), 1);
  EXPECT_DOUBLE_EQ(r->lambda(), 1.0);
  auto seven = elem(r.get(), {7});
  EXPECT_EQ(seven.embed(), 7.0);
  EXPECT_EQ(seven.embed_certified().error, 0.0);
}

TEST(NumberRing, Q5GoldenRatio) {
  auto r = ring_for_hecke(5);
  EXPECT_EQ(r->degree(), 2);
  EXPECT_EQ(r->min_poly(), poly({-1, -1, 1}));  // x^2 - x - 1
  EXPECT_NEAR(r->lambda(), 1.6180339887, 1e-10);
  EXPECT_NEAR(r->lambda(), (1 + std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_LT(r->root_residual(), 1e-30);
}

TEST(NumberRing, Q4SqrtTwo) {
  auto r = ring_for_hecke(4);
  EXPECT_EQ(r->min_poly(), poly({-2, 0, 1}));
  EXPECT_NEAR(r->lambda(), std::numbers::sqrt2, 1e-15);
}

TEST(NumberRing, MinimalPolynomialsOfLargerQ) {
  // degree is phi(2q)/2
  const int expected_degree[] = {0, 0, 0, 1, 2, 2, 2, 3, 4, 3, 4, 5, 4};
  for (int q = 3; q <= 12; ++q) {
    auto r = ring_for_hecke(q);
    EXPECT_EQ(r->degree(), expected_degree[q]) << "q=" << q;
    EXPECT_NEAR(r->lambda(), 2 * std::cos(std::numbers::pi / q), 1e-14) << "q=" << q;
    EXPECT_LT(r->root_residual(), 1e-30) << "q=" << q;
    EXPECT_EQ(r->min_poly().back(), Integer(1));
  }
  // q = 7: x^3 - x^2 - 2x + 1
  EXPECT_EQ(ring_for_hecke(7)->min_poly(), poly({1, -2, -1, 1}));
}

TEST(NumberRing, DegreeLimitIsAnError) {
  EXPECT_THROW(ring_for_hecke(2), std::invalid_argument);
  EXPECT_THROW(NumberRing(31, 4), std::invalid_argument);
}

TEST(RingElement, LambdaSquaredReduces) {
  auto r = ring_for_hecke(5);
  auto lam = RingElement::lambda(r.get());
  EXPECT_EQ(lam * lam, elem(r.get(), {1, 1}));
  auto one = elem(r.get(), {1});
  auto a = elem(r.get(), {3, -7});
  EXPECT_EQ(a * one, a);
  EXPECT_TRUE((a + (-a)).is_zero());
  EXPECT_EQ((a + (-a)).embed(), 0.0);
  EXPECT_NEAR(lam.embed(), 1.6180339887, 1e-10);
}

TEST(RingElement, RingMismatchThrows) {
  auto a = RingElement::lambda(ring_for_hecke(5).get());
  auto b = RingElement::lambda(ring_for_hecke(4).get());
  EXPECT_THROW(a + b, std::invalid_argument);
  EXPECT_THROW(a * b, std::invalid_argument);
}

TEST(RingElement, EmbeddingIsMultiplicativeWithinBound) {
  std::mt19937_64 rng(11);
  for (int q : {4, 5, 7, 8, 9, 12}) {
    auto r = ring_for_hecke(q);
    std::uniform_int_distribution<long long> coef(-1000000, 1000000);
    for (int t = 0; t < 1000; ++t) {
      std::vector<long long> ca, cb;
      for (int i = 0; i < r->degree(); ++i) {
        ca.push_back(coef(rng));
        cb.push_back(coef(rng));
      }
      auto a = elem(r.get(), ca), b = elem(r.get(), cb);
      const auto ea = a.embed_certified(), eb = b.embed_certified(), eab = (a * b).embed_certified();
      const double prod = ea.value * eb.value;
      const double bound = eab.error + std::fabs(ea.value) * eb.error + std::fabs(eb.value) * ea.error +
                           ea.error * eb.error + 4 * std::ldexp(std::fabs(prod), -53);
      EXPECT_LE(std::fabs(eab.value - prod), bound) << "q=" << q;
    }
  }
}

TEST(RingElement, SignAgreesWithExactZeroTest) {
  std::mt19937_64 rng(5);
  auto r = ring_for_hecke(5);
  std::uniform_int_distribution<long long> coef(-50, 50);
  for (int t = 0; t < 2000; ++t) {
    auto a = elem(r.get(), {coef(rng), coef(rng)});
    const auto e = a.embed_certified();
    if (a.is_zero()) {
      EXPECT_EQ(a.sign(), 0);
      EXPECT_LE(std::fabs(e.value), e.error);
    } else {
      EXPECT_NE(a.sign(), 0);
      if (std::fabs(e.value) > e.error) {
        EXPECT_EQ(a.sign(), e.value > 0 ? 1 : -1);
      }
    }
  }
  // Fibonacci ratios approach lambda: F(n+1) - F(n) lambda alternates in sign.
  long long f0 = 1, f1 = 1;
  auto lam = RingElement::lambda(r.get());
  for (int n = 0; n < 80; ++n) {
    auto d = elem(r.get(), {f1}) - lam * Integer(f0);
    EXPECT_EQ(d.sign(), n % 2 == 0 ? -1 : 1) << n;
    long long f2 = f0 + f1;
    f0 = f1;
    f1 = f2;
    if (f1 > (1LL << 60)) break;
  }
}

TEST(RingElement, CompareToRational) {
  auto r = ring_for_hecke(4);
  auto lam = RingElement::lambda(r.get());
  EXPECT_EQ(lam.compare_to(mpq_class(141421356, 100000000)), 1);
  EXPECT_EQ(lam.compare_to(mpq_class(141421357, 100000000)), -1);
  EXPECT_EQ((lam * lam).compare_to(2.0), 0);
}
