#pragma once

// Independent reference computations used by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <orbitstat/matrix.hpp>
#include <orbitstat/orbit.hpp>

namespace oracle {

using orbitstat::Vec2d;

// Primitive integer vectors (m, n) with pred(m, n), |m|, |n| <= B.
template <class Pred>
std::vector<std::pair<std::int64_t, std::int64_t>> primitive_scan(std::int64_t B, Pred&& pred) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t m = -B; m <= B; ++m)
    for (std::int64_t n = -B; n <= B; ++n)
      if (std::gcd(m, n) == 1 && pred(m, n)) out.push_back({m, n});
  return out;
}

inline std::int64_t primitive_in_disk(double R) {
  const auto B = static_cast<std::int64_t>(std::floor(R));
  std::int64_t c = 0;
  for (std::int64_t m = -B; m <= B; ++m)
    for (std::int64_t n = -B; n <= B; ++n)
      if (std::gcd(m, n) == 1 && static_cast<double>(m * m + n * n) <= R * R) ++c;
  return c;
}

inline std::vector<std::int64_t> totients(std::int64_t n) {
  std::vector<std::int64_t> phi(static_cast<std::size_t>(n + 1));
  for (std::int64_t k = 1; k <= n; ++k) {
    std::int64_t m = k, r = k;
    for (std::int64_t p = 2; p * p <= m; ++p)
      if (m % p == 0) {
        while (m % p == 0) m /= p;
        r -= r / p;
      }
    if (m > 1) r -= r / m;
    phi[static_cast<std::size_t>(k)] = r;
  }
  return phi;
}

inline std::int64_t friends_brute(const std::vector<Vec2d>& pts, double R, double eta) {
  std::int64_t c = 0;
  for (const auto& x : pts) {
    if (std::hypot(x.x, x.y) > R) continue;
    for (const auto& y : pts) {
      const double d = std::hypot(y.x - x.x, y.y - x.y);
      if (d > 0 && d < eta) ++c;
    }
  }
  return c;
}

inline std::int64_t det_pairs_brute(const std::vector<Vec2d>& pts, double R, double D, double s) {
  std::int64_t c = 0;
  for (const auto& x : pts) {
    const double rx = std::hypot(x.x, x.y);
    if (rx > R) continue;
    for (const auto& y : pts)
      if (std::hypot(y.x, y.y) <= s * rx * (1 + 1e-12) && std::fabs(x.x * y.y - x.y * y.x) <= D) ++c;
  }
  return c;
}

// Kolmogorov distribution: P(sqrt(n) D_n > t) for large n.
inline double kolmogorov_sf(double t) {
  if (t < 0.05) return 1.0;
  double s = 0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 ? 1 : -1) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

// One-sample KS statistic sup |F_n - F| against the cdf F.
template <class Cdf>
double ks_one_sample(std::vector<double> x, Cdf&& F) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = F(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Two-sample p-value from the asymptotic distribution.
inline double ks_two_sample_p(double d, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double s = std::sqrt(ne);
  return kolmogorov_sf((s + 0.12 + 0.11 / s) * d);
}

// phi_ab(c) from the box {0 < a <= c <= C} of sigma_a^-1 Lambda_b, enumerated by BFS.
inline std::map<long long, std::int64_t> box_count(std::shared_ptr<const orbitstat::Lattice> L, std::size_t ca, std::size_t cb, double C) {
  orbitstat::DiscreteOrbit o(L, cb, {orbitstat::OrbitStrategy::bfs, 12.0});
  const orbitstat::Mat2d sa_inv = orbitstat::inverse(L->cusps[ca].sigma());
  const double R = std::sqrt(2.0) * C * orbitstat::op_norm(L->cusps[ca].sigma()) + 1;
  std::map<long long, std::int64_t> out;  // keyed by round(c * 1e8)
  for (const auto& v : o.enumerate_ball(R)) {
    const Vec2d p{sa_inv.a * v.coords.x + sa_inv.b * v.coords.y, sa_inv.c * v.coords.x + sa_inv.d * v.coords.y};
    if (p.x > 1e-9 && p.y > 1e-9 && p.x <= p.y * (1 + 1e-12) && p.y <= C * (1 + 1e-12)) ++out[std::llround(p.y * 1e8)];
  }
  return out;
}

}  // namespace oracle
