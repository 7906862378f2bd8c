#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbit.hpp"
#include "pairstats.hpp"
#include "rng.hpp"

namespace orbitstat {

struct TestFunction {
  enum class Kind { ball, pair_ball, pair_friend, pair_det };
  Kind kind = Kind::ball;
  double R = 1;
  double R2 = 1;      // pair_ball
  double eta = 0;     // pair_friend
  double D = 0, s = 1;  // pair_det

  static TestFunction ball(double R) {
    if (!(R >= 0)) throw std::invalid_argument("radius must be nonnegative");
    TestFunction f;
    f.R = R;
    return f;
  }
  static TestFunction pair_ball(double R, double R2) {
    if (!(R >= 0 && R2 >= 0)) throw std::invalid_argument("radii must be nonnegative");
    TestFunction f;
    f.kind = Kind::pair_ball;
    f.R = R;
    f.R2 = R2;
    return f;
  }
  static TestFunction pair_friend(double R, double eta) {
    if (!(R > 0 && eta > 0)) throw std::invalid_argument("R and eta must be positive");
    TestFunction f;
    f.kind = Kind::pair_friend;
    f.R = R;
    f.eta = eta;
    return f;
  }
  static TestFunction pair_det(double R, double D, double s) {
    if (!(R > 0 && D > 0 && s > 0)) throw std::invalid_argument("R, D and s must be positive");
    TestFunction f;
    f.kind = Kind::pair_det;
    f.R = R;
    f.D = D;
    f.s = s;
    return f;
  }

  bool is_pair() const { return kind != Kind::ball; }

  std::string name() const {
    switch (kind) {
      case Kind::ball: return "ball";
      case Kind::pair_ball: return "pair_ball";
      case Kind::pair_friend: return "pair_friend";
      case Kind::pair_det: return "pair_det";
    }
    return "?";
  }

  // Radius containing the support of every coordinate.
  double support_radius() const {
    switch (kind) {
      case Kind::ball: return R;
      case Kind::pair_ball: return std::max(R, R2);
      case Kind::pair_friend: return R + eta;
      case Kind::pair_det: return std::max(R, s * R);
    }
    return R;
  }
};

// Sum over x in orbit of f(A x), f = 1_{B_R}.
inline std::int64_t theta(const DiscreteOrbit& orbit, const TestFunction& f, const Mat2d& A) {
  if (f.is_pair()) throw std::invalid_argument("pair test function needs two orbits");
  if (f.R == 0) return 0;
  return orbit.count_image(A, f.R);
}

struct PairTheta {
  std::int64_t total = 0;     // all ordered pairs, y = +-x included
  std::int64_t diagonal = 0;  // pairs with y = x or y = -x
};

inline bool same_orbit(const DiscreteOrbit& a, const DiscreteOrbit& b) {
  return &a == &b || (a.lattice_ptr() == b.lattice_ptr() && a.cusp_index() == b.cusp_index());
}

namespace detail {

inline std::vector<Vec2d> image_points(const DiscreteOrbit& o, const Mat2d& A, double R) {
  std::vector<Vec2d> out;
  o.for_each_point(A, R, [&](const Vec2d& p) { out.push_back(p); });
  return out;
}

}  // namespace detail

// Sum over (x, y) in orbit_a x orbit_b of f(A x, A y).
inline PairTheta theta_pair(const DiscreteOrbit& a, const DiscreteOrbit& b, const TestFunction& f, const Mat2d& A) {
  if (!f.is_pair()) throw std::invalid_argument("theta_pair needs a pair test function");
  const bool same = same_orbit(a, b);
  const int signs = same ? (a.symmetric() ? 2 : 1) : 0;  // y = x, and y = -x when -x is in the orbit
  PairTheta out;
  switch (f.kind) {
    case TestFunction::Kind::pair_ball: {
      if (f.R == 0 || f.R2 == 0) return out;
      const std::int64_t na = a.count_image(A, f.R);
      const std::int64_t nb = same && f.R2 == f.R ? na : b.count_image(A, f.R2);
      out.total = na * nb;
      if (signs) out.diagonal = signs * (f.R <= f.R2 ? na : nb);
      return out;
    }
    case TestFunction::Kind::pair_friend: {
      const auto xs = detail::image_points(a, A, f.R);
      const auto ys = same ? detail::image_points(a, A, f.R + f.eta) : detail::image_points(b, A, f.R + f.eta);
      out.total = count_friends(xs, ys, f.R, f.eta);
      if (signs == 2)
        for (const auto& x : xs)
          if (2 * norm(x) < f.eta) ++out.diagonal;
      return out;
    }
    case TestFunction::Kind::pair_det: {
      const auto xs = detail::image_points(a, A, f.R);
      const auto ys = same && f.s <= 1 ? xs : detail::image_points(same ? a : b, A, f.s * f.R);
      out.total = count_det_pairs(xs, ys, f.R, f.D, f.s);
      if (signs && f.s >= 1) out.diagonal = signs * static_cast<std::int64_t>(xs.size());
      return out;
    }
    case TestFunction::Kind::ball: break;
  }
  return out;
}

struct PairThetaEstimate {
  double total = 0;            // unbiased estimate of PairTheta::total
  std::int64_t diagonal = 0;   // exact
  bool subsampled = false;
};

namespace detail {

// m points drawn uniformly with replacement from the n points of orbit . A in B_R,
// in stream order.
inline std::vector<Vec2d> sample_image_points(const DiscreteOrbit& o, const Mat2d& A, double R, std::int64_t n,
                                              std::size_t m, Rng& rng) {
  std::vector<std::int64_t> pick(m);
  for (auto& p : pick) p = std::min<std::int64_t>(static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(n)), n - 1);
  std::sort(pick.begin(), pick.end());
  std::vector<Vec2d> out;
  out.reserve(m);
  std::int64_t idx = 0;
  std::size_t k = 0;
  o.for_each_point(A, R, [&](const Vec2d& p) {
    while (k < pick.size() && pick[k] == idx) {
      out.push_back(p);
      ++k;
    }
    ++idx;
  });
  if (idx != n) throw std::logic_error("point stream disagrees with the count");
  return out;
}

}  // namespace detail

// As theta_pair, but when orbit_a has more than max_centers points in B_R the
// sum over x is estimated from max_centers uniformly drawn x (unbiased).
inline PairThetaEstimate theta_pair_sampled(const DiscreteOrbit& a, const DiscreteOrbit& b, const TestFunction& f,
                                            const Mat2d& A, std::size_t max_centers, Rng& rng) {
  PairThetaEstimate out;
  if (f.kind == TestFunction::Kind::pair_ball) {
    const PairTheta t = theta_pair(a, b, f, A);
    out.total = static_cast<double>(t.total);
    out.diagonal = t.diagonal;
    return out;
  }
  const std::int64_t n = a.count_image(A, f.R);
  if (n == 0) return out;
  if (static_cast<std::size_t>(n) <= max_centers) {
    const PairTheta t = theta_pair(a, b, f, A);
    out.total = static_cast<double>(t.total);
    out.diagonal = t.diagonal;
    return out;
  }
  out.subsampled = true;
  const bool same = same_orbit(a, b);
  const int signs = same ? (a.symmetric() ? 2 : 1) : 0;
  const auto centers = detail::sample_image_points(a, A, f.R, n, max_centers, rng);
  const double scale = static_cast<double>(n) / static_cast<double>(max_centers);
  const DiscreteOrbit& ob = same ? a : b;
  if (f.kind == TestFunction::Kind::pair_friend) {
    double extent = 0;
    for (const auto& c : centers) extent = std::max({extent, std::fabs(c.x), std::fabs(c.y)});
    detail::CellGrid grid(centers, f.eta, extent + f.eta);
    const double e2 = f.eta * f.eta;
    std::int64_t hits = 0;
    ob.for_each_point(A, f.R + f.eta, [&](const Vec2d& y) {
      grid.for_neighbors(y, [&](std::uint32_t j) {
        const double dx = centers[j].x - y.x, dy = centers[j].y - y.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 > 0 && d2 < e2) ++hits;
      });
    });
    out.total = scale * static_cast<double>(hits);
    if (signs == 2) {
      // exact count of x with |2x| < eta
      out.diagonal = a.count_image(A, f.eta / 2 * (1 - 1e-15));
      if (f.R < f.eta / 2) out.diagonal = n;
    }
    return out;
  }
  const auto ys = detail::image_points(ob, A, f.s * f.R);
  out.total = scale * static_cast<double>(count_det_pairs(centers, ys, f.R, f.D, f.s));
  if (signs && f.s >= 1) out.diagonal = signs * n;
  return out;
}

}  // namespace orbitstat
