#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pair_table.hpp"
#include "rng.hpp"

namespace orbitstat {

// Product-of-indicators f(x, y) on R^2 x R^2.
struct PairRegion {
  enum class Kind { ball_ball, ball_punctured, ball_det };
  Kind kind = Kind::ball_ball;
  double R = 1;
  double R2 = 1;    // ball_ball: radius of the second ball
  double eps = 0;   // ball_punctured
  double D = 0, s = 1;  // ball_det

  static PairRegion ball_ball(double R, double R2) {
    if (!(R >= 0 && R2 >= 0)) throw std::invalid_argument("radii must be nonnegative");
    PairRegion p;
    p.R = R;
    p.R2 = R2;
    return p;
  }
  static PairRegion ball_ball(double R) { return ball_ball(R, R); }
  static PairRegion ball_punctured(double R, double eps) {
    if (!(R > 0 && eps > 0)) throw std::invalid_argument("R and eps must be positive");
    PairRegion p;
    p.kind = Kind::ball_punctured;
    p.R = R;
    p.eps = eps;
    return p;
  }
  static PairRegion ball_det(double R, double D, double s) {
    if (!(R > 0 && D > 0 && s > 0)) throw std::invalid_argument("R, D and s must be positive");
    PairRegion p;
    p.kind = Kind::ball_det;
    p.R = R;
    p.D = D;
    p.s = s;
    return p;
  }

  std::string name() const {
    switch (kind) {
      case Kind::ball_ball: return "ball_ball";
      case Kind::ball_punctured: return "ball_punctured";
      case Kind::ball_det: return "ball_det";
    }
    return "?";
  }

  bool contains(const Vec2d& x, const Vec2d& y) const {
    const double rx = norm(x);
    if (rx > R) return false;
    switch (kind) {
      case Kind::ball_ball: return norm(y) <= R2;
      case Kind::ball_punctured: {
        const double d = norm({y.x - x.x, y.y - x.y});
        return d > 0 && d < eps;
      }
      case Kind::ball_det: return norm(y) <= s * rx && std::fabs(wedge(x, y)) <= D;
    }
    return false;
  }

  // Area of {y : |y| <= s r, |x ^ y| <= D} for |x| = r.
  double det_slice_area(double r) const {
    const double rho = s * r;
    if (r == 0) return 0;
    const double w = D / r;
    if (w >= rho) return std::numbers::pi * rho * rho;
    return 2 * (rho * rho * std::asin(w / rho) + w * std::sqrt(rho * rho - w * w));
  }

  // Lebesgue measure of the support in R^4.
  double volume() const {
    const double pi = std::numbers::pi;
    switch (kind) {
      case Kind::ball_ball: return pi * R * R * pi * R2 * R2;
      case Kind::ball_punctured: return pi * R * R * pi * eps * eps;
      case Kind::ball_det: {
        using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
        auto f = [&](double r) { return 2 * pi * r * det_slice_area(r); };
        const double knee = std::min(R, std::sqrt(D / s));
        return GK::integrate(f, 0, knee, 15, 1e-13) + (knee < R ? GK::integrate(f, knee, R, 15, 1e-13) : 0.0);
      }
    }
    return 0;
  }

  // integral of f(x, x) + f(x, -x) dx
  double diagonal_integral() const {
    const double pi = std::numbers::pi;
    switch (kind) {
      case Kind::ball_ball: {
        const double m = std::min(R, R2);
        return 2 * pi * m * m;
      }
      case Kind::ball_punctured: {
        const double m = std::min(R, eps / 2);
        return pi * m * m;
      }
      case Kind::ball_det: return s >= 1 ? 2 * pi * R * R : 0.0;
    }
    return 0;
  }

  // Upper bound for the integral of |x ^ y| f(x, y).
  double wedge_moment_bound() const {
    const double pi = std::numbers::pi;
    switch (kind) {
      case Kind::ball_ball: return 2 * pi * 4 * (R * R * R / 3) * (R2 * R2 * R2 / 3);
      case Kind::ball_punctured: return R * eps * volume();
      case Kind::ball_det: return D * volume();
    }
    return 0;
  }
};

namespace detail {

inline Vec2d uniform_disk(Rng& rng, double R) {
  const double r = R * std::sqrt(uniform01(rng));
  const double t = uniform(rng, 0, 2 * std::numbers::pi);
  return {r * std::cos(t), r * std::sin(t)};
}

// One draw of a Monte Carlo estimator whose mean is the integral of w(|x ^ y|) f.
template <class W>
double correlation_draw(const PairRegion& f, const W& weight, Rng& rng) {
  const double pi = std::numbers::pi;
  const Vec2d x = uniform_disk(rng, f.R);
  switch (f.kind) {
    case PairRegion::Kind::ball_ball: {
      const Vec2d y = uniform_disk(rng, f.R2);
      return f.volume() * weight(std::fabs(wedge(x, y)));
    }
    case PairRegion::Kind::ball_punctured: {
      const Vec2d u = uniform_disk(rng, f.eps);
      return f.volume() * weight(std::fabs(wedge(x, u)));
    }
    case PairRegion::Kind::ball_det: {
      const double r = norm(x);
      if (r == 0) return 0;
      const double rho = f.s * r;
      const double w = std::min(f.D / r, rho);
      const double t = uniform(rng, -rho, rho), n = uniform(rng, -w, w);
      if (t * t + n * n > rho * rho) return 0;
      return pi * f.R * f.R * 4 * rho * w * weight(r * std::fabs(n));
    }
  }
  return 0;
}

}  // namespace detail

struct CorrelationOptions {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct CorrelationResult {
  Estimate integral;         // of Phi f
  Estimate residual;         // of (Phi - c_Gamma) f
  double tail_uncertainty = 0;
  double constant_part = 0;  // c_Gamma * volume
};

// Monte Carlo estimate of the integral of w(|x ^ y|) f(x, y).
template <class W>
Estimate integrate_pair_weight(const PairRegion& f, const W& weight, const CorrelationOptions& opt) {
  auto acc = run_parallel<RunningStats>(opt.samples, opt.workers, opt.seed,
                                        [&](Rng& rng, RunningStats& s) { s.add(detail::correlation_draw(f, weight, rng)); });
  return {acc.mean, acc.stderr_of_mean(), acc.n};
}

// Integral of Phi_ab(|x ^ y|) f(x, y) dx dy.
inline CorrelationResult correlation_integral(const PairRegion& f, const PhiEvaluator& phi, const CorrelationOptions& opt) {
  const double cg = phi.c_gamma();
  auto est = integrate_pair_weight(f, [&](double t) { return t > 0 ? phi.eval_extended(t) - cg : 0.0; }, opt);
  CorrelationResult r;
  r.constant_part = cg * f.volume();
  r.residual = est;
  r.integral = {est.value + r.constant_part, est.stderr, est.n};
  r.tail_uncertainty = phi.tail_unit() * f.wedge_moment_bound();
  return r;
}

// Constant sanity mode: Phi replaced by the constant c.
inline Estimate correlation_integral_constant(const PairRegion& f, double c, const CorrelationOptions& opt) {
  return integrate_pair_weight(f, [&](double) { return c; }, opt);
}

// Ball x ball by quadrature: 2 pi int_0^{R R'} rho log(R R' / rho) G(rho) d rho,
// G the angular integral of Phi.
inline CorrelationResult correlation_quadrature(const PairRegion& f, const PhiEvaluator& phi) {
  if (f.kind != PairRegion::Kind::ball_ball) throw std::invalid_argument("quadrature is implemented for ball x ball");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double P = f.R * f.R2;
  CorrelationResult r;
  r.constant_part = phi.c_gamma() * f.volume();
  r.tail_uncertainty = phi.tail_unit() * f.wedge_moment_bound();
  if (P == 0) return r;
  auto g = [&](double rho) { return rho > 0 ? rho * std::log(P / rho) * phi.angular_integral(rho) : 0.0; };
  std::vector<double> cuts{0};
  for (double b : phi.breakpoints(P))
    if (b > cuts.back()) cuts.push_back(b);
  if (phi.C_trunc() < P) cuts.push_back(phi.C_trunc());
  std::sort(cuts.begin(), cuts.end());
  if (cuts.back() < P) cuts.push_back(P);
  double total = 0, err = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    // rho = a + u^2 absorbs the square-root kink of G at each determinant value
    const double a = cuts[i], h = std::sqrt(cuts[i + 1] - cuts[i]);
    auto gu = [&](double u) { return 2 * u * g(a + u * u); };
    double e = 0;
    total += GK::integrate(gu, 0, h, 6, 1e-11, &e);
    err += e;
  }
  total *= 2 * std::numbers::pi;
  r.integral = {total, 2 * std::numbers::pi * err, 0};
  r.residual = {total - r.constant_part, r.integral.stderr, 0};
  return r;
}

}  // namespace orbitstat
