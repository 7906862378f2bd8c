#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "orbit.hpp"

namespace orbitstat {

namespace detail {

// Points bucketed on a square grid of the given cell size covering
// [-extent, extent]^2; points outside are clamped to the border cells.
// Dense offsets when the grid is small enough, sorted keys otherwise.
class CellGrid {
 public:
  CellGrid(const std::vector<Vec2d>& pts, double cell, double extent) : cell_(cell) {
    K_ = static_cast<std::int64_t>(std::ceil(extent / cell)) + 1;
    W_ = 2 * K_ + 1;
    std::vector<std::int64_t> keys(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) keys[i] = key_of(pts[i]);
    if (W_ * W_ <= kDenseLimit) {
      dense_ = true;
      start_.assign(static_cast<std::size_t>(W_ * W_) + 1, 0);
      for (auto k : keys) ++start_[static_cast<std::size_t>(k) + 1];
      for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
      index_.resize(pts.size());
      std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
      for (std::size_t i = 0; i < pts.size(); ++i) index_[fill[static_cast<std::size_t>(keys[i])]++] = static_cast<std::uint32_t>(i);
    } else {
      entries_.reserve(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) entries_.push_back({keys[i], static_cast<std::uint32_t>(i)});
      std::sort(entries_.begin(), entries_.end());
    }
  }

  // f(index) for every point in the 3x3 block of cells around p.
  template <class F>
  void for_neighbors(const Vec2d& p, F&& f) const {
    const std::int64_t ix = cx(p.x), iy = cx(p.y);
    const std::int64_t ylo = std::max<std::int64_t>(iy - 1, -K_), yhi = std::min<std::int64_t>(iy + 1, K_);
    for (std::int64_t x = std::max<std::int64_t>(ix - 1, -K_); x <= std::min<std::int64_t>(ix + 1, K_); ++x) {
      const std::int64_t lo = (x + K_) * W_ + (ylo + K_), hi = (x + K_) * W_ + (yhi + K_);
      if (dense_) {
        for (std::uint32_t j = start_[static_cast<std::size_t>(lo)]; j < start_[static_cast<std::size_t>(hi) + 1]; ++j) f(index_[j]);
      } else {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair<std::int64_t, std::uint32_t>{lo, 0});
        for (; it != entries_.end() && it->first <= hi; ++it) f(it->second);
      }
    }
  }

 private:
  static constexpr std::int64_t kDenseLimit = 1 << 22;

  std::int64_t cx(double v) const {
    const double q = std::floor(v / cell_);
    if (q < static_cast<double>(-K_)) return -K_;
    if (q > static_cast<double>(K_)) return K_;
    return static_cast<std::int64_t>(q);
  }
  std::int64_t key_of(const Vec2d& p) const { return (cx(p.x) + K_) * W_ + (cx(p.y) + K_); }

  double cell_;
  std::int64_t K_ = 0, W_ = 0;
  bool dense_ = false;
  std::vector<std::uint32_t> start_, index_;
  std::vector<std::pair<std::int64_t, std::uint32_t>> entries_;
};

}  // namespace detail

// Ordered pairs (x, y), x in xs with |x| <= R, y in ys with 0 < |y - x| < eta;
// ys must contain every point of its set within radius R + eta.
inline std::int64_t count_friends(const std::vector<Vec2d>& xs, const std::vector<Vec2d>& ys, double R, double eta) {
  if (!(R > 0 && eta > 0)) throw std::invalid_argument("R and eta must be positive");
  if (xs.empty() || ys.empty()) return 0;
  double extent = 0;
  for (const auto& p : ys) extent = std::max({extent, std::fabs(p.x), std::fabs(p.y)});
  detail::CellGrid grid(ys, eta, extent);
  const double R2 = R * R, e2 = eta * eta;
  std::int64_t n = 0;
  for (const auto& x : xs) {
    if (x.x * x.x + x.y * x.y > R2) continue;
    grid.for_neighbors(x, [&](std::uint32_t j) {
      const double dx = ys[j].x - x.x, dy = ys[j].y - x.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 > 0 && d2 < e2) ++n;
    });
  }
  return n;
}

inline std::int64_t count_friends(const std::vector<Vec2d>& pts, double R, double eta) {
  return count_friends(pts, pts, R, eta);
}

inline std::int64_t friends(const HolonomySet& S, double R, double eta) {
  if (!(R > 0 && eta > 0)) throw std::invalid_argument("R and eta must be positive");
  if (S.empty()) return 0;
  return count_friends(S.points(R + eta), R, eta);
}

// Ordered pairs (x, y), x in xs with |x| <= R, y in ys with |y| <= s|x| and
// |x ^ y| <= D; ys must contain every point of its set within radius s R.
inline std::int64_t count_det_pairs(const std::vector<Vec2d>& xs, const std::vector<Vec2d>& pts, double R, double D,
                                    double s) {
  if (!(R > 0 && D > 0 && s > 0)) throw std::invalid_argument("R, D and s must be positive");
  if (xs.empty() || pts.empty()) return 0;
  const double two_pi = 2 * std::numbers::pi;
  // Radial shells of ratio 1.25, each sorted by angle.
  struct Item {
    double angle;
    std::uint32_t index;
  };
  double rmin = INFINITY, rmax = 0;
  for (const auto& p : pts) {
    const double r = norm(p);
    if (r > 0) rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (!(rmin < INFINITY)) return 0;
  const double ratio = 1.25;
  const int nshell = static_cast<int>(std::floor(std::log(rmax / rmin) / std::log(ratio))) + 1;
  std::vector<std::vector<Item>> shells(static_cast<std::size_t>(nshell));
  std::vector<double> shell_lo(static_cast<std::size_t>(nshell));
  for (int k = 0; k < nshell; ++k) shell_lo[static_cast<std::size_t>(k)] = rmin * std::pow(ratio, k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = norm(pts[i]);
    if (r == 0) continue;
    int k = std::clamp(static_cast<int>(std::floor(std::log(r / rmin) / std::log(ratio))), 0, nshell - 1);
    while (k > 0 && r < shell_lo[static_cast<std::size_t>(k)]) --k;
    while (k + 1 < nshell && r >= shell_lo[static_cast<std::size_t>(k + 1)]) ++k;
    shells[static_cast<std::size_t>(k)].push_back({detail::angle_of(pts[i]), static_cast<std::uint32_t>(i)});
  }
  for (auto& sh : shells) std::sort(sh.begin(), sh.end(), [](const Item& a, const Item& b) { return a.angle < b.angle; });

  std::int64_t n = 0;
  for (const auto& x : xs) {
    const double rx = norm(x);
    if (rx > R || rx == 0) continue;
    const double ymax = s * rx;
    const double ycut = ymax * (1 + 1e-12);
    const double tx = detail::angle_of(x);
    auto check = [&](std::uint32_t j) {
      const Vec2d& y = pts[j];
      if (norm(y) <= ycut && std::fabs(wedge(x, y)) <= D) ++n;
    };
    for (int k = 0; k < nshell && shell_lo[static_cast<std::size_t>(k)] <= ycut; ++k) {
      const auto& sh = shells[static_cast<std::size_t>(k)];
      if (sh.empty()) continue;
      const double sine = D / (rx * shell_lo[static_cast<std::size_t>(k)]);
      if (sine >= 0.7) {
        for (const auto& it : sh) check(it.index);
        continue;
      }
      const double alpha = std::asin(sine) * (1 + 1e-9) + 1e-12;
      // windows around tx and tx + pi, each possibly wrapping around 2 pi
      for (double center : {tx, tx + std::numbers::pi}) {
        double lo = std::fmod(center - alpha + 2 * two_pi, two_pi);
        double hi = lo + 2 * alpha;
        auto scan = [&](double a, double b) {
          auto it = std::lower_bound(sh.begin(), sh.end(), a, [](const Item& p, double v) { return p.angle < v; });
          for (; it != sh.end() && it->angle <= b; ++it) check(it->index);
        };
        if (hi <= two_pi) {
          scan(lo, hi);
        } else {
          scan(lo, two_pi);
          scan(0, hi - two_pi);
        }
      }
    }
  }
  return n;
}

inline std::int64_t count_det_pairs(const std::vector<Vec2d>& pts, double R, double D, double s) {
  return count_det_pairs(pts, pts, R, D, s);
}

inline std::int64_t det_pairs(const HolonomySet& S, double R, double D, double s) {
  if (!(R > 0 && D > 0 && s > 0)) throw std::invalid_argument("R, D and s must be positive");
  if (S.empty()) return 0;
  return count_det_pairs(S.points(std::max(R, s * R)), R, D, s);
}

// friends(S, R, s / sqrt(c_M)) / |S n B_R|
inline double pair_correlation(const HolonomySet& S, double R, double s, double c_M) {
  if (!(R > 0 && s > 0 && c_M > 0)) throw std::invalid_argument("R, s and c_M must be positive");
  const double eta = s / std::sqrt(c_M);
  auto pts = S.points(R + eta);
  std::int64_t inside = 0;
  for (const auto& p : pts)
    if (p.x * p.x + p.y * p.y <= R * R) ++inside;
  if (inside == 0) throw std::invalid_argument("no points in the ball");
  return static_cast<double>(count_friends(pts, R, eta)) / static_cast<double>(inside);
}

// Half-open interval [lo, hi); an interval reaching R also takes in the sphere |v| = R.
struct Interval {
  double lo, hi;
};

inline double length_density(const HolonomySet& S, const std::vector<Interval>& L, double R) {
  if (!(R > 0)) throw std::invalid_argument("radius must be positive");
  for (const auto& iv : L)
    if (iv.lo < 0 || iv.hi > R * (1 + 1e-12) || iv.lo > iv.hi) throw std::invalid_argument("intervals must lie in [0, R)");
  auto pts = S.points(R);
  if (pts.empty()) throw std::invalid_argument("no points in the ball");
  std::int64_t hit = 0;
  for (const auto& p : pts) {
    const double r = norm(p);
    for (const auto& iv : L)
      if (r >= iv.lo && (r < iv.hi || (iv.hi >= R && r <= R))) {
        ++hit;
        break;
      }
  }
  return static_cast<double>(hit) / static_cast<double>(pts.size());
}

}  // namespace orbitstat
