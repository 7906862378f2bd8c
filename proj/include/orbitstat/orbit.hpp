#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "lattice.hpp"
#include "orbit_tree.hpp"

namespace orbitstat {

struct OrbitVector {
  // Exact coordinates are sqrt(width) * (x, y).
  RingElement x, y;
  Vec2d coords;
  double norm_sq = 0;
  int word_length = 0;
};

enum class OrbitStrategy { automatic, tree, bfs };

struct OrbitOptions {
  OrbitStrategy strategy = OrbitStrategy::automatic;
  double prune_factor = 8.0;  // BFS only
  std::size_t max_points = 50'000'000;
};

namespace detail {

// Exact floor(R^2 / d) for R >= 0.
inline std::int64_t floor_square_over(double R, std::int64_t d) {
  mpq_class r(R);
  mpq_class v = r * r / d;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  if (!f.fits_slong_p()) throw std::overflow_error("radius too large");
  return f.get_si();
}

inline std::int64_t isqrt(std::int64_t n) {
  if (n < 0) return -1;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

struct RingVecHash {
  std::size_t operator()(const std::pair<RingElement, RingElement>& v) const {
    return v.first.hash() * 31 + v.second.hash();
  }
};
struct RingVecEq {
  bool operator()(const std::pair<RingElement, RingElement>& a, const std::pair<RingElement, RingElement>& b) const {
    return a.first.coeffs() == b.first.coeffs() && a.second.coeffs() == b.second.coeffs();
  }
};

inline double angle_of(const Vec2d& v) {
  double t = std::atan2(v.y, v.x);
  return t < 0 ? t + 2 * std::numbers::pi : t;
}

// Count integers j with |w + j u|^2 <= R^2.
inline std::int64_t count_line(double wx, double wy, double ux, double uy, double R2, double& jlo, double& jhi) {
  const double uu = ux * ux + uy * uy;
  const double wu = wx * ux + wy * uy;
  const double ww = wx * wx + wy * wy;
  const double disc = wu * wu - uu * (ww - R2);
  if (disc < 0) return 0;
  const double sq = std::sqrt(disc);
  jlo = std::ceil((-wu - sq) / uu);
  jhi = std::floor((-wu + sq) / uu);
  return jhi >= jlo ? static_cast<std::int64_t>(jhi - jlo + 1) : 0;
}

}  // namespace detail

class DiscreteOrbit {
 public:
  DiscreteOrbit(std::shared_ptr<const Lattice> lattice, std::size_t cusp_index = 0, OrbitOptions options = {})
      : lattice_(std::move(lattice)), cusp_index_(cusp_index), options_(options) {
    if (!lattice_) throw std::invalid_argument("null lattice");
    if (cusp_index_ >= lattice_->cusps.size()) throw std::invalid_argument("cusp index out of range");
    const CuspData& cd = cusp();
    scale_ = cd.scale();
    strategy_ = options_.strategy;
    if (strategy_ == OrbitStrategy::automatic)
      strategy_ = lattice_->kind == LatticeKind::custom ? OrbitStrategy::bfs : OrbitStrategy::tree;
    if (strategy_ == OrbitStrategy::tree && lattice_->kind == LatticeKind::custom)
      throw std::invalid_argument("tree enumeration needs a built-in lattice");
    if (lattice_->kind == LatticeKind::congruence) {
      N_ = lattice_->level;
      r1_ = detail::mod(cd.sigma_base.a.coeffs()[0].small(), N_);
      r2_ = detail::mod(cd.sigma_base.c.coeffs()[0].small(), N_);
    }
    start_ = {cd.sigma_base.a, cd.sigma_base.c};
  }

  const Lattice& lattice() const { return *lattice_; }
  std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }
  const CuspData& cusp() const { return lattice_->cusps[cusp_index_]; }
  std::size_t cusp_index() const { return cusp_index_; }
  double scale() const { return scale_; }
  OrbitStrategy strategy() const { return strategy_; }
  const OrbitOptions& options() const { return options_; }
  bool symmetric() const { return lattice_->contains_minus_identity; }

  // All orbit vectors of norm <= R, each once, sorted by (norm, angle).
  std::vector<OrbitVector> enumerate_ball(double R) const {
    if (!(R > 0)) throw std::invalid_argument("radius must be positive");
    std::lock_guard<std::mutex> lock(mu_);
    if (R > cached_radius_) {
      cache_ = compute_ball(R);
      cached_radius_ = R;
    }
    std::vector<OrbitVector> out;
    for (const auto& v : cache_) {
      if (!within(v, R)) break;
      out.push_back(v);
    }
    return out;
  }

  double cached_radius() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cached_radius_;
  }

  // Replace the cache (used when loading a cache file).
  void seed_cache(std::vector<OrbitVector> vectors, double radius) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (radius > cached_radius_) {
      cache_ = std::move(vectors);
      cached_radius_ = radius;
    }
  }

  // |Lambda n B_R|, exact.
  std::int64_t count(double R) const {
    if (!(R > 0)) throw std::invalid_argument("radius must be positive");
    if (strategy_ == OrbitStrategy::bfs) return static_cast<std::int64_t>(enumerate_ball(R).size());
    if (lattice_->q == 3) return count_int(R);
    return count_hecke_exact(R);
  }

  // Calls f(a, c, tau) for every line {(a + j tau, c)} of orbit vectors in
  // unscaled coordinates with 0 < |c| <= c_max, and f(x, 0, 0) for the points on
  // the horizontal axis. Together they cover the orbit exactly once.
  template <class F>
  void for_each_line(double c_max, F&& f) const {
    if (strategy_ == OrbitStrategy::bfs) throw std::logic_error("line decomposition needs tree enumeration");
    if (N_ == 0) {
      f(1.0, 0.0, 0.0);
      f(-1.0, 0.0, 0.0);
      if (lattice_->q == 3) {
        walk_tree_int(static_cast<std::int64_t>(std::floor(c_max)), [&](std::int64_t a, std::int64_t c, int) {
          const double af = static_cast<double>(a), cf = static_cast<double>(c);
          f(af, cf, cf);
          f(-af, -cf, cf);
          return true;
        });
      } else {
        const double lam = lattice_->lambda();
        walk_tree_float(lam, c_max, [&](double a, double c, int) {
          if (c > c_max) return false;
          f(a, c, lam * c);
          f(-a, -c, lam * c);
          return true;
        });
      }
      return;
    }
    const std::int64_t N = N_;
    if (residue_ok(1, 0)) f(1.0, 0.0, 0.0);
    if (residue_ok(-1, 0)) f(-1.0, 0.0, 0.0);
    walk_tree_int(static_cast<std::int64_t>(std::floor(c_max)), [&](std::int64_t a, std::int64_t c, int) {
      const double cf = static_cast<double>(c), tau = static_cast<double>(N * c);
      for (std::int64_t k = 0; k < N; ++k) {
        const std::int64_t x = a + k * c;
        if (residue_ok(x, c)) f(static_cast<double>(x), cf, tau);
        if (residue_ok(-x, -c)) f(static_cast<double>(-x), -cf, tau);
      }
      return true;
    });
  }

  // |M Lambda n B_R| for a real matrix M.
  std::int64_t count_image(const Mat2d& M, double R) const {
    if (strategy_ == OrbitStrategy::bfs) {
      std::int64_t n = 0;
      for_each_point(M, R, [&](const Vec2d&) { ++n; });
      return n;
    }
    const Mat2d T = scaled(M, scale_);
    const double R2 = R * R;
    std::int64_t n = 0;
    for_each_line(line_bound(T, R), [&](double a, double c, double tau) {
      if (tau == 0) {
        const double px = T.a * a, py = T.c * a;
        if (px * px + py * py <= R2) ++n;
        return;
      }
      double lo, hi;
      n += detail::count_line(T.a * a + T.b * c, T.c * a + T.d * c, T.a * tau, T.c * tau, R2, lo, hi);
    });
    return n;
  }

  // f(p) for every p in M Lambda with |p| <= R.
  template <class F>
  void for_each_point(const Mat2d& M, double R, F&& f) const {
    const Mat2d T = scaled(M, scale_);
    const double R2 = R * R;
    if (strategy_ == OrbitStrategy::bfs) {
      const double need = R * op_norm(inverse(M));
      auto pts = enumerate_ball(need * (1 + 1e-12) + 1e-12);
      for (const auto& v : pts) {
        Vec2d p{M.a * v.coords.x + M.b * v.coords.y, M.c * v.coords.x + M.d * v.coords.y};
        if (p.x * p.x + p.y * p.y <= R2) f(p);
      }
      return;
    }
    for_each_line(line_bound(T, R), [&](double a, double c, double tau) {
      if (tau == 0) {
        Vec2d p{T.a * a, T.c * a};
        if (p.x * p.x + p.y * p.y <= R2) f(p);
        return;
      }
      const double wx = T.a * a + T.b * c, wy = T.c * a + T.d * c, ux = T.a * tau, uy = T.c * tau;
      double lo, hi;
      if (detail::count_line(wx, wy, ux, uy, R2, lo, hi) == 0) return;
      for (double j = lo; j <= hi; ++j) f(Vec2d{wx + j * ux, wy + j * uy});
    });
  }

 private:
  // Largest |c| (unscaled) of an orbit vector v with |T v| <= R.
  static double line_bound(const Mat2d& T, double R) {
    const Mat2d inv = inverse(T);
    return R * std::hypot(inv.c, inv.d) * (1 + 1e-12) + 1e-12;
  }

  bool residue_ok(std::int64_t x, std::int64_t c) const {
    return detail::mod(x, N_) == r1_ && detail::mod(c, N_) == r2_;
  }

  bool within(const OrbitVector& v, double R) const {
    const double R2 = R * R;
    if (v.norm_sq < R2 * (1 - 1e-12)) return true;
    if (v.norm_sq > R2 * (1 + 1e-12)) return false;
    return exact_norm_le(v.x, v.y, R);
  }

  // width * (x^2 + y^2) <= R^2, exactly.
  bool exact_norm_le(const RingElement& x, const RingElement& y, double R) const {
    RingElement n = cusp().width * (x * x + y * y);
    mpq_class r(R);
    return n.compare_to(mpq_class(r * r)) <= 0;
  }

  std::int64_t count_int(double R) const {
    const std::int64_t omega = N_ == 0 ? 1 : N_;
    const std::int64_t m = detail::floor_square_over(R, omega);  // |v|^2 <= m, unscaled
    if (m < 1) return 0;
    std::int64_t n = 0;
    if (N_ == 0) n += 2;
    else n += residue_ok(1, 0) + residue_ok(-1, 0);
    const std::int64_t cb = detail::isqrt(m);
    walk_tree_int(cb, [&](std::int64_t a, std::int64_t c, int) {
      const std::int64_t rest = m - c * c;
      if (rest < 0 || a * a > rest) return false;
      const std::int64_t w = detail::isqrt(rest);
      const std::int64_t klo = detail::ceil_div(-w - a, c), khi = detail::floor_div(w - a, c);
      if (N_ == 0) {
        n += 2 * (khi - klo + 1);
        return true;
      }
      for (std::int64_t k0 = 0; k0 < N_; ++k0) {
        const std::int64_t x = a + k0 * c;
        const bool plus = residue_ok(x, c), minus = residue_ok(-x, -c);
        if (!plus && !minus) continue;
        // k = k0 + N t in [klo, khi]
        const std::int64_t t = detail::floor_div(khi - k0, N_) - detail::ceil_div(klo - k0, N_) + 1;
        if (t > 0) n += t * (plus + minus);
      }
      return true;
    });
    return n;
  }

  std::int64_t count_hecke_exact(double R) const {
    const NumberRing* ring = lattice_->rp();
    const double lam = ring->lambda();
    const double Ru = R / scale_;
    const double R2u = Ru * Ru;
    std::int64_t n = 0;
    const RingElement one(ring, Integer(1)), zero(ring, Integer(0));
    if (exact_norm_le(one, zero, R)) n += 2;
    const RingElement lam_e = RingElement::lambda(ring);
    walk_tree_exact(ring, Ru, [&](const RingElement& a, const RingElement& c, double af, double cf, int) {
      const double nf = af * af + cf * cf;
      if (nf > R2u * (1 + 1e-9)) return false;
      if (nf > R2u * (1 - 1e-9) && !exact_norm_le(a, c, R)) return false;
      const double L = lam * cf;
      const double w = std::sqrt(std::max(0.0, R2u - cf * cf));
      const double klo = std::ceil((-w - af) / L) - 1, khi = std::floor((w - af) / L) + 1;
      for (double k = klo; k <= khi; ++k) {
        const double x = af + k * L;
        const double vn = x * x + cf * cf;
        if (vn < R2u * (1 - 1e-9)) n += 2;
        else if (vn <= R2u * (1 + 1e-9) && exact_norm_le(a + lam_e * c * Integer(static_cast<std::int64_t>(k)), c, R)) n += 2;
      }
      return true;
    });
    return n;
  }

  OrbitVector make_vector(RingElement x, RingElement y, int depth) const {
    OrbitVector v;
    const double xf = x.embed(), yf = y.embed();
    v.coords = {scale_ * xf, scale_ * yf};
    v.norm_sq = v.coords.x * v.coords.x + v.coords.y * v.coords.y;
    v.x = std::move(x);
    v.y = std::move(y);
    v.word_length = depth;
    return v;
  }

  void check_cap(std::size_t n) const {
    if (n > options_.max_points)
      throw std::runtime_error("orbit enumeration exceeded the point cap of " + std::to_string(options_.max_points) +
                               " (radius too large for the configured cap)");
  }

  std::vector<OrbitVector> compute_ball(double R) const {
    std::vector<OrbitVector> out;
    const NumberRing* ring = lattice_->rp();
    if (strategy_ == OrbitStrategy::bfs) {
      out = bfs_ball(R);
    } else if (lattice_->q == 3) {
      const std::int64_t omega = N_ == 0 ? 1 : N_;
      const std::int64_t m = detail::floor_square_over(R, omega);
      auto push = [&](std::int64_t x, std::int64_t y, int depth) {
        out.push_back(make_vector(RingElement(ring, Integer(x)), RingElement(ring, Integer(y)), depth));
        check_cap(out.size());
      };
      if (m >= 1) {
        if (N_ == 0 || residue_ok(1, 0)) push(1, 0, 0);
        if (N_ == 0 || residue_ok(-1, 0)) push(-1, 0, 0);
      }
      walk_tree_int(detail::isqrt(m), [&](std::int64_t a, std::int64_t c, int depth) {
        const std::int64_t rest = m - c * c;
        if (rest < 0 || a * a > rest) return false;
        const std::int64_t w = detail::isqrt(rest);
        for (std::int64_t k = detail::ceil_div(-w - a, c); k <= detail::floor_div(w - a, c); ++k) {
          const std::int64_t x = a + k * c;
          if (N_ == 0 || residue_ok(x, c)) push(x, c, depth);
          if (N_ == 0 || residue_ok(-x, -c)) push(-x, -c, depth);
        }
        return true;
      });
    } else {
      const double Ru = R / scale_;
      const double R2u = Ru * Ru;
      const double lam = ring->lambda();
      const RingElement lam_e = RingElement::lambda(ring);
      const RingElement one(ring, Integer(1)), zero(ring, Integer(0));
      if (exact_norm_le(one, zero, R)) {
        out.push_back(make_vector(one, zero, 0));
        out.push_back(make_vector(-one, zero, 0));
      }
      walk_tree_exact(ring, Ru, [&](const RingElement& a, const RingElement& c, double af, double cf, int depth) {
        const double nf = af * af + cf * cf;
        if (nf > R2u * (1 + 1e-9)) return false;
        if (nf > R2u * (1 - 1e-9) && !exact_norm_le(a, c, R)) return false;
        const double L = lam * cf;
        const double w = std::sqrt(std::max(0.0, R2u - cf * cf));
        const double klo = std::ceil((-w - af) / L) - 1, khi = std::floor((w - af) / L) + 1;
        const RingElement Le = lam_e * c;
        for (double k = klo; k <= khi; ++k) {
          const double x = af + k * L;
          const double vn = x * x + cf * cf;
          if (vn > R2u * (1 + 1e-9)) continue;
          RingElement xe = a + Le * Integer(static_cast<std::int64_t>(k));
          if (vn >= R2u * (1 - 1e-9) && !exact_norm_le(xe, c, R)) continue;
          out.push_back(make_vector(-xe, -c, depth));
          out.push_back(make_vector(std::move(xe), c, depth));
          check_cap(out.size());
        }
        return true;
      });
    }
    sort_canonical(out);
    return out;
  }

  void sort_canonical(std::vector<OrbitVector>& v) const {
    std::sort(v.begin(), v.end(), [](const OrbitVector& p, const OrbitVector& q) {
      const double d = p.norm_sq - q.norm_sq;
      const double tol = 1e-12 * std::max(p.norm_sq, q.norm_sq);
      if (d < -tol) return true;
      if (d > tol) return false;
      const int s = ((p.x * p.x + p.y * p.y) - (q.x * q.x + q.y * q.y)).sign();
      if (s != 0) return s < 0;
      return detail::angle_of(p.coords) < detail::angle_of(q.coords);
    });
  }

  // Breadth-first search over generators and their inverses from sigma e1,
  // pruning vectors with norm above prune_factor * R.
  std::vector<OrbitVector> bfs_ball(double R) const {
    const auto& gens = lattice_->generators;
    if (gens.empty()) throw std::invalid_argument("lattice has no generators");
    std::vector<GroupElement> moves;
    for (const auto& g : gens) {
      moves.push_back(g);
      moves.push_back(g.adjugate());
    }
    const double prune = options_.prune_factor * R;
    using Key = std::pair<RingElement, RingElement>;
    std::unordered_set<Key, detail::RingVecHash, detail::RingVecEq> seen;
    std::deque<std::pair<Key, int>> frontier;
    std::vector<OrbitVector> out;
    Key s = start_;
    seen.insert(s);
    frontier.push_back({s, 0});
    auto fnorm = [&](const Key& k) { return scale_ * std::hypot(k.first.embed(), k.second.embed()); };
    while (!frontier.empty()) {
      auto [v, depth] = frontier.front();
      frontier.pop_front();
      if (fnorm(v) <= R * (1 + 1e-9) && exact_norm_le(v.first, v.second, R)) out.push_back(make_vector(v.first, v.second, depth));
      for (const auto& g : moves) {
        Key w{g.a * v.first + g.b * v.second, g.c * v.first + g.d * v.second};
        if (fnorm(w) > prune) continue;
        if (seen.insert(w).second) {
          frontier.push_back({std::move(w), depth + 1});
          check_cap(seen.size());
        }
      }
    }
    sort_canonical(out);
    return out;
  }

  std::shared_ptr<const Lattice> lattice_;
  std::size_t cusp_index_;
  OrbitOptions options_;
  OrbitStrategy strategy_;
  double scale_ = 1;
  std::int64_t N_ = 0;  // congruence level, 0 otherwise
  std::int64_t r1_ = 0, r2_ = 0;
  std::pair<RingElement, RingElement> start_;
  mutable std::mutex mu_;
  mutable std::vector<OrbitVector> cache_;
  mutable double cached_radius_ = 0;
};

// Finite union of scaled orbits with multiset semantics.
class HolonomySet {
 public:
  struct Component {
    double scale;
    std::shared_ptr<const DiscreteOrbit> orbit;
  };

  HolonomySet() = default;
  explicit HolonomySet(std::vector<Component> components) : components_(std::move(components)) {
    for (const auto& c : components_) {
      if (!(c.scale > 0)) throw std::invalid_argument("holonomy scales must be positive");
      if (!c.orbit) throw std::invalid_argument("null orbit");
    }
  }

  const std::vector<Component>& components() const { return components_; }
  bool empty() const { return components_.empty(); }

  // Density of the union: sum of c_Gamma / scale^2 over components.
  double density() const {
    double d = 0;
    for (const auto& c : components_) d += c_gamma(c.orbit->lattice()) / (c.scale * c.scale);
    return d;
  }

  // Points of M S within radius R, component by component.
  template <class F>
  void for_each_point(const Mat2d& M, double R, F&& f) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const auto& c = components_[i];
      c.orbit->for_each_point(scaled(M, c.scale), R, [&](const Vec2d& p) { f(p, i); });
    }
  }

  std::vector<Vec2d> points(const Mat2d& M, double R) const {
    std::vector<Vec2d> out;
    for_each_point(M, R, [&](const Vec2d& p, std::size_t) { out.push_back(p); });
    return out;
  }
  std::vector<Vec2d> points(double R) const { return points(Mat2d{1, 0, 0, 1}, R); }

  std::int64_t count(const Mat2d& M, double R) const {
    std::int64_t n = 0;
    for (const auto& c : components_) n += c.orbit->count_image(scaled(M, c.scale), R);
    return n;
  }
  std::int64_t count(double R) const { return count(Mat2d{1, 0, 0, 1}, R); }

 private:
  std::vector<Component> components_;
};

inline HolonomySet assemble_holonomy(std::vector<HolonomySet::Component> components) {
  return HolonomySet(std::move(components));
}

}  // namespace orbitstat
