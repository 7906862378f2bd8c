#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace orbitstat {

// Bounded Borel set Omega in the plane; dilates are R * Omega.
class BorelShape {
 public:
  enum class Kind { disk, square, sector, annulus, polygon };

  static BorelShape disk() { return BorelShape(Kind::disk); }
  // [-1, 1]^2
  static BorelShape square() { return BorelShape(Kind::square); }
  // {0 <= arg p <= angle, |p| <= 1}
  static BorelShape sector(double angle) {
    if (!(angle > 0 && angle <= 2 * std::numbers::pi)) throw std::invalid_argument("sector angle out of range");
    BorelShape s(Kind::sector);
    s.param_ = angle;
    return s;
  }
  // {r0 <= |p| <= 1}
  static BorelShape annulus(double r0) {
    if (!(r0 >= 0 && r0 < 1)) throw std::invalid_argument("annulus inner radius out of range");
    BorelShape s(Kind::annulus);
    s.param_ = r0;
    return s;
  }
  // Simple polygon, vertices in order; star-shaped about the origin for gauge().
  static BorelShape polygon(std::vector<Vec2d> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    BorelShape s(Kind::polygon);
    s.vertices_ = std::move(vertices);
    if (!(s.area() > 0)) throw std::invalid_argument("polygon must have positive area (counterclockwise order)");
    return s;
  }

  Kind kind() const { return kind_; }
  std::string name() const {
    switch (kind_) {
      case Kind::disk: return "disk";
      case Kind::square: return "square";
      case Kind::sector: return "sector";
      case Kind::annulus: return "annulus";
      case Kind::polygon: return "polygon";
    }
    return "?";
  }

  bool contains(const Vec2d& p) const {
    switch (kind_) {
      case Kind::disk: return p.x * p.x + p.y * p.y <= 1;
      case Kind::square: return std::fabs(p.x) <= 1 && std::fabs(p.y) <= 1;
      case Kind::sector: {
        if (p.x * p.x + p.y * p.y > 1) return false;
        double t = std::atan2(p.y, p.x);
        if (t < 0) t += 2 * std::numbers::pi;
        return t <= param_ || (p.x == 0 && p.y == 0);
      }
      case Kind::annulus: {
        const double r2 = p.x * p.x + p.y * p.y;
        return r2 <= 1 && r2 >= param_ * param_;
      }
      case Kind::polygon: {
        bool in = false;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
          const Vec2d& a = vertices_[i];
          const Vec2d& b = vertices_[j];
          if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
        }
        return in;
      }
    }
    return false;
  }

  // p in R * Omega.
  bool contains_dilate(const Vec2d& p, double R) const { return contains({p.x / R, p.y / R}); }

  double area() const {
    switch (kind_) {
      case Kind::disk: return std::numbers::pi;
      case Kind::square: return 4.0;
      case Kind::sector: return param_ / 2;
      case Kind::annulus: return std::numbers::pi * (1 - param_ * param_);
      case Kind::polygon: {
        double s = 0;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) s += wedge(vertices_[i], vertices_[(i + 1) % n]);
        return s / 2;
      }
    }
    return 0;
  }

  double circumradius() const {
    if (kind_ == Kind::square) return std::sqrt(2.0);
    if (kind_ == Kind::polygon) {
      double r = 0;
      for (const auto& v : vertices_) r = std::max(r, norm(v));
      return r;
    }
    return 1.0;
  }

  // Dilates are nested (R1 <= R2 implies R1 Omega inside R2 Omega).
  bool star_shaped() const { return kind_ != Kind::annulus; }

  // Minkowski gauge inf{t > 0 : p in t Omega}; infinity if no dilate contains p.
  double gauge(const Vec2d& p) const {
    const double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
      case Kind::disk: return norm(p);
      case Kind::square: return std::max(std::fabs(p.x), std::fabs(p.y));
      case Kind::sector: {
        if (p.x == 0 && p.y == 0) return 0;
        double t = std::atan2(p.y, p.x);
        if (t < 0) t += 2 * std::numbers::pi;
        return t <= param_ ? norm(p) : inf;
      }
      case Kind::annulus: throw std::logic_error("annulus dilates are not nested");
      case Kind::polygon: {
        if (p.x == 0 && p.y == 0) return 0;
        // distance to the boundary along the ray through p
        double best = 0;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
          const Vec2d& a = vertices_[i];
          const Vec2d& b = vertices_[(i + 1) % n];
          const Vec2d e{b.x - a.x, b.y - a.y};
          const double den = wedge(p, e);
          if (den == 0) continue;
          const double s = wedge(a, e) / den;        // ray parameter: s p on the edge line
          const double u = wedge(a, p) / den;        // edge parameter
          if (s > 0 && u >= 0 && u <= 1) best = std::max(best, s);
        }
        return best > 0 ? 1.0 / best : inf;
      }
    }
    return inf;
  }

  const std::vector<Vec2d>& vertices() const { return vertices_; }
  double parameter() const { return param_; }

 private:
  explicit BorelShape(Kind k) : kind_(k) {}
  Kind kind_;
  double param_ = 0;
  std::vector<Vec2d> vertices_;
};

}  // namespace orbitstat
