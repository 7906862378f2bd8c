#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>

#include "number_ring.hpp"

namespace orbitstat {

template <class T>
struct Vec2 {
  T x, y;
};

// [[a, b], [c, d]]
template <class T>
struct Mat2 {
  T a, b, c, d;

  T det() const { return a * d - b * c; }
  Vec2<T> operator*(const Vec2<T>& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  // Inverse for determinant one.
  Mat2 adjugate() const { return {d, -b, -c, a}; }
  Mat2 operator-() const { return {-a, -b, -c, -d}; }
  friend bool operator==(const Mat2& m, const Mat2& n) { return m.a == n.a && m.b == n.b && m.c == n.c && m.d == n.d; }
};

using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;
using Vec2i = Vec2<std::int64_t>;
using Mat2i = Mat2<std::int64_t>;

// Determinant-one matrix over Z[lambda_q].
using GroupElement = Mat2<RingElement>;

inline GroupElement make_group_element(RingElement a, RingElement b, RingElement c, RingElement d) {
  GroupElement g{std::move(a), std::move(b), std::move(c), std::move(d)};
  if (g.det() != RingElement(g.a.ring(), Integer(1))) throw std::invalid_argument("group element must have determinant 1");
  return g;
}

inline GroupElement ring_matrix(const NumberRing* ring, Integer a, Integer b, Integer c, Integer d) {
  return make_group_element(RingElement(ring, a), RingElement(ring, b), RingElement(ring, c), RingElement(ring, d));
}

inline GroupElement group_identity(const NumberRing* ring) { return ring_matrix(ring, 1, 0, 0, 1); }
inline GroupElement group_S(const NumberRing* ring) { return ring_matrix(ring, 0, -1, 1, 0); }
inline GroupElement group_translation(const RingElement& t) {
  const NumberRing* r = t.ring();
  return {RingElement(r, Integer(1)), t, RingElement(r, Integer(0)), RingElement(r, Integer(1))};
}

inline Mat2d to_double(const GroupElement& g) { return {g.a.embed(), g.b.embed(), g.c.embed(), g.d.embed()}; }
inline Mat2d to_double(const Mat2i& g) {
  return {static_cast<double>(g.a), static_cast<double>(g.b), static_cast<double>(g.c), static_cast<double>(g.d)};
}

inline Mat2d inverse(const Mat2d& m) {
  double det = m.det();
  if (det == 0) throw std::invalid_argument("singular matrix");
  return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

// Spectral norm of a real 2x2 matrix.
inline double op_norm(const Mat2d& m) {
  double s = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  double det = m.det();
  double disc = std::sqrt(std::max(0.0, s * s - 4 * det * det));
  return std::sqrt(0.5 * (s + disc));
}

inline Mat2d rotation(double theta) { return {std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)}; }
inline Mat2d diag(double p, double q) { return {p, 0, 0, q}; }
inline Mat2d unipotent(double x) { return {1, x, 0, 1}; }
inline Mat2d scaled(const Mat2d& m, double s) { return {m.a * s, m.b * s, m.c * s, m.d * s}; }

// Mobius action on the upper half plane.
inline std::complex<double> mobius(const Mat2d& m, std::complex<double> z) { return (m.a * z + m.b) / (m.c * z + m.d); }

inline double norm(const Vec2d& v) { return std::hypot(v.x, v.y); }
inline double wedge(const Vec2d& u, const Vec2d& v) { return u.x * v.y - u.y * v.x; }

template <class T>
std::ostream& operator<<(std::ostream& os, const Mat2<T>& m) {
  return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}
inline std::ostream& operator<<(std::ostream& os, const RingElement& r) { return os << "(" << r.str() << ")"; }

}  // namespace orbitstat
