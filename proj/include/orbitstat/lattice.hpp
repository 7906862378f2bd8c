#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "matrix.hpp"

namespace orbitstat {

enum class LatticeKind { sl2z, congruence, hecke, custom };

inline const char* to_string(LatticeKind k) {
  switch (k) {
    case LatticeKind::sl2z: return "sl2z";
    case LatticeKind::congruence: return "congruence";
    case LatticeKind::hecke: return "hecke";
    case LatticeKind::custom: return "custom";
  }
  return "?";
}

// Point of R u {inf}: num/den with den >= 0, den == 0 meaning infinity.
struct CuspPoint {
  RingElement num, den;
  bool is_infinity() const { return den.is_zero(); }
  double value() const { return is_infinity() ? INFINITY : num.embed() / den.embed(); }
  std::string str() const {
    if (is_infinity()) return "inf";
    if (num.is_rational() && den.is_rational()) {
      if (den.coeffs()[0] == Integer(1)) return num.coeffs()[0].str();
      return num.coeffs()[0].str() + "/" + den.coeffs()[0].str();
    }
    std::ostringstream os;
    os << num.embed() / den.embed();
    return os.str();
  }
};

// sigma = sigma_base * diag(sqrt(width), 1/sqrt(width)). Orbit vectors of the
// cusp are sqrt(width) times vectors with entries in the ring.
struct CuspData {
  CuspPoint representative;
  GroupElement sigma_base;
  RingElement width;
  GroupElement stabilizer;

  double scale() const { return std::sqrt(width.embed()); }
  Mat2d sigma() const {
    double s = scale();
    Mat2d b = to_double(sigma_base);
    return b * diag(s, 1.0 / s);
  }
};

// Fundamental domain of the ambient Hecke-type group:
// |Re z| <= half_width, Im z >= y_floor, and |z| >= 1 when unit_circle.
struct DomainSpec {
  double half_width = 0.5;
  double y_floor = std::sqrt(3.0) / 2;
  bool unit_circle = true;
  bool contains(std::complex<double> z, double tol = 0) const {
    if (std::fabs(z.real()) > half_width + tol) return false;
    if (z.imag() < y_floor - tol) return false;
    if (unit_circle && std::norm(z) < 1 - tol) return false;
    return true;
  }
};

struct Lattice {
  LatticeKind kind = LatticeKind::sl2z;
  int q = 3;      // ambient Hecke group index (3 for SL2(Z) and congruence subgroups)
  int level = 1;  // N for congruence subgroups
  std::shared_ptr<const NumberRing> ring;
  std::vector<GroupElement> generators;
  bool contains_minus_identity = true;
  double covolume = 0;
  double delta = 2.0 / 3.0;
  std::vector<CuspData> cusps;
  std::optional<DomainSpec> domain;
  // Lifts to SL2(Z) of representatives of the ambient group modulo this one
  // (mod +-1). Only for congruence subgroups; {I} otherwise.
  std::vector<Mat2i> coset_reps;

  const NumberRing* rp() const { return ring.get(); }
  double lambda() const { return ring->lambda(); }

  // Membership for congruence subgroups; other kinds only check determinant.
  bool contains(const GroupElement& g) const {
    if (g.det() != RingElement(rp(), Integer(1))) return false;
    if (kind != LatticeKind::congruence || level == 1) return true;
    auto mod = [&](const RingElement& x, std::int64_t target) {
      mpz_class v = x.coeffs()[0].to_mpz() - target;
      return mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(level)) != 0;
    };
    return mod(g.a, 1) && mod(g.b, 0) && mod(g.c, 0) && mod(g.d, 1);
  }

  std::string name() const {
    switch (kind) {
      case LatticeKind::sl2z: return "sl2z";
      case LatticeKind::congruence: return "gamma" + std::to_string(level);
      case LatticeKind::hecke: return "hecke" + std::to_string(q);
      case LatticeKind::custom: return "custom";
    }
    return "?";
  }

  // Canonical description used for cache keys and output echo.
  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "kind=" << to_string(kind) << ";q=" << q << ";N=" << level << ";delta=" << delta << ";covolume=" << covolume
       << ";minus_identity=" << contains_minus_identity;
    for (const auto& g : generators) os << ";gen=" << g.a.str() << "," << g.b.str() << "," << g.c.str() << "," << g.d.str();
    for (const auto& c : cusps) os << ";cusp=" << c.representative.str() << ":" << c.width.str();
    return os.str();
  }
};

inline double c_gamma(const Lattice& L) {
  return (L.contains_minus_identity ? 2.0 : 1.0) / (std::numbers::pi * L.covolume);
}

namespace detail {

inline std::int64_t mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return std::abs(a);
  }
  std::int64_t x1, y1;
  std::int64_t g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

// SL2(Z) matrix with first column (a, c), gcd(a, c) = 1.
inline Mat2i complete_column(std::int64_t a, std::int64_t c) {
  std::int64_t x, y;
  std::int64_t g = ext_gcd(a, c, x, y);  // a x + c y = 1
  if (g != 1) throw std::invalid_argument("column is not primitive");
  return {a, -y, c, x};
}

inline void check_delta(double delta) {
  if (!(delta > 0 && delta <= 2.0 / 3.0 + 1e-15)) throw std::invalid_argument("delta must lie in (0, 2/3]");
}

inline CuspData cusp_from_base(const GroupElement& base, const RingElement& width) {
  const NumberRing* r = width.ring();
  CuspData cd;
  cd.sigma_base = base;
  cd.width = width;
  cd.representative = {base.a, base.c};
  if (cd.representative.den.sign() < 0) cd.representative = {-base.a, -base.c};
  cd.stabilizer = base * group_translation(width) * base.adjugate();
  (void)r;
  return cd;
}

using ModMat = std::array<std::int64_t, 4>;

inline ModMat mod_mul(const ModMat& m, const ModMat& n, std::int64_t N) {
  return {mod(m[0] * n[0] + m[1] * n[2], N), mod(m[0] * n[1] + m[1] * n[3], N), mod(m[2] * n[0] + m[3] * n[2], N),
          mod(m[2] * n[1] + m[3] * n[3], N)};
}

inline ModMat mod_reduce(const Mat2i& m, std::int64_t N) { return {mod(m.a, N), mod(m.b, N), mod(m.c, N), mod(m.d, N)}; }

inline ModMat mod_neg(const ModMat& m, std::int64_t N) { return {mod(-m[0], N), mod(-m[1], N), mod(-m[2], N), mod(-m[3], N)}; }

// Breadth-first enumeration of SL2(Z/N) by right multiplication with S and T,
// keeping an SL2(Z) lift for every element.
inline std::map<ModMat, Mat2i> sl2_mod_n(std::int64_t N) {
  const Mat2i S{0, -1, 1, 0}, T{1, 1, 0, 1};
  std::map<ModMat, Mat2i> lifts;
  std::queue<ModMat> todo;
  ModMat id = mod_reduce(Mat2i{1, 0, 0, 1}, N);
  lifts[id] = {1, 0, 0, 1};
  todo.push(id);
  while (!todo.empty()) {
    ModMat g = todo.front();
    todo.pop();
    Mat2i lift = lifts[g];
    for (const Mat2i& s : {S, T}) {
      Mat2i nl = lift * s;
      ModMat ng = mod_reduce(nl, N);
      if (!lifts.count(ng)) {
        lifts[ng] = nl;
        todo.push(ng);
      }
    }
  }
  return lifts;
}

}  // namespace detail

inline Lattice build_hecke(int q, double delta = 2.0 / 3.0) {
  if (q < 3) throw std::invalid_argument("Hecke index q must be >= 3");
  detail::check_delta(delta);
  Lattice L;
  L.kind = q == 3 ? LatticeKind::sl2z : LatticeKind::hecke;
  L.q = q;
  L.ring = ring_for_hecke(q);
  const NumberRing* r = L.rp();
  RingElement lam = RingElement::lambda(r);
  L.generators = {group_S(r), group_translation(lam)};
  L.contains_minus_identity = true;
  L.covolume = std::numbers::pi * (1.0 - 2.0 / q);
  L.delta = delta;
  L.cusps = {detail::cusp_from_base(group_identity(r), lam)};
  double l = r->lambda();
  L.domain = DomainSpec{l / 2, std::sqrt(1.0 - l * l / 4), true};
  L.coset_reps = {{1, 0, 0, 1}};
  return L;
}

inline Lattice build_sl2z(double delta = 2.0 / 3.0) { return build_hecke(3, delta); }

inline std::int64_t congruence_index(std::int64_t N) {
  std::int64_t idx = N * N * N, n = N;
  for (std::int64_t p = 2; p <= n; ++p) {
    if (n % p) continue;
    idx = idx / (p * p) * (p * p - 1);
    while (n % p == 0) n /= p;
  }
  return idx;
}

inline Lattice build_congruence(int N, double delta = 2.0 / 3.0) {
  if (N < 1) throw std::invalid_argument("level N must be >= 1");
  if (N == 1) return build_sl2z(delta);
  detail::check_delta(delta);
  Lattice L;
  L.kind = LatticeKind::congruence;
  L.q = 3;
  L.level = N;
  L.ring = ring_for_hecke(3);
  L.delta = delta;
  const NumberRing* r = L.rp();
  L.contains_minus_identity = N <= 2;
  const std::int64_t index = congruence_index(N);
  const std::int64_t psl_index = L.contains_minus_identity ? index : index / 2;
  L.covolume = psl_index * std::numbers::pi / 3.0;
  L.domain = DomainSpec{};

  auto lifts = detail::sl2_mod_n(N);
  if (static_cast<std::int64_t>(lifts.size()) != index) throw std::logic_error("SL2(Z/N) enumeration size mismatch");
  // Schreier generators of the kernel of SL2(Z) -> SL2(Z/N).
  const Mat2i S{0, -1, 1, 0}, T{1, 1, 0, 1};
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>> seen;
  for (const auto& [g, t] : lifts) {
    for (const Mat2i& s : {S, T}) {
      Mat2i ts = t * s;
      const Mat2i& rep = lifts.at(detail::mod_reduce(ts, N));
      Mat2i gen = ts * rep.adjugate();
      if (gen == Mat2i{1, 0, 0, 1}) continue;
      if (!seen.insert({gen.a, gen.b, gen.c, gen.d}).second) continue;
      L.generators.push_back(ring_matrix(r, gen.a, gen.b, gen.c, gen.d));
    }
  }
  // Coset representatives modulo +-1.
  std::set<detail::ModMat> used;
  for (const auto& [g, t] : lifts) {
    if (used.count(g)) continue;
    used.insert(g);
    used.insert(detail::mod_neg(g, N));
    L.coset_reps.push_back(t);
  }
  // Cusps: primitive residue vectors mod N up to sign.
  std::set<std::pair<std::int64_t, std::int64_t>> classes;
  auto add_cusp = [&](std::int64_t a, std::int64_t c) {
    std::pair<std::int64_t, std::int64_t> key{detail::mod(a, N), detail::mod(c, N)};
    std::pair<std::int64_t, std::int64_t> neg{detail::mod(-a, N), detail::mod(-c, N)};
    if (classes.count(key) || classes.count(neg)) return;
    classes.insert(key);
    Mat2i base = detail::complete_column(a, c);
    GroupElement gb = ring_matrix(r, base.a, base.b, base.c, base.d);
    // Width: least h with +-base T^h base^-1 in Gamma(N).
    std::int64_t width = 0;
    for (std::int64_t h = 1; h <= N && !width; ++h) {
      Mat2i m = base * Mat2i{1, h, 0, 1} * base.adjugate();
      GroupElement gm = ring_matrix(r, m.a, m.b, m.c, m.d);
      if (L.contains(gm) || (L.contains_minus_identity && L.contains(-gm))) width = h;
    }
    L.cusps.push_back(detail::cusp_from_base(gb, RingElement(r, Integer(width))));
  };
  const std::size_t expected = static_cast<std::size_t>(L.contains_minus_identity ? index / N : index / (2 * N));
  add_cusp(1, 0);
  // Small primitive lifts of every residue class, ordered by height.
  for (std::int64_t h = 1; classes.size() < expected && h < 64 * N; ++h) {
    for (std::int64_t c = 1; c <= h; ++c) {
      for (std::int64_t a = -h; a <= h; ++a) {
        if (std::max(std::abs(a), c) != h || std::gcd(a, c) != 1) continue;
        add_cusp(a, c);
      }
    }
  }
  if (L.cusps.size() != expected) throw std::logic_error("cusp enumeration incomplete");
  return L;
}

// Custom lattice: caller supplies generators, covolume, the width of the cusp
// at infinity and optionally a fundamental domain.
struct CustomLatticeSpec {
  int q = 3;
  std::vector<GroupElement> generators;
  bool contains_minus_identity = true;
  double covolume = 0;
  double delta = 2.0 / 3.0;
  std::optional<RingElement> cusp_width;
  std::optional<DomainSpec> domain;
};

inline Lattice build_custom(const CustomLatticeSpec& spec) {
  detail::check_delta(spec.delta);
  if (!(spec.covolume > 0)) throw std::invalid_argument("covolume must be positive");
  Lattice L;
  L.kind = LatticeKind::custom;
  L.q = spec.q;
  L.ring = ring_for_hecke(spec.q);
  L.generators = spec.generators;
  for (const auto& g : L.generators)
    if (g.a.ring() != L.rp() || g.det() != RingElement(L.rp(), Integer(1)))
      throw std::invalid_argument("custom generator is not a determinant-one matrix over the ring");
  L.contains_minus_identity = spec.contains_minus_identity;
  L.covolume = spec.covolume;
  L.delta = spec.delta;
  RingElement w = spec.cusp_width ? *spec.cusp_width : RingElement::lambda(L.rp());
  if (w.sign() <= 0) throw std::invalid_argument("cusp width must be positive");
  L.cusps = {detail::cusp_from_base(group_identity(L.rp()), w)};
  L.domain = spec.domain;
  L.coset_reps = {{1, 0, 0, 1}};
  return L;
}

// g fixes infinity iff the lower-left entry is zero.
inline bool cusp_membership_test(const Lattice&, const GroupElement& g) { return g.c.is_zero(); }

struct ReducedPoint {
  std::complex<double> z;
  GroupElement word;  // word . z_in = z
};

// Reduction into the standard domain of the ambient Hecke group.
inline ReducedPoint reduce_point(const Lattice& L, std::complex<double> z, int max_iter = 10000) {
  if (!(z.imag() > 0)) throw std::invalid_argument("reduce_point needs Im z > 0");
  if (L.kind == LatticeKind::custom && !L.domain) throw std::invalid_argument("custom lattice has no fundamental domain");
  const NumberRing* r = L.rp();
  const double lam = r->lambda();
  const RingElement lam_e = RingElement::lambda(r);
  GroupElement word = group_identity(r);
  const GroupElement S = group_S(r);
  const double tol = 1e-14;
  for (int it = 0; it < max_iter; ++it) {
    double n = std::floor(z.real() / lam + 0.5);
    if (n != 0) {
      z -= n * lam;
      word = group_translation(lam_e * Integer(static_cast<std::int64_t>(-n))) * word;
    }
    double m = std::norm(z);
    if (m < 1 - tol) {
      z = -1.0 / z;
      word = S * word;
      continue;
    }
    if (m <= 1 + tol && z.real() > tol) {
      z = -1.0 / z;
      word = S * word;
    }
    return {z, word};
  }
  throw std::runtime_error("reduce_point did not converge");
}

// Gamma x = lambda Lambda_a with lambda = |x| / sqrt(tr(S gamma_x)),
// gamma_x the generator of the stabilizer of x.
struct ScalingResult {
  double factor;
  std::size_t cusp_index;
  GroupElement stabilizer;  // generator of Gamma_x
};

inline ScalingResult scaling_factor_detail(const Vec2d& x, const Lattice& L) {
  if (x.x == 0 && x.y == 0) throw std::invalid_argument("scaling_factor of the zero vector");
  if (L.kind == LatticeKind::custom) throw std::invalid_argument("scaling_factor needs a built-in lattice");
  const NumberRing* r = L.rp();
  const double lam = r->lambda();
  const RingElement lam_e = RingElement::lambda(r);
  const GroupElement S = group_S(r);
  GroupElement word = group_identity(r);  // word . x is the current vector
  Vec2d v = x;
  const double nx = norm(x);
  for (int it = 0;; ++it) {
    if (std::fabs(v.y) <= 1e-9 * nx) break;
    if (it > 200 || std::fabs(word.a.embed()) + std::fabs(word.b.embed()) + std::fabs(word.c.embed()) +
                            std::fabs(word.d.embed()) > 1e7)
      throw std::invalid_argument("vector direction is not fixed by a parabolic element");
    // Translate so |v.x| <= lam |v.y| / 2, then swap.
    double n = std::floor(v.x / (lam * v.y) + 0.5);
    if (n != 0) {
      v.x -= n * lam * v.y;
      word = group_translation(lam_e * Integer(static_cast<std::int64_t>(-n))) * word;
    }
    v = {-v.y, v.x};
    word = S * word;
  }
  // x = word^-1 (mu e1); the stabilizer of x is word^-1 T_w word for the cusp width w.
  GroupElement inv = word.adjugate();
  std::size_t cusp = 0;
  if (L.kind == LatticeKind::congruence) {
    const std::int64_t N = L.level;
    std::int64_t a = detail::mod(inv.a.coeffs()[0].small(), N), c = detail::mod(inv.c.coeffs()[0].small(), N);
    bool found = false;
    for (std::size_t i = 0; i < L.cusps.size() && !found; ++i) {
      std::int64_t ca = detail::mod(L.cusps[i].sigma_base.a.coeffs()[0].small(), N);
      std::int64_t cc = detail::mod(L.cusps[i].sigma_base.c.coeffs()[0].small(), N);
      if ((ca == a && cc == c) || (ca == detail::mod(-a, N) && cc == detail::mod(-c, N))) {
        cusp = i;
        found = true;
      }
    }
    if (!found) throw std::logic_error("cusp class not found");
  }
  const RingElement& w = L.cusps[cusp].width;
  GroupElement stab = inv * group_translation(w) * word;
  double tr = (S * stab).a.embed() + (S * stab).d.embed();
  return {nx / std::sqrt(tr), cusp, stab};
}

inline double scaling_factor(const Vec2d& x, const Lattice& L) { return scaling_factor_detail(x, L).factor; }

}  // namespace orbitstat
