#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <mpfr.h>

#include "integer.hpp"

namespace orbitstat {

namespace detail {

class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Mpfr(const Mpfr& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mpfr& operator=(const Mpfr& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

using IntPoly = std::vector<Integer>;  // coefficient of x^i at index i

inline void poly_trim(IntPoly& p) {
  while (p.size() > 1 && p.back().is_zero()) p.pop_back();
}

inline IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
  IntPoly r(a.size() + b.size() - 1, Integer(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  poly_trim(r);
  return r;
}

// Exact division by a monic polynomial; throws if the remainder is nonzero.
inline IntPoly poly_div_exact(IntPoly a, const IntPoly& m) {
  const std::size_t dm = m.size() - 1;
  if (a.size() < m.size()) throw std::logic_error("poly_div_exact: degree");
  IntPoly q(a.size() - dm, Integer(0));
  for (std::size_t k = a.size(); k-- > dm;) {
    Integer c = a[k];
    q[k - dm] = c;
    if (c.is_zero()) continue;
    for (std::size_t i = 0; i <= dm; ++i) a[k - dm + i] -= c * m[i];
  }
  for (std::size_t i = 0; i < dm; ++i)
    if (!a[i].is_zero()) throw std::logic_error("poly_div_exact: nonzero remainder");
  return q;
}

inline IntPoly cyclotomic(int n) {
  IntPoly p(n + 1, Integer(0));
  p[0] = -1;
  p[n] = 1;
  for (int d = 1; d < n; ++d)
    if (n % d == 0) p = poly_div_exact(p, cyclotomic(d));
  return p;
}

// Minimal polynomial of 2cos(pi/q) from Phi_{2q}(y) with x = y + 1/y.
inline IntPoly hecke_min_poly(int q) {
  IntPoly cyc = cyclotomic(2 * q);
  const std::size_t two_d = cyc.size() - 1;
  const std::size_t d = two_d / 2;
  for (std::size_t k = 0; k <= two_d; ++k)
    if (cyc[k] != cyc[two_d - k]) throw std::logic_error("cyclotomic polynomial not palindromic");
  // D_j(x) = y^j + y^-j: D_0 = 2, D_1 = x, D_j = x D_{j-1} - D_{j-2}
  std::vector<IntPoly> dick(d + 1);
  dick[0] = {Integer(2)};
  if (d >= 1) dick[1] = {Integer(0), Integer(1)};
  for (std::size_t j = 2; j <= d; ++j) {
    IntPoly next(j + 1, Integer(0));
    for (std::size_t i = 0; i < dick[j - 1].size(); ++i) next[i + 1] += dick[j - 1][i];
    for (std::size_t i = 0; i < dick[j - 2].size(); ++i) next[i] -= dick[j - 2][i];
    dick[j] = next;
  }
  IntPoly m(d + 1, Integer(0));
  m[0] = cyc[d];
  for (std::size_t j = 1; j <= d; ++j)
    for (std::size_t i = 0; i < dick[j].size(); ++i) m[i] += cyc[d + j] * dick[j][i];
  poly_trim(m);
  return m;
}

}  // namespace detail

class RingElement;

// Z[lambda_q], lambda_q = 2cos(pi/q), as Z[x]/(min_poly).
class NumberRing {
  using Mpfr = detail::Mpfr;

 public:
  static constexpr mpfr_prec_t kPrecision = 256;

  NumberRing(int q, int max_degree) : q_(q), root_(kPrecision) {
    if (q < 3) throw std::invalid_argument("Hecke index q must be >= 3");
    min_poly_ = detail::hecke_min_poly(q);
    degree_ = static_cast<int>(min_poly_.size()) - 1;
    if (degree_ > max_degree)
      throw std::invalid_argument("q=" + std::to_string(q) + " needs degree " + std::to_string(degree_) +
                                  " above the configured limit " + std::to_string(max_degree));
    if (min_poly_.back() != Integer(1)) throw std::logic_error("minimal polynomial not monic");
    compute_root(root_, kPrecision);
    check_root();
    if (q <= 24) check_irreducible();
    // x^k mod min_poly for k = degree .. 2 degree - 2
    reduction_.resize(std::max(0, degree_ - 1));
    std::vector<Integer> cur(degree_, Integer(0));
    for (int i = 0; i < degree_; ++i) cur[i] = -min_poly_[i];  // x^degree
    for (int k = 0; k + 1 < degree_; ++k) {
      reduction_[k] = cur;
      Integer top = cur[degree_ - 1];
      for (int i = degree_ - 1; i > 0; --i) cur[i] = cur[i - 1] - top * min_poly_[i];
      cur[0] = -top * min_poly_[0];
    }
    Mpfr p(kPrecision);
    mpfr_set_ui(p.get(), 1, MPFR_RNDN);
    for (int i = 0; i < degree_; ++i) {
      powers_.push_back(p.to_double());
      mpfr_mul(p.get(), p.get(), root_.get(), MPFR_RNDN);
    }
    lambda_ = root_.to_double();
  }

  int q() const { return q_; }
  int degree() const { return degree_; }
  const std::vector<Integer>& min_poly() const { return min_poly_; }
  double lambda() const { return lambda_; }
  // Double approximations of lambda^i, each within half an ulp.
  const std::vector<double>& powers() const { return powers_; }
  const std::vector<std::vector<Integer>>& reduction() const { return reduction_; }

  // High precision root at the requested precision.
  void compute_root(Mpfr& out, mpfr_prec_t prec) const {
    mpfr_set_prec(out.get(), prec);
    Mpfr pi(prec);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    mpfr_div_ui(pi.get(), pi.get(), static_cast<unsigned long>(q_), MPFR_RNDN);
    mpfr_cos(out.get(), pi.get(), MPFR_RNDN);
    mpfr_mul_ui(out.get(), out.get(), 2, MPFR_RNDN);
  }
  const Mpfr& root() const { return root_; }

  // |min_poly(root)| at working precision.
  double root_residual() const {
    Mpfr acc(kPrecision), term(kPrecision);
    for (int i = degree_; i >= 0; --i) {
      mpfr_mul(acc.get(), acc.get(), root_.get(), MPFR_RNDN);
      mpz_class c = min_poly_[i].to_mpz();
      mpfr_add_z(acc.get(), acc.get(), c.get_mpz_t(), MPFR_RNDN);
    }
    return std::fabs(acc.to_double());
  }

  std::string min_poly_string() const {
    std::ostringstream os;
    bool first = true;
    for (int i = degree_; i >= 0; --i) {
      const Integer& c = min_poly_[i];
      if (c.is_zero()) continue;
      std::string mag = c.sign() < 0 ? (-c).str() : c.str();
      if (!first) os << (c.sign() < 0 ? " - " : " + ");
      else if (c.sign() < 0) os << "-";
      if (i == 0 || mag != "1") os << mag;
      if (i >= 1) os << "x";
      if (i >= 2) os << "^" << i;
      first = false;
    }
    return os.str();
  }

 private:
  void check_root() const {
    if (!(root_residual() < 1e-30)) throw std::logic_error("embedding root fails the residual check");
  }

  // A proper factor would have a subset of the conjugate roots as its roots
  // and integer coefficients.
  void check_irreducible() const {
    std::vector<long double> roots;
    for (int k = 1; k < q_; ++k)
      if (std::gcd(k, 2 * q_) == 1) roots.push_back(2.0L * std::cos(static_cast<long double>(M_PI) * k / q_));
    if (static_cast<int>(roots.size()) != degree_) throw std::logic_error("conjugate count mismatch");
    for (long double r : roots) {
      long double v = 0;
      for (int i = degree_; i >= 0; --i) v = v * r + static_cast<long double>(min_poly_[i].to_double());
      if (std::fabs(static_cast<double>(v)) > 1e-9) throw std::logic_error("conjugate is not a root");
    }
    const unsigned full = (1u << degree_) - 1u;
    for (unsigned mask = 1; mask < full; ++mask) {
      std::vector<long double> poly{1.0L};
      for (int i = 0; i < degree_; ++i) {
        if (!(mask & (1u << i))) continue;
        std::vector<long double> next(poly.size() + 1, 0.0L);
        for (std::size_t j = 0; j < poly.size(); ++j) {
          next[j + 1] += poly[j];
          next[j] -= roots[i] * poly[j];
        }
        poly = next;
      }
      bool integral = true;
      for (long double c : poly)
        if (std::fabs(static_cast<double>(c - std::nearbyint(c))) > 1e-7) { integral = false; break; }
      if (integral) throw std::logic_error("minimal polynomial is reducible");
    }
  }

  int q_;
  int degree_ = 0;
  std::vector<Integer> min_poly_;
  std::vector<std::vector<Integer>> reduction_;
  Mpfr root_;
  std::vector<double> powers_;
  double lambda_ = 0;
};

inline constexpr int kDefaultMaxRingDegree = 12;

inline std::shared_ptr<const NumberRing> ring_for_hecke(int q, int max_degree = kDefaultMaxRingDegree) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const NumberRing>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) {
    if (it->second->degree() > max_degree) throw std::invalid_argument("degree above the configured limit");
    return it->second;
  }
  auto ring = std::make_shared<const NumberRing>(q, max_degree);
  cache.emplace(q, ring);
  return ring;
}

// Floating embedding together with a certified absolute error bound.
struct Embedding {
  double value = 0;
  double error = 0;
};

class RingElement {
 public:
  using Coeffs = boost::container::small_vector<Integer, 4>;

  RingElement() = default;
  RingElement(const NumberRing* ring, Integer v) : ring_(ring), c_(ring->degree(), Integer(0)) { c_[0] = v; }
  RingElement(const NumberRing* ring, Coeffs c) : ring_(ring), c_(std::move(c)) {
    if (static_cast<int>(c_.size()) != ring->degree()) throw std::invalid_argument("coefficient length mismatch");
  }
  RingElement(const std::shared_ptr<const NumberRing>& ring, Integer v) : RingElement(ring.get(), v) {}

  static RingElement lambda(const NumberRing* ring) {
    RingElement r(ring, Integer(0));
    if (ring->degree() == 1) r.c_[0] = 1;  // q = 3
    else r.c_[1] = 1;
    return r;
  }

  const NumberRing* ring() const { return ring_; }
  const Coeffs& coeffs() const { return c_; }
  bool is_zero() const {
    for (const auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }
  // True when every coefficient above the constant term vanishes.
  bool is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return false;
    return true;
  }

  friend RingElement operator+(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    RingElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend RingElement operator-(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    RingElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
  }
  RingElement operator-() const {
    RingElement r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend RingElement operator*(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    const int d = a.ring_->degree();
    if (d == 1) return RingElement(a.ring_, a.c_[0] * b.c_[0]);
    std::vector<Integer> prod(2 * d - 1, Integer(0));
    for (int i = 0; i < d; ++i) {
      if (a.c_[i].is_zero()) continue;
      for (int j = 0; j < d; ++j)
        if (!b.c_[j].is_zero()) prod[i + j] += a.c_[i] * b.c_[j];
    }
    RingElement r(a.ring_, Integer(0));
    for (int i = 0; i < d; ++i) r.c_[i] = prod[i];
    const auto& red = a.ring_->reduction();
    for (int k = d; k < 2 * d - 1; ++k) {
      if (prod[k].is_zero()) continue;
      for (int i = 0; i < d; ++i) r.c_[i] += prod[k] * red[k - d][i];
    }
    return r;
  }
  friend RingElement operator*(const RingElement& a, const Integer& k) {
    RingElement r = a;
    for (auto& x : r.c_) x *= k;
    return r;
  }
  RingElement& operator+=(const RingElement& b) { return *this = *this + b; }
  RingElement& operator-=(const RingElement& b) { return *this = *this - b; }
  RingElement& operator*=(const RingElement& b) { return *this = *this * b; }

  friend bool operator==(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    return a.c_ == b.c_;
  }
  friend bool operator!=(const RingElement& a, const RingElement& b) { return !(a == b); }

  Embedding embed_certified() const {
    const auto& pw = ring_->powers();
    double v = 0, mag = 0;
    bool exact = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i].is_zero()) continue;
      double ci = c_[i].to_double();
      v += ci * pw[i];
      mag += std::fabs(ci) * std::fabs(pw[i]);
      if (i > 0 || !c_[i].is_small() || std::fabs(ci) >= 9007199254740992.0) exact = false;
    }
    if (exact) return {v, 0.0};
    const double u = std::ldexp(1.0, -53);
    return {v, (2.0 * static_cast<double>(c_.size()) + 4.0) * u * mag * (1.0 + 1e-10)};
  }
  double embed() const { return embed_certified().value; }

  // Exact sign: zero test on coefficients, then certified floats, then MPFR.
  int sign() const { return compare_to(0.0); }

  // Exact sign of (this - r) for a finite double r.
  int compare_to(double r) const { return compare_to(mpq_class(r)); }

  // Exact sign of (this - r) for a rational r.
  int compare_to(const mpq_class& r) const {
    if (is_rational()) {
      mpq_class c(c_[0].to_mpz());
      int s = cmp(c, r);
      return (s > 0) - (s < 0);
    }
    // Irrational, hence distinct from r.
    const double rd = r.get_d();
    Embedding e = embed_certified();
    double diff = e.value - rd;
    double bound = e.error + std::ldexp(std::fabs(diff) + 2 * std::fabs(rd), -51);
    if (diff > bound) return 1;
    if (diff < -bound) return -1;
    for (mpfr_prec_t prec = 2 * NumberRing::kPrecision;; prec *= 2) {
      detail::Mpfr root(prec), acc(prec), pw(prec), term(prec);
      ring_->compute_root(root, prec);
      mpfr_set_ui(pw.get(), 1, MPFR_RNDN);
      double mag = std::fabs(rd);
      for (std::size_t i = 0; i < c_.size(); ++i) {
        mpz_class c = c_[i].to_mpz();
        mpfr_mul_z(term.get(), pw.get(), c.get_mpz_t(), MPFR_RNDN);
        mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
        mag += std::fabs(term.to_double());
        mpfr_mul(pw.get(), pw.get(), root.get(), MPFR_RNDN);
      }
      mpfr_sub_q(acc.get(), acc.get(), r.get_mpq_t(), MPFR_RNDN);
      double v = acc.to_double();
      double err = (4.0 * static_cast<double>(c_.size()) + 8.0) * (mag + 1) * std::ldexp(1.0, -static_cast<int>(prec) + 4);
      if (v > err) return 1;
      if (v < -err) return -1;
      if (prec > (1 << 16)) throw std::runtime_error("sign determination did not converge");
    }
  }

  friend bool less(const RingElement& a, const RingElement& b) { return (a - b).sign() < 0; }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? " " : "") << c_[i];
    return os.str();
  }

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ull;
    for (const auto& x : c_) h = (h ^ x.hash()) * 1099511628211ull;
    return h;
  }

 private:
  static void check_same(const RingElement& a, const RingElement& b) {
    if (a.ring_ != b.ring_) throw std::invalid_argument("ring mismatch");
  }

  const NumberRing* ring_ = nullptr;
  Coeffs c_;
};

}  // namespace orbitstat
