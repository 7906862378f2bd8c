#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "lattice.hpp"
#include "orbit_tree.hpp"

namespace orbitstat {

// Admissible determinants c > 0 with multiplicities phi_ab(c), sorted by value.
struct PairTable {
  std::shared_ptr<const Lattice> lattice;
  std::size_t cusp_a = 0, cusp_b = 0;
  double max_c = 0;
  std::vector<RingElement> keys;      // exact determinant values
  std::vector<double> values;         // embeddings of keys
  std::vector<std::int64_t> multiplicity;
  bool is_homothetic_pair = false;    // delta_ab; 0 is admissible iff true

  std::size_t size() const { return values.size(); }
  bool zero_admissible() const { return is_homothetic_pair; }

  // phi_ab(c) for an exact key, 0 if c is not admissible.
  std::int64_t phi(const RingElement& c) const {
    const double v = c.embed();
    auto it = std::lower_bound(values.begin(), values.end(), v * (1 - 1e-12) - 1e-12);
    for (; it != values.end() && *it <= v * (1 + 1e-12) + 1e-12; ++it) {
      const std::size_t i = static_cast<std::size_t>(it - values.begin());
      if (keys[i] == c) return multiplicity[i];
    }
    return 0;
  }
  std::int64_t phi(std::int64_t c) const { return phi(RingElement(lattice->rp(), Integer(c))); }
};

namespace detail {

inline PairTable finish_table(PairTable t, std::vector<std::pair<RingElement, std::int64_t>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& p, const auto& q) { return less(p.first, q.first); });
  for (auto& [k, m] : entries) {
    t.values.push_back(k.embed());
    t.keys.push_back(std::move(k));
    t.multiplicity.push_back(m);
  }
  return t;
}

}  // namespace detail

// Box count: phi_ab(c) = #{0 < a <= c : (a, c) in sigma_a^-1 Gamma sigma_b e1}.
inline PairTable build_pair_table(std::shared_ptr<const Lattice> L, std::size_t cusp_a, std::size_t cusp_b, double C) {
  if (!L) throw std::invalid_argument("null lattice");
  if (!(C > 0)) throw std::invalid_argument("C must be positive");
  if (!L->contains_minus_identity) throw std::invalid_argument("pair table needs -I in the lattice");
  if (cusp_a >= L->cusps.size() || cusp_b >= L->cusps.size()) throw std::invalid_argument("cusp index out of range");
  PairTable t;
  t.lattice = L;
  t.cusp_a = cusp_a;
  t.cusp_b = cusp_b;
  t.max_c = C;
  t.is_homothetic_pair = cusp_a == cusp_b;
  const NumberRing* ring = L->rp();
  std::vector<std::pair<RingElement, std::int64_t>> entries;

  if (L->kind == LatticeKind::custom) throw std::invalid_argument("pair tables need a built-in lattice");

  if (L->kind == LatticeKind::sl2z) {
    // the tree has phi(c) nodes at height c; a totient sieve gives the same histogram
    const auto cmax = static_cast<std::int64_t>(std::floor(C));
    std::vector<std::int64_t> hist(static_cast<std::size_t>(cmax) + 1);
    std::iota(hist.begin(), hist.end(), std::int64_t{0});
    for (std::int64_t p = 2; p <= cmax; ++p)
      if (hist[static_cast<std::size_t>(p)] == p)
        for (std::int64_t m = p; m <= cmax; m += p) hist[static_cast<std::size_t>(m)] -= hist[static_cast<std::size_t>(m)] / p;
    for (std::size_t c = 1; c < hist.size(); ++c)
      if (hist[c]) entries.push_back({RingElement(ring, Integer(static_cast<std::int64_t>(c))), hist[c]});
    t.values.reserve(entries.size());
    for (auto& [k, m] : entries) {
      t.values.push_back(k.embed());
      t.keys.push_back(std::move(k));
      t.multiplicity.push_back(m);
    }
    return t;
  }

  if (L->kind == LatticeKind::congruence) {
    // sigma_a^-1 Lambda_b = {(m, N n) : (m, n) primitive, (m, n) = +-rho mod N}.
    const std::int64_t N = L->level;
    GroupElement rel = L->cusps[cusp_a].sigma_base.adjugate() * L->cusps[cusp_b].sigma_base;
    const std::int64_t r1 = detail::mod(rel.a.coeffs()[0].small(), N), r2 = detail::mod(rel.c.coeffs()[0].small(), N);
    auto ok = [&](std::int64_t m, std::int64_t n) {
      const std::int64_t a = detail::mod(m, N), c = detail::mod(n, N);
      return (a == r1 && c == r2) || (a == detail::mod(-r1, N) && c == detail::mod(-r2, N));
    };
    const std::int64_t nmax = static_cast<std::int64_t>(std::floor(C / static_cast<double>(N)));
    std::vector<std::int64_t> hist(static_cast<std::size_t>(std::max<std::int64_t>(nmax, 0)) + 1, 0);
    if (nmax >= 1) {
      walk_tree_int(nmax, [&](std::int64_t a, std::int64_t n, int) {
        // the N translates a + k n inside (0, N n]
        const std::int64_t k0 = detail::floor_div(-a, n) + 1;
        for (std::int64_t k = k0; k < k0 + N; ++k)
          if (ok(a + k * n, n)) ++hist[static_cast<std::size_t>(n)];
        return true;
      });
    }
    for (std::size_t n = 1; n < hist.size(); ++n)
      if (hist[n]) entries.push_back({RingElement(ring, Integer(static_cast<std::int64_t>(n) * N)), hist[n]});
    return detail::finish_table(std::move(t), std::move(entries));
  }

  // Hecke group: sigma^-1 Lambda = {(v1, lambda v2) : v in Gamma e1}; every
  // tree node with second coordinate v2 gives one class with c = lambda v2.
  const RingElement lam = RingElement::lambda(ring);
  const double lf = ring->lambda();
  struct KeyHash {
    std::size_t operator()(const RingElement& r) const { return r.hash(); }
  };
  struct KeyEq {
    bool operator()(const RingElement& a, const RingElement& b) const { return a.coeffs() == b.coeffs(); }
  };
  std::unordered_map<RingElement, std::int64_t, KeyHash, KeyEq> counts;
  const double cut = C / lf;
  walk_tree_exact(ring, cut, [&](const RingElement&, const RingElement& c, double, double cf, int) {
    if (cf > cut * (1 - 1e-12)) {
      if ((lam * c).compare_to(C) > 0) return false;
    }
    ++counts[c];
    return true;
  });
  for (auto& [c, m] : counts) entries.push_back({lam * c, m});
  return detail::finish_table(std::move(t), std::move(entries));
}

// Sum over admissible 0 < c < T of phi_ab(c).
inline std::int64_t partial_sum(const PairTable& t, double T) {
  if (T > t.max_c) throw std::invalid_argument("T exceeds the table range");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < t.size() && t.values[i] < T; ++i) {
    if (t.values[i] > T * (1 - 1e-12) && t.keys[i].compare_to(T) >= 0) break;
    s += t.multiplicity[i];
  }
  return s;
}

struct PhiValue {
  double value = 0;
  double tail_bound = 0;  // uncertainty from the analytic tail completion
};

// Evaluates Phi_ab(t) = t sum_{c >= t} phi_ab(c) / c^3 with the sum truncated at
// C_trunc and completed by the main term c_Gamma / C_trunc.
class PhiEvaluator {
 public:
  PhiEvaluator(const PairTable& table, double C_trunc) : table_(&table), C_(C_trunc) {
    if (C_trunc > table.max_c * (1 + 1e-12)) throw std::invalid_argument("C_trunc exceeds the table range");
    if (!(C_trunc > 0)) throw std::invalid_argument("C_trunc must be positive");
    cg_ = orbitstat::c_gamma(*table.lattice);
    delta_ = table.lattice->delta;
    const std::size_t n = table.size();
    std::size_t end = 0;
    while (end < n && table.values[end] <= C_trunc * (1 + 1e-15)) ++end;
    vals_.assign(table.values.begin(), table.values.begin() + static_cast<std::ptrdiff_t>(end));
    suffix_.assign(end + 1, 0.0);
    for (std::size_t i = end; i-- > 0;) {
      const double c = vals_[i];
      suffix_[i] = suffix_[i + 1] + static_cast<double>(table.multiplicity[i]) / (c * c * c);
    }
    // Empirical constant K with |P(T) - c T^2 / 2| <= K T^(2 - delta) on [C/2, C].
    double prefix = 0;
    std::size_t i = 0;
    const int samples = 400;
    for (int s = 0; s <= samples; ++s) {
      const double T = C_trunc * (0.5 + 0.5 * s / samples);
      while (i < end && vals_[i] < T) prefix += static_cast<double>(table.multiplicity[i++]);
      const double err = std::fabs(prefix - 0.5 * cg_ * T * T) / std::pow(T, 2 - delta_);
      K_ = std::max(K_, err);
    }
    tail_unit_ = 4 * K_ * std::pow(C_trunc, -1 - delta_);
  }

  double C_trunc() const { return C_; }
  double K() const { return K_; }
  double c_gamma() const { return cg_; }
  // |Phi(t) - exact| <= t * tail_unit() for t <= C_trunc.
  double tail_unit() const { return tail_unit_; }

  // 4 * integral over [0, pi/2] of Phi(rho sin phi), exact for the truncated Phi.
  double angular_integral(double rho) const {
    if (!(rho > 0)) return 0;
    const double top = std::min(rho, C_);
    double acc = 0, prev_cos = 1;
    std::size_t k = 0;
    // piece (t_{k-1}, t_k] carries the suffix starting at k
    for (; k < vals_.size() && vals_[k] <= top; ++k) {
      const double u = vals_[k] / rho;
      const double cs = std::sqrt(std::max(0.0, 1 - u * u));
      acc += (suffix_[k] + cg_ / C_) * rho * (prev_cos - cs);
      prev_cos = cs;
    }
    const double u = top / rho;
    const double cs = std::sqrt(std::max(0.0, 1 - u * u));
    acc += (suffix_[k] + cg_ / C_) * rho * (prev_cos - cs);
    if (rho > C_) acc += cg_ * (std::numbers::pi / 2 - std::asin(C_ / rho));
    return 4 * acc;
  }

  // Determinant values c <= x of the truncated table.
  std::vector<double> breakpoints(double x) const {
    std::vector<double> out;
    for (double v : vals_) {
      if (v > x) break;
      out.push_back(v);
    }
    return out;
  }

  // Valid for 0 < t <= C_trunc.
  PhiValue operator()(double t) const {
    if (!(t > 0)) throw std::invalid_argument("Phi needs t > 0");
    if (t > C_ * (1 + 1e-12)) throw std::invalid_argument("t exceeds C_trunc");
    return eval_unchecked(t);
  }

  // Also accepts t > C_trunc, where only the tail completion remains.
  double eval_extended(double t) const {
    if (t >= C_) return cg_;
    return eval_unchecked(t).value;
  }

 private:
  PhiValue eval_unchecked(double t) const {
    auto it = std::lower_bound(vals_.begin(), vals_.end(), t * (1 - 1e-13));
    std::size_t i = static_cast<std::size_t>(it - vals_.begin());
    // exact boundary: c >= t
    while (i < vals_.size() && vals_[i] < t && !(std::fabs(vals_[i] - t) <= 1e-12 * t && table_->keys[i].compare_to(t) >= 0)) ++i;
    return {t * (suffix_[i] + cg_ / C_), t * tail_unit_};
  }

  const PairTable* table_;
  double C_;
  double cg_ = 0, delta_ = 2.0 / 3.0, K_ = 0, tail_unit_ = 0;
  std::vector<double> vals_;
  std::vector<double> suffix_;
};

inline PhiValue phi_function(const PairTable& table, double t, double C_trunc) {
  if (C_trunc > table.max_c * (1 + 1e-12)) throw std::invalid_argument("C_trunc exceeds the table range");
  if (t > C_trunc) throw std::invalid_argument("t exceeds C_trunc");
  return PhiEvaluator(table, C_trunc)(t);
}

}  // namespace orbitstat
