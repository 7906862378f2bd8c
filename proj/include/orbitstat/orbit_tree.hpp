#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "number_ring.hpp"

// Reduction tree of the Hecke group <S, T_lambda> acting on primitive vectors.
//
// Nodes are the vectors (a, c) of the orbit of e1 with c > 0 and
// -lambda c / 2 < a <= lambda c / 2, one per translation class. The node (0, 1)
// hangs below e1. The children of (a, c) are obtained from b = a + j lambda c:
//   b < 0 and lambda |b| >= 2c  ->  child (c, -b)
//   b > 0 and lambda b > 2c     ->  child (-c, b)
// Both c and the norm increase strictly along every edge, so a walk pruned by
// an upper bound on c (or on the norm) visits exactly the nodes below it.
// The orbit is {+-e1} together with {+-(a + k lambda c, c)} over all nodes.

namespace orbitstat {

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace detail

// Integer tree (lambda = 1). visit(a, c, depth) returns whether to descend.
template <class Visit>
void walk_tree_int(std::int64_t c_bound, Visit&& visit) {
  if (c_bound < 1) return;
  struct Node {
    std::int64_t a, c;
    int depth;
  };
  std::vector<Node> stack;
  if (visit(std::int64_t{0}, std::int64_t{1}, 1) && 2 <= c_bound) stack.push_back({0, 1, 1});
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    const std::int64_t a = n.a, c = n.c;
    const int depth = n.depth + 1;
    // b in [-c_bound, -2c]
    std::int64_t jlo = detail::ceil_div(-c_bound - a, c), jhi = detail::floor_div(-2 * c - a, c);
    for (std::int64_t j = jlo; j <= jhi; ++j) {
      const std::int64_t nb = -(a + j * c);
      if (visit(c, nb, depth) && 2 * nb <= c_bound) stack.push_back({c, nb, depth});
    }
    // b in (2c, c_bound]
    jlo = detail::floor_div(2 * c - a, c) + 1;
    jhi = detail::floor_div(c_bound - a, c);
    for (std::int64_t j = jlo; j <= jhi; ++j) {
      const std::int64_t b = a + j * c;
      if (visit(-c, b, depth) && 2 * b <= c_bound) stack.push_back({-c, b, depth});
    }
  }
}

// Counting-only variant: table[c] += number of nodes with second coordinate c.
inline void tree_node_histogram_int(std::int64_t c_bound, std::vector<std::int64_t>& table) {
  table.assign(static_cast<std::size_t>(c_bound) + 1, 0);
  if (c_bound < 1) return;
  table[1] = 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> stack;
  if (2 <= c_bound) stack.push_back({0, 1});
  std::int64_t* t = table.data();
  const std::int64_t half = c_bound / 2;
  while (!stack.empty()) {
    const auto [a, c] = stack.back();
    stack.pop_back();
    std::int64_t b = a + detail::floor_div(-2 * c - a, c) * c;  // largest b <= -2c
    for (; b >= -c_bound; b -= c) {
      ++t[-b];
      if (-b <= half) stack.push_back({c, -b});
    }
    b = a + (detail::floor_div(2 * c - a, c) + 1) * c;  // smallest b > 2c
    for (; b <= c_bound; b += c) {
      ++t[b];
      if (b <= half) stack.push_back({-c, b});
    }
  }
}

// Floating tree for lambda = 2cos(pi/q). Boundary ties lambda|b| = 2c are
// resolved with a relative tolerance; distinct values of the exact quantity
// are separated by far more than the tolerance for the supported sizes.
template <class Visit>
void walk_tree_float(double lambda, double c_bound, Visit&& visit) {
  if (c_bound < 1) return;
  struct Node {
    double a, c;
    int depth;
  };
  const double tol = 1e-9;
  std::vector<Node> stack;
  const double two_over = 2.0 / lambda;
  if (visit(0.0, 1.0, 1) && two_over <= c_bound * (1 + tol)) stack.push_back({0, 1, 1});
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    const double a = n.a, c = n.c, L = lambda * c;
    const double edge = two_over * c, slack = tol * c;
    const int depth = n.depth + 1;
    // b <= -edge (tie included)
    double jlo = std::ceil((-c_bound - a) / L - tol), jhi = std::floor((-edge + slack - a) / L);
    for (double j = jlo; j <= jhi; ++j) {
      const double nb = -(a + j * L);
      if (nb < edge - slack || nb > c_bound * (1 + tol)) continue;
      if (visit(c, nb, depth) && two_over * nb <= c_bound * (1 + tol)) stack.push_back({c, nb, depth});
    }
    // b > edge (tie excluded)
    jlo = std::floor((edge + slack - a) / L) + 1;
    jhi = std::floor((c_bound * (1 + tol) - a) / L);
    for (double j = jlo; j <= jhi; ++j) {
      const double b = a + j * L;
      if (b <= edge + slack) continue;
      if (visit(-c, b, depth) && two_over * b <= c_bound * (1 + tol)) stack.push_back({-c, b, depth});
    }
  }
}

// Exact tree over Z[lambda]. visit(a, c, af, cf, depth) returns whether to
// descend; c_bound is a real cut on c, decided exactly.
template <class Visit>
void walk_tree_exact(const NumberRing* ring, double c_bound, Visit&& visit) {
  if (c_bound < 1) return;
  struct Node {
    RingElement a, c;
    double af, cf;
    int depth;
  };
  const RingElement lam = RingElement::lambda(ring);
  const RingElement two(ring, Integer(2));
  const double lf = ring->lambda();
  auto within_bound = [&](const RingElement& x, double xf) {
    if (xf < c_bound * (1 - 1e-12)) return true;
    if (xf > c_bound * (1 + 1e-12)) return false;
    return x.compare_to(c_bound) <= 0;
  };
  std::vector<Node> stack;
  RingElement zero(ring, Integer(0)), one(ring, Integer(1));
  if (visit(zero, one, 0.0, 1.0, 1) && 2.0 / lf <= c_bound * (1 + 1e-12)) stack.push_back({zero, one, 0.0, 1.0, 1});
  while (!stack.empty()) {
    Node n = std::move(stack.back());
    stack.pop_back();
    const RingElement L = lam * n.c;
    const double Lf = lf * n.cf;
    const RingElement twoc = two * n.c;
    const double edge = 2.0 * n.cf / lf;
    const int depth = n.depth + 1;
    auto try_child = [&](std::int64_t j, bool negative) {
      const double bf = n.af + static_cast<double>(j) * Lf;
      const double mag = std::fabs(bf);
      if (mag > c_bound * (1 + 1e-9) + 1) return;
      if (negative ? bf > 0.5 * -edge : bf < 0.5 * edge) return;
      RingElement b = n.a + L * Integer(j);
      int side = b.sign();
      if (negative ? side >= 0 : side <= 0) return;
      RingElement nb = negative ? -b : b;
      // lambda |b| - 2c: >= 0 for the negative side, > 0 for the positive side
      const double m = lf * mag - 2.0 * n.cf;
      int s;
      if (m > 1e-9 * (mag + n.cf)) s = 1;
      else if (m < -1e-9 * (mag + n.cf)) s = -1;
      else s = (lam * nb - twoc).sign();
      if (negative ? s < 0 : s <= 0) return;
      if (!within_bound(nb, mag)) return;
      RingElement ca = negative ? n.c : -n.c;
      const double caf = negative ? n.cf : -n.cf;
      if (visit(ca, nb, caf, mag, depth) && 2.0 * mag / lf <= c_bound * (1 + 1e-9)) stack.push_back({ca, nb, caf, mag, depth});
    };
    const double jneg_hi = std::floor((-edge - n.af) / Lf) + 1;
    const double jneg_lo = std::ceil((-c_bound - n.af) / Lf) - 1;
    for (double j = jneg_hi; j >= jneg_lo; --j) try_child(static_cast<std::int64_t>(j), true);
    const double jpos_lo = std::floor((edge - n.af) / Lf) - 1;
    const double jpos_hi = std::floor((c_bound - n.af) / Lf) + 1;
    for (double j = jpos_lo; j <= jpos_hi; ++j) try_child(static_cast<std::int64_t>(j), false);
  }
}

}  // namespace orbitstat
