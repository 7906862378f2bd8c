#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "checks.hpp"
#include "haar.hpp"
#include "orbit.hpp"
#include "shapes.hpp"

namespace orbitstat {

// |A Lambda n R Omega|.
inline std::int64_t count_transformed(const DiscreteOrbit& orbit, const Mat2d& A, const BorelShape& shape, double R) {
  if (!(R >= 0)) throw std::invalid_argument("radius must be nonnegative");
  if (R == 0) return 0;
  if (shape.kind() == BorelShape::Kind::disk) return orbit.count_image(A, R);
  std::int64_t n = 0;
  orbit.for_each_point(A, R * shape.circumradius() * (1 + 1e-12), [&](const Vec2d& p) {
    if (shape.contains_dilate(p, R)) ++n;
  });
  return n;
}

struct LogLogFit {
  bool defined = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();  // rms
  std::size_t points = 0;
};

// Least squares of log|y| on log x; zero y are skipped.
inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] != 0 && x[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(std::fabs(y[i])));
    }
  LogLogFit f;
  f.points = lx.size();
  if (lx.size() < 2) return f;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0) return f;
  f.defined = true;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

struct DiscrepancyReport {
  std::string lattice;
  BorelShape shape = BorelShape::disk();
  Mat2d A{1, 0, 0, 1};
  std::vector<double> radii;
  std::vector<std::int64_t> counts;
  std::vector<double> main_terms;
  std::vector<double> discrepancies;  // count |det A| - c_Gamma |Omega| R^2
  LogLogFit fit;                      // over the upper half of the radii
  std::size_t fit_from = 0;           // first index used by the fit
  std::size_t zero_excluded = 0;
  std::size_t sign_excluded = 0;      // fit-window points next to a sign change
  std::size_t sign_changes = 0;       // over all radii
  double target_exponent = 0;         // 2 - delta

  double fitted_exponent() const { return fit.slope; }
};

inline DiscrepancyReport discrepancy_experiment(const Lattice& L, const DiscreteOrbit& orbit, const BorelShape& shape,
                                                const Mat2d& A, const std::vector<double>& radii, int workers = 1) {
  if (radii.empty()) throw std::invalid_argument("no radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0) || (i && !(radii[i] > radii[i - 1]))) throw std::invalid_argument("radii must be positive and increasing");
  if (!shape.contains({0, 0})) throw std::invalid_argument("shape must contain the origin");
  if (shape.kind() == BorelShape::Kind::annulus) throw std::invalid_argument("shape must contain the origin");
  const double det = std::fabs(A.a * A.d - A.b * A.c);
  if (!(det > 0)) throw std::invalid_argument("A must be invertible");

  DiscrepancyReport r;
  r.lattice = L.name();
  r.shape = shape;
  r.A = A;
  r.radii = radii;
  r.target_exponent = 2 - L.delta;
  const std::size_t n = radii.size();
  r.counts.assign(n, 0);
  parallel_for(static_cast<std::int64_t>(n), workers, [&](std::int64_t i) {
    const auto k = static_cast<std::size_t>(i);
    r.counts[k] = count_transformed(orbit, A, shape, radii[k]);
  });
  const double cg = c_gamma(L);
  for (std::size_t i = 0; i < n; ++i) {
    r.main_terms.push_back(cg * shape.area() * radii[i] * radii[i]);
    r.discrepancies.push_back(static_cast<double>(r.counts[i]) * det - r.main_terms.back());
  }
  for (std::size_t i = 1; i < n; ++i)
    if ((r.discrepancies[i] > 0 && r.discrepancies[i - 1] < 0) || (r.discrepancies[i] < 0 && r.discrepancies[i - 1] > 0))
      ++r.sign_changes;
  // Fit window: upper half of the radii, minus zeros and the two points
  // straddling each sign change.
  r.fit_from = n / 2;
  std::vector<double> x, y;
  for (std::size_t i = r.fit_from; i < n; ++i) {
    const double d = r.discrepancies[i];
    if (d == 0) {
      ++r.zero_excluded;
      continue;
    }
    const bool flip_before = i > 0 && d * r.discrepancies[i - 1] < 0;
    const bool flip_after = i + 1 < n && d * r.discrepancies[i + 1] < 0;
    if (flip_before || flip_after) {
      ++r.sign_excluded;
      continue;
    }
    x.push_back(radii[i]);
    y.push_back(d);
  }
  r.fit = fit_loglog(x, y);
  return r;
}

// n radii in geometric progression from lo to hi.
inline std::vector<double> geometric_radii(double lo, double hi, std::size_t n) {
  if (!(lo > 0 && hi > lo && n >= 2)) throw std::invalid_argument("need 0 < lo < hi and n >= 2");
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  r.back() = hi;
  return r;
}

// Fixed shears and rotations, then k matrices from the cone measure.
inline std::vector<Mat2d> discrepancy_test_matrices(const Lattice& L, std::size_t k, std::uint64_t seed) {
  std::vector<Mat2d> out{{1, 0, 0, 1}, diag(2, 0.5), unipotent(1), unipotent(std::numbers::sqrt2), rotation(0.3)};
  Rng rng = make_stream(seed, 0);
  for (std::size_t i = 0; i < k; ++i) out.push_back(sample_cone(L, rng).A);
  return out;
}

struct SecondMomentDiscrepancy {
  double area = 0;
  double radius = 0;
  Estimate estimate;          // cone mean of (det(A) Theta - c_Gamma |B|)^2
  double envelope = 0;        // |B|^(2 - delta)
  double ratio = 0;           // estimate / envelope
  double ratio_stderr = 0;
  double resample_rate = 0;
};

// B the disk of the given area centered at the origin.
inline SecondMomentDiscrepancy second_moment_discrepancy(const Lattice& L, const DiscreteOrbit& orbit, double area,
                                                         const CheckOptions& opt, double min_area = 1.0) {
  if (!(area > min_area)) throw std::invalid_argument("area below the configured threshold");
  if (opt.n < 2) throw std::invalid_argument("need n >= 2");
  const double R = std::sqrt(area / std::numbers::pi);
  const double main = c_gamma(L) * area;
  auto acc = run_parallel<detail::ThetaAcc>(opt.n, opt.workers, opt.seed, [&](Rng& rng, detail::ThetaAcc& a) {
    const ConeSample c = sample_cone(L, rng, &a.sampler, opt.norm_cap);
    const double d = c.nu * static_cast<double>(orbit.count_image(c.A, R)) - main;
    a.value.add(d * d);
  });
  SecondMomentDiscrepancy s;
  s.area = area;
  s.radius = R;
  s.estimate = {acc.value.mean, acc.value.stderr_of_mean(), acc.value.n};
  s.envelope = std::pow(area, 2 - L.delta);
  s.ratio = s.estimate.value / s.envelope;
  s.ratio_stderr = s.estimate.stderr / s.envelope;
  s.resample_rate = acc.sampler.resample_rate();
  return s;
}

// Boundedness of the ratio over a family of areas: max / min below `spread`.
inline CheckReport second_moment_discrepancy_check(const Lattice& L, const DiscreteOrbit& orbit,
                                                   const std::vector<double>& areas, const CheckOptions& opt,
                                                   double spread = 10) {
  if (areas.size() < 2) throw std::invalid_argument("need at least two areas");
  CheckReport r;
  detail::base_fields(r, "second-moment-discrepancy", L, opt);
  r.params = {{"delta", L.delta}, {"spread", spread}};
  double lo = INFINITY, hi = 0, resample = 0;
  bool nonneg = true;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    CheckOptions o = opt;
    o.seed = opt.seed + i;
    const auto s = second_moment_discrepancy(L, orbit, areas[i], o);
    const std::string tag = "@" + std::to_string(static_cast<long long>(std::llround(areas[i])));
    r.breakdown.push_back({"estimate" + tag, s.estimate.value});
    r.breakdown.push_back({"stderr" + tag, s.estimate.stderr});
    r.breakdown.push_back({"ratio" + tag, s.ratio});
    lo = std::min(lo, s.ratio);
    hi = std::max(hi, s.ratio);
    nonneg = nonneg && s.estimate.value >= 0;
    resample = std::max(resample, s.resample_rate);
  }
  r.estimate = lo > 0 ? hi / lo : INFINITY;
  r.reference = spread;
  r.resample_rate = resample;
  r.tolerance = opt.tolerance;
  r.floor = opt.floor;
  r.z_score = std::numeric_limits<double>::quiet_NaN();
  r.relative_gap = std::numeric_limits<double>::quiet_NaN();
  r.pass = nonneg && r.estimate < spread * opt.reference_scale;
  return r;
}

// ---- congruence subgroups ----

struct MobiusSum {
  long double value = 0;      // sum over d <= D, gcd(d, N) = 1, of mu(d) / d^2
  std::int64_t D = 0;
  double tail_estimate = 0;   // |M_N(D)| / D^2 + max over the last half of |M_N(t)| / t^2
};

namespace detail {

inline std::vector<std::int64_t> small_primes(std::int64_t n) {
  std::vector<bool> comp(static_cast<std::size_t>(n + 1), false);
  std::vector<std::int64_t> p;
  for (std::int64_t i = 2; i <= n; ++i) {
    if (comp[static_cast<std::size_t>(i)]) continue;
    p.push_back(i);
    for (std::int64_t j = i * i; j <= n; j += i) comp[static_cast<std::size_t>(j)] = true;
  }
  return p;
}

// Segmented Moebius sieve; f(d, mu(d)) for d in [1, D].
template <class F>
void mobius_segments(std::int64_t D, F&& f) {
  const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(D))) + 1;
  const auto primes = small_primes(root);
  const std::int64_t seg = 1 << 18;
  std::vector<std::int8_t> mu(seg);
  std::vector<std::int64_t> rest(seg);
  for (std::int64_t lo = 1; lo <= D; lo += seg) {
    const std::int64_t hi = std::min(D, lo + seg - 1);
    const std::int64_t len = hi - lo + 1;
    std::fill(mu.begin(), mu.begin() + len, 1);
    for (std::int64_t i = 0; i < len; ++i) rest[static_cast<std::size_t>(i)] = lo + i;
    for (std::int64_t p : primes) {
      if (p * p > hi) break;
      for (std::int64_t m = (lo + p - 1) / p * p; m <= hi; m += p) {
        const auto i = static_cast<std::size_t>(m - lo);
        mu[i] = static_cast<std::int8_t>(-mu[i]);
        rest[i] /= p;
      }
      const std::int64_t p2 = p * p;
      for (std::int64_t m = (lo + p2 - 1) / p2 * p2; m <= hi; m += p2) mu[static_cast<std::size_t>(m - lo)] = 0;
    }
    for (std::int64_t i = 0; i < len; ++i) {
      const auto k = static_cast<std::size_t>(i);
      int m = mu[k];
      if (m != 0 && rest[k] > 1) m = -m;  // one prime factor above sqrt(hi)
      f(lo + i, m);
    }
  }
}

}  // namespace detail

inline MobiusSum mobius_sum(std::int64_t N, std::int64_t D) {
  if (N < 1 || D < 1) throw std::invalid_argument("N and D must be positive");
  MobiusSum s;
  s.D = D;
  long double sum = 0;
  std::int64_t M = 0;
  double late = 0;
  detail::mobius_segments(D, [&](std::int64_t d, int m) {
    if (m == 0 || std::gcd(d, N) != 1) return;
    const long double dd = static_cast<long double>(d);
    sum += m / (dd * dd);
    M += m;
    if (2 * d > D) late = std::max(late, std::fabs(static_cast<double>(M)) / (static_cast<double>(d) * static_cast<double>(d)));
  });
  s.value = sum;
  s.tail_estimate = std::fabs(static_cast<double>(M)) / (static_cast<double>(D) * static_cast<double>(D)) + late;
  return s;
}

inline constexpr std::int64_t kMobiusDepth = 100'000'000;

// Cached mobius_sum(N, kMobiusDepth).
inline const MobiusSum& mobius_constant_sum(std::int64_t N) {
  static std::mutex mu;
  static std::map<std::int64_t, MobiusSum> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, mobius_sum(N, kMobiusDepth)).first;
  return it->second;
}

// Leading constant [Gamma : Gamma(N)] / N^3 * sum_{(d, N) = 1} mu(d) / d^2 for Gamma = Gamma(N).
inline double congruence_main_constant(std::int64_t N) {
  return static_cast<double>(mobius_constant_sum(N).value / static_cast<long double>(N * N * N));
}

struct CongruenceCount {
  std::int64_t N = 1;
  std::size_t cusp = 0;
  double R = 0;
  std::int64_t residue_x = 1, residue_y = 0;
  std::int64_t exact_count = 0;
  double main_term = 0;
  double constant = 0;
  double error() const { return static_cast<double>(exact_count) - main_term; }
};

// Primitive (x, y) = (rx, ry) mod N with N (x^2 + y^2) <= R^2.
inline std::int64_t primitive_residue_scan(std::int64_t N, std::int64_t rx, std::int64_t ry, double R) {
  if (!(R >= 0)) throw std::invalid_argument("radius must be nonnegative");
  const long double R2 = static_cast<long double>(R) * R;
  const auto X = static_cast<std::int64_t>(std::floor(R / std::sqrt(static_cast<double>(N)))) + 1;
  const std::int64_t ax = detail::mod(rx, N), ay = detail::mod(ry, N);
  std::int64_t n = 0;
  for (std::int64_t x = -X + detail::mod(ax + X, N); x <= X; x += N) {
    const long double rem = R2 / N - static_cast<long double>(x) * x;
    if (rem < 0) continue;
    const auto Y = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(rem)))) + 1;
    for (std::int64_t y = -Y + detail::mod(ay + Y, N); y <= Y; y += N) {
      const long double q = static_cast<long double>(N) * (static_cast<long double>(x) * x + static_cast<long double>(y) * y);
      if (q <= R2 && std::gcd(x, y) == 1) ++n;
    }
  }
  return n;
}

// Scaled orbit of the given cusp of Gamma(N): sqrt(N) times the primitive
// vectors congruent to the cusp's column mod N.
inline CongruenceCount congruence_count(int N, std::size_t cusp, double R) {
  if (N < 1 || N > 12) throw std::invalid_argument("level N must be in 1..12");
  if (!(R >= 0)) throw std::invalid_argument("radius must be nonnegative");
  const Lattice L = build_congruence(N);
  if (cusp >= L.cusps.size()) throw std::invalid_argument("cusp index out of range");
  const Mat2d base = to_double(L.cusps[cusp].sigma_base);
  CongruenceCount c;
  c.N = N;
  c.cusp = cusp;
  c.R = R;
  c.residue_x = detail::mod(std::llround(base.a), N);
  c.residue_y = detail::mod(std::llround(base.c), N);
  c.exact_count = primitive_residue_scan(N, c.residue_x, c.residue_y, R);
  c.constant = congruence_main_constant(N);
  c.main_term = c.constant * std::numbers::pi * R * R;
  return c;
}

}  // namespace orbitstat
