#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "correlation.hpp"
#include "haar.hpp"
#include "pair_table.hpp"
#include "theta.hpp"

namespace orbitstat {

struct CheckOptions {
  std::int64_t n = 100'000;
  std::uint64_t seed = 1;
  int workers = 1;
  double tolerance = 0.10;   // relative gap that always fails above it
  double floor = 0.0;        // relative gap accepted regardless of the z-score
  double reference_scale = 1.0;
  double norm_cap = kNormCap;
  double C_trunc = 1e5;
  std::int64_t correlation_samples = 1'000'000;
  std::size_t max_centers = 512;  // avg pair correlation: exact below, subsampled above
};

struct CheckReport {
  std::string formula;
  std::string lattice;
  std::vector<std::pair<std::string, double>> params;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  double estimate = 0, stderr = 0;
  double reference = 0, reference_uncertainty = 0;
  double z_score = 0, relative_gap = 0;
  double resample_rate = 0, bias_bound = 0;
  double tolerance = 0, floor = 0;
  std::int64_t excluded = 0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> breakdown;

  double param(const std::string& k) const {
    for (const auto& [key, v] : params)
      if (key == k) return v;
    throw std::out_of_range("no parameter " + k);
  }
  double part(const std::string& k) const {
    for (const auto& [key, v] : breakdown)
      if (key == k) return v;
    throw std::out_of_range("no breakdown entry " + k);
  }
};

namespace detail {

struct ThetaAcc {
  RunningStats value;
  SamplerStats sampler;
  void merge(const ThetaAcc& o) {
    value.merge(o.value);
    sampler.merge(o.sampler);
  }
};

// z-score and pass decision; sigma combines MC error and reference uncertainty.
inline void finish(CheckReport& r, const CheckOptions& opt) {
  r.reference *= opt.reference_scale;
  r.reference_uncertainty *= std::fabs(opt.reference_scale);
  r.tolerance = opt.tolerance;
  r.floor = opt.floor;
  const double sigma = std::hypot(r.stderr, r.reference_uncertainty);
  const double gap = r.estimate - r.reference;
  r.z_score = sigma > 0 ? gap / sigma : (gap == 0 ? 0.0 : (gap > 0 ? INFINITY : -INFINITY));
  r.relative_gap = r.reference != 0 ? std::fabs(gap) / std::fabs(r.reference) : std::fabs(gap);
  r.pass = r.relative_gap <= opt.tolerance && (std::fabs(r.z_score) <= 3 || r.relative_gap <= opt.floor);
}

inline void base_fields(CheckReport& r, const std::string& formula, const Lattice& L, const CheckOptions& opt) {
  r.formula = formula;
  r.lattice = L.name();
  r.n = opt.n;
  r.seed = opt.seed;
  r.workers = opt.workers;
}

}  // namespace detail

// Mean over Haar samples of sum_x 1_{B_R}(g x) against c_Gamma pi R^2.
inline CheckReport first_moment_check(const Lattice& L, const DiscreteOrbit& orbit, double R, const CheckOptions& opt) {
  if (opt.n < 1000) throw std::invalid_argument("first moment check needs n >= 1000");
  if (!(R > 0)) throw std::invalid_argument("radius must be positive");
  const TestFunction f = TestFunction::ball(R);
  auto acc = run_parallel<detail::ThetaAcc>(opt.n, opt.workers, opt.seed, [&](Rng& rng, detail::ThetaAcc& a) {
    const HaarSample s = sample_mu(L, rng, &a.sampler, opt.norm_cap);
    a.value.add(static_cast<double>(theta(orbit, f, s.g)));
  });
  CheckReport r;
  detail::base_fields(r, "first-moment", L, opt);
  r.params = {{"R", R}, {"c_gamma", c_gamma(L)}};
  r.estimate = acc.value.mean;
  r.stderr = acc.value.stderr_of_mean();
  r.reference = c_gamma(L) * std::numbers::pi * R * R;
  r.resample_rate = acc.sampler.resample_rate();
  r.bias_bound = r.resample_rate * acc.value.max;
  r.breakdown = {{"acceptance_rate", acc.sampler.acceptance_rate()}, {"max_theta", acc.value.max}};
  detail::finish(r, opt);
  return r;
}

namespace detail {

inline PairRegion region_of(const TestFunction& f) {
  switch (f.kind) {
    case TestFunction::Kind::pair_ball: return PairRegion::ball_ball(f.R, f.R2);
    case TestFunction::Kind::pair_friend: return PairRegion::ball_punctured(f.R, f.eta);
    case TestFunction::Kind::pair_det: return PairRegion::ball_det(f.R, f.D, f.s);
    case TestFunction::Kind::ball: break;
  }
  throw std::invalid_argument("not a pair test function");
}

struct PairAcc {
  RunningStats total, diagonal, offdiag;
  SamplerStats sampler;
  std::int64_t subsampled = 0;
  void merge(const PairAcc& o) {
    subsampled += o.subsampled;
    total.merge(o.total);
    diagonal.merge(o.diagonal);
    offdiag.merge(o.offdiag);
    sampler.merge(o.sampler);
  }
};

struct PairReference {
  double offdiag = 0, offdiag_uncertainty = 0, diagonal = 0, diagonal_unit_coefficient = 0;
  double residual = 0;
};

inline PairReference pair_reference(const Lattice& L, const TestFunction& f, const PairTable& table,
                                    const CheckOptions& opt) {
  const PhiEvaluator phi(table, std::min(opt.C_trunc, table.max_c));
  const PairRegion region = region_of(f);
  const double cg = c_gamma(L);
  CorrelationResult corr;
  if (region.kind == PairRegion::Kind::ball_ball) {
    corr = correlation_quadrature(region, phi);
  } else {
    corr = correlation_integral(region, phi, {opt.correlation_samples, opt.seed ^ 0x9e3779b97f4a7c15ull, opt.workers});
  }
  PairReference ref;
  ref.offdiag = cg * corr.integral.value;
  ref.offdiag_uncertainty = cg * std::hypot(corr.integral.stderr, corr.tail_uncertainty);
  ref.residual = cg * corr.residual.value;
  const double delta_ab = table.is_homothetic_pair ? 1.0 : 0.0;
  ref.diagonal = delta_ab * cg / 2 * region.diagonal_integral();
  ref.diagonal_unit_coefficient = delta_ab * cg * region.diagonal_integral();
  return ref;
}

}  // namespace detail

// Cone average of det(A)^2 sum_{x, y} f(A x, A y) against
// c_Gamma int Phi_ab(|x ^ y|) f + delta_ab (c_Gamma / 2) int (f(x, x) + f(x, -x)).
inline CheckReport pair_moment_check(const Lattice& L, const DiscreteOrbit& a, const DiscreteOrbit& b,
                                     const TestFunction& f, const PairTable& table, const CheckOptions& opt) {
  if (opt.n < 1000) throw std::invalid_argument("pair moment check needs n >= 1000");
  if (!f.is_pair()) throw std::invalid_argument("pair moment check needs a pair test function");
  if (table.cusp_a != a.cusp_index() || table.cusp_b != b.cusp_index())
    throw std::invalid_argument("pair table cusps do not match the orbits");
  auto acc = run_parallel<detail::PairAcc>(opt.n, opt.workers, opt.seed, [&](Rng& rng, detail::PairAcc& s) {
    const ConeSample c = sample_cone(L, rng, &s.sampler, opt.norm_cap);
    const PairThetaEstimate t = theta_pair_sampled(a, b, f, c.A, opt.max_centers, rng);
    const double w = c.nu * c.nu;
    s.total.add(w * t.total);
    s.diagonal.add(w * static_cast<double>(t.diagonal));
    s.offdiag.add(w * (t.total - static_cast<double>(t.diagonal)));
    if (t.subsampled) ++s.subsampled;
  });
  const auto ref = detail::pair_reference(L, f, table, opt);
  CheckReport r;
  detail::base_fields(r, "pair-moment", L, opt);
  r.params = {{"cusp_a", static_cast<double>(a.cusp_index())},
              {"cusp_b", static_cast<double>(b.cusp_index())},
              {"R", f.R},
              {"delta_ab", table.is_homothetic_pair ? 1.0 : 0.0},
              {"C_trunc", std::min(opt.C_trunc, table.max_c)}};
  if (f.kind == TestFunction::Kind::pair_ball) r.params.push_back({"R2", f.R2});
  if (f.kind == TestFunction::Kind::pair_friend) r.params.push_back({"eta", f.eta});
  if (f.kind == TestFunction::Kind::pair_det) {
    r.params.push_back({"D", f.D});
    r.params.push_back({"s", f.s});
  }
  r.estimate = acc.total.mean;
  r.stderr = acc.total.stderr_of_mean();
  r.reference = ref.offdiag + ref.diagonal;
  r.reference_uncertainty = ref.offdiag_uncertainty;
  r.resample_rate = acc.sampler.resample_rate();
  r.bias_bound = r.resample_rate * acc.total.max;
  r.breakdown = {{"diagonal_estimate", acc.diagonal.mean},
                 {"diagonal_stderr", acc.diagonal.stderr_of_mean()},
                 {"diagonal_reference", ref.diagonal * opt.reference_scale},
                 {"diagonal_reference_unit_coefficient", ref.diagonal_unit_coefficient},
                 {"offdiagonal_estimate", acc.offdiag.mean},
                 {"offdiagonal_stderr", acc.offdiag.stderr_of_mean()},
                 {"offdiagonal_reference", ref.offdiag * opt.reference_scale},
                 {"offdiagonal_reference_uncertainty", ref.offdiag_uncertainty},
                 {"correlation_residual", ref.residual},
                 {"subsampled_samples", static_cast<double>(acc.subsampled)}};
  detail::finish(r, opt);
  // the diagonal piece must agree on its own
  const double dgap = std::fabs(acc.diagonal.mean - ref.diagonal * opt.reference_scale);
  const bool diag_ok = dgap <= std::max(3 * acc.diagonal.stderr_of_mean(), opt.floor * std::fabs(ref.diagonal)) + 1e-12;
  r.breakdown.push_back({"diagonal_pass", diag_ok ? 1.0 : 0.0});
  r.pass = r.pass && diag_ok;
  return r;
}

// Cone average of det(A)^2 (sum_x h(A x))^2, h = 1_{B_R}, against
// (c int h)^2 + (c / 2) int (h h(-.) + h^2) + c int int (Phi - c) h h.
inline CheckReport second_moment_check(const Lattice& L, const DiscreteOrbit& orbit, double R, const PairTable& table,
                                       const CheckOptions& opt) {
  if (opt.n < 1000) throw std::invalid_argument("second moment check needs n >= 1000");
  if (!(R >= 0)) throw std::invalid_argument("radius must be nonnegative");
  if (table.cusp_a != orbit.cusp_index() || table.cusp_b != orbit.cusp_index())
    throw std::invalid_argument("pair table must pair the orbit's cusp with itself");
  auto acc = run_parallel<detail::PairAcc>(opt.n, opt.workers, opt.seed, [&](Rng& rng, detail::PairAcc& s) {
    const ConeSample c = sample_cone(L, rng, &s.sampler, opt.norm_cap);
    const double n = R > 0 ? static_cast<double>(orbit.count_image(c.A, R)) : 0.0;
    const double w = c.nu * c.nu;
    s.total.add(w * n * n);
    s.diagonal.add(w * (orbit.symmetric() ? 2 : 1) * n);
  });
  CheckReport r;
  detail::base_fields(r, "second-moment", L, opt);
  const double cg = c_gamma(L);
  const double area = std::numbers::pi * R * R;
  r.params = {{"R", R}, {"c_gamma", cg}, {"C_trunc", std::min(opt.C_trunc, table.max_c)}};
  double main = 0, diag = 0, resid = 0, unc = 0;
  if (R > 0) {
    const PhiEvaluator phi(table, std::min(opt.C_trunc, table.max_c));
    const auto corr = correlation_quadrature(PairRegion::ball_ball(R), phi);
    main = (cg * area) * (cg * area);
    diag = cg / 2 * 2 * area;
    resid = cg * corr.residual.value;
    unc = cg * std::hypot(corr.residual.stderr, corr.tail_uncertainty);
  }
  r.estimate = acc.total.mean;
  r.stderr = acc.total.stderr_of_mean();
  r.reference = main + diag + resid;
  r.reference_uncertainty = unc;
  r.resample_rate = acc.sampler.resample_rate();
  r.bias_bound = r.resample_rate * acc.total.max;
  r.breakdown = {{"main_term", main * opt.reference_scale},
                 {"diagonal_term", diag * opt.reference_scale},
                 {"diagonal_term_unit_coefficient", 2 * diag},
                 {"correlation_residual", resid * opt.reference_scale},
                 {"diagonal_estimate", acc.diagonal.mean},
                 {"diagonal_stderr", acc.diagonal.stderr_of_mean()},
                 {"variance_estimate", acc.total.mean - main}};
  detail::finish(r, opt);
  if (R == 0) r.pass = r.estimate == 0 && r.reference == 0;
  return r;
}

namespace detail {

struct PairCorrAcc {
  RunningStats value;
  SamplerStats sampler;
  std::int64_t empty = 0, subsampled = 0;
  void merge(const PairCorrAcc& o) {
    value.merge(o.value);
    sampler.merge(o.sampler);
    empty += o.empty;
    subsampled += o.subsampled;
  }
};

// R2(B_s, S, R) for S = A(set) with window eta. Exact when the ball holds at
// most max_centers points; otherwise the mean neighbor count over max_centers
// centers drawn uniformly (with replacement) from the ball, which is unbiased.
inline double pair_correlation_image(const HolonomySet& S, const Mat2d& A, double R, double eta, std::size_t max_centers,
                                     Rng& rng, bool& empty, bool& subsampled) {
  const std::int64_t inside = S.count(A, R);
  empty = inside == 0;
  subsampled = false;
  if (empty) return 0;
  if (static_cast<std::size_t>(inside) <= max_centers) {
    const auto pts = S.points(A, R + eta);
    return static_cast<double>(count_friends(pts, R, eta)) / static_cast<double>(inside);
  }
  subsampled = true;
  std::vector<std::int64_t> pick(max_centers);
  for (auto& p : pick)
    p = std::min<std::int64_t>(static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(inside)), inside - 1);
  std::sort(pick.begin(), pick.end());
  std::vector<Vec2d> centers;
  centers.reserve(max_centers);
  std::int64_t idx = 0;
  std::size_t k = 0;
  S.for_each_point(A, R, [&](const Vec2d& p, std::size_t) {
    while (k < pick.size() && pick[k] == idx) {
      centers.push_back(p);
      ++k;
    }
    ++idx;
  });
  if (idx != inside) throw std::logic_error("point stream disagrees with the count");
  double extent = 0;
  for (const auto& c : centers) extent = std::max({extent, std::fabs(c.x), std::fabs(c.y)});
  detail::CellGrid grid(centers, eta, extent + eta);
  const double e2 = eta * eta;
  std::int64_t hits = 0;
  S.for_each_point(A, R + eta, [&](const Vec2d& y, std::size_t) {
    grid.for_neighbors(y, [&](std::uint32_t j) {
      const double dx = centers[j].x - y.x, dy = centers[j].y - y.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 > 0 && d2 < e2) ++hits;
    });
  });
  return static_cast<double>(hits) / static_cast<double>(max_centers);
}

}  // namespace detail

// Cone average of R2(B_s, A(S), R) det(A) against |B_s| = pi s^2.
inline CheckReport avg_pair_correlation(const Lattice& L, const HolonomySet& S, double s, double R,
                                        const CheckOptions& opt) {
  if (opt.n < 1000) throw std::invalid_argument("averaged pair correlation needs n >= 1000");
  if (!(s > 0 && R > 0)) throw std::invalid_argument("s and R must be positive");
  if (S.empty()) throw std::invalid_argument("empty holonomy set");
  const double cM = S.density();
  const double eta = s / std::sqrt(cM);
  auto acc = run_parallel<detail::PairCorrAcc>(opt.n, opt.workers, opt.seed, [&](Rng& rng, detail::PairCorrAcc& a) {
    const ConeSample c = sample_cone(L, rng, &a.sampler, opt.norm_cap);
    bool empty = false, sub = false;
    const double r2 = detail::pair_correlation_image(S, c.A, R, eta, opt.max_centers, rng, empty, sub);
    if (empty) {
      ++a.empty;
      return;
    }
    if (sub) ++a.subsampled;
    a.value.add(r2 * c.nu);
  });
  CheckReport r;
  detail::base_fields(r, "avg-paircorr", L, opt);
  r.params = {{"s", s}, {"R", R}, {"c_M", cM}, {"eta", eta}, {"max_centers", static_cast<double>(opt.max_centers)}};
  r.estimate = acc.value.mean;
  r.stderr = acc.value.stderr_of_mean();
  r.reference = std::numbers::pi * s * s;
  r.excluded = acc.empty;
  r.resample_rate = acc.sampler.resample_rate();
  r.bias_bound = r.resample_rate * acc.value.max;
  r.breakdown = {{"excluded_empty", static_cast<double>(acc.empty)},
                 {"subsampled_samples", static_cast<double>(acc.subsampled)}};
  detail::finish(r, opt);
  return r;
}

}  // namespace orbitstat
