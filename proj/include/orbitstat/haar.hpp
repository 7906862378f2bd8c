#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "lattice.hpp"
#include "rng.hpp"

namespace orbitstat {

// Cap on |g^-1| for theta evaluation; samples beyond it are redrawn and counted.
inline constexpr double kNormCap = 1e3;

// h = n_x a_sqrt(y) k_theta with h . i = z; g = h^-1 represents the coset g Gamma.
struct HaarSample {
  Mat2d h;
  Mat2d g;
  std::complex<double> z;
  double theta = 0;
};

struct ConeSample {
  double nu = 1;
  Mat2d A;   // sqrt(nu) g
  HaarSample base;
};

struct SamplerStats {
  std::int64_t draws = 0;
  std::int64_t rejections = 0;  // |z| < 1 in the envelope
  std::int64_t resamples = 0;   // norm cap exceeded

  void merge(const SamplerStats& o) {
    draws += o.draws;
    rejections += o.rejections;
    resamples += o.resamples;
  }
  double acceptance_rate() const {
    const auto tries = draws + rejections;
    return tries ? static_cast<double>(draws) / static_cast<double>(tries) : 0.0;
  }
  double resample_rate() const {
    const auto tot = draws + resamples;
    return tot ? static_cast<double>(resamples) / static_cast<double>(tot) : 0.0;
  }
};

inline Mat2d iwasawa(double x, double y, double theta) {
  const double s = std::sqrt(y);
  return unipotent(x) * diag(s, 1 / s) * rotation(theta);
}

namespace detail {

// Point of the ambient Hecke-type domain with density dx dy / y^2.
inline std::complex<double> sample_domain(const DomainSpec& d, Rng& rng, SamplerStats* stats, int max_tries) {
  for (int t = 0; t < max_tries; ++t) {
    const double x = uniform(rng, -d.half_width, d.half_width);
    const double y = d.y_floor / uniform_open_closed(rng);
    if (d.unit_circle && x * x + y * y < 1) {
      if (stats) ++stats->rejections;
      continue;
    }
    return {x, y};
  }
  throw std::runtime_error("fundamental domain rejection loop exceeded its cap");
}

}  // namespace detail

// Draw from the probability Haar measure on G / Gamma. Congruence lattices use
// the coset decomposition of the ambient SL2(Z) domain.
inline HaarSample sample_mu(const Lattice& L, Rng& rng, SamplerStats* stats = nullptr, double norm_cap = kNormCap,
                            int max_tries = 1000) {
  if (!L.domain) throw std::invalid_argument("lattice has no fundamental domain to sample from");
  const DomainSpec& d = *L.domain;
  for (int t = 0; t < max_tries; ++t) {
    const std::complex<double> z0 = detail::sample_domain(d, rng, stats, max_tries);
    const double theta = uniform(rng, 0, 2 * std::numbers::pi);
    Mat2d h = iwasawa(z0.real(), z0.imag(), theta);
    if (L.coset_reps.size() > 1) {
      const auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(L.coset_reps.size()));
      h = to_double(L.coset_reps[std::min(k, L.coset_reps.size() - 1)]) * h;
    }
    if (op_norm(h) > norm_cap) {
      if (stats) ++stats->resamples;
      continue;
    }
    if (stats) ++stats->draws;
    return {h, inverse(h), mobius(h, {0, 1}), theta};
  }
  throw std::runtime_error("norm cap resampling exceeded its cap");
}

// Cone measure: nu uniform on (0, 1], A = sqrt(nu) g.
inline ConeSample sample_cone(const Lattice& L, Rng& rng, SamplerStats* stats = nullptr, double norm_cap = kNormCap) {
  const double nu = uniform_open_closed(rng);
  HaarSample s = sample_mu(L, rng, stats, norm_cap);
  return {nu, scaled(s.g, std::sqrt(nu)), s};
}

}  // namespace orbitstat
