#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace orbitstat {

using Rng = std::mt19937_64;

// Stream for one worker: seeded from (root seed, worker index) through seed_seq.
inline Rng make_stream(std::uint64_t seed, std::uint64_t worker) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(worker), static_cast<std::uint32_t>(worker >> 32), 0x9e3779b9u};
  return Rng(ss);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
// Uniform on (0, 1].
inline double uniform_open_closed(Rng& rng) { return 1.0 - uniform01(rng); }
inline double uniform(Rng& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

// Running mean and variance (Welford), mergeable.
struct RunningStats {
  std::int64_t n = 0;
  double mean = 0, m2 = 0, max = -INFINITY;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
    if (x > max) max = x;
  }
  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double tot = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / tot;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / tot;
    n += o.n;
    if (o.max > max) max = o.max;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_of_mean() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

struct Estimate {
  double value = 0;
  double stderr = 0;
  std::int64_t n = 0;
};

// Splits n draws over `workers` threads; worker w handles a contiguous block
// with its own stream make_stream(seed, w). body(rng, acc) performs one draw and
// updates the worker-local accumulator. Accumulators merge in worker order, so
// results depend only on (seed, workers).
template <class Acc, class Body>
Acc run_parallel(std::int64_t n, int workers, std::uint64_t seed, Body&& body) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  std::vector<Acc> accs(static_cast<std::size_t>(workers));
  auto task = [&](int w) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(w));
    const std::int64_t lo = n * w / workers, hi = n * (w + 1) / workers;
    for (std::int64_t i = lo; i < hi; ++i) body(rng, accs[static_cast<std::size_t>(w)]);
  };
  if (workers == 1) {
    task(0);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      threads.emplace_back([&, w] {
        try {
          task(w);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  Acc total = accs[0];
  for (std::size_t w = 1; w < accs.size(); ++w) total.merge(accs[w]);
  return total;
}

// body(i) for i in [0, n), indices dealt round-robin to `workers` threads.
template <class Body>
void parallel_for(std::int64_t n, int workers, Body&& body) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (workers == 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        for (std::int64_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace orbitstat
