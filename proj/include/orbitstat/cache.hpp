#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbit.hpp"

namespace orbitstat {

// Line-based orbit cache:
//   orbitstat-orbit-cache <version>
//   config <fnv1a-64 hex>
//   canonical <lattice canonical string>;cusp=<index>
//   radius <R>
//   count <n>
//   <x coefficients> | <y coefficients> | <word length>     (n lines)
inline constexpr int kCacheVersion = 1;
inline constexpr const char* kCacheEnv = "ORBITSTAT_CACHE_DIR";

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string orbit_config_string(const DiscreteOrbit& o) {
  return o.lattice().canonical() + ";cusp=" + std::to_string(o.cusp_index());
}

inline std::string orbit_config_hash(const DiscreteOrbit& o) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(orbit_config_string(o));
  return os.str();
}

inline std::filesystem::path cache_path(const std::filesystem::path& dir, const DiscreteOrbit& o) {
  return dir / ("orbit-" + o.lattice().name() + "-" + orbit_config_hash(o) + ".txt");
}

// Directory from the flag, else the environment variable, else none.
inline std::optional<std::filesystem::path> resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return std::filesystem::path(flag);
  if (const char* env = std::getenv(kCacheEnv); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

inline void write_cache(const std::filesystem::path& file, const DiscreteOrbit& o, double R) {
  const auto vecs = o.enumerate_ball(R);
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write cache file " + tmp);
    out << "orbitstat-orbit-cache " << kCacheVersion << "\n";
    out << "config " << orbit_config_hash(o) << "\n";
    out << "canonical " << orbit_config_string(o) << "\n";
    out << "radius " << std::setprecision(17) << R << "\n";
    out << "count " << vecs.size() << "\n";
    for (const auto& v : vecs) {
      for (const auto& c : v.x.coeffs()) out << c << ' ';
      out << '|';
      for (const auto& c : v.y.coeffs()) out << ' ' << c;
      out << " | " << v.word_length << "\n";
    }
    if (!out) throw std::runtime_error("failed writing cache file " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

struct CacheContents {
  double radius = 0;
  std::vector<OrbitVector> vectors;
};

// nullopt when the file is absent, of another version, or for another configuration.
inline std::optional<CacheContents> read_cache(const std::filesystem::path& file, const DiscreteOrbit& o) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string tag, hash;
  int version = 0;
  if (!(in >> tag >> version) || tag != "orbitstat-orbit-cache" || version != kCacheVersion) return std::nullopt;
  if (!(in >> tag >> hash) || tag != "config" || hash != orbit_config_hash(o)) return std::nullopt;
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  if (line != "canonical " + orbit_config_string(o)) return std::nullopt;
  CacheContents c;
  std::size_t n = 0;
  if (!(in >> tag >> c.radius) || tag != "radius") throw std::runtime_error("corrupt cache file " + file.string());
  if (!(in >> tag >> n) || tag != "count") throw std::runtime_error("corrupt cache file " + file.string());
  std::getline(in, line);
  const NumberRing* ring = o.lattice().rp();
  const auto deg = static_cast<std::size_t>(ring->degree());
  c.vectors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated cache file " + file.string());
    std::istringstream ls(line);
    RingElement::Coeffs cx, cy;
    std::string tok;
    auto read_coeffs = [&](RingElement::Coeffs& out) {
      for (std::size_t k = 0; k < deg; ++k) {
        if (!(ls >> tok)) throw std::runtime_error("corrupt cache line in " + file.string());
        out.push_back(Integer::from_string(tok));
      }
      if (!(ls >> tok) || tok != "|") throw std::runtime_error("corrupt cache line in " + file.string());
    };
    read_coeffs(cx);
    read_coeffs(cy);
    OrbitVector v;
    v.x = RingElement(ring, std::move(cx));
    v.y = RingElement(ring, std::move(cy));
    if (!(ls >> v.word_length)) throw std::runtime_error("corrupt cache line in " + file.string());
    v.coords = {o.scale() * v.x.embed(), o.scale() * v.y.embed()};
    v.norm_sq = v.coords.x * v.coords.x + v.coords.y * v.coords.y;
    c.vectors.push_back(std::move(v));
  }
  return c;
}

// Seeds the orbit from the cache when it covers R; otherwise enumerates and
// rewrites the file. Returns true on a cache hit.
inline bool use_cache(const std::filesystem::path& dir, const DiscreteOrbit& o, double R) {
  const auto file = cache_path(dir, o);
  if (auto c = read_cache(file, o); c && c->radius >= R) {
    o.seed_cache(std::move(c->vectors), c->radius);
    return true;
  }
  write_cache(file, o, R);
  return false;
}

}  // namespace orbitstat
