#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace orbitstat {

// Lattice description, as read from flags or a key=value file.
//
//   # comment
//   kind = sl2z | hecke | congruence | custom
//   q = 5                      hecke, custom (coefficient ring of H_q)
//   N = 2                      congruence
//   delta = 0.6667
//   covolume = 1.0471975512    custom
//   minus_identity = true      custom
//   cusp_width = 1             custom, ring element
//   generator = 0, -1, 1, 0    custom, repeatable; four ring elements
//
// A ring element is its coefficient list on the basis 1, lambda, lambda^2, ...
// joined by ':' (e.g. "1:1" is 1 + lambda); a single integer is a rational integer.
struct LatticeConfig {
  std::string kind = "sl2z";
  int q = 3;
  int N = 1;
  double delta = 2.0 / 3.0;
  double covolume = 0;
  bool minus_identity = true;
  std::string cusp_width;
  std::vector<std::string> generators;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

inline RingElement parse_ring_element(const NumberRing* ring, const std::string& text) {
  RingElement::Coeffs c;
  std::stringstream ss(trim(text));
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    tok = trim(tok);
    if (tok.empty()) throw std::invalid_argument("empty coefficient in '" + text + "'");
    c.push_back(Integer::from_string(tok));
  }
  if (c.empty() || static_cast<int>(c.size()) > ring->degree())
    throw std::invalid_argument("ring element '" + text + "' needs 1 to " + std::to_string(ring->degree()) + " coefficients");
  while (static_cast<int>(c.size()) < ring->degree()) c.push_back(Integer(0));
  return RingElement(ring, std::move(c));
}

}  // namespace detail

inline LatticeConfig parse_lattice_config(std::istream& in) {
  LatticeConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq)), val = detail::trim(line.substr(eq + 1));
    try {
      if (key == "kind") cfg.kind = val;
      else if (key == "q") cfg.q = std::stoi(val);
      else if (key == "N") cfg.N = std::stoi(val);
      else if (key == "delta") cfg.delta = std::stod(val);
      else if (key == "covolume") cfg.covolume = std::stod(val);
      else if (key == "minus_identity") cfg.minus_identity = detail::parse_bool(val);
      else if (key == "cusp_width") cfg.cusp_width = val;
      else if (key == "generator") cfg.generators.push_back(val);
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": value out of range");
    }
  }
  return cfg;
}

inline LatticeConfig read_lattice_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open lattice config " + path);
  return parse_lattice_config(in);
}

// Short names: sl2z, hecke<q>, gamma<N>.
inline LatticeConfig lattice_config_from_name(const std::string& name, int q = 5, int N = 2, double delta = 2.0 / 3.0) {
  LatticeConfig cfg;
  cfg.delta = delta;
  auto number_after = [&](std::size_t k, int fallback) {
    if (name.size() == k) return fallback;
    const std::string rest = name.substr(k);
    if (!std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw std::invalid_argument("unknown lattice '" + name + "'");
    return std::stoi(rest);
  };
  if (name == "sl2z") {
    cfg.kind = "sl2z";
  } else if (name.rfind("hecke", 0) == 0) {
    cfg.kind = "hecke";
    cfg.q = number_after(5, q);
  } else if (name.rfind("gamma", 0) == 0) {
    cfg.kind = "congruence";
    cfg.N = number_after(5, N);
  } else if (name == "congruence") {
    cfg.kind = "congruence";
    cfg.N = N;
  } else {
    throw std::invalid_argument("unknown lattice '" + name + "' (sl2z, hecke, hecke<q>, gamma<N>, congruence)");
  }
  return cfg;
}

inline Lattice build_lattice(const LatticeConfig& cfg) {
  if (cfg.kind == "sl2z") return build_sl2z(cfg.delta);
  if (cfg.kind == "hecke") return build_hecke(cfg.q, cfg.delta);
  if (cfg.kind == "congruence") return build_congruence(cfg.N, cfg.delta);
  if (cfg.kind == "custom") {
    CustomLatticeSpec spec;
    spec.q = cfg.q;
    spec.delta = cfg.delta;
    spec.covolume = cfg.covolume;
    spec.contains_minus_identity = cfg.minus_identity;
    auto ring = ring_for_hecke(cfg.q);
    for (const auto& g : cfg.generators) {
      std::vector<RingElement> e;
      std::stringstream ss(g);
      std::string tok;
      while (std::getline(ss, tok, ',')) e.push_back(detail::parse_ring_element(ring.get(), tok));
      if (e.size() != 4) throw std::invalid_argument("generator needs four entries: '" + g + "'");
      spec.generators.push_back(make_group_element(e[0], e[1], e[2], e[3]));
    }
    if (!cfg.cusp_width.empty()) spec.cusp_width = detail::parse_ring_element(ring.get(), cfg.cusp_width);
    Lattice L = build_custom(spec);
    return L;
  }
  throw std::invalid_argument("unknown lattice kind '" + cfg.kind + "'");
}

}  // namespace orbitstat
