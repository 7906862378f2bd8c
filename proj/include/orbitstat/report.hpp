#pragma once

#include <cmath>
#include <json.hpp>
#include <string>

#include "checks.hpp"
#include "counting.hpp"

namespace orbitstat {

inline constexpr int kSchemaVersion = 1;

using json = nlohmann::ordered_json;

// Non-finite doubles become null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json matrix_json(const Mat2d& m) { return json::array({json::array({num(m.a), num(m.b)}), json::array({num(m.c), num(m.d)})}); }

inline json to_json(const CheckReport& r) {
  json j;
  j["formula"] = r.formula;
  j["lattice"] = r.lattice;
  json p = json::object();
  for (const auto& [k, v] : r.params) p[k] = num(v);
  j["params"] = p;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["workers"] = r.workers;
  j["estimate"] = num(r.estimate);
  j["stderr"] = num(r.stderr);
  j["reference"] = num(r.reference);
  j["reference_uncertainty"] = num(r.reference_uncertainty);
  j["z_score"] = num(r.z_score);
  j["relative_gap"] = num(r.relative_gap);
  j["tolerance"] = num(r.tolerance);
  j["floor"] = num(r.floor);
  j["resample_rate"] = num(r.resample_rate);
  j["bias_bound"] = num(r.bias_bound);
  j["excluded"] = r.excluded;
  json b = json::object();
  for (const auto& [k, v] : r.breakdown) b[k] = num(v);
  j["breakdown"] = b;
  j["pass"] = r.pass;
  return j;
}

inline json to_json(const LogLogFit& f) {
  json j;
  j["defined"] = f.defined;
  j["slope"] = num(f.slope);
  j["intercept"] = num(f.intercept);
  j["residual"] = num(f.residual);
  j["points"] = f.points;
  return j;
}

inline json to_json(const DiscrepancyReport& r) {
  json j;
  j["lattice"] = r.lattice;
  j["shape"] = r.shape.name();
  j["shape_area"] = r.shape.area();
  j["A"] = matrix_json(r.A);
  j["fitted_exponent"] = num(r.fitted_exponent());
  j["target_exponent"] = num(r.target_exponent);
  j["fit"] = to_json(r.fit);
  j["fit_from_radius"] = r.radii.empty() ? json(nullptr) : num(r.radii[r.fit_from]);
  j["zero_excluded"] = r.zero_excluded;
  j["sign_excluded"] = r.sign_excluded;
  j["sign_changes"] = r.sign_changes;
  json rows = json::array();
  for (std::size_t i = 0; i < r.radii.size(); ++i)
    rows.push_back({{"R", num(r.radii[i])}, {"count", r.counts[i]}, {"main_term", num(r.main_terms[i])},
                    {"discrepancy", num(r.discrepancies[i])}});
  j["rows"] = rows;
  return j;
}

inline json to_json(const CongruenceCount& c) {
  json j;
  j["N"] = c.N;
  j["cusp"] = c.cusp;
  j["R"] = num(c.R);
  j["residue"] = json::array({c.residue_x, c.residue_y});
  j["exact_count"] = c.exact_count;
  j["main_term"] = num(c.main_term);
  j["error"] = num(c.error());
  j["constant"] = num(c.constant);
  return j;
}

}  // namespace orbitstat
