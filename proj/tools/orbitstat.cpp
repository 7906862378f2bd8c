// orbitstat command-line driver.
//
// Exit codes: 0 success / check passed, 1 check failed, 2 usage or invalid
// argument, 3 runtime failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <orbitstat.hpp>
#include <orbitstat/report.hpp>

using namespace orbitstat;

namespace {

struct LatticeOpts {
  std::string name = "sl2z";
  int q = 5;
  int N = 2;
  double delta = 2.0 / 3.0;
  std::string file;
};

struct Common {
  LatticeOpts lat;
  std::string cusp = "inf";
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output;
  std::string cache_dir;
};

struct CheckFlags {
  std::int64_t n = 100'000;
  double tolerance = 0.10;
  double floor = 0.0;
  double reference_scale = 1.0;
  double norm_cap = kNormCap;
  double c_trunc = 0;  // 0: per-lattice default
  std::size_t max_centers = 512;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, Common& c, bool cusp = true) {
  sub->add_option("--lattice", c.lat.name, "sl2z, hecke, hecke<q>, gamma<N> or congruence")->capture_default_str();
  sub->add_option("--q", c.lat.q, "Hecke index for --lattice hecke")->capture_default_str()->check(CLI::Range(3, 12));
  sub->add_option("--N", c.lat.N, "level for --lattice congruence")->capture_default_str()->check(CLI::Range(1, 12));
  sub->add_option("--delta", c.lat.delta, "spectral gap exponent")->capture_default_str();
  sub->add_option("--lattice-file", c.lat.file, "lattice description file (overrides --lattice)");
  if (cusp) sub->add_option("--cusp", c.cusp, "cusp by representative (inf, 0, 1, p/q) or index")->capture_default_str();
  sub->add_option("--seed", c.seed)->capture_default_str();
  sub->add_option("--workers", c.workers)->capture_default_str()->check(CLI::Range(1, 256));
  sub->add_option("-o,--output", c.output, "output file (default stdout)");
  sub->add_option("--cache-dir", c.cache_dir, "orbit cache directory (default $ORBITSTAT_CACHE_DIR)");
}

void add_check_flags(CLI::App* sub, CheckFlags& f) {
  sub->add_option("--n", f.n, "Monte Carlo samples")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--tolerance", f.tolerance)->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--floor", f.floor)->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--reference-scale", f.reference_scale, "multiplies the reference (detector test)")
      ->capture_default_str();
  sub->add_option("--norm-cap", f.norm_cap)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--c-trunc", f.c_trunc, "determinant table truncation (0: lattice default)")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--max-centers", f.max_centers)->capture_default_str()->check(CLI::PositiveNumber);
}

std::shared_ptr<const Lattice> make_lattice(const LatticeOpts& o) {
  LatticeConfig cfg = o.file.empty() ? lattice_config_from_name(o.name, o.q, o.N, o.delta) : read_lattice_config(o.file);
  return std::make_shared<const Lattice>(build_lattice(cfg));
}

std::vector<double> parse_list(const std::string& s);
std::shared_ptr<const DiscreteOrbit> make_orbit(std::shared_ptr<const Lattice> L, std::size_t cusp, const Common& c,
                                               double R);

std::size_t resolve_cusp(const Lattice& L, const std::string& tok) {
  const std::string t = tok == "\xe2\x88\x9e" || tok == "infinity" ? "inf" : tok;
  for (std::size_t i = 0; i < L.cusps.size(); ++i)
    if (L.cusps[i].representative.str() == t) return i;
  if (!t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
    const auto i = std::stoul(t);
    if (i < L.cusps.size()) return i;
  }
  std::string known;
  for (const auto& c : L.cusps) known += (known.empty() ? "" : ", ") + c.representative.str();
  throw UsageError("unknown cusp '" + tok + "' for " + L.name() + " (cusps: " + known + ")");
}

std::pair<std::size_t, std::size_t> resolve_cusp_pair(const Lattice& L, const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw UsageError("--cusps takes two cusps a,b");
  return {resolve_cusp(L, s.substr(0, comma)), resolve_cusp(L, s.substr(comma + 1))};
}

// Components "scale:cusp"; without any, the orbit of --cusp at scale 1.
HolonomySet holonomy(std::shared_ptr<const Lattice> L, const Common& c, const std::vector<std::string>& comps, double R) {
  std::vector<HolonomySet::Component> out;
  auto add = [&](double scale, const std::string& cusp) {
    out.push_back({scale, make_orbit(L, resolve_cusp(*L, cusp), c, R / scale)});
  };
  if (comps.empty()) add(1.0, c.cusp);
  for (const auto& t : comps) {
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw UsageError("component '" + t + "' is not scale:cusp");
    add(parse_list(t.substr(0, colon)).at(0), t.substr(colon + 1));
  }
  return assemble_holonomy(std::move(out));
}

double default_c_trunc(const Lattice& L) {
  switch (L.kind) {
    case LatticeKind::sl2z: return 1e5;
    case LatticeKind::congruence: return 1e4;
    default: return 3000;
  }
}

CheckOptions check_options(const Common& c, const CheckFlags& f, const Lattice& L) {
  CheckOptions o;
  o.n = f.n;
  o.seed = c.seed;
  o.workers = c.workers;
  o.tolerance = f.tolerance;
  o.floor = f.floor;
  o.reference_scale = f.reference_scale;
  o.norm_cap = f.norm_cap;
  o.C_trunc = f.c_trunc > 0 ? f.c_trunc : default_c_trunc(L);
  o.max_centers = f.max_centers;
  return o;
}

std::shared_ptr<const DiscreteOrbit> make_orbit(std::shared_ptr<const Lattice> L, std::size_t cusp,
                                               const Common& c, double R) {
  auto o = std::make_shared<const DiscreteOrbit>(std::move(L), cusp);
  if (auto dir = resolve_cache_dir(c.cache_dir); dir && R > 0) use_cache(*dir, *o, R);
  return o;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw UsageError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

BorelShape parse_shape(const std::string& s) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "disk") return BorelShape::disk();
  if (kind == "square") return BorelShape::square();
  if (kind == "sector") return BorelShape::sector(parse_list(arg).at(0));
  if (kind == "annulus") return BorelShape::annulus(parse_list(arg).at(0));
  if (kind == "polygon") {
    // polygon:x0,y0,x1,y1,...
    auto v = parse_list(arg);
    if (v.size() % 2) throw UsageError("polygon needs an even number of coordinates");
    std::vector<Vec2d> pts;
    for (std::size_t i = 0; i < v.size(); i += 2) pts.push_back({v[i], v[i + 1]});
    return BorelShape::polygon(std::move(pts));
  }
  throw UsageError("unknown shape '" + s + "' (disk, square, sector:a, annulus:r0, polygon:x,y,...)");
}

Mat2d parse_matrix(const std::vector<double>& v) {
  if (v.size() != 4) throw UsageError("--A takes four entries a,b,c,d");
  return {v[0], v[1], v[2], v[3]};
}

std::vector<Interval> parse_intervals(const std::string& s) {
  std::vector<Interval> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw UsageError("interval '" + tok + "' is not lo:hi");
    auto lo = parse_list(tok.substr(0, colon)), hi = parse_list(tok.substr(colon + 1));
    out.push_back({lo.at(0), hi.at(0)});
  }
  if (out.empty()) throw UsageError("no intervals given");
  return out;
}

// Every option of the subcommand chain, by long name, as given or defaulted.
json echo_config(const CLI::App* app) {
  json cfg = json::object();
  for (const CLI::App* a = app; a; a = a->get_parent()) {
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config" || name.empty() || cfg.contains(name)) continue;
      if (opt->count()) {
        const auto& res = opt->results();
        cfg[name] = res.size() == 1 ? json(res[0]) : json(res);
      } else if (!opt->get_default_str().empty()) {
        cfg[name] = opt->get_default_str();
      }
    }
  }
  return cfg;
}

std::string command_path(const CLI::App* app) {
  std::string path;
  for (const CLI::App* a = app; a && a->get_parent(); a = a->get_parent())
    path = a->get_name() + (path.empty() ? "" : " " + path);
  return path;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_json(const Common& c, const CLI::App* app, json result) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command_path(app);
  j["config"] = echo_config(app);
  j["result"] = std::move(result);
  Sink s(c.output);
  s.os() << j.dump(2) << "\n";
}

void csv_preamble(std::ostream& os, const CLI::App* app) {
  os << "# schema_version=" << kSchemaVersion << "\n";
  os << "# command=" << command_path(app) << "\n";
  os << "# config=" << echo_config(app).dump() << "\n";
}

std::ofstream open_plot_file(const std::string& path, const CLI::App* app) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open plot data file " + path);
  f.precision(17);
  csv_preamble(f, app);
  return f;
}

int exit_for(const CheckReport& r) { return r.pass ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbit statistics of planar lattice orbits of Fuchsian groups"};
  app.set_config("--config", "", "TOML/INI file with flag values (same key names)");
  app.require_subcommand(1);
  app.set_version_flag("--version", "orbitstat schema " + std::to_string(kSchemaVersion));

  Common c;
  CheckFlags cf;
  double radius = 0;
  int code = 0;
  const CLI::App* ran = nullptr;

  // enumerate
  auto* en = app.add_subcommand("enumerate", "orbit vectors of norm <= R as CSV");
  add_common(en, c);
  en->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);

  // count
  auto* cnt = app.add_subcommand("count", "exact orbit count with main term");
  add_common(cnt, c);
  cnt->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);

  // phi
  auto* ph = app.add_subcommand("phi", "generalized totient table or Phi(t)");
  add_common(ph, c, false);
  std::string cusps = "inf,inf";
  double max_c = 0;
  std::string t_values;
  std::string plot_data;
  ph->add_option("--cusps", cusps, "cusp pair a,b")->capture_default_str();
  ph->add_option("--max-c", max_c, "table of phi(c) for c <= max-c")->check(CLI::PositiveNumber);
  ph->add_option("--t", t_values, "comma-separated t values for Phi(t)");
  ph->add_option("--c-trunc", cf.c_trunc, "truncation for Phi(t) (0: lattice default)")->check(CLI::NonNegativeNumber);
  ph->add_option("--emit-plot-data", plot_data, "long-format CSV of t, Phi(t)");

  // partial-sum
  auto* ps = app.add_subcommand("partial-sum", "sum of phi(c) over c < T");
  add_common(ps, c, false);
  double T = 0;
  ps->add_option("--cusps", cusps)->capture_default_str();
  ps->add_option("--T", T)->required()->check(CLI::PositiveNumber);

  // friends / detpairs / paircorr / lengthdensity
  std::vector<std::string> components;
  auto holonomy_flag = [&](CLI::App* sub) {
    sub->add_option("--component", components, "scale:cusp, repeatable (default 1:<--cusp>)");
  };
  double eta = 0, D = 0, s = 0;
  auto* fr = app.add_subcommand("friends", "pairs (v, w), w != v, of norm <= R with |v - w| < eta");
  add_common(fr, c);
  holonomy_flag(fr);
  fr->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);
  fr->add_option("--eta", eta)->required()->check(CLI::PositiveNumber);

  auto* dp = app.add_subcommand("detpairs", "pairs with 0 < |det| <= D and |w| <= s|v|");
  add_common(dp, c);
  holonomy_flag(dp);
  dp->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);
  dp->add_option("--D", D)->required()->check(CLI::PositiveNumber);
  dp->add_option("--s", s)->default_val(1.0)->check(CLI::PositiveNumber);

  auto* pc = app.add_subcommand("paircorr", "pair correlation R_2 and its cone average");
  add_common(pc, c);
  holonomy_flag(pc);
  pc->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);
  pc->add_option("--s", s)->required()->check(CLI::PositiveNumber);
  CheckFlags pcf;
  pcf.n = 0;
  add_check_flags(pc, pcf);

  auto* ld = app.add_subcommand("lengthdensity", "fraction of vectors with norm in each interval");
  add_common(ld, c);
  holonomy_flag(ld);
  std::string intervals;
  ld->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);
  ld->add_option("--intervals", intervals, "lo:hi,lo:hi,...")->required();

  // check
  auto* ck = app.add_subcommand("check", "Monte Carlo formula checks");
  ck->require_subcommand(1);
  auto* fm = ck->add_subcommand("first-moment", "mean of the ball transform");
  add_common(fm, c);
  add_check_flags(fm, cf);
  fm->add_option("--radius", radius)->required()->check(CLI::NonNegativeNumber);

  auto* pm = ck->add_subcommand("pair-moment", "mean of the pair transform");
  add_common(pm, c, false);
  add_check_flags(pm, cf);
  std::string kind = "ball";
  double radius2 = 0;
  pm->add_option("--cusps", cusps)->capture_default_str();
  pm->add_option("--kind", kind)->capture_default_str()->check(CLI::IsMember({"ball", "friend", "det"}));
  pm->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);
  pm->add_option("--radius2", radius2, "second ball radius (ball kind, default --radius)")->check(CLI::PositiveNumber);
  pm->add_option("--eta", eta, "friend kind")->check(CLI::PositiveNumber);
  pm->add_option("--D", D, "det kind")->check(CLI::PositiveNumber);
  pm->add_option("--s", s, "det kind")->check(CLI::PositiveNumber);

  auto* sm = ck->add_subcommand("second-moment", "mean square of the ball transform");
  add_common(sm, c);
  add_check_flags(sm, cf);
  sm->add_option("--radius", radius)->required()->check(CLI::NonNegativeNumber);

  auto* ap = ck->add_subcommand("avg-paircorr", "cone-averaged pair correlation against the ball area");
  add_common(ap, c);
  holonomy_flag(ap);
  add_check_flags(ap, cf);
  ap->add_option("--radius", radius)->required()->check(CLI::PositiveNumber);
  ap->add_option("--s", s)->required()->check(CLI::PositiveNumber);

  auto* sd = ck->add_subcommand("second-moment-discrepancy", "normalized second moment of the discrepancy");
  add_common(sd, c);
  add_check_flags(sd, cf);
  std::string areas = "100,1000,10000";
  double spread = 10;
  sd->add_option("--areas", areas)->capture_default_str();
  sd->add_option("--spread", spread, "max/min ratio bound")->capture_default_str()->check(CLI::PositiveNumber);

  // discrepancy
  auto* ds = app.add_subcommand("discrepancy", "count minus main term over dilates of a shape");
  add_common(ds, c);
  double rmin = 200, rmax = 2000;
  std::size_t num_radii = 400;
  std::string shape = "disk";
  std::vector<double> A{1, 0, 0, 1};
  ds->add_option("--rmin", rmin)->capture_default_str()->check(CLI::PositiveNumber);
  ds->add_option("--rmax", rmax)->capture_default_str()->check(CLI::PositiveNumber);
  ds->add_option("--num-radii", num_radii)->capture_default_str()->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  ds->add_option("--shape", shape, "disk, square, sector:a, annulus:r0, polygon:x,y,...")->capture_default_str();
  ds->add_option("--A", A, "matrix a,b,c,d in SL2(R)")->delimiter(',')->expected(4);
  ds->add_option("--emit-plot-data", plot_data, "long-format CSV of R, series, value");

  // congruence-count
  auto* cc = app.add_subcommand("congruence-count", "primitive residue scan against the Moebius main term");
  std::int64_t level = 1;
  std::size_t cusp_index = 0;
  cc->add_option("--N", level)->required()->check(CLI::Range(1, 12));
  cc->add_option("--cusp-index", cusp_index)->capture_default_str();
  cc->add_option("--radius", radius)->required()->check(CLI::NonNegativeNumber);
  cc->add_option("-o,--output", c.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*en) {
      ran = en;
      auto L = make_lattice(c.lat);
      auto o = make_orbit(L, resolve_cusp(*L, c.cusp), c, radius);
      const auto pts = o->enumerate_ball(radius);
      Sink sink(c.output);
      auto& os = sink.os();
      os.precision(17);
      csv_preamble(os, en);
      os << "x,y,norm,x_exact,y_exact,word_length\n";
      for (const auto& v : pts)
        os << v.coords.x << "," << v.coords.y << "," << std::sqrt(v.norm_sq) << "," << v.x.str() << "," << v.y.str()
           << "," << v.word_length << "\n";
    } else if (*cnt) {
      ran = cnt;
      auto L = make_lattice(c.lat);
      auto o = make_orbit(L, resolve_cusp(*L, c.cusp), c, 0);
      const auto n = o->count(radius);
      const double main = c_gamma(*L) * std::numbers::pi * radius * radius;
      write_json(c, cnt, {{"lattice", L->name()}, {"radius", radius}, {"count", n}, {"c_gamma", c_gamma(*L)},
                          {"main_term", main}, {"discrepancy", double(n) - main}});
    } else if (*ph) {
      ran = ph;
      auto L = make_lattice(c.lat);
      const auto [a, b] = resolve_cusp_pair(*L, cusps);
      if (max_c <= 0 && t_values.empty()) throw UsageError("phi needs --max-c or --t");
      if (max_c > 0) {
        auto table = build_pair_table(L, a, b, max_c);
        Sink sink(c.output);
        auto& os = sink.os();
        os.precision(17);
        csv_preamble(os, ph);
        os << "c,c_exact,phi\n";
        for (std::size_t i = 0; i < table.size(); ++i)
          os << table.values[i] << "," << table.keys[i].str() << "," << table.multiplicity[i] << "\n";
      } else {
        const double C = cf.c_trunc > 0 ? cf.c_trunc : default_c_trunc(*L);
        auto table = build_pair_table(L, a, b, C);
        PhiEvaluator phi(table, C);
        json rows = json::array();
        std::ofstream plot;
        if (!plot_data.empty()) {
          plot = open_plot_file(plot_data, ph);
          plot << "t,series,value\n";
        }
        for (double t : parse_list(t_values)) {
          if (!(t > 0) || t > C) throw UsageError("t must lie in (0, c-trunc]");
          const auto v = phi(t);
          rows.push_back({{"t", t}, {"phi", num(v.value)}, {"tail_bound", num(v.tail_bound)}});
          if (plot.is_open()) plot << t << ",Phi," << v.value << "\n" << t << ",c_gamma," << phi.c_gamma() << "\n";
        }
        write_json(c, ph, {{"lattice", L->name()}, {"cusps", {L->cusps[a].representative.str(), L->cusps[b].representative.str()}},
                           {"homothetic", table.is_homothetic_pair}, {"c_trunc", C}, {"c_gamma", phi.c_gamma()},
                           {"values", rows}});
      }
    } else if (*ps) {
      ran = ps;
      auto L = make_lattice(c.lat);
      const auto [a, b] = resolve_cusp_pair(*L, cusps);
      auto table = build_pair_table(L, a, b, T);
      const auto v = partial_sum(table, T);
      const double ref = 0.5 * c_gamma(*L) * T * T;
      write_json(c, ps, {{"lattice", L->name()}, {"T", T}, {"partial_sum", v}, {"main_term", ref},
                         {"ratio", double(v) / ref}});
    } else if (*fr) {
      ran = fr;
      auto L = make_lattice(c.lat);
      auto S = holonomy(L, c, components, radius);
      write_json(c, fr, {{"lattice", L->name()}, {"radius", radius}, {"eta", eta}, {"points", S.count(radius)},
                         {"friends", friends(S, radius, eta)}});
    } else if (*dp) {
      ran = dp;
      auto L = make_lattice(c.lat);
      auto S = holonomy(L, c, components, radius);
      const auto n = det_pairs(S, radius, D, s);
      write_json(c, dp, {{"lattice", L->name()}, {"radius", radius}, {"D", D}, {"s", s}, {"det_pairs", n},
                         {"per_R2", double(n) / (radius * radius)}});
    } else if (*pc) {
      ran = pc;
      auto L = make_lattice(c.lat);
      auto S = holonomy(L, c, components, radius + s);
      json r = {{"lattice", L->name()}, {"radius", radius}, {"s", s}, {"density", S.density()},
                {"r2", num(pair_correlation(S, radius, s, S.density()))}, {"ball_area", std::numbers::pi * s * s}};
      if (pcf.n > 0) r["average"] = to_json(avg_pair_correlation(*L, S, s, radius, check_options(c, pcf, *L)));
      write_json(c, pc, r);
    } else if (*ld) {
      ran = ld;
      auto L = make_lattice(c.lat);
      auto S = holonomy(L, c, components, radius);
      json rows = json::array();
      for (const auto& iv : parse_intervals(intervals))
        rows.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"density", num(length_density(S, {iv}, radius))},
                        {"uniform", (iv.hi * iv.hi - iv.lo * iv.lo) / (radius * radius)}});
      write_json(c, ld, {{"lattice", L->name()}, {"radius", radius}, {"intervals", rows}});
    } else if (*fm) {
      ran = fm;
      auto L = make_lattice(c.lat);
      auto o = make_orbit(L, resolve_cusp(*L, c.cusp), c, 0);
      const auto r = first_moment_check(*L, *o, radius, check_options(c, cf, *L));
      write_json(c, fm, to_json(r));
      code = exit_for(r);
    } else if (*pm) {
      ran = pm;
      auto L = make_lattice(c.lat);
      const auto [a, b] = resolve_cusp_pair(*L, cusps);
      const auto opt = check_options(c, cf, *L);
      TestFunction f = TestFunction::pair_ball(radius, radius2 > 0 ? radius2 : radius);
      if (kind == "friend") {
        if (!(eta > 0)) throw UsageError("--kind friend needs --eta");
        f = TestFunction::pair_friend(radius, eta);
      } else if (kind == "det") {
        if (!(D > 0 && s > 0)) throw UsageError("--kind det needs --D and --s");
        f = TestFunction::pair_det(radius, D, s);
      }
      auto oa = make_orbit(L, a, c, 0), ob = make_orbit(L, b, c, 0);
      auto table = build_pair_table(L, a, b, opt.C_trunc);
      const auto r = pair_moment_check(*L, *oa, *ob, f, table, opt);
      write_json(c, pm, to_json(r));
      code = exit_for(r);
    } else if (*sm) {
      ran = sm;
      auto L = make_lattice(c.lat);
      const auto cusp = resolve_cusp(*L, c.cusp);
      const auto opt = check_options(c, cf, *L);
      auto o = make_orbit(L, cusp, c, 0);
      auto table = build_pair_table(L, cusp, cusp, opt.C_trunc);
      const auto r = second_moment_check(*L, *o, radius, table, opt);
      write_json(c, sm, to_json(r));
      code = exit_for(r);
    } else if (*ap) {
      ran = ap;
      auto L = make_lattice(c.lat);
      auto S = holonomy(L, c, components, 0);
      const auto r = avg_pair_correlation(*L, S, s, radius, check_options(c, cf, *L));
      write_json(c, ap, to_json(r));
      code = exit_for(r);
    } else if (*sd) {
      ran = sd;
      auto L = make_lattice(c.lat);
      auto o = make_orbit(L, resolve_cusp(*L, c.cusp), c, 0);
      const auto r = second_moment_discrepancy_check(*L, *o, parse_list(areas), check_options(c, cf, *L), spread);
      write_json(c, sd, to_json(r));
      code = exit_for(r);
    } else if (*ds) {
      ran = ds;
      if (!(rmax > rmin)) throw UsageError("--rmax must exceed --rmin");
      auto L = make_lattice(c.lat);
      auto o = make_orbit(L, resolve_cusp(*L, c.cusp), c, 0);
      const auto r = discrepancy_experiment(*L, *o, parse_shape(shape), parse_matrix(A), geometric_radii(rmin, rmax, num_radii),
                                            c.workers);
      if (!plot_data.empty()) {
        auto plot = open_plot_file(plot_data, ds);
        plot << "R,series,value\n";
        for (std::size_t i = 0; i < r.radii.size(); ++i) {
          plot << r.radii[i] << ",count," << r.counts[i] << "\n";
          plot << r.radii[i] << ",main_term," << r.main_terms[i] << "\n";
          plot << r.radii[i] << ",discrepancy," << r.discrepancies[i] << "\n";
        }
      }
      write_json(c, ds, to_json(r));
    } else if (*cc) {
      ran = cc;
      write_json(c, cc, to_json(congruence_count(static_cast<int>(level), cusp_index, radius)));
    }
  } catch (const UsageError& e) {
    std::cerr << "orbitstat: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "orbitstat: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "orbitstat: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "orbitstat: " << (ran ? command_path(ran) + ": " : "") << e.what() << "\n";
    return 3;
  }
  return code;
}
