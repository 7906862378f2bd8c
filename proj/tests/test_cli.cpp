#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ORBITSTAT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

// Key structure with leaf types; arrays are described by their first element.
json schema_of(const json& j) {
  if (j.is_object()) {
    json s = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) s[it.key()] = schema_of(it.value());
    return s;
  }
  if (j.is_array()) return j.empty() ? json::array() : json::array({schema_of(j.front())});
  if (j.is_number() || j.is_null()) return "number";
  if (j.is_boolean()) return "boolean";
  return "string";
}

void expect_golden(const std::string& name, const std::string& out) {
  const json schema = schema_of(json::parse(out));
  const fs::path file = fs::path(ORBITSTAT_GOLDEN_DIR) / (name + ".json");
  if (std::getenv("ORBITSTAT_UPDATE_GOLDEN")) {
    std::ofstream(file) << schema.dump(2) << "\n";
    return;
  }
  std::ifstream in(file);
  ASSERT_TRUE(in) << "missing golden file " << file;
  EXPECT_EQ(schema, json::parse(in)) << name << ":\n" << schema.dump(2);
}

}  // namespace

TEST(Cli, EnumerateRadiusTwo) {
  auto r = run("enumerate --lattice sl2z --radius 2");
  ASSERT_EQ(r.code, 0);
  auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 9u);
  EXPECT_EQ(lines[0], "x,y,norm,x_exact,y_exact,word_length");
  EXPECT_NE(r.out.find("# schema_version=1"), std::string::npos);
  EXPECT_NE(r.out.find("\"radius\":\"2\""), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("enumerate --radius -1").code, 2);
  EXPECT_EQ(run("enumerate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("enumerate --lattice nope --radius 2").code, 2);
  EXPECT_EQ(run("enumerate --lattice gamma2 --cusp 7/3 --radius 2").code, 2);
  EXPECT_EQ(run("check pair-moment --lattice gamma2 --cusps 0 --radius 2").code, 2);
  EXPECT_EQ(run("check pair-moment --kind friend --radius 2 --n 2000").code, 2);
  EXPECT_EQ(run("discrepancy --rmin 10 --rmax 5").code, 2);
  EXPECT_EQ(run("discrepancy --shape blob").code, 2);
  EXPECT_EQ(run("lengthdensity --radius 10 --intervals 0:20").code, 2);
  EXPECT_EQ(run("phi").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, RuntimeErrorExitsThree) {
  EXPECT_EQ(run("enumerate --radius 2 -o /nonexistent-dir/x.csv").code, 3);
}

TEST(Cli, CacheReuseGivesIdenticalOutput) {
  const fs::path dir = fs::temp_directory_path() / ("orbitstat-cli-cache-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const std::string cmd = "enumerate --lattice hecke --q 5 --radius 10 --cache-dir " + dir.string();
  auto a = run(cmd);
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator()), 1);
  const fs::path file = fs::directory_iterator(dir)->path();
  const auto stamp = fs::last_write_time(file);
  auto b = run(cmd);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(fs::last_write_time(file), stamp);
  // a smaller radius is served from the same file
  auto c = run("enumerate --lattice hecke --q 5 --radius 5 --cache-dir " + dir.string());
  EXPECT_EQ(fs::last_write_time(file), stamp);
  EXPECT_EQ(data_lines(c.out), data_lines(run("enumerate --lattice hecke --q 5 --radius 5").out));
  // the environment variable is the fallback
  const std::string env = "ORBITSTAT_CACHE_DIR=" + dir.string() + " ";
  EXPECT_EQ(std::system((env + ORBITSTAT_CLI + " enumerate --lattice gamma3 --radius 4 > /dev/null").c_str()), 0);
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator()), 2);
  fs::remove_all(dir);
}

TEST(Cli, PhiTotientTable) {
  auto r = run("phi --lattice sl2z --max-c 10");
  ASSERT_EQ(r.code, 0);
  auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[0], "c,c_exact,phi");
  const int want[] = {1, 1, 2, 2, 4, 2, 6, 4, 6, 4};
  for (int c = 1; c <= 10; ++c)
    EXPECT_EQ(lines[c], std::to_string(c) + "," + std::to_string(c) + "," + std::to_string(want[c - 1]));
}

TEST(Cli, PhiValuesAndPlotData) {
  const fs::path plot = fs::temp_directory_path() / ("orbitstat-phi-" + std::to_string(::getpid()) + ".csv");
  auto r = run("phi --t 50,100,200 --emit-plot-data " + plot.string());
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  for (const auto& v : j["result"]["values"]) EXPECT_NEAR(v["phi"].get<double>(), 0.6079271018540265, 0.01);
  std::ifstream in(plot);
  std::string all((std::istreambuf_iterator<char>(in)), {});
  auto lines = data_lines(all);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "t,series,value");
  fs::remove(plot);
  expect_golden("phi", r.out);
}

TEST(Cli, FriendsUniformlyDiscrete) {
  auto r = run("friends --eta 0.99 --radius 100 --lattice sl2z");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["friends"], 0);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["command"], "friends");
  EXPECT_EQ(j["config"]["eta"], "0.99");
  expect_golden("friends", r.out);
}

TEST(Cli, PaircorrIsDeterministic) {
  const std::string cmd = "paircorr --s 1 --radius 20 --n 2000 --seed 7";
  auto a = run(cmd), b = run(cmd);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto c = run("paircorr --s 1 --radius 20 --n 2000 --seed 8");
  EXPECT_NE(a.out, c.out);
  expect_golden("paircorr", a.out);
}

TEST(Cli, FirstMomentCheckExitCodes) {
  auto ok = run("check first-moment --lattice sl2z --radius 5 --n 100000 --seed 1");
  EXPECT_EQ(ok.code, 0);
  auto j = json::parse(ok.out);
  EXPECT_TRUE(j["result"]["pass"].get<bool>());
  expect_golden("check_first_moment", ok.out);
  auto bad = run("check first-moment --lattice sl2z --radius 5 --n 100000 --seed 1 --reference-scale 2");
  EXPECT_EQ(bad.code, 1);
  auto k = json::parse(bad.out);
  EXPECT_FALSE(k["result"]["pass"].get<bool>());
  EXPECT_NEAR(k["result"]["reference"].get<double>(), 2 * j["result"]["reference"].get<double>(), 1e-9);
}

TEST(Cli, PairMomentInequivalentCusps) {
  auto r = run("check pair-moment --lattice gamma2 --cusps 0,inf --radius 5 --n 5000");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["breakdown"]["diagonal_reference"], 0.0);
  EXPECT_EQ(j["result"]["breakdown"]["diagonal_estimate"], 0.0);
  EXPECT_EQ(j["config"]["cusps"], "0,inf");
  expect_golden("check_pair_moment", r.out);
  // same cusp: the diagonal is present
  auto s = run("check pair-moment --lattice gamma2 --cusps inf,inf --radius 5 --n 5000");
  EXPECT_GT(json::parse(s.out)["result"]["breakdown"]["diagonal_reference"].get<double>(), 0);
}

TEST(Cli, OtherChecks) {
  auto sm = run("check second-moment --radius 3 --n 5000");
  EXPECT_EQ(sm.code, 0);
  expect_golden("check_second_moment", sm.out);
  auto ap = run("check avg-paircorr --s 1 --radius 20 --n 1000");
  EXPECT_EQ(ap.code, 0);
  auto sd = run("check second-moment-discrepancy --n 5000");
  EXPECT_EQ(sd.code, 0);
  expect_golden("check_second_moment_discrepancy", sd.out);
}

TEST(Cli, CountAndCongruence) {
  auto c = run("count --radius 200");
  ASSERT_EQ(c.code, 0);
  auto j = json::parse(c.out);
  EXPECT_EQ(j["result"]["count"], 76360);  // gcd scan
  expect_golden("count", c.out);
  auto g = run("congruence-count --N 2 --radius 500");
  ASSERT_EQ(g.code, 0);
  auto k = json::parse(g.out);
  EXPECT_LT(std::abs(k["result"]["error"].get<double>()), 1500);
  expect_golden("congruence_count", g.out);
}

TEST(Cli, DiscrepancyAndPlotData) {
  const fs::path plot = fs::temp_directory_path() / ("orbitstat-disc-" + std::to_string(::getpid()) + ".csv");
  auto r = run("discrepancy --rmin 10 --rmax 100 --num-radii 20 --shape square --A 2,0,0,0.5 --emit-plot-data " +
               plot.string());
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["rows"].size(), 20u);
  EXPECT_EQ(j["result"]["shape"], "square");
  std::ifstream in(plot);
  std::string all((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(data_lines(all).size(), 1u + 3 * 20);
  fs::remove(plot);
  expect_golden("discrepancy", r.out);
}

TEST(Cli, PairStatisticsCommands) {
  auto d = run("detpairs --radius 50 --D 2");
  ASSERT_EQ(d.code, 0);
  expect_golden("detpairs", d.out);
  auto l = run("lengthdensity --radius 50 --intervals 0:25,25:50");
  ASSERT_EQ(l.code, 0);
  auto j = json::parse(l.out);
  double total = 0;
  for (const auto& iv : j["result"]["intervals"]) total += iv["density"].get<double>();
  EXPECT_NEAR(total, 1, 1e-12);
  expect_golden("lengthdensity", l.out);
  auto p = run("partial-sum --T 1000");
  ASSERT_EQ(p.code, 0);
  EXPECT_NEAR(json::parse(p.out)["result"]["ratio"].get<double>(), 1, 0.01);
  expect_golden("partial_sum", p.out);
  // two-component holonomy set
  auto h = run("friends --lattice gamma2 --component 1:inf --component 2:0 --radius 30 --eta 0.5");
  ASSERT_EQ(h.code, 0);
}

TEST(Cli, ConfigFileMatchesFlags) {
  const fs::path cfg = fs::temp_directory_path() / ("orbitstat-cfg-" + std::to_string(::getpid()) + ".toml");
  std::ofstream(cfg) << "[enumerate]\nlattice = \"hecke\"\nq = 5\nradius = 3\n";
  auto a = run("--config " + cfg.string() + " enumerate");
  auto b = run("enumerate --lattice hecke --q 5 --radius 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  fs::remove(cfg);
}
