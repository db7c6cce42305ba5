#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nld/scenario.hpp"

using namespace nld;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kSmall = R"(name = small
system = lab_1d
model = thirring
mass = 1
init = bump
init.amplitude = 0.1
grid.xmin = -30
grid.xmax = 30
grid.n = 601
dt = 0.02
t_end = 1
sample_stride = 5
regions = whole, interval:-2:2
output =
)";

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nldlab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("parse and canonical text round-trip") {
  const ScenarioConfig c = parse_scenario(kSmall);
  CHECK(c.name == "small");
  CHECK(c.n == 601);
  CHECK(c.mass == 1.0);
  CHECK(c.regions.size() == 2);
  CHECK(c.output.empty());
  const ScenarioConfig d = parse_scenario(canonical_text(c));
  CHECK(canonical_text(d) == canonical_text(c));
  CHECK(scenario_hash(d) == scenario_hash(c));
  CHECK(scenario_hash(c).size() == 16);
}

TEST_CASE("hash ignores the execution mode and tracks physics") {
  ScenarioConfig c = parse_scenario(kSmall);
  const std::string h = scenario_hash(c);
  c.exec = Exec::serial;
  CHECK(scenario_hash(c) == h);
  c.dt = 0.01;
  CHECK(scenario_hash(c) != h);
}

TEST_CASE("malformed configurations are rejected") {
  CHECK_THROWS_AS(parse_scenario("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("dt = 0.01\ndt = 0.02\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("just text\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("dt = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("regions = moon\n"), ConfigError);
  CHECK_NOTHROW(parse_scenario("# comment only\n\n"));
}

TEST_CASE("validation") {
  ScenarioConfig c = parse_scenario(kSmall);
  CHECK_NOTHROW(validate(c));
  SUBCASE("CFL") {
    c.dt = 0.2;
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
  SUBCASE("boundary buffer") {
    c.t_end = 20;
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
  SUBCASE("model arity") {
    c.model = "quartic_harmonic";
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
  SUBCASE("report times on samples") {
    c.report_times = {0.37};
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
  SUBCASE("virial support") {
    c.virials = {"K1"};
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
}

TEST_CASE("series header") {
  ScenarioConfig c = parse_scenario(kSmall);
  c.virials = {"K_1d"};
  const auto h = series_header(c);
  const std::vector<std::string> head(h.begin(), h.begin() + 5);
  CHECK(head == std::vector<std::string>{"t", "Q", "E", "H", "P"});
  CHECK(h[5] == "mass_whole");
  CHECK(h[7] == "parity_defect");
  CHECK(h.back() == "F_K_1d");
}

TEST_CASE("bundled configs match the shipped files") {
  for (const auto& [name, text] : bundled_configs()) {
    CAPTURE(name);
    const fs::path p = fs::path(NLD_SOURCE_DIR) / "configs" / (name + ".cfg");
    REQUIRE(fs::exists(p));
    CHECK(slurp(p) == text);
    CHECK_NOTHROW(validate(parse_scenario(text)));
  }
  CHECK(bundled_configs().size() == 9);
}

TEST_CASE("runs are deterministic and serial equals parallel") {
  ScenarioConfig c = parse_scenario(kSmall);
  const RunSummary a = run_config(c);
  c.exec = Exec::serial;
  const RunSummary b = run_config(c);
  REQUIRE(a.series.rows.size() == 11);
  CHECK(a.series.rows == b.series.rows);
  CHECK(a.charge_drift < 1e-8);
  CHECK(std::isfinite(a.energy_drift));
}

TEST_CASE("files are byte-identical on rerun and honour the output root") {
  const fs::path root = temp_dir("root");
  setenv("NLDLAB_OUTPUT_ROOT", root.c_str(), 1);
  ScenarioConfig c = parse_scenario(kSmall);
  c.output = "det";
  run_config(c);
  const std::string csv = slurp(root / "det" / "small.csv");
  const std::string json = slurp(root / "det" / "small_summary.json");
  run_config(c);
  CHECK(slurp(root / "det" / "small.csv") == csv);
  CHECK(slurp(root / "det" / "small_summary.json") == json);
  CHECK(csv.rfind("t,Q,E,H,P,mass_whole,mass_interval", 0) == 0);
  unsetenv("NLDLAB_OUTPUT_ROOT");
  fs::remove_all(root);
}

TEST_CASE("parallel scenarios keep input order and results") {
  std::vector<ScenarioConfig> cs;
  for (double m : {0.0, 0.5, 1.0}) {
    ScenarioConfig c = parse_scenario(kSmall);
    c.mass = m;
    c.name = "m" + std::to_string(static_cast<int>(10 * m));
    cs.push_back(c);
  }
  const auto serial = run_scenarios(cs, 1);
  const auto parallel = run_scenarios(cs, 3);
  REQUIRE(parallel.size() == 3);
  for (size_t k = 0; k < 3; ++k) {
    CHECK(parallel[k].name == cs[k].name);
    CHECK(parallel[k].runs.front().series.rows == serial[k].runs.front().series.rows);
  }
}

TEST_CASE("expectations become checks") {
  ScenarioConfig c = parse_scenario(kSmall);
  c.expect_charge_drift = 1e-8;
  c.report_times = {0.0, 1.0};
  c.expect_decreasing = {"mass_interval_-2_2"};
  const auto h = series_header(c);
  REQUIRE(std::find(h.begin(), h.end(), "mass_interval_-2_2") != h.end());
  const RunSummary r = run_config(c);
  REQUIRE(r.checks.size() == 2);
  for (const auto& k : r.checks) CHECK_MESSAGE(k.pass, k.name << ": " << k.detail);
}

TEST_CASE("the standing wave does not decay") {
  ScenarioConfig c = bundled("soliton_rest");
  c.t_end = 20;
  c.report_times = {10, 20};
  c.output.clear();
  const RunSummary r = run_config(c);
  CHECK(r.charge_drift < 1e-8);
  for (const auto& k : r.checks) CHECK_MESSAGE(k.pass, k.name << ": " << k.detail);
}

TEST_CASE("emit_plots writes the CSVs and one script") {
  ScenarioConfig c = parse_scenario(kSmall);
  const ExperimentSummary s = run_scenario(c);
  const fs::path d = temp_dir("plots");
  const auto files = emit_plots(s, d.string());
  CHECK(files.size() == 3);
  CHECK(fs::exists(d / "small_plot.py"));
  const std::string script = slurp(d / "small_plot.py");
  CHECK(script.find("RUNS = [\"small\"]") != std::string::npos);
  const std::string csv = slurp(d / "small.csv");
  std::string header;
  for (const auto& col : series_header(c)) header += (header.empty() ? "" : ",") + col;
  CHECK(csv.substr(0, csv.find('\n')) == header);
  fs::remove_all(d);
}

TEST_CASE("experiment ids") {
  for (ExperimentId id : all_experiments()) CHECK(experiment_from_string(to_string(id)) == id);
  CHECK_THROWS(experiment_from_string("T4"));
}
