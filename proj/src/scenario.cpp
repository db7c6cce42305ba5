#include "nld/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "nld/exact.hpp"
#include "nld/weights.hpp"

namespace nld {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  std::vector<std::string> names(allowed.begin(), allowed.end());
  throw ConfigError(fmt::format("{}: '{}' is not one of {}", key, v, join(names)));
}

Region parse_region(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.empty()) throw ConfigError("regions: empty entry");
  Region r;
  const std::string& k = parts[0];
  auto arity = [&](size_t n) {
    if (parts.size() != n + 1) throw ConfigError(fmt::format("regions: '{}' takes {} parameter(s)", k, n));
  };
  if (k == "whole") {
    arity(0);
    r.kind = RegionKind::whole;
  } else if (k == "log_window") {
    arity(0);
    r.kind = RegionKind::log_window;
  } else if (k == "exterior") {
    arity(1);
    r.kind = RegionKind::exterior_box;
    r.b = to_double("regions", parts[1]);
  } else if (k == "ball") {
    arity(1);
    r.kind = RegionKind::ball;
    r.R = to_double("regions", parts[1]);
  } else if (k == "interval") {
    arity(2);
    r.kind = RegionKind::fixed_interval;
    r.lo = to_double("regions", parts[1]);
    r.hi = to_double("regions", parts[2]);
  } else {
    throw ConfigError(fmt::format("regions: unknown region '{}'", k));
  }
  return r;
}

std::string region_text(const Region& r) {
  switch (r.kind) {
    case RegionKind::whole: return "whole";
    case RegionKind::log_window: return "log_window";
    case RegionKind::exterior_box: return fmt::format("exterior:{}", r.b);
    case RegionKind::ball: return fmt::format("ball:{}", r.R);
    case RegionKind::fixed_interval: return fmt::format("interval:{}:{}", r.lo, r.hi);
  }
  return "?";
}

std::string num(double x) { return fmt::format("{}", x); }

std::string nums(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(num(x));
  return join(s);
}

bool is_1d(SystemKind k) { return k != SystemKind::radial_3d; }

}  // namespace

std::string ScenarioConfig::model_spec() const { return has_coupling ? fmt::format("{}:{}", model, coupling) : model; }

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys = {
      "name", "system", "model", "coupling", "mass",
      "init", "init.amplitude", "init.width", "init.center", "init.profile", "init.parity",
      "init.omega", "init.x0", "init.phase",
      "grid.xmin", "grid.xmax", "grid.rmax", "grid.n",
      "dt", "t0", "t_end", "sample_stride", "boundary.width", "boundary.tol",
      "observables", "virials", "virial.weight", "virial.scaling", "virial.rtol", "virial.verify",
      "regions", "report_times", "exterior.t0",
      "expect.charge_drift", "expect.energy_drift", "expect.decreasing", "expect.nondecaying",
      "output", "seed", "exec"};
  return keys;
}

const std::vector<std::string>& observable_names() {
  static const std::vector<std::string> names = {"sech_mass", "window_decay", "radial_decay", "mixed_parity_defect",
                                                 "exterior_functional"};
  return names;
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig c;
  const auto& keys = scenario_keys();
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(fmt::format("line {}: unknown key '{}'", lineno, key));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    try {
      if (key == "name") {
        if (v.empty() || v.find_first_of("/\\ ") != std::string::npos)
          throw ConfigError("name: must be non-empty without spaces or slashes");
        c.name = v;
      } else if (key == "system") {
        c.system = system_from_string(v);
      } else if (key == "model") {
        c.model = v;
      } else if (key == "coupling") {
        c.has_coupling = true;
        c.coupling = to_double(key, v);
      } else if (key == "mass") {
        c.mass = to_double(key, v);
      } else if (key == "init") {
        c.init.kind = one_of(key, v, {"bump", "soliton", "zero"});
      } else if (key == "init.amplitude") {
        c.init.amplitude = to_double(key, v);
      } else if (key == "init.width") {
        c.init.width = to_double(key, v);
      } else if (key == "init.center") {
        c.init.center = to_double(key, v);
      } else if (key == "init.profile") {
        c.init.profile = one_of(key, v, {"gauss", "sech"});
      } else if (key == "init.parity") {
        c.init.parity = one_of(key, v, {"none", "odd", "mixed"});
      } else if (key == "init.omega") {
        c.init.omega = to_double(key, v);
      } else if (key == "init.x0") {
        c.init.x0 = to_double(key, v);
      } else if (key == "init.phase") {
        c.init.phase = to_double(key, v);
      } else if (key == "grid.xmin") {
        c.xmin = to_double(key, v);
      } else if (key == "grid.xmax") {
        c.xmax = to_double(key, v);
      } else if (key == "grid.rmax") {
        c.rmax = to_double(key, v);
      } else if (key == "grid.n") {
        c.n = static_cast<int>(to_int(key, v));
      } else if (key == "dt") {
        c.dt = to_double(key, v);
      } else if (key == "t0") {
        c.t0 = to_double(key, v);
      } else if (key == "t_end") {
        c.t_end = to_double(key, v);
      } else if (key == "sample_stride") {
        c.sample_stride = static_cast<int>(to_int(key, v));
      } else if (key == "boundary.width") {
        c.boundary_width = to_double(key, v);
      } else if (key == "boundary.tol") {
        c.boundary_tol = to_double(key, v);
      } else if (key == "observables") {
        c.observables = split(v, ',');
      } else if (key == "virials") {
        c.virials = split(v, ',');
      } else if (key == "virial.weight") {
        c.virial_weight = v;
      } else if (key == "virial.scaling") {
        c.virial_scaling = one_of(key, v, {"constant", "log_window"});
      } else if (key == "virial.rtol") {
        c.virial_rtol = to_double(key, v);
      } else if (key == "virial.verify") {
        c.virial_verify = to_bool(key, v);
      } else if (key == "regions") {
        c.regions.clear();
        for (const auto& r : split(v, ',')) c.regions.push_back(parse_region(r));
      } else if (key == "report_times") {
        c.report_times.clear();
        for (const auto& t : split(v, ',')) c.report_times.push_back(to_double(key, t));
      } else if (key == "exterior.t0") {
        c.exterior_t0 = to_double(key, v);
      } else if (key == "expect.charge_drift") {
        c.expect_charge_drift = to_double(key, v);
      } else if (key == "expect.energy_drift") {
        c.expect_energy_drift = to_double(key, v);
      } else if (key == "expect.decreasing") {
        c.expect_decreasing = split(v, ',');
      } else if (key == "expect.nondecaying") {
        c.expect_nondecaying = split(v, ',');
      } else if (key == "output") {
        c.output = v;
      } else if (key == "seed") {
        const long long s = to_int(key, v);
        if (s < 0) throw ConfigError("seed: must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
      } else if (key == "exec") {
        c.exec = one_of(key, v, {"parallel", "serial"}) == "serial" ? Exec::serial : Exec::parallel;
      }
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("line {}: {}: {}", lineno, key, e.what()));
    }
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c;
  try {
    c = parse_scenario(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return c;
}

std::string canonical_text(const ScenarioConfig& c) {
  std::vector<std::string> regions;
  for (const auto& r : c.regions) regions.push_back(region_text(r));
  std::string out;
  auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  put("name", c.name);
  put("system", to_string(c.system));
  put("model", c.model);
  if (c.has_coupling) put("coupling", num(c.coupling));
  put("mass", num(c.mass));
  put("init", c.init.kind);
  put("init.amplitude", num(c.init.amplitude));
  put("init.width", num(c.init.width));
  put("init.center", num(c.init.center));
  put("init.profile", c.init.profile);
  put("init.parity", c.init.parity);
  put("init.omega", num(c.init.omega));
  put("init.x0", num(c.init.x0));
  put("init.phase", num(c.init.phase));
  put("grid.xmin", num(c.xmin));
  put("grid.xmax", num(c.xmax));
  put("grid.rmax", num(c.rmax));
  put("grid.n", std::to_string(c.n));
  put("dt", num(c.dt));
  put("t0", num(c.t0));
  put("t_end", num(c.t_end));
  put("sample_stride", std::to_string(c.sample_stride));
  put("boundary.width", num(c.boundary_width));
  put("boundary.tol", num(c.boundary_tol));
  put("observables", join(c.observables));
  put("virials", join(c.virials));
  put("virial.weight", c.virial_weight);
  put("virial.scaling", c.virial_scaling);
  put("virial.rtol", num(c.virial_rtol));
  put("virial.verify", c.virial_verify ? "true" : "false");
  put("regions", join(regions));
  put("report_times", nums(c.report_times));
  put("exterior.t0", num(c.exterior_t0));
  put("expect.charge_drift", num(c.expect_charge_drift));
  put("expect.energy_drift", num(c.expect_energy_drift));
  put("expect.decreasing", join(c.expect_decreasing));
  put("expect.nondecaying", join(c.expect_nondecaying));
  put("output", c.output);
  put("seed", std::to_string(c.seed));
  put("exec", c.exec == Exec::serial ? "serial" : "parallel");
  return out;
}

std::string scenario_hash(const ScenarioConfig& c) {
  // exec does not change results, so it is left out of the hash.
  ScenarioConfig k = c;
  k.exec = Exec::parallel;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_text(k)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

namespace {

double grid_step(const ScenarioConfig& c) {
  return is_1d(c.system) ? (c.xmax - c.xmin) / (c.n - 1) : c.rmax / c.n;
}

// Distance from the bump center beyond which the profile is below 1e-8 of its peak.
double support_radius(const InitialCondition& ic) {
  const double y = ic.profile == "gauss" ? 4.3 : 19.1;
  return ic.width * (y + (ic.parity == "none" ? 0.0 : 1.0));
}

}  // namespace

void validate(const ScenarioConfig& c) {
  const std::string who = "scenario '" + c.name + "': ";
  auto fail = [&](const std::string& msg) { throw ConfigError(who + msg); };
  if (c.n < 16) fail("grid.n must be at least 16");
  if (is_1d(c.system) && !(c.xmax > c.xmin)) fail("grid.xmax must exceed grid.xmin");
  if (!is_1d(c.system) && !(c.rmax > 0)) fail("grid.rmax must be positive");
  if (!(c.dt > 0)) fail("dt must be positive");
  if (!(c.t_end > c.t0)) fail("t_end must exceed t0");
  if (c.sample_stride < 1) fail("sample_stride must be at least 1");
  const double h = grid_step(c);
  if (c.dt > 0.5 * h) fail(fmt::format("CFL violation: dt = {} exceeds 0.5 h = {}", c.dt, 0.5 * h));

  NonlinearityModel model;
  try {
    model = builtin(c.model_spec());
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (model.arity != arity_for(c.system))
    fail(fmt::format("model '{}' does not match system {}", c.model_spec(), to_string(c.system)));

  for (const auto& v : c.virials) {
    VirialId id{};
    try {
      id = virial_from_string(v);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (!virial_supports(id, c.system)) fail(fmt::format("identity {} is not defined for {}", v, to_string(c.system)));
  }
  if (!c.virial_weight.empty()) {
    try {
      weights::by_name(c.virial_weight);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (c.virial_scaling == "log_window" && c.t0 < 2.0) fail("virial.scaling = log_window needs t0 >= 2");
  if (c.virial_rtol <= 0) fail("virial.rtol must be positive");
  if (!c.virials.empty() && (c.t_end - c.t0) / (c.dt * c.sample_stride) < 2.5)
    fail("virial verification needs at least three samples");

  const auto& obs = observable_names();
  bool exterior_region = false;
  for (const auto& r : c.regions) {
    if (r.kind == RegionKind::exterior_box) {
      exterior_region = true;
      if (!(r.b >= 0)) fail("exterior region needs b >= 0");
    }
    if (r.kind == RegionKind::ball && !(r.R > 0)) fail("ball region needs R > 0");
    if (r.kind == RegionKind::fixed_interval && !(r.hi > r.lo)) fail("interval region needs hi > lo");
  }
  for (const auto& o : c.observables) {
    if (std::find(obs.begin(), obs.end(), o) == obs.end())
      fail(fmt::format("unknown observable '{}' (known: {})", o, join(obs)));
    const bool needs_1d = o == "sech_mass" || o == "window_decay" || o == "mixed_parity_defect" ||
                          o == "exterior_functional";
    if (needs_1d && !is_1d(c.system)) fail(o + " needs a 1D system");
    if (o == "radial_decay" && is_1d(c.system)) fail("radial_decay needs the radial system");
    if (o == "exterior_functional" && !exterior_region) fail("exterior_functional needs an exterior region");
  }

  const InitialCondition& ic = c.init;
  if (ic.kind == "bump") {
    if (!(ic.width > 0)) fail("init.width must be positive");
    if (ic.parity != "none") {
      if (!is_1d(c.system)) fail("init.parity applies to 1D systems only");
      if (ic.center != 0.0) fail("init.parity needs init.center = 0");
    }
    const double travel = c.t_end - c.t0;
    const double room = is_1d(c.system) ? std::min(c.xmax - ic.center, ic.center - c.xmin) : c.rmax - ic.center;
    const double need = support_radius(ic) + c.boundary_width + travel;
    if (room < need)
      fail(fmt::format("boundary buffer: data reach {} from the center but the domain leaves {}", need, room));
  } else if (ic.kind == "soliton") {
    if (!is_1d(c.system)) fail("soliton data need a 1D system");
    if (!(std::abs(ic.omega) < 1)) fail("init.omega must lie in (-1, 1)");
    const double peak = std::abs(soliton_profile(ic.omega, 0.0));
    const double edge = std::max(std::abs(soliton_profile(ic.omega, c.xmax - c.boundary_width + ic.x0)),
                                 std::abs(soliton_profile(ic.omega, c.xmin + c.boundary_width + ic.x0)));
    if (edge > 1e-8 * peak) fail("boundary buffer: soliton tails reach the monitored boundary strip");
  }
  if (ic.parity != "none" || std::find(c.observables.begin(), c.observables.end(), "mixed_parity_defect") !=
                                 c.observables.end()) {
    if (!Grid1D(c.xmin, c.xmax, c.n).symmetric()) fail("parity diagnostics need a grid symmetric about 0");
  }

  const double ds = c.dt * c.sample_stride;
  for (double t : c.report_times) {
    if (t < c.t0 - 1e-12 || t > c.t_end + 1e-9) fail(fmt::format("report time {} outside [t0, t_end]", t));
    const double k = (t - c.t0) / ds;
    if (std::abs(k - std::round(k)) > 1e-6) fail(fmt::format("report time {} is not a sample time", t));
  }
  const auto header = series_header(c);
  for (const auto* list : {&c.expect_decreasing, &c.expect_nondecaying}) {
    for (const auto& col : *list) {
      if (std::find(header.begin(), header.end(), col) == header.end())
        fail(fmt::format("expectation on unknown column '{}'", col));
      if (c.report_times.size() < 2) fail("trend expectations need at least two report times");
    }
  }
}

DiracSystem make_system(const ScenarioConfig& c) {
  NonlinearityModel model = builtin(c.model_spec());
  switch (c.system) {
    case SystemKind::lab_1d: return DiracSystem::lab(Grid1D(c.xmin, c.xmax, c.n), model, c.mass, c.exec);
    case SystemKind::spinor_1d: return DiracSystem::spinor(Grid1D(c.xmin, c.xmax, c.n), model, c.mass, c.exec);
    case SystemKind::radial_3d: return DiracSystem::radial(RadialGrid(c.rmax, c.n), model, c.mass, c.exec);
  }
  throw ConfigError("unknown system");
}

Real4 make_initial(const ScenarioConfig& c, const DiracSystem& sys) {
  const InitialCondition& ic = c.init;
  if (ic.kind == "zero") return Real4(sys.nodes());
  if (ic.kind == "soliton") {
    const SpinorState1D lab = thirring_soliton({ic.omega, ic.x0, ic.phase, c.t0}, sys.grid);
    return sys.kind == SystemKind::lab_1d ? lab.real4() : t_transform(lab).real4();
  }
  // Seeded unit phases for the two components; integer-only conversion keeps
  // them identical across standard libraries.
  std::mt19937_64 rng(c.seed);
  auto phase = [&] { return 2.0 * M_PI * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const cx c1 = std::polar(1.0, phase()), c2 = std::polar(1.0, phase());
  auto profile = [&](double y) { return ic.profile == "gauss" ? std::exp(-y * y) : 1.0 / std::cosh(y); };
  const size_t n = sys.nodes();
  ComplexField z1(n), z2(n);
  if (sys.kind == SystemKind::radial_3d) {
    for (size_t k = 0; k < n; ++k) {
      const double r = sys.rgrid.r(static_cast<int>(k));
      const double p = ic.amplitude * profile((r - ic.center) / ic.width);
      z1[k] = c1 * p;
      z2[k] = c2 * (r / ic.width) * p;
    }
    return to_real4(z1, z2);
  }
  const bool odd1 = ic.parity != "none", odd2 = ic.parity == "odd";
  for (size_t i = 0; i < n; ++i) {
    const double y = (sys.grid.x(static_cast<int>(i)) - ic.center) / ic.width;
    const double p = ic.amplitude * profile(y);
    z1[i] = c1 * (odd1 ? y * p : p);
    z2[i] = c2 * (odd2 ? y * p : p);
  }
  return to_real4(z1, z2);
}

int Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::vector<double> Table::values(const std::string& name) const {
  const int k = column(name);
  if (k < 0) throw std::out_of_range("table has no column " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[static_cast<size_t>(k)]);
  return out;
}

bool ExperimentSummary::pass() const {
  for (const auto& r : runs)
    for (const auto& c : r.checks)
      if (!c.pass) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

bool ExperimentSummary::only_known_failures() const {
  for (const auto& r : runs)
    for (const auto& c : r.checks)
      if (!c.pass && !c.known) return false;
  for (const auto& c : checks)
    if (!c.pass && !c.known) return false;
  return true;
}

double ExperimentSummary::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m.value;
  for (const auto& r : runs)
    for (const auto& m : r.metrics)
      if (m.name == name || r.name + "." + m.name == name) return m.value;
  throw std::out_of_range("no metric " + name);
}

namespace {

bool wants(const ScenarioConfig& c, const std::string& o) {
  return std::find(c.observables.begin(), c.observables.end(), o) != c.observables.end();
}

std::vector<const Region*> exterior_regions(const ScenarioConfig& c) {
  std::vector<const Region*> out;
  for (const auto& r : c.regions)
    if (r.kind == RegionKind::exterior_box) out.push_back(&r);
  return out;
}

double exterior_t0(const ScenarioConfig& c) { return c.exterior_t0 < 0 ? c.t_end : c.exterior_t0; }

VirialParams exterior_params(const Region& r, double t0, int side) {
  VirialParams p;
  p.weight = weights::half_step(side);
  p.scaling = ScalingTriple::exterior(r.b, t0, 1.0, side);
  return p;
}

VirialParams config_params(const ScenarioConfig& c) {
  VirialParams p;
  if (!c.virial_weight.empty()) p.weight = weights::by_name(c.virial_weight);
  if (c.virial_scaling == "log_window") p.scaling = ScalingTriple::log_window();
  return p;
}

std::vector<double> cumulative(const std::vector<double>& t, const std::vector<double>& f) {
  std::vector<double> out(f.size(), kNaN);
  double acc = 0;
  bool started = false;
  for (size_t k = 0; k < f.size(); ++k) {
    if (!std::isfinite(f[k])) continue;
    if (started) acc += 0.5 * (f[k] + f[k - 1]) * (t[k] - t[k - 1]);
    started = true;
    out[k] = acc;
  }
  return out;
}

size_t sample_at(const std::vector<double>& times, double t, double ds) {
  for (size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 0.25 * ds) return k;
  throw std::out_of_range(fmt::format("no sample at t = {}", t));
}

// Least-squares slope of log f against log t over samples with t >= t_from and f > 0.
double log_log_slope(const std::vector<double>& t, const std::vector<double>& f, double t_from) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_from || t[k] <= 0 || !(f[k] > 0)) continue;
    const double x = std::log(t[k]), y = std::log(f[k]);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  return n >= 2 && den > 0 ? (n * sxy - sx * sy) / den : kNaN;
}

}  // namespace

std::vector<std::string> series_header(const ScenarioConfig& c) {
  std::vector<std::string> h = {"t", "Q", "E", "H", "P"};
  for (const auto& r : c.regions) h.push_back("mass_" + r.label());
  h.push_back("parity_defect");
  for (const auto& o : c.observables) {
    if (o == "exterior_functional") {
      for (const Region* r : exterior_regions(c)) {
        h.push_back("F43_" + r->label() + "_plus");
        h.push_back("F43_" + r->label() + "_minus");
        h.push_back("R43_" + r->label() + "_plus");
        h.push_back("R43_" + r->label() + "_minus");
      }
    } else {
      h.push_back(o);
    }
  }
  for (const auto& v : c.virials) h.push_back("F_" + v);
  if (wants(c, "window_decay")) h.push_back("cum_window_decay");
  if (wants(c, "radial_decay")) h.push_back("cum_radial_decay");
  return h;
}

std::string output_root() {
  const char* env = std::getenv("NLDLAB_OUTPUT_ROOT");
  return env && *env ? std::string(env) : std::string(".");
}

namespace {

std::vector<double> sample_row(const ScenarioConfig& c, const DiracSystem& sys, const Real4& s, double t,
                               VirialMonitor* monitor) {
  std::vector<double> row = {t, charge(sys, s)};
  const auto E = conserved_energy(sys, s);
  row.push_back(E ? *E : kNaN);
  const ComplexField z1 = is_1d(sys.kind) ? complex_component(s, 0) : ComplexField{};
  const ComplexField z2 = is_1d(sys.kind) ? complex_component(s, 1) : ComplexField{};
  row.push_back(sys.kind == SystemKind::lab_1d && sys.model.has_potential()
                    ? hamiltonian_1d(sys.grid, z1, z2, sys.model, sys.m)
                    : kNaN);
  row.push_back(is_1d(sys.kind) ? momentum_1d(sys.grid, z1, z2) : kNaN);
  for (const auto& r : c.regions) {
    double v = kNaN;
    try {
      v = region_mass(sys, s, r, t);
    } catch (const std::domain_error&) {
    }
    row.push_back(v);
  }
  if (is_1d(sys.kind) && sys.grid.symmetric()) {
    const Parity p2 = c.init.parity == "mixed" ? Parity::even : Parity::odd;
    row.push_back(parity_defect(sys.grid, s, {Parity::odd, Parity::odd, p2, p2}));
  } else {
    row.push_back(kNaN);
  }
  for (const auto& o : c.observables) {
    if (o == "sech_mass") {
      RealField f(s.size());
      for (size_t i = 0; i < f.size(); ++i) {
        double m2 = 0;
        for (int q = 0; q < 4; ++q) m2 += s.q[q][i] * s.q[q][i];
        f[i] = m2 / std::cosh(sys.grid.x(static_cast<int>(i)));
      }
      row.push_back(quad(sys.grid, f));
    } else if (o == "window_decay") {
      row.push_back(t >= 10.0 ? window_decay_integrand(sys.grid, s, t) : kNaN);
    } else if (o == "radial_decay") {
      row.push_back(radial_decay_integrand(sys.rgrid, s));
    } else if (o == "mixed_parity_defect") {
      row.push_back(parity_defect(sys.grid, s, {Parity::odd, Parity::odd, Parity::even, Parity::even}));
    } else if (o == "exterior_functional") {
      const double T0 = exterior_t0(c);
      for (const Region* r : exterior_regions(c)) {
        const VirialValue vp = evaluate_virial(sys, VirialId::I, exterior_params(*r, T0, 1), s, t);
        const VirialValue vm = evaluate_virial(sys, VirialId::I, exterior_params(*r, T0, -1), s, t);
        row.insert(row.end(), {vp.F, vm.F, vp.rhs, vm.rhs});
      }
    }
  }
  if (monitor) {
    monitor->observe(t, s);
    for (size_t k = 0; k < c.virials.size(); ++k) row.push_back(monitor->values(k).back());
  }
  return row;
}

void add_metrics(const ScenarioConfig& c, RunSummary& out) {
  const Table& tab = out.series;
  const auto times = tab.values("t");
  const double ds = c.dt * c.sample_stride;
  std::vector<std::string> tracked;
  for (const auto& col : tab.columns)
    if (col != "t" && col.rfind("R43_", 0) != 0) tracked.push_back(col);
  for (double t : c.report_times) {
    const size_t k = sample_at(times, t, ds);
    for (const auto& col : tracked)
      out.metrics.push_back({fmt::format("{}@{}", col, t), tab.rows[k][static_cast<size_t>(tab.column(col))]});
  }
  for (const auto& col : tab.columns) {
    if (col.rfind("mass_", 0) != 0) continue;
    const auto f = tab.values(col);
    double best = kNaN, at = kNaN;
    for (size_t k = 0; k < f.size(); ++k)
      if (std::isfinite(f[k]) && !(f[k] >= best)) {
        best = f[k];
        at = times[k];
      }
    out.metrics.push_back({"inf_" + col, best});
    out.metrics.push_back({"argmin_" + col, at});
    const double from = c.report_times.empty() ? times.front() : c.report_times.front();
    out.metrics.push_back({"trend_" + col, log_log_slope(times, f, from)});
  }
  for (const auto& col : tab.columns) {
    if (col.rfind("F_", 0) != 0 && col.rfind("F43_", 0) != 0 && col.rfind("R43_", 0) != 0) continue;
    double mx = 0;
    for (double v : tab.values(col)) mx = std::max(mx, std::abs(v));
    out.metrics.push_back({"max_abs_" + col, mx});
  }
  for (const auto& col : tab.columns) {
    if (col.rfind("cum_", 0) != 0) continue;
    const auto f = tab.values(col);
    out.metrics.push_back({col + "_final", f.back()});
  }
  out.metrics.push_back({"charge_drift", out.charge_drift});
  out.metrics.push_back({"energy_drift", out.energy_drift});
}

void add_checks(const ScenarioConfig& c, RunSummary& out) {
  for (const auto& r : out.virials) {
    if (!c.virial_verify) break;
    out.checks.push_back({"virial:" + r.id, r.pass,
                          fmt::format("max defect {:.3e}, atol {:.3e}, rtol {}", r.max_defect, r.atol, r.rtol)});
  }
  if (c.expect_charge_drift >= 0)
    out.checks.push_back({"charge_drift", out.charge_drift <= c.expect_charge_drift,
                          fmt::format("{:.3e} (limit {:.1e})", out.charge_drift, c.expect_charge_drift)});
  if (c.expect_energy_drift >= 0)
    out.checks.push_back({"energy_drift", std::isfinite(out.energy_drift) && out.energy_drift <= c.expect_energy_drift,
                          fmt::format("{:.3e} (limit {:.1e})", out.energy_drift, c.expect_energy_drift)});
  const auto times = out.series.values("t");
  const double ds = c.dt * c.sample_stride;
  for (const auto& col : c.expect_decreasing) {
    const auto f = out.series.values(col);
    bool ok = true;
    std::string detail;
    for (size_t j = 0; j < c.report_times.size(); ++j) {
      const double v = f[sample_at(times, c.report_times[j], ds)];
      detail += fmt::format("{}{:.3e}", j ? " > " : "", v);
      if (j > 0 && !(v < f[sample_at(times, c.report_times[j - 1], ds)])) ok = false;
    }
    out.checks.push_back({"decreasing:" + col, ok, detail});
  }
  for (const auto& col : c.expect_nondecaying) {
    const auto f = out.series.values(col);
    const double a = f[sample_at(times, c.report_times.front(), ds)];
    const double b = f[sample_at(times, c.report_times.back(), ds)];
    out.checks.push_back(
        {"nondecaying:" + col, b >= 0.5 * a, fmt::format("{:.6e} -> {:.6e} (ratio {:.4f})", a, b, b / a)});
  }
}

std::string run_dir(const ScenarioConfig& c) { return (std::filesystem::path(output_root()) / c.output).string(); }

}  // namespace

RunSummary run_config(const ScenarioConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  RunSummary out;
  out.name = c.name;
  out.hash = scenario_hash(c);
  out.system = to_string(c.system);
  out.model = c.model_spec();
  out.series.columns = series_header(c);
  try {
    const DiracSystem sys = make_system(c);
    const Real4 init = make_initial(c, sys);
    std::vector<VirialId> ids;
    for (const auto& v : c.virials) ids.push_back(virial_from_string(v));
    std::unique_ptr<VirialMonitor> monitor;
    if (!ids.empty()) monitor = std::make_unique<VirialMonitor>(sys, ids, config_params(c));

    IntegrateOptions opt;
    opt.dt = c.dt;
    opt.t_end = c.t_end;
    opt.sample_stride = c.sample_stride;
    opt.boundary_tol = c.boundary_tol;
    opt.boundary_width = c.boundary_width;
    opt.keep_states = false;
    integrate(sys, init, c.t0, opt,
              [&](double t, const Real4& s) { out.series.rows.push_back(sample_row(c, sys, s, t, monitor.get())); });
    if (monitor) out.virials = monitor->reports(c.virial_rtol);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(fmt::format("scenario '{}': {}", c.name, e.what()));
  }

  Table& tab = out.series;
  const auto times = tab.values("t");
  for (const char* name : {"window_decay", "radial_decay"}) {
    const int src = tab.column(name);
    if (src < 0) continue;
    const auto cum = cumulative(times, tab.values(name));
    const auto dst = static_cast<size_t>(tab.column(std::string("cum_") + name));
    for (size_t k = 0; k < tab.rows.size(); ++k) tab.rows[k][dst] = cum[k];
  }
  const auto Q = tab.values("Q"), E = tab.values("E");
  for (size_t k = 0; k < Q.size(); ++k)
    if (Q[0] > 0) out.charge_drift = std::max(out.charge_drift, std::abs(Q[k] - Q[0]) / Q[0]);
  for (size_t k = 0; k < E.size(); ++k) {
    if (!std::isfinite(E[k])) {
      out.energy_drift = kNaN;
      break;
    }
    out.energy_drift = std::max(out.energy_drift, std::abs(E[k] - E[0]) / std::max(std::abs(E[0]), Q[0]));
  }
  add_metrics(c, out);
  add_checks(c, out);

  if (!c.output.empty()) {
    const std::filesystem::path dir = run_dir(c);
    std::filesystem::create_directories(dir);
    write_series_csv((dir / (c.name + ".csv")).string(), out.series);
    write_virials_csv((dir / (c.name + "_virials.csv")).string(), out.virials);
    std::ofstream js(dir / (c.name + "_summary.json"));
    js << summary_json(out) << "\n";
    if (!js) throw ScenarioError("cannot write summary for " + c.name);
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ExperimentSummary run_scenario(const ScenarioConfig& c) {
  ExperimentSummary s;
  s.name = c.name;
  s.runs.push_back(run_config(c));
  s.wall_time = s.runs.back().wall_time;
  return s;
}

std::vector<ExperimentSummary> run_scenarios(const std::vector<ScenarioConfig>& cs, int jobs) {
  for (const auto& c : cs) validate(c);
  std::vector<ExperimentSummary> out(cs.size());
  std::vector<std::exception_ptr> errors(cs.size());
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cs.size())));
  if (n == 1) {
    for (size_t i = 0; i < cs.size(); ++i) out[i] = run_scenario(cs[i]);
    return out;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < cs.size(); i = next++) {
        try {
          ScenarioConfig c = cs[i];
          c.exec = Exec::serial;  // one thread per scenario; kernels give identical bits either way
          out[i] = run_scenario(c);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace nld
