#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "nld/nonlinearity.hpp"
#include "nld/scenario.hpp"

namespace nld {

namespace {

const char* kMasslessThirring = R"(# Massless Thirring model with a localized sech bump.
# Windowed mass on I(t) = (-t/log^2 t, t/log^2 t) must decrease across dyadic times.
name = massless_thirring
system = lab_1d
model = thirring
mass = 0
init = bump
init.amplitude = 0.3
init.width = 4
init.profile = sech
grid.xmin = -200
grid.xmax = 200
grid.n = 8001
dt = 0.02
t_end = 80
sample_stride = 10
observables = window_decay
regions = log_window, whole
report_times = 10, 20, 40, 60, 80
expect.decreasing = mass_log_window
output = massless_thirring
)";

const char* kSolitonRest = R"(# Thirring solitary wave at rest (m = 1, omega = 0.5): the windowed mass does not decay.
name = soliton_rest
system = lab_1d
model = thirring
mass = 1
init = soliton
init.omega = 0.5
grid.xmin = -50
grid.xmax = 50
grid.n = 2001
dt = 0.02
t_end = 80
sample_stride = 10
regions = log_window, whole
report_times = 10, 20, 40, 80
expect.nondecaying = mass_log_window
output = soliton_rest
)";

const char* kOddQuartic = R"(# Spinor frame, harmonic quartic nonlinearity, small odd data (both components odd).
name = odd_quartic
system = spinor_1d
model = quartic_harmonic
mass = 1
init = bump
init.amplitude = 0.05
init.width = 1
init.parity = odd
grid.xmin = -100
grid.xmax = 100
grid.n = 4001
dt = 0.01
t_end = 40
sample_stride = 1
observables = sech_mass, mixed_parity_defect
virials = H_sech
regions = interval:-5:5
report_times = 0, 10, 20, 40
output = odd_quartic
)";

const char* kMixedQuartic = R"(# Same as odd_quartic with the parity class kept by the flow: psi1 odd, psi2 even.
name = mixed_quartic
system = spinor_1d
model = quartic_harmonic
mass = 1
init = bump
init.amplitude = 0.05
init.width = 1
init.parity = mixed
grid.xmin = -100
grid.xmax = 100
grid.n = 4001
dt = 0.01
t_end = 40
sample_stride = 1
observables = sech_mass
virials = H_sech
regions = interval:-5:5
report_times = 0, 10, 20, 40
output = mixed_quartic
)";

const char* kThirringPsiControl = R"(# Negative control: the non-harmonic thirring_psi nonlinearity with odd data.
name = thirring_psi_control
system = spinor_1d
model = thirring_psi
mass = 1
init = bump
init.amplitude = 0.05
init.width = 1
init.parity = odd
grid.xmin = -100
grid.xmax = 100
grid.n = 4001
dt = 0.01
t_end = 40
sample_stride = 1
observables = sech_mass, mixed_parity_defect
virials = H_sech
regions = interval:-5:5
report_times = 0, 10, 20, 40
output = thirring_psi_control
)";

const char* kRadialSoler = R"(# Radially symmetric 3D Soler model, small data centred at the origin.
name = radial_soler
system = radial_3d
model = soler_radial
mass = 1
init = bump
init.amplitude = 0.05
init.width = 1
grid.rmax = 100
grid.n = 4000
dt = 0.01
t_end = 40
sample_stride = 20
observables = radial_decay
virials = K1, tK1, K2, tK2
virial.verify = false
regions = ball:1, ball:5, whole
report_times = 0, 10, 20, 30, 40
output = radial_soler
)";

const char* kExteriorM0 = R"(# Exterior cone |x| >= (1+b) t for massless Thirring with localized data.
name = exterior_m0
system = lab_1d
model = thirring
mass = 0
init = bump
init.amplitude = 0.3
init.width = 1
grid.xmin = -50
grid.xmax = 50
grid.n = 2001
dt = 0.01
t_end = 10
sample_stride = 5
observables = exterior_functional
regions = exterior:0.5, exterior:1, whole
report_times = 10
output = exterior_m0
)";

const char* kExteriorM1 = R"(# Exterior cone |x| >= (1+b) t for massive Thirring (m = 1) with localized data.
name = exterior_m1
system = lab_1d
model = thirring
mass = 1
init = bump
init.amplitude = 0.3
init.width = 1
grid.xmin = -50
grid.xmax = 50
grid.n = 2001
dt = 0.01
t_end = 10
sample_stride = 5
observables = exterior_functional
regions = exterior:0.5, exterior:1, whole
report_times = 10
output = exterior_m1
)";

const char* kExteriorSoliton = R"(# Thirring solitary wave at rest: its exponential tails leave the cone |x| >= 1.5 t.
name = exterior_soliton
system = lab_1d
model = thirring
mass = 1
init = soliton
init.omega = 0.5
grid.xmin = -50
grid.xmax = 50
grid.n = 2001
dt = 0.02
t_end = 10
sample_stride = 5
observables = exterior_functional
regions = exterior:0.5, whole
report_times = 10
output = exterior_soliton
)";

std::vector<double> col(const RunSummary& r, const std::string& name) { return r.series.values(name); }

double at(const RunSummary& r, const std::string& name, double t) {
  const auto ts = col(r, "t");
  const auto f = col(r, name);
  size_t best = 0;
  for (size_t k = 1; k < ts.size(); ++k)
    if (std::abs(ts[k] - t) < std::abs(ts[best] - t)) best = k;
  return f[best];
}

double max_abs(const std::vector<double>& f) {
  double m = 0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

// (C(T) - C(3T/4)) / C(T) for a cumulative column.
double final_quarter_growth(const RunSummary& r, const std::string& name) {
  const auto ts = col(r, "t");
  const double T = ts.back(), t34 = ts.front() + 0.75 * (T - ts.front());
  const double cT = at(r, name, T), c34 = at(r, name, t34);
  return cT > 0 ? (cT - c34) / cT : 0.0;
}

// sup over the second half of the run is at most twice the sup over the first half.
bool bounded(const RunSummary& r, const std::string& name, double& ratio) {
  const auto ts = col(r, "t");
  const auto f = col(r, name);
  const double mid = 0.5 * (ts.front() + ts.back());
  double a = 0, b = 0;
  for (size_t k = 0; k < ts.size(); ++k) {
    if (!std::isfinite(f[k])) return false;
    double& sup = ts[k] <= mid ? a : b;
    sup = std::max(sup, std::abs(f[k]));
  }
  ratio = a > 0 ? b / a : (b > 0 ? INFINITY : 0.0);
  return b <= 2.0 * a;
}

// Largest positive increment between consecutive samples relative to max |f|.
double increase_violation(const std::vector<double>& f) {
  double worst = 0;
  for (size_t k = 1; k < f.size(); ++k) worst = std::max(worst, f[k] - f[k - 1]);
  const double s = max_abs(f);
  return s > 0 ? worst / s : 0.0;
}

std::vector<ScenarioConfig> curated(ExperimentId id) {
  switch (id) {
    case ExperimentId::T1_massless: return {bundled("massless_thirring"), bundled("soliton_rest")};
    case ExperimentId::T2_massive_odd:
      return {bundled("odd_quartic"), bundled("mixed_quartic"), bundled("thirring_psi_control")};
    case ExperimentId::T3_radial: return {bundled("radial_soler")};
    case ExperimentId::T5_exterior:
      return {bundled("exterior_m0"), bundled("exterior_m1"), bundled("exterior_soliton")};
  }
  return {};
}

void t1_checks(ExperimentSummary& s) {
  const RunSummary& run = s.runs[0];
  const double g = final_quarter_growth(run, "cum_window_decay");
  s.metrics.push_back({"cum_window_decay_final_quarter_growth", g});
  s.checks.push_back({"cumulative window integral growth over the final quarter < 5%", g < 0.05,
                      fmt::format("growth {:.3e}", g)});
  for (double t : {10.0, 20.0, 40.0, 80.0}) s.metrics.push_back({fmt::format("window_mass@{}", t), at(run, "mass_log_window", t)});
  const bool trend = at(run, "mass_log_window", 80) < at(run, "mass_log_window", 10);
  s.checks.push_back({"window mass at t=80 below t=10", trend, ""});
}

void t2_checks(ExperimentSummary& s) {
  const RunSummary& odd = s.runs[0];
  const RunSummary& mixed = s.runs[1];
  const RunSummary& ctrl = s.runs[2];
  const double p_odd = max_abs(col(odd, "parity_defect"));
  const double p_mixed = max_abs(col(mixed, "parity_defect"));
  const double p_odd_mixed = max_abs(col(odd, "mixed_parity_defect"));
  s.metrics.push_back({"odd_quartic.max_parity_defect", p_odd});
  s.metrics.push_back({"mixed_quartic.max_parity_defect", p_mixed});
  s.metrics.push_back({"odd_quartic.max_mixed_parity_defect", p_odd_mixed});
  Check odd_check{"odd data stay odd (parity defect <= 1e-8)", p_odd <= 1e-8, fmt::format("max defect {:.3e}", p_odd)};
  odd_check.known = !odd_check.pass;
  if (odd_check.known) odd_check.detail += "; d/dx maps odd to even, the flow keeps psi1 odd / psi2 even instead";
  s.checks.push_back(odd_check);
  s.checks.push_back({"psi1 odd / psi2 even data keep their parity (<= 1e-8)", p_mixed <= 1e-8,
                      fmt::format("max defect {:.3e}", p_mixed)});
  const double m0 = at(odd, "sech_mass", 0), m40 = at(odd, "sech_mass", 40);
  s.metrics.push_back({"sech_mass_ratio_40", m40 / m0});
  s.checks.push_back({"compact-set mass at t=40 below 50% of t=0", m40 < 0.5 * m0, fmt::format("ratio {:.4f}", m40 / m0)});
  const auto pc = col(ctrl, "parity_defect");
  s.metrics.push_back({"control.final_parity_defect", pc.back()});
  s.checks.push_back({"control: parity defect grows", pc.back() > std::max(1e-8, 10.0 * pc.front()),
                      fmt::format("{:.3e} -> {:.3e}", pc.front(), pc.back())});
  // Combination 2 is d_c W2 - d_a W1.
  const HarmonicResult h = check_harmonic(builtin("thirring_psi"), 64, 7);
  const double rel = std::abs(h.combo[2] - h.max_half_charge_split) / h.max_half_charge_split;
  s.metrics.push_back({"control.harmonic_defect", h.combo[2]});
  s.metrics.push_back({"control.harmonic_worst_defect", h.worst_defect});
  s.metrics.push_back({"control.max_half_charge_split", h.max_half_charge_split});
  s.checks.push_back({"control: harmonic checker fails with defect max|(|psi1|^2-|psi2|^2)/2|", !h.ok && rel <= 1e-6,
                      fmt::format("defect {:.6e}, split {:.6e}, rel {:.1e}", h.combo[2], h.max_half_charge_split, rel)});
}

void t3_checks(ExperimentSummary& s) {
  const RunSummary& run = s.runs[0];
  for (const char* k : {"F_K1", "F_tK1", "F_K2", "F_tK2"}) {
    double ratio = 0;
    const bool ok = bounded(run, k, ratio);
    s.metrics.push_back({std::string(k) + "_second_half_ratio", ratio});
    s.checks.push_back({std::string(k) + " bounded", ok, fmt::format("sup second half / sup first half = {:.3f}", ratio)});
  }
  const double g = final_quarter_growth(run, "cum_radial_decay");
  s.metrics.push_back({"cum_radial_decay_final_quarter_growth", g});
  s.checks.push_back({"cumulative radial decay integral growth over the final quarter < 5%", g < 0.05,
                      fmt::format("growth {:.3e}", g)});
  for (const char* region : {"mass_ball_R1", "mass_ball_R5"})
    for (double t : {0.0, 10.0, 20.0, 40.0}) s.metrics.push_back({fmt::format("{}@{}", region, t), at(run, region, t)});
  const double b0 = at(run, "mass_ball_R1", 0), b40 = at(run, "mass_ball_R1", 40);
  s.checks.push_back({"L2(B(0,1)) mass at t=40 below 50% of t=0", b40 < 0.5 * b0, fmt::format("ratio {:.4f}", b40 / b0)});
}

void t5_checks(ExperimentSummary& s) {
  for (const RunSummary& run : s.runs) {
    const double q0 = col(run, "Q").front();
    for (const auto& c : run.series.columns) {
      if (c.rfind("mass_exterior_", 0) == 0) {
        const double m = at(run, c, 10);
        s.metrics.push_back({run.name + "." + c + "@10_over_Q0", m / q0});
        s.checks.push_back({run.name + ": " + c + " at t=10 <= 1e-6 Q(0)", m <= 1e-6 * q0,
                            fmt::format("{:.3e} Q(0)", m / q0)});
      }
      if (c.rfind("F43_", 0) == 0) {
        const double v = increase_violation(col(run, c));
        const auto rhs = col(run, "R43_" + c.substr(4));
        const double r = *std::max_element(rhs.begin(), rhs.end());
        s.metrics.push_back({run.name + "." + c + "_violation", v});
        s.metrics.push_back({run.name + ".R43_" + c.substr(4) + "_max", r});
        s.checks.push_back({run.name + ": " + c + " non-increasing (violation <= 1e-3)", v <= 1e-3,
                            fmt::format("violation {:.3e}, max rhs {:.3e}", v, r)});
      }
    }
  }
}

}  // namespace

const std::map<std::string, std::string>& bundled_configs() {
  static const std::map<std::string, std::string> cfgs = {
      {"massless_thirring", kMasslessThirring}, {"soliton_rest", kSolitonRest},
      {"odd_quartic", kOddQuartic},             {"mixed_quartic", kMixedQuartic},
      {"thirring_psi_control", kThirringPsiControl}, {"radial_soler", kRadialSoler},
      {"exterior_m0", kExteriorM0},             {"exterior_m1", kExteriorM1},
      {"exterior_soliton", kExteriorSoliton}};
  return cfgs;
}

ScenarioConfig bundled(const std::string& name) {
  const auto& m = bundled_configs();
  const auto it = m.find(name);
  if (it == m.end()) throw ConfigError("no bundled configuration named " + name);
  return parse_scenario(it->second);
}

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::T1_massless: return "T1_massless";
    case ExperimentId::T2_massive_odd: return "T2_massive_odd";
    case ExperimentId::T3_radial: return "T3_radial";
    case ExperimentId::T5_exterior: return "T5_exterior";
  }
  return "?";
}

const std::vector<ExperimentId>& all_experiments() {
  static const std::vector<ExperimentId> ids = {ExperimentId::T1_massless, ExperimentId::T2_massive_odd,
                                                ExperimentId::T3_radial, ExperimentId::T5_exterior};
  return ids;
}

ExperimentId experiment_from_string(const std::string& s) {
  for (ExperimentId id : all_experiments())
    if (to_string(id) == s) return id;
  throw ConfigError("unknown experiment '" + s + "' (known: T1_massless, T2_massive_odd, T3_radial, T5_exterior)");
}

ExperimentSummary experiment(ExperimentId id, const std::string& output, int jobs) {
  const std::string name = to_string(id);
  const std::string dir = output.empty() ? "" : (std::filesystem::path(output) / name).string();
  std::vector<ScenarioConfig> cfgs = curated(id);
  for (auto& c : cfgs) c.output = dir;
  ExperimentSummary s;
  s.name = name;
  for (auto& r : run_scenarios(cfgs, jobs)) {
    s.runs.push_back(std::move(r.runs.front()));
    s.wall_time += s.runs.back().wall_time;
  }
  switch (id) {
    case ExperimentId::T1_massless: t1_checks(s); break;
    case ExperimentId::T2_massive_odd: t2_checks(s); break;
    case ExperimentId::T3_radial: t3_checks(s); break;
    case ExperimentId::T5_exterior: t5_checks(s); break;
  }
  if (!dir.empty()) {
    const std::filesystem::path d = std::filesystem::path(output_root()) / dir;
    emit_plots(s, d.string());
    std::ofstream js(d / (name + "_summary.json"));
    js << summary_json(s) << "\n";
    if (!js) throw ScenarioError("cannot write experiment summary for " + name);
  }
  return s;
}

}  // namespace nld
