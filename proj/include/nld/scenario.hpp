#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nld/dynamics.hpp"
#include "nld/observables.hpp"
#include "nld/virials.hpp"

namespace nld {

/// Bad or inconsistent configuration; raised before any stepping.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A module failure during a run, prefixed with the scenario name.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitialCondition {
  std::string kind = "bump";     // bump | soliton | zero
  double amplitude = 0.05;       // bump: eps
  double width = 1.0;
  double center = 0.0;
  std::string profile = "gauss"; // gauss: exp(-y^2), sech: sech(y), y = (x - center) / width
  std::string parity = "none";   // 1D only: none | odd (both odd) | mixed (first odd, second even)
  double omega = 0.5;            // soliton
  double x0 = 0.0;
  double phase = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  SystemKind system = SystemKind::lab_1d;
  std::string model = "zero";
  bool has_coupling = false;
  double coupling = 0.0;
  double mass = 0.0;
  InitialCondition init;
  double xmin = -200.0, xmax = 200.0;  // 1D
  double rmax = 100.0;                 // radial
  int n = 8001;                        // 1D nodes or radial cells
  double dt = 0.02;
  double t0 = 0.0;
  double t_end = 10.0;
  int sample_stride = 5;
  double boundary_width = 10.0;
  double boundary_tol = 1e-8;
  std::vector<std::string> observables;  // extra columns, see observable_names()
  std::vector<std::string> virials;
  std::string virial_weight;             // empty: default weight per identity
  std::string virial_scaling = "constant";
  double virial_rtol = 1e-3;
  bool virial_verify = true;             // false: record F_<identity> columns only
  std::vector<Region> regions;
  std::vector<double> report_times;
  double exterior_t0 = -1.0;             // negative: t_end
  double expect_charge_drift = -1.0;     // negative: no expectation
  double expect_energy_drift = -1.0;
  std::vector<std::string> expect_decreasing;   // columns strictly decreasing across report_times
  std::vector<std::string> expect_nondecaying;  // columns keeping >= half their first reported value
  std::string output = "out";            // relative to the output root; empty writes nothing
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;

  std::string model_spec() const;
};

/// Keys accepted by parse_scenario, in canonical order.
const std::vector<std::string>& scenario_keys();
/// Extra per-sample observables: sech_mass, window_decay, radial_decay,
/// mixed_parity_defect, exterior_functional.
const std::vector<std::string>& observable_names();

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, duplicate
/// keys and malformed values raise ConfigError.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
/// Canonical key = value text; parse_scenario(canonical_text(c)) reproduces c.
std::string canonical_text(const ScenarioConfig& c);
/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& c);
/// Throws ConfigError on CFL, grid, boundary-buffer or compatibility violations.
void validate(const ScenarioConfig& c);

DiracSystem make_system(const ScenarioConfig& c);
Real4 make_initial(const ScenarioConfig& c, const DiracSystem& sys);

/// Column-major sample table with a header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 when absent
  std::vector<double> values(const std::string& name) const;
};

struct Metric {
  std::string name;
  double value = 0.0;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  bool known = false;  // documented as unattainable
};

struct RunSummary {
  std::string name;
  std::string hash;
  std::string system;
  std::string model;
  double charge_drift = 0.0;  // max |Q(t) - Q(t0)| / Q(t0)
  double energy_drift = 0.0;  // max |E(t) - E(t0)| / max(|E(t0)|, Q(t0)); NaN without an energy
  Table series;
  std::vector<VirialReport> virials;
  std::vector<Metric> metrics;
  std::vector<Check> checks;
  double wall_time = 0.0;  // seconds; never written to output files
};

struct ExperimentSummary {
  std::string name;
  std::vector<RunSummary> runs;
  std::vector<Metric> metrics;
  std::vector<Check> checks;
  double wall_time = 0.0;
  /// All run and experiment checks pass.
  bool pass() const;
  /// Every failing check is marked known.
  bool only_known_failures() const;
  double metric(const std::string& name) const;  // throws std::out_of_range
};

/// Trajectory CSV header: t, Q, E, H, P, mass_<region>..., parity_defect, then the
/// extra observables in the order requested (exterior_functional expands to
/// F43_<region>_plus, F43_<region>_minus, R43_<region>_plus, R43_<region>_minus
/// per exterior region: value and closed-form derivative), then F_<identity>
/// per virial, then cum_window_decay / cum_radial_decay when requested.
std::vector<std::string> series_header(const ScenarioConfig& c);

/// Output root: $NLDLAB_OUTPUT_ROOT if set, else the current directory.
std::string output_root();

/// Integrates, records the observable table and virial reports, evaluates the
/// expectations, and writes <name>.csv, <name>_virials.csv and
/// <name>_summary.json under output_root()/output unless output is empty.
RunSummary run_config(const ScenarioConfig& c);
ExperimentSummary run_scenario(const ScenarioConfig& c);
/// Runs independent scenarios on up to `jobs` threads; results keep input order.
std::vector<ExperimentSummary> run_scenarios(const std::vector<ScenarioConfig>& cs, int jobs);

enum class ExperimentId { T1_massless, T2_massive_odd, T3_radial, T5_exterior };
std::string to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& s);
const std::vector<ExperimentId>& all_experiments();

/// Bundled configurations by name (massless_thirring, soliton_rest, odd_quartic,
/// mixed_quartic, thirring_psi_control, radial_soler, exterior_m0, exterior_m1,
/// exterior_soliton); identical to the files shipped in configs/.
const std::map<std::string, std::string>& bundled_configs();
ScenarioConfig bundled(const std::string& name);

/// Curated runs plus experiment-level checks. `output` overrides the configs'
/// output directory (empty disables files).
ExperimentSummary experiment(ExperimentId id, const std::string& output = "experiments", int jobs = 1);

std::string summary_json(const RunSummary& s);
std::string summary_json(const ExperimentSummary& s);
void write_series_csv(const std::string& path, const Table& t);
void write_virials_csv(const std::string& path, const std::vector<VirialReport>& reports);

/// Writes each run's CSVs and one plotting script <name>_plot.py (windowed
/// mass on log axes, virial defects, cumulative integrals) into dir. Returns
/// the written paths.
std::vector<std::string> emit_plots(const ExperimentSummary& s, const std::string& dir);

}  // namespace nld
