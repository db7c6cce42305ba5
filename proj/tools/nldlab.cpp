#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "nld/algebra.hpp"
#include "nld/exact.hpp"
#include "nld/nlkg_bridge.hpp"
#include "nld/nonlinearity.hpp"
#include "nld/scenario.hpp"

using namespace nld;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kAssertion = 1, kConfig = 2 };

ojson number(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson report_json(const VirialReport& r) {
  ojson j;
  j["id"] = r.id;
  j["pass"] = r.pass;
  j["rtol"] = r.rtol;
  j["atol"] = number(r.atol);
  j["max_defect"] = number(r.max_defect);
  j["max_rhs"] = number(r.max_rhs);
  j["samples"] = r.times.size();
  return j;
}

void print_run(const RunSummary& r) {
  fmt::print("{} [{}] {} / {}: {} samples, charge drift {:.3e}, energy drift {:.3e}, {:.2f} s\n", r.name, r.hash,
             r.system, r.model, r.series.rows.size(), r.charge_drift, r.energy_drift, r.wall_time);
  for (const auto& c : r.checks)
    fmt::print("  {:<4} {}{}{}\n", c.pass ? "ok" : (c.known ? "KNOWN" : "FAIL"), c.name, c.detail.empty() ? "" : ": ",
               c.detail);
}

void print_experiment(const ExperimentSummary& s) {
  fmt::print("== {} ==\n", s.name);
  for (const auto& r : s.runs) print_run(r);
  for (const auto& c : s.checks)
    fmt::print("  {:<4} {}{}{}\n", c.pass ? "ok" : (c.known ? "KNOWN" : "FAIL"), c.name, c.detail.empty() ? "" : ": ",
               c.detail);
  fmt::print("{}: {} ({:.2f} s)\n", s.name, s.pass() ? "PASS" : (s.only_known_failures() ? "PASS with known failures" : "FAIL"),
             s.wall_time);
}

int verdict(const std::vector<ExperimentSummary>& all, bool allow_known) {
  for (const auto& s : all)
    if (!s.pass() && !(allow_known && s.only_known_failures())) return kAssertion;
  return kPass;
}

RealField column_of(const Real4& s, int q) { return s.q[static_cast<size_t>(q)]; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nldlab: nonlinear Dirac numerical lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run scenario files");
  std::vector<std::string> run_files;
  int jobs = 1;
  bool allow_known = false;
  run->add_option("scenarios", run_files, "Scenario files")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  run->add_flag("--allow-known", allow_known, "Exit 0 when every failing check is a documented known failure");

  auto* exp = app.add_subcommand("experiment", "Run a curated experiment");
  std::string exp_id;
  std::string exp_out = "experiments";
  exp->add_option("id", exp_id, "T1_massless, T2_massive_odd, T3_radial, T5_exterior or all")->required();
  exp->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  exp->add_option("--output", exp_out, "Output directory below the output root (empty disables files)");
  exp->add_flag("--allow-known", allow_known, "Exit 0 when every failing check is a documented known failure");

  auto* alg = app.add_subcommand("check-algebra", "Clifford relations for n = 1, 2, 3");
  std::vector<int> alg_n = {1, 2, 3};
  alg->add_option("--n", alg_n, "Dimensions");

  auto* nl = app.add_subcommand("check-nonlinearity", "Admissibility report as JSON");
  std::string nl_model;
  int nl_samples = 256;
  std::uint64_t nl_seed = 1;
  nl->add_option("--model", nl_model, "Model spec, e.g. thirring:2, quartic_harmonic, soler_radial:1")->required();
  nl->add_option("--samples", nl_samples, "Random sample points");
  nl->add_option("--seed", nl_seed, "Sampler seed");

  auto* vv = app.add_subcommand("verify-virial", "Verify one virial identity along a scenario run");
  std::string vv_system, vv_id, vv_file, vv_csv;
  vv->add_option("--system", vv_system, "lab, spinor or radial")->required();
  vv->add_option("--identity", vv_id, "Identity name, e.g. K_1d, J_combined, H_sech, tK2")->required();
  vv->add_option("--scenario", vv_file, "Scenario file")->required()->check(CLI::ExistingFile);
  vv->add_option("--csv", vv_csv, "CSV path for (t, F, FD, RHS, defect)");

  auto* nk = app.add_subcommand("nlkg-check", "Second-order residuals and Gronwall monitor");
  std::string nk_file;
  nk->add_option("--scenario", nk_file, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* ex = app.add_subcommand("emit-exact", "Write the closed-form solitary wave as a field CSV");
  std::string ex_solution = "thirring", ex_out = "thirring_soliton.csv";
  double ex_omega = 0.5, ex_time = 0.0, ex_xmin = -30, ex_xmax = 30;
  int ex_n = 1201;
  ex->add_option("--solution", ex_solution, "Only 'thirring'")->check(CLI::IsMember({"thirring"}));
  ex->add_option("--omega", ex_omega, "Frequency in (-1, 1)");
  ex->add_option("--time", ex_time, "Time");
  ex->add_option("--xmin", ex_xmin);
  ex->add_option("--xmax", ex_xmax);
  ex->add_option("--n", ex_n, "Nodes");
  ex->add_option("--out", ex_out, "CSV path");

  auto* ep = app.add_subcommand("emit-plots", "Run and write CSVs plus a plotting script");
  std::string ep_exp, ep_file, ep_dir = "plots";
  ep->add_option("--experiment", ep_exp, "Experiment id");
  ep->add_option("--scenario", ep_file, "Scenario file")->check(CLI::ExistingFile);
  ep->add_option("--dir", ep_dir, "Directory below the output root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*run) {
      std::vector<ScenarioConfig> cfgs;
      for (const auto& f : run_files) cfgs.push_back(load_scenario(f));
      const auto all = run_scenarios(cfgs, jobs);
      for (const auto& s : all) print_experiment(s);
      return verdict(all, allow_known);
    }
    if (*exp) {
      std::vector<ExperimentId> ids;
      if (exp_id == "all")
        ids = all_experiments();
      else
        ids.push_back(experiment_from_string(exp_id));
      std::vector<ExperimentSummary> all;
      for (ExperimentId id : ids) {
        all.push_back(experiment(id, exp_out, jobs));
        print_experiment(all.back());
      }
      return verdict(all, allow_known);
    }
    if (*alg) {
      bool ok = true;
      for (int n : alg_n) {
        const ValidationReport r = check_clifford(n);
        fmt::print("n = {}\n", n);
        for (const auto& rel : r.relations)
          fmt::print("  {:<4} {:<40} defect {:g}\n", rel.pass ? "ok" : "FAIL", rel.name, rel.defect);
        ok = ok && r.pass();
      }
      fmt::print("{}\n", ok ? "PASS" : "FAIL");
      return ok ? kPass : kAssertion;
    }
    if (*nl) {
      const AdmissibilityReport r = check_admissibility(builtin(nl_model), nl_samples, nl_seed);
      ojson j;
      j["model"] = r.model;
      j["has_potential"] = r.has_potential;
      j["gauge"] = {{"ok", r.gauge_ok}, {"defect", r.gauge_defect}};
      j["symmetry"] = {{"ok", r.symmetry_ok}, {"defect", r.symmetry_defect}};
      j["polynomial"] = {{"ok", r.polynomial_ok}, {"defect", r.polynomial_defect}};
      j["harmonic"] = {{"ok", r.harmonic_ok}, {"defect", r.harmonic_defect}, {"combinations", r.harmonic_combo}};
      j["bd_dependence"] = {{"ok", r.bd_dependence_ok}, {"defect", r.bd_defect}};
      j["growth"] = {{"ok", r.growth_ok}, {"slope", r.growth_slope}};
      j["samples"] = r.samples;
      std::cout << j.dump(2) << "\n";
      return kPass;
    }
    if (*vv) {
      ScenarioConfig c = load_scenario(vv_file);
      if (system_from_string(vv_system) != c.system)
        throw ConfigError(fmt::format("--system {} does not match the scenario's {}", vv_system, to_string(c.system)));
      c.virials = {vv_id};
      c.virial_verify = true;
      c.output.clear();
      const RunSummary r = run_config(c);
      const VirialReport& rep = r.virials.front();
      if (!vv_csv.empty()) {
        std::ofstream out(vv_csv);
        out << "t,F,FD,RHS,defect\n";
        for (size_t k = 0; k < rep.times.size(); ++k)
          out << fmt::format("{},{},{},{},{}\n", rep.times[k], rep.F[k], rep.FD[k], rep.RHS[k], rep.defect[k]);
        if (!out) throw std::runtime_error("cannot write " + vv_csv);
      }
      ojson j = report_json(rep);
      j["scenario"] = c.name;
      j["hash"] = r.hash;
      std::cout << j.dump(2) << "\n";
      return rep.pass ? kPass : kAssertion;
    }
    if (*nk) {
      const ScenarioConfig c = load_scenario(nk_file);
      validate(c);
      const DiracSystem sys = make_system(c);
      require_bridge_preconditions(sys);
      IntegrateOptions opt;
      opt.dt = c.dt;
      opt.t_end = c.t_end;
      opt.sample_stride = c.sample_stride;
      opt.boundary_width = c.boundary_width;
      opt.boundary_tol = c.boundary_tol;
      const Trajectory tr = integrate(sys, make_initial(c, sys), c.t0, opt);
      const GronwallSeries g = gronwall_monitor(sys, tr);
      ojson j;
      j["scenario"] = c.name;
      j["hash"] = scenario_hash(c);
      j["floor"] = g.floor;
      j["growth"] = g.growth;
      ojson series = ojson::array();
      for (size_t k = 0; k < g.times.size(); ++k) {
        const BridgeResidual r = bridge_residual(sys, tr, k + 1);
        series.push_back({{"t", g.times[k]},
                          {"M", g.M[k]},
                          {"ratio", g.ratio[k]},
                          {"u0_max", r.u0_max},
                          {"v0_max", r.v0_max},
                          {"nlkg_defect_1", r.nlkg_defect_1},
                          {"nlkg_defect_2", r.nlkg_defect_2}});
      }
      j["series"] = series;
      std::cout << j.dump(2) << "\n";
      return kPass;
    }
    if (*ex) {
      if (!(std::abs(ex_omega) < 1)) throw ConfigError("--omega must lie in (-1, 1)");
      const Grid1D g(ex_xmin, ex_xmax, ex_n);
      const SpinorState1D s = thirring_soliton({ex_omega, 0.0, 0.0, ex_time}, g);
      const Real4 q = s.real4();
      write_field_csv(ex_out, "x", g.nodes(), {"re_u", "im_u", "re_v", "im_v"},
                      {column_of(q, 0), column_of(q, 1), column_of(q, 2), column_of(q, 3)});
      fmt::print("{}\n", ex_out);
      return kPass;
    }
    if (*ep) {
      if (ep_exp.empty() == ep_file.empty()) throw ConfigError("emit-plots needs exactly one of --experiment, --scenario");
      const std::string dir = (std::filesystem::path(output_root()) / ep_dir).string();
      ExperimentSummary s;
      if (!ep_exp.empty()) {
        s = experiment(experiment_from_string(ep_exp), "", jobs);
      } else {
        ScenarioConfig c = load_scenario(ep_file);
        c.output.clear();
        s = run_scenario(c);
      }
      for (const auto& p : emit_plots(s, dir)) fmt::print("{}\n", p);
      return kPass;
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const BridgeError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kAssertion;
  }
  return kPass;
}
