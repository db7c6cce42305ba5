// Acceptance suite: one PASS/FAIL line per criterion. Exit 0 when every
// criterion passes or fails only for a documented known reason.
#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "nld/algebra.hpp"
#include "nld/dynamics.hpp"
#include "nld/exact.hpp"
#include "nld/ibp.hpp"
#include "nld/nlkg_bridge.hpp"
#include "nld/nonlinearity.hpp"
#include "nld/observables.hpp"
#include "nld/scenario.hpp"
#include "nld/virials.hpp"
#include "nld/weights.hpp"

using namespace nld;

namespace {

struct Outcome {
  std::string detail;
  std::vector<std::string> known;  // reasons for documented failures
  std::vector<std::string> other;  // undocumented failures
  void require(bool ok, const std::string& what) {
    if (!ok) other.push_back(what);
  }
  void known_fail(bool ok, const std::string& what) {
    if (!ok) known.push_back(what);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
  return s;
}

int jobs() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

// 1. Clifford relations.
Outcome algebra() {
  Outcome o;
  double worst = 0.0;
  for (int n : {1, 2, 3}) {
    const ValidationReport r = check_clifford(n);
    o.require(r.pass(), fmt::format("n = {} defect {:g}", n, r.max_defect()));
    worst = std::max(worst, r.max_defect());
  }
  o.detail = fmt::format("max defect {:g}", worst);
  return o;
}

RealPair bump_pair(const Grid1D& g, double c1, double w1, double c2, double w2, double k) {
  RealPair p{RealField(static_cast<size_t>(g.n)), RealField(static_cast<size_t>(g.n))};
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    p[0][static_cast<size_t>(i)] = std::exp(-(x - c1) * (x - c1) / w1) * std::cos(k * x);
    p[1][static_cast<size_t>(i)] = std::exp(-(x - c2) * (x - c2) / w2) * std::sin(k * x + 0.3);
  }
  return p;
}

// 2. Summation by parts converges at order >= 3.
Outcome ibp() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> C(-2.0, 2.0), W(0.5, 2.0), K(0.5, 2.0);
  const WeightSpec phi = weights::tanh_w();
  double min_order = 1e300;
  for (int trial = 0; trial < 5; ++trial) {
    const double c1 = C(rng), c2 = C(rng), w1 = W(rng), w2 = W(rng), k = K(rng);
    for (IbpPart part : {IbpPart::real_part, IbpPart::imag_part}) {
      double prev = 0.0;
      for (int n : {256, 512, 1024}) {
        const Grid1D g(-12, 12, n);
        const double d = discrete_ibp_defect(g, bump_pair(g, c1, w1, c2, w2, k), bump_pair(g, c2, w2, c1, w1, 1.3 * k),
                                             phi, part);
        if (n > 256) {
          const double order = std::log2(prev / d);
          min_order = std::min(min_order, order);
          o.require(order >= 3.0, fmt::format("pair {} n = {} order {:.2f}", trial, n, order));
        }
        prev = d;
      }
    }
  }
  o.detail = fmt::format("min observed order {:.2f}", min_order);
  return o;
}

double soliton_residual_constant(double h, double omega) {
  const Grid1D g(-30.0, 30.0, static_cast<int>(std::lround(60.0 / h)) + 1);
  const auto s = thirring_soliton({omega, 0.0, 0.0, 0.0}, g);
  const auto d = rhs_lab(s, builtin("thirring"), 1.0);
  const cx I(0.0, 1.0);
  double res = 0.0;
  for (size_t k = 0; k < s.c1.size(); ++k)
    res = std::max({res, std::abs(d.c1[k] - I * omega * s.c1[k]), std::abs(d.c2[k] - I * omega * s.c2[k])});
  return res / (std::pow(h, 4) * max_abs(s.real4()));
}

// 3. Soliton residual and one-period return.
Outcome exact() {
  Outcome o;
  const double w = 0.5;
  double worst = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    const double c = soliton_residual_constant(h, w);
    worst = std::max(worst, c);
    o.require(c <= 10.0, fmt::format("h = {} residual constant {:.2f}", h, c));
  }
  const Grid1D g(-40, 40, 1601);
  const double T = 2 * M_PI / w;
  const int steps = 630;
  const auto s0 = thirring_soliton({w, 0, 0, 0}, g).real4();
  IntegrateOptions opt;
  opt.dt = T / steps;
  opt.t_end = T;
  opt.sample_stride = steps;
  const auto tr = integrate(DiracSystem::lab(g, builtin("thirring"), 1.0), s0, 0.0, opt);
  RealField d(s0.size());
  for (size_t i = 0; i < s0.size(); ++i) {
    double acc = 0;
    for (size_t c = 0; c < 4; ++c) acc += std::pow(tr.states.back().q[c][i] - s0.q[c][i], 2);
    d[i] = acc;
  }
  const double err = std::sqrt(quad(g, d));
  o.require(err <= 1e-4, fmt::format("period L2 error {:.2e}", err));
  o.detail = fmt::format("omega = 0.5: max residual / (h^4 |s|) = {:.2f}, period L2 error {:.2e}; omega = 0 constant {:.2f}",
                         worst, err, soliton_residual_constant(0.05, 0.0));
  return o;
}

// 4. Charge and Hamiltonian drift on every bundled scenario over [0, 10].
Outcome conservation() {
  Outcome o;
  std::vector<ScenarioConfig> cs;
  for (const auto& [name, text] : bundled_configs()) {
    ScenarioConfig c = parse_scenario(text);
    c.t0 = 0.0;
    c.t_end = 10.0;
    c.sample_stride = static_cast<int>(std::lround(0.5 / c.dt));
    c.observables.clear();
    c.virials.clear();
    c.regions = {Region{}};
    c.report_times.clear();
    c.expect_decreasing.clear();
    c.expect_nondecaying.clear();
    c.expect_charge_drift = c.expect_energy_drift = -1.0;
    c.output.clear();
    cs.push_back(c);
  }
  const auto res = run_scenarios(cs, jobs());
  double worst_q = 0.0, worst_e = 0.0;
  for (size_t k = 0; k < res.size(); ++k) {
    const RunSummary& r = res[k].runs.front();
    const bool gauge = check_admissibility(make_system(cs[k]).model, 64, 1).gauge_ok;
    const std::string q = fmt::format("{} charge drift {:.2e}", r.name, r.charge_drift);
    if (gauge) {
      worst_q = std::max(worst_q, r.charge_drift);
      o.require(r.charge_drift <= 1e-8, q);
    } else {
      o.known_fail(r.charge_drift <= 1e-8, q + " (model not gauge invariant)");
    }
    if (std::isfinite(r.energy_drift)) {
      worst_e = std::max(worst_e, r.energy_drift);
      o.require(r.energy_drift <= 1e-6, fmt::format("{} energy drift {:.2e}", r.name, r.energy_drift));
    }
  }
  o.detail = fmt::format("{} scenarios; gauge-invariant max charge drift {:.2e}, max energy drift {:.2e}", res.size(),
                         worst_q, worst_e);
  return o;
}

Real4 smooth_1d(const Grid1D& g, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  Real4 r(static_cast<size_t>(g.n));
  for (size_t c = 0; c < 4; ++c) {
    const double a = amp * (0.5 + 0.5 * std::abs(U(rng))), x0 = 2 * U(rng), k = 1.5 * U(rng), ph = 3 * U(rng);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      r.q[c][static_cast<size_t>(i)] = a * std::exp(-(x - x0) * (x - x0) / 4) * std::cos(k * x + ph);
    }
  }
  return r;
}

Real4 smooth_radial(const RadialGrid& g, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  Real4 r(static_cast<size_t>(g.n));
  for (size_t c = 0; c < 4; ++c) {
    const double a = amp * (0.5 + 0.5 * std::abs(U(rng))), r0 = 15.0 + U(rng), k = 1.5 * U(rng), ph = 3 * U(rng);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.r(i);
      r.q[c][static_cast<size_t>(i)] = a * std::exp(-(x - r0) * (x - r0)) * std::cos(k * x + ph);
    }
  }
  return r;
}

struct IdentityCase {
  std::string label;
  SystemKind kind;
  std::vector<VirialId> ids;
  std::string linear, nonlinear;
  double m = 1.0;
  bool log_window = false;
};

// 5. Virial identities on linear and nonlinear runs at two resolutions.
Outcome identities() {
  Outcome o;
  const std::vector<IdentityCase> cases = {
      {"I constant", SystemKind::lab_1d, {VirialId::I}, "zero", "thirring", 1.0, false},
      {"I log_window", SystemKind::lab_1d, {VirialId::I}, "zero", "thirring", 1.0, true},
      {"K_1d", SystemKind::lab_1d, {VirialId::K_1d}, "zero", "gross_neveu", 1.0, false},
      {"J_1d", SystemKind::lab_1d, {VirialId::J_1d}, "zero", "gross_neveu", 1.0, false},
      {"J family", SystemKind::spinor_1d,
       {VirialId::J1, VirialId::J2, VirialId::J3, VirialId::J4, VirialId::J_combined, VirialId::H_sech},
       "zero_spinor", "quartic_harmonic", 1.0, false},
      {"K family", SystemKind::radial_3d,
       {VirialId::K1, VirialId::tK1, VirialId::K2, VirialId::tK2, VirialId::K_combined, VirialId::H_r2},
       "zero_radial", "soler_radial", 1.0, false},
  };
  std::vector<std::function<void()>> tasks;
  struct Row {
    std::string name;
    std::array<double, 2> defect{};
    std::array<bool, 2> pass{};
  };
  std::vector<Row> rows;
  for (const auto& c : cases)
    for (int nl = 0; nl < 2; ++nl)
      for (VirialId id : c.ids) rows.push_back({fmt::format("{} {} {}", to_string(id), nl ? c.nonlinear : c.linear,
                                                            c.log_window ? "log_window" : "constant"), {}, {}});
  size_t row = 0;
  for (const auto& c : cases)
    for (int nl = 0; nl < 2; ++nl) {
      const size_t first = row;
      row += c.ids.size();
      tasks.push_back([&, c, nl, first] {
        for (int lev = 0; lev < 2; ++lev) {
          const std::string spec = nl ? c.nonlinear : c.linear;
          DiracSystem sys;
          Real4 init;
          if (c.kind == SystemKind::radial_3d) {
            const RadialGrid rg(30, 600 << lev);
            sys = DiracSystem::radial(rg, builtin(spec), c.m, Exec::serial);
            init = smooth_radial(rg, 71, nl ? 0.5 : 1.0);
          } else {
            const Grid1D g(-25, 25, 1000 * (1 << lev) + 1);
            sys = c.kind == SystemKind::lab_1d ? DiracSystem::lab(g, builtin(spec), c.m, Exec::serial)
                                               : DiracSystem::spinor(g, builtin(spec), c.m, Exec::serial);
            init = smooth_1d(g, 61, nl ? 0.5 : 1.0);
          }
          IntegrateOptions opt;
          opt.dt = (c.kind == SystemKind::radial_3d ? 0.02 : 0.01) / (1 << lev);
          const double t0 = c.log_window ? 10.0 : 0.0;
          opt.t_end = t0 + 1.0;
          const Trajectory tr = integrate(sys, init, t0, opt);
          VirialParams p;
          if (c.log_window) p.scaling = ScalingTriple::log_window();
          for (size_t k = 0; k < c.ids.size(); ++k) {
            const VirialReport r = verify_identity(sys, tr, c.ids[k], p);
            rows[first + k].defect[static_cast<size_t>(lev)] = r.max_defect;
            rows[first + k].pass[static_cast<size_t>(lev)] = r.pass;
          }
        }
      });
    }
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  for (int w = 0; w < jobs(); ++w)
    pool.emplace_back([&] {
      for (size_t k; (k = next++) < tasks.size();) tasks[k]();
    });
  for (auto& t : pool) t.join();
  double worst_ratio = 0.0;
  for (const auto& r : rows) {
    o.require(r.pass[0] && r.pass[1], fmt::format("{} fails (defects {:.2e}, {:.2e})", r.name, r.defect[0], r.defect[1]));
    const double ratio = r.defect[1] / std::max(r.defect[0], 1e-300);
    o.require(r.defect[1] < r.defect[0] || r.defect[0] == 0.0, fmt::format("{} defect does not shrink ({:.2f})", r.name, ratio));
    worst_ratio = std::max(worst_ratio, ratio);
  }
  o.detail = fmt::format("{} identity runs; worst defect ratio under halving {:.3f}", rows.size(), worst_ratio);
  return o;
}

// Leibniz derivatives of r^{3/2} / (1 + r).
std::array<double, 4> r32(double r) {
  const std::array<double, 4> f{std::pow(r, 1.5), 1.5 * std::sqrt(r), 0.75 / std::sqrt(r), -0.375 / std::pow(r, 1.5)};
  const double p = 1 + r;
  const std::array<double, 4> g{1 / p, -1 / (p * p), 2 / (p * p * p), -6 / (p * p * p * p)};
  return {f[0] * g[0], f[1] * g[0] + f[0] * g[1], f[2] * g[0] + 2 * f[1] * g[1] + f[0] * g[2],
          f[3] * g[0] + 3 * f[2] * g[1] + 3 * f[1] * g[2] + f[0] * g[3]};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

// 6. Closed-form radial weight combinations.
Outcome weight_forms() {
  Outcome o;
  double worst = 0.0;
  int points = 0;
  const WeightSpec w = weights::r32_over_1pr();
  for (double r = 0.01; r <= 50.0; r *= 1.01, ++points) {
    const auto [phi, d1, d2, d3] = r32(r);
    const R32Table t = weight_closed_forms_r32(r);
    const RadialCombos c = w.combos(r);
    const std::array<std::pair<double, double>, 13> pairs = {{
        {t.d1, d1},
        {t.two_phi_r_m_d1, 2 * phi / r - d1},
        {t.phi_over_r, phi / r},
        {t.b_even, 0.5 * (d1 / (r * r) + 0.5 * d3 - d2 / r)},
        {t.b_odd, 0.5 * (2 * phi / (r * r * r) + d1 / (r * r) + 0.5 * d3 - d2 / r)},
        {t.c_w1, 2 * phi / (r * r) - 0.5 * d2 - d1 / r},
        {t.c_w2, -0.5 * (d2 - 2 * d1 / r)},
        {c.phi_over_r, phi / r},
        {c.phi_over_r2, phi / (r * r)},
        {c.phi_over_r3, phi / (r * r * r)},
        {c.d1_over_r, d1 / r},
        {c.d1_over_r2, d1 / (r * r)},
        {c.d2_over_r, d2 / r},
    }};
    for (const auto& [a, b] : pairs) worst = std::max(worst, rel(a, b));
  }
  o.require(worst <= 1e-10, fmt::format("max rel {:.2e}", worst));
  o.detail = fmt::format("{} points, max rel {:.2e}", points, worst);
  return o;
}

Outcome from_experiment(ExperimentId id) {
  Outcome o;
  const ExperimentSummary s = experiment(id, "", jobs());
  auto take = [&](const Check& c, const std::string& prefix) {
    if (c.pass) return;
    const std::string what = prefix + c.name + (c.detail.empty() ? "" : ": " + c.detail);
    (c.known ? o.known : o.other).push_back(what);
  };
  for (const auto& r : s.runs)
    for (const auto& c : r.checks) take(c, r.name + " ");
  for (const auto& c : s.checks) take(c, "");
  o.detail = fmt::format("{}: {} runs, {} checks", to_string(id), s.runs.size(), s.checks.size());
  return o;
}

Real4 pulse(const Grid1D& g, double amp) {
  ComplexField a(static_cast<size_t>(g.n)), b(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    a[static_cast<size_t>(i)] = amp * std::exp(-x * x / 4) * cx(std::cos(0.7 * x), 0.3);
    b[static_cast<size_t>(i)] = amp * std::exp(-(x - 1) * (x - 1) / 3) * cx(0.5, std::sin(x));
  }
  return to_real4(a, b);
}

// 11. Second-order bridge residuals and the Gronwall monitor.
Outcome bridge() {
  Outcome o;
  const Grid1D g(-25, 25, 2001);
  const auto sys = DiracSystem::spinor(g, builtin("quartic_harmonic"), 1.0);
  std::array<double, 3> u{}, kg{};
  double growth = 0.0;
  for (int lev = 0; lev < 3; ++lev) {
    IntegrateOptions opt;
    opt.dt = 0.01 / (1 << lev);
    opt.t_end = 1.0;
    const Trajectory tr = integrate(sys, pulse(g, 0.05), 0.0, opt);
    const BridgeResidual r = bridge_residual(sys, tr, tr.times.size() / 2);
    u[lev] = std::max(r.u0_max, r.v0_max);
    kg[lev] = std::max(r.nlkg_defect_1, r.nlkg_defect_2);
    if (lev == 0) growth = gronwall_monitor(sys, tr).growth;
  }
  double min_order = 1e300;
  for (int lev = 0; lev < 2; ++lev)
    min_order = std::min({min_order, std::log2(u[lev] / u[lev + 1]), std::log2(kg[lev] / kg[lev + 1])});
  o.require(min_order >= 1.8, fmt::format("observed order {:.2f}", min_order));
  o.require(growth <= 10.0, fmt::format("Gronwall growth {:.2f}", growth));
  o.detail = fmt::format("compat {:.2e} -> {:.2e}, NLKG {:.2e} -> {:.2e}, min order {:.2f}, Gronwall growth {:.2f}",
                         u[0], u[2], kg[0], kg[2], min_order, growth);
  return o;
}

// 12. Coercivity constant on 4001 nodes.
Outcome coercivity() {
  Outcome o;
  std::string d;
  for (double L : {1.0, 5.0, 20.0}) {
    const double c = coercivity_estimate(L);
    o.require(c > 0.0, fmt::format("L = {} estimate {:.4f}", L, c));
    d += fmt::format("{}L = {}: {:.4f}", d.empty() ? "" : ", ", L, c);
  }
  o.detail = d;
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double budget;  // seconds
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-12"};
  std::vector<int> only;
  app.add_option("--only", only, "Criteria to run (default: all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "Clifford relations exact", 1, algebra},
      {2, "summation by parts order >= 3", 10, ibp},
      {3, "soliton residual and period return", 120, exact},
      {4, "charge and Hamiltonian conservation", 600, conservation},
      {5, "virial identities", 600, identities},
      {6, "radial weight closed forms", 60, weight_forms},
      {7, "massless window decay", 300, [] { return from_experiment(ExperimentId::T1_massless); }},
      {8, "odd-data decay and negative control", 600, [] { return from_experiment(ExperimentId::T2_massive_odd); }},
      {9, "radial Soler decay", 600, [] { return from_experiment(ExperimentId::T3_radial); }},
      {10, "exterior light-cone decay", 600, [] { return from_experiment(ExperimentId::T5_exterior); }},
      {11, "NLKG bridge order", 600, bridge},
      {12, "coercivity", 60, coercivity},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.other.push_back(std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    o.require(secs <= c.budget, fmt::format("runtime {:.1f} s over budget {:.0f} s", secs, c.budget));
    std::string status;
    if (!o.other.empty()) {
      status = "FAIL (" + join(o.other) + (o.known.empty() ? "" : "; known: " + join(o.known)) + ")";
      ok = false;
    } else if (!o.known.empty()) {
      status = "FAIL (known: " + join(o.known) + ")";
    } else {
      status = "PASS";
    }
    fmt::print("criterion {:>2} {:<40} {} [{:.1f} s] {}\n", c.id, c.name, status, secs, o.detail);
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
