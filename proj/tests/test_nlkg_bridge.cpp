#include "doctest.h"

#include <cmath>

#include "nld/nlkg_bridge.hpp"
#include "nld/nonlinearity.hpp"

using namespace nld;

namespace {

Real4 pulse(const Grid1D& g, double amp) {
  ComplexField a(static_cast<size_t>(g.n)), b(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    a[static_cast<size_t>(i)] = amp * std::exp(-x * x / 4) * cx(std::cos(0.7 * x), 0.3);
    b[static_cast<size_t>(i)] = amp * std::exp(-(x - 1) * (x - 1) / 3) * cx(0.5, std::sin(x));
  }
  return to_real4(a, b);
}

Trajectory run(const DiracSystem& sys, double dt, int stride, double t_end) {
  IntegrateOptions opt;
  opt.dt = dt;
  opt.t_end = t_end;
  opt.sample_stride = stride;
  return integrate(sys, pulse(sys.grid, 0.05), 0.0, opt);
}

}  // namespace

TEST_CASE("bridge residuals vanish on the zero trajectory") {
  const Grid1D g(-20, 20, 401);
  const auto sys = DiracSystem::spinor(g, builtin("quartic_harmonic"), 1.0);
  Trajectory tr;
  tr.grid = g;
  for (int k = 0; k < 5; ++k) {
    tr.times.push_back(0.1 * k);
    tr.states.emplace_back(401);
  }
  const BridgeResidual r = bridge_residual(sys, tr, 2);
  CHECK(r.u0_max == 0.0);
  CHECK(r.v0_max == 0.0);
  CHECK(r.nlkg_defect_1 == 0.0);
  CHECK(r.nlkg_defect_2 == 0.0);
  const GronwallSeries gs = gronwall_monitor(sys, tr);
  for (double v : gs.M) CHECK(v == 0.0);
  CHECK_THROWS_AS(bridge_residual(sys, tr, 0), std::invalid_argument);
  CHECK_THROWS_AS(bridge_residual(sys, tr, 4), std::invalid_argument);
}

TEST_CASE("non-harmonic models and other systems are refused") {
  const Grid1D g(-20, 20, 401);
  Trajectory tr;
  for (int k = 0; k < 3; ++k) {
    tr.times.push_back(0.1 * k);
    tr.states.emplace_back(401);
  }
  CHECK_THROWS_AS(bridge_residual(DiracSystem::spinor(g, builtin("thirring_psi"), 1.0), tr, 1), BridgeError);
  CHECK_THROWS_AS(bridge_residual(DiracSystem::lab(g, builtin("thirring"), 1.0), tr, 1), BridgeError);
}

TEST_CASE("residuals sit at the O(dt_s^2) floor and converge at second order") {
  const Grid1D g(-25, 25, 2001);
  const auto sys = DiracSystem::spinor(g, builtin("quartic_harmonic"), 1.0);
  double u[3], kg[3];
  for (int lev = 0; lev < 3; ++lev) {
    const double dt = 0.01 / (1 << lev);
    const Trajectory tr = run(sys, dt, 1, 1.0);
    const BridgeResidual r = bridge_residual(sys, tr, tr.times.size() / 2);
    u[lev] = std::max(r.u0_max, r.v0_max);
    kg[lev] = std::max(r.nlkg_defect_1, r.nlkg_defect_2);
  }
  CHECK(u[0] < 1e-3);
  CHECK(kg[0] < 1e-2);
  for (int lev = 0; lev < 2; ++lev) {
    CHECK(std::log2(u[lev] / u[lev + 1]) >= 1.8);
    CHECK(std::log2(kg[lev] / kg[lev + 1]) >= 1.8);
  }
}

TEST_CASE("chain rule expansion of d_t W1 matches differencing W1 along the run") {
  const Grid1D g(-25, 25, 1001);
  const auto sys = DiracSystem::spinor(g, builtin("quartic_harmonic"), 1.0);
  double err[2];
  for (int lev = 0; lev < 2; ++lev) {
    const double dt = 0.02 / (1 << lev);
    const Trajectory tr = run(sys, dt, 1, 0.5);
    const size_t k = tr.times.size() / 2;
    const Real4& s = tr.states[k];
    const Real4 ds = rhs(sys, s);
    const ComplexField p1 = complex_component(s, 0), p2 = complex_component(s, 1);
    const ComplexField t1 = complex_component(ds, 0), t2 = complex_component(ds, 1);
    const ComplexField a1 = complex_component(tr.states[k - 1], 0), a2 = complex_component(tr.states[k - 1], 1);
    const ComplexField b1 = complex_component(tr.states[k + 1], 0), b2 = complex_component(tr.states[k + 1], 1);
    double e = 0;
    for (size_t i = 0; i < p1.size(); ++i) {
      const Jacobian J = sys.model.jacobian(quad_of(p1[i], p2[i]));
      const cx chain = J[0][0] * t1[i] + J[0][1] * std::conj(t1[i]) + J[0][2] * t2[i] + J[0][3] * std::conj(t2[i]);
      const cx fd = (sys.model.eval_grad(b1[i], b2[i]).w1 - sys.model.eval_grad(a1[i], a2[i]).w1) / (2 * dt);
      e = std::max(e, std::abs(chain - fd));
    }
    err[lev] = e;
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("Gronwall monitor stays at the floor and detects corruption") {
  const Grid1D g(-30, 30, 1201);
  const auto sys = DiracSystem::spinor(g, builtin("quartic_harmonic"), 1.0);
  Trajectory tr = run(sys, 0.01, 2, 10.0);
  const GronwallSeries gs = gronwall_monitor(sys, tr);
  CHECK(gs.floor > 0.0);
  CHECK(gs.growth <= 10.0);
  const size_t k = tr.states.size() / 2;
  const double clean = gs.M[k - 1];
  tr.states[k].q[1][600] += 1e-3;
  const GronwallSeries bad = gronwall_monitor(sys, tr);
  CHECK(bad.M[k - 1] - clean >= 1e-6);
}
