#include "nld/nlkg_bridge.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nld/nonlinearity.hpp"

namespace nld {

namespace {

const cx I(0.0, 1.0);

double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const cx& z : f) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

void require_bridge_preconditions(const DiracSystem& sys) {
  if (sys.kind != SystemKind::spinor_1d)
    throw BridgeError(fmt::format("bridge: system must be spinor_1d, got {}", to_string(sys.kind)));
  const HarmonicResult h = check_harmonic(sys.model, 64, 7);
  if (!h.ok)
    throw BridgeError(fmt::format("bridge: model '{}' fails the harmonic condition (worst scaled defect {:.3e})",
                                  sys.model.name, h.worst_scaled));
}

BridgeResidual bridge_residual(const DiracSystem& sys, const Trajectory& tr, size_t k) {
  require_bridge_preconditions(sys);
  if (tr.states.size() != tr.times.size()) throw std::invalid_argument("bridge: trajectory has no stored states");
  if (k == 0 || k + 1 >= tr.states.size()) throw std::invalid_argument("bridge: sample index must be interior");
  const Grid1D& g = sys.grid;
  const double m = sys.m;
  const double dts = tr.times[k + 1] - tr.times[k];
  const ComplexField p1 = complex_component(tr.states[k], 0), p2 = complex_component(tr.states[k], 1);
  const ComplexField a1 = complex_component(tr.states[k - 1], 0), a2 = complex_component(tr.states[k - 1], 1);
  const ComplexField b1 = complex_component(tr.states[k + 1], 0), b2 = complex_component(tr.states[k + 1], 1);
  const ComplexField d1 = deriv1(g, p1, Exec::serial), d2 = deriv1(g, p2, Exec::serial);
  const ComplexField dd1 = deriv1(g, d1, Exec::serial), dd2 = deriv1(g, d2, Exec::serial);

  BridgeResidual r;
  r.t = tr.times[k];
  const size_t n = p1.size();
  r.u0.resize(n);
  r.v0.resize(n);
  ComplexField kg1(n), kg2(n);
  for (size_t i = 0; i < n; ++i) {
    const GradPair w = sys.model.eval_grad(p1[i], p2[i]);
    const Jacobian J = sys.model.jacobian(quad_of(p1[i], p2[i]));
    const cx t1 = (b1[i] - a1[i]) / (2.0 * dts), t2 = (b2[i] - a2[i]) / (2.0 * dts);
    const cx tt1 = (b1[i] - 2.0 * p1[i] + a1[i]) / (dts * dts), tt2 = (b2[i] - 2.0 * p2[i] + a2[i]) / (dts * dts);
    r.u0[i] = t1 + I * d2[i] + I * m * p1[i] - I * w.w1;
    r.v0[i] = t2 - I * d1[i] - I * m * p2[i] + I * w.w2;
    const cx S1 = -I * m * p1[i] + I * w.w1, S2 = I * m * p2[i] - I * w.w2;
    const cx s[4] = {S1, std::conj(S1), S2, std::conj(S2)};
    cx c1 = 0.0, c2 = 0.0;
    for (int q = 0; q < 4; ++q) {
      c1 += J[0][q] * s[q];
      c2 += J[1][q] * s[q];
    }
    kg1[i] = tt1 - dd1[i] + m * m * p1[i] - m * w.w1 - I * c1;
    kg2[i] = tt2 - dd2[i] + m * m * p2[i] - m * w.w2 + I * c2;
  }
  r.u0_max = max_abs(r.u0);
  r.v0_max = max_abs(r.v0);
  r.nlkg_defect_1 = max_abs(kg1);
  r.nlkg_defect_2 = max_abs(kg2);
  return r;
}

GronwallSeries gronwall_monitor(const DiracSystem& sys, const Trajectory& tr, double floor_tol) {
  require_bridge_preconditions(sys);
  if (tr.states.size() < 3) throw std::invalid_argument("gronwall_monitor: need at least three samples");
  const size_t n = tr.states.size();
  GronwallSeries out;
  out.times.resize(n - 2);
  out.M.resize(n - 2);
  const long cnt = static_cast<long>(n - 2);
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < cnt; ++j) {
    const auto k = static_cast<size_t>(j) + 1;
    const BridgeResidual r = bridge_residual(sys, tr, k);
    RealField dens(r.u0.size());
    for (size_t i = 0; i < dens.size(); ++i) dens[i] = std::norm(r.u0[i]) + std::norm(r.v0[i]);
    out.times[k - 1] = r.t;
    out.M[k - 1] = quad(sys.grid, dens);
  }
  out.ratio.assign(out.M.size(), 0.0);
  for (size_t j = 1; j + 1 < out.M.size(); ++j) {
    if (out.M[j] <= floor_tol) continue;
    const double dM = (out.M[j + 1] - out.M[j - 1]) / (out.times[j + 1] - out.times[j - 1]);
    out.ratio[j] = std::abs(dM) / out.M[j];
  }
  out.floor = out.M.front();
  if (out.floor > 0.0)
    for (double v : out.M) out.growth = std::max(out.growth, v / out.floor);
  return out;
}

}  // namespace nld
