#include "nld/observables.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "nld/exact.hpp"

namespace nld {

namespace {

RealField density(const Real4& s) {
  RealField d(s.size());
  for (size_t k = 0; k < s.size(); ++k)
    d[k] = s.q[0][k] * s.q[0][k] + s.q[1][k] * s.q[1][k] + s.q[2][k] * s.q[2][k] + s.q[3][k] * s.q[3][k];
  return d;
}

double gauge_potential(const NonlinearityModel& model, cx u, cx v) {
  if (!model.has_potential()) throw std::invalid_argument("model " + model.name + " has no potential W");
  return model.eval_W(u, v).real();
}

}  // namespace

double charge(const SpinorState1D& s) { return quad(s.grid, density(s.real4())); }

double charge(const RadialSpinorState& s, Measure measure) { return quad(s.grid, density(s.phi), measure); }

double charge(const DiracSystem& sys, const Real4& s) {
  if (sys.kind == SystemKind::radial_3d) return quad(sys.rgrid, density(s), Measure::spherical);
  return quad(sys.grid, density(s));
}

double hamiltonian_1d(const Grid1D& g, const ComplexField& u, const ComplexField& v, const NonlinearityModel& model,
                      double m) {
  if (model.arity != Arity::lab_uv) throw std::invalid_argument("hamiltonian_1d: lab model required");
  const ComplexField ux = deriv1(g, u, Exec::serial), vx = deriv1(g, v, Exec::serial);
  RealField dens(u.size());
  for (size_t k = 0; k < u.size(); ++k) {
    const double kin = (ux[k] * std::conj(u[k]) - vx[k] * std::conj(v[k])).imag();
    const double mass = -2.0 * m * (u[k] * std::conj(v[k])).real();
    dens[k] = kin + mass + gauge_potential(model, u[k], v[k]);
  }
  return quad(g, dens);
}

double hamiltonian_1d(const SpinorState1D& s, const NonlinearityModel& model, double m) {
  if (s.repr != Repr::lab_uv) throw std::invalid_argument("hamiltonian_1d: lab_uv state required");
  return hamiltonian_1d(s.grid, s.c1, s.c2, model, m);
}

double momentum_1d(const Grid1D& g, const ComplexField& u, const ComplexField& v) {
  const ComplexField ux = deriv1(g, u, Exec::serial), vx = deriv1(g, v, Exec::serial);
  RealField dens(u.size());
  for (size_t k = 0; k < u.size(); ++k)
    dens[k] = (u[k] * std::conj(ux[k]) + v[k] * std::conj(vx[k])).imag();
  return quad(g, dens);
}

double momentum_1d(const SpinorState1D& s) {
  if (s.repr != Repr::lab_uv) throw std::invalid_argument("momentum_1d: lab_uv state required");
  return momentum_1d(s.grid, s.c1, s.c2);
}

double energy_psi(const SpinorState1D& s, const NonlinearityModel& model, double m) {
  if (!model.is_soler()) throw std::invalid_argument("energy_psi: model " + model.name + " is not of Soler form");
  if (s.repr != Repr::spinor_psi) throw std::invalid_argument("energy_psi: spinor_psi state required");
  const ComplexField x1 = deriv1(s.grid, s.c1, Exec::serial), x2 = deriv1(s.grid, s.c2, Exec::serial);
  RealField dens(s.c1.size());
  for (size_t k = 0; k < dens.size(); ++k) {
    const double sc = std::norm(s.c1[k]) - std::norm(s.c2[k]);
    // conj(psi1) psi2_x - conj(psi2) psi1_x; its integral is real.
    const double kin = (std::conj(s.c1[k]) * x2[k] - std::conj(s.c2[k]) * x1[k]).real();
    dens[k] = kin + m * sc - model.soler_G(sc);
  }
  return quad(s.grid, dens);
}

double energy_radial(const RadialSpinorState& s, const NonlinearityModel& model, double m) {
  if (!model.is_soler()) throw std::invalid_argument("energy_radial: model " + model.name + " is not of Soler form");
  const auto& g = s.grid;
  const auto& p = s.phi.q;
  const RealField d11 = deriv1(g, p[0], Parity::even, Exec::serial), d12 = deriv1(g, p[1], Parity::even, Exec::serial);
  const RealField D21 = radial_div(g, p[2], Exec::serial), D22 = radial_div(g, p[3], Exec::serial);
  RealField dens(p[0].size());
  for (size_t k = 0; k < dens.size(); ++k) {
    const double r = g.r(static_cast<int>(k));
    const double sc = p[0][k] * p[0][k] + p[1][k] * p[1][k] - p[2][k] * p[2][k] - p[3][k] * p[3][k];
    const double kin = (p[0][k] * D21[k] + p[1][k] * D22[k]) - (p[2][k] * d11[k] + p[3][k] * d12[k]);
    dens[k] = r * r * (m * sc + kin - model.soler_G(sc));
  }
  return quad(g, dens, Measure::line);
}

std::optional<double> conserved_energy(const DiracSystem& sys, const Real4& s) {
  switch (sys.kind) {
    case SystemKind::lab_1d:
      if (!sys.model.has_potential()) return std::nullopt;
      return hamiltonian_1d(sys.grid, complex_component(s, 0), complex_component(s, 1), sys.model, sys.m);
    case SystemKind::spinor_1d: {
      const SpinorState1D st = SpinorState1D::from_real4(sys.grid, Repr::spinor_psi, s, 0.0);
      if (sys.model.lab_source && sys.model.lab_source->has_potential())
        return hamiltonian_1d(t_transform_inverse(st), *sys.model.lab_source, sys.m);
      if (sys.model.is_soler()) return energy_psi(st, sys.model, sys.m);
      return std::nullopt;
    }
    case SystemKind::radial_3d:
      if (!sys.model.is_soler()) return std::nullopt;
      return energy_radial(RadialSpinorState{sys.rgrid, s, 0.0}, sys.model, sys.m);
  }
  return std::nullopt;
}

std::string Region::label() const {
  switch (kind) {
    case RegionKind::whole: return "whole";
    case RegionKind::log_window: return "log_window";
    case RegionKind::exterior_box: return fmt::format("exterior_b{:g}", b);
    case RegionKind::ball: return fmt::format("ball_R{:g}", R);
    case RegionKind::fixed_interval: return fmt::format("interval_{:g}_{:g}", lo, hi);
  }
  return "?";
}

double log_window_half_width(double t) {
  const double a = std::abs(t);
  if (a < 10.0) throw std::domain_error(fmt::format("log window undefined for |t| = {} < 10", a));
  const double l = std::log(a);
  return a / (l * l);
}

bool region_contains(const Region& rg, double x, double t) {
  switch (rg.kind) {
    case RegionKind::whole: return true;
    case RegionKind::log_window: return std::abs(x) < log_window_half_width(t);
    case RegionKind::exterior_box:
      if (!(t > 2.0)) throw std::domain_error(fmt::format("exterior box undefined for t = {} <= 2", t));
      return std::abs(x) >= (1.0 + rg.b) * t;
    case RegionKind::ball: return std::abs(x) <= rg.R;
    case RegionKind::fixed_interval: return x >= rg.lo && x <= rg.hi;
  }
  return false;
}

double region_mass(const SpinorState1D& s, const Region& rg, double t) {
  RealField d = density(s.real4());
  for (int i = 0; i < s.grid.n; ++i)
    if (!region_contains(rg, s.grid.x(i), t)) d[static_cast<size_t>(i)] = 0.0;
  return quad(s.grid, d);
}

double region_mass(const RadialSpinorState& s, const Region& rg, double t) {
  RealField d = density(s.phi);
  for (int k = 0; k < s.grid.n; ++k)
    if (!region_contains(rg, s.grid.r(k), t)) d[static_cast<size_t>(k)] = 0.0;
  return quad(s.grid, d, Measure::spherical);
}

double region_mass(const DiracSystem& sys, const Real4& s, const Region& rg, double t) {
  if (sys.kind == SystemKind::radial_3d) return region_mass(RadialSpinorState{sys.rgrid, s, t}, rg, t);
  return region_mass(SpinorState1D::from_real4(sys.grid, Repr::spinor_psi, s, t), rg, t);
}

double parity_defect(const Grid1D& g, const Real4& s, const std::array<Parity, 4>& expected) {
  if (!g.symmetric()) throw std::invalid_argument("parity_defect: grid is not symmetric about 0");
  double worst = 0.0;
  const size_t n = s.size();
  for (size_t c = 0; c < 4; ++c) {
    if (expected[c] == Parity::none) continue;
    const double sign = expected[c] == Parity::odd ? 1.0 : -1.0;
    double mx = 0.0, peak = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mx = std::max(mx, std::abs(s.q[c][i] + sign * s.q[c][n - 1 - i]));
      peak = std::max(peak, std::abs(s.q[c][i]));
    }
    worst = std::max(worst, mx / (1.0 + peak));
  }
  return worst;
}

double parity_defect(const SpinorState1D& s) {
  return parity_defect(s.grid, s.real4(), {Parity::odd, Parity::odd, Parity::odd, Parity::odd});
}

}  // namespace nld
