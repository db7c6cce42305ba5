#include "nld/dynamics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace nld {

namespace {

const cx I(0.0, 1.0);

void require_arity(const NonlinearityModel& model, Arity want, const char* who) {
  if (model.arity != want)
    throw std::invalid_argument(fmt::format("{}: model '{}' has arity {}, expected {}", who, model.name,
                                            to_string(model.arity), to_string(want)));
}

void gradients(const NonlinearityModel& model, const ComplexField& z1, const ComplexField& z2, ComplexField& w1,
               ComplexField& w2, Exec exec) {
  const long n = static_cast<long>(z1.size());
  w1.resize(z1.size());
  w2.resize(z1.size());
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    const GradPair g = model.eval_grad(z1[k], z2[k]);
    w1[k] = g.w1;
    w2[k] = g.w2;
  }
}

}  // namespace

std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::lab_1d: return "lab";
    case SystemKind::spinor_1d: return "spinor";
    case SystemKind::radial_3d: return "radial";
  }
  return "?";
}

SystemKind system_from_string(const std::string& s) {
  if (s == "lab" || s == "lab_1d") return SystemKind::lab_1d;
  if (s == "spinor" || s == "spinor_1d") return SystemKind::spinor_1d;
  if (s == "radial" || s == "radial_3d") return SystemKind::radial_3d;
  throw std::invalid_argument("unknown system: " + s);
}

Arity arity_for(SystemKind k) {
  switch (k) {
    case SystemKind::lab_1d: return Arity::lab_uv;
    case SystemKind::spinor_1d: return Arity::spinor_psi;
    case SystemKind::radial_3d: return Arity::radial_phi;
  }
  return Arity::lab_uv;
}

DiracSystem DiracSystem::lab(Grid1D g, NonlinearityModel model, double m, Exec exec) {
  require_arity(model, Arity::lab_uv, "DiracSystem::lab");
  DiracSystem s;
  s.kind = SystemKind::lab_1d;
  s.model = std::move(model);
  s.m = m;
  s.grid = g;
  s.exec = exec;
  return s;
}

DiracSystem DiracSystem::spinor(Grid1D g, NonlinearityModel model, double m, Exec exec) {
  require_arity(model, Arity::spinor_psi, "DiracSystem::spinor");
  DiracSystem s;
  s.kind = SystemKind::spinor_1d;
  s.model = std::move(model);
  s.m = m;
  s.grid = g;
  s.exec = exec;
  return s;
}

DiracSystem DiracSystem::radial(RadialGrid g, NonlinearityModel model, double m, Exec exec) {
  require_arity(model, Arity::radial_phi, "DiracSystem::radial");
  DiracSystem s;
  s.kind = SystemKind::radial_3d;
  s.model = std::move(model);
  s.m = m;
  s.rgrid = g;
  s.exec = exec;
  return s;
}

size_t DiracSystem::nodes() const {
  return static_cast<size_t>(kind == SystemKind::radial_3d ? rgrid.n : grid.n);
}

Real4 rhs_lab(const Grid1D& g, const Real4& s, const NonlinearityModel& model, double m, Exec exec) {
  require_arity(model, Arity::lab_uv, "rhs_lab");
  const ComplexField u = complex_component(s, 0);
  const ComplexField v = complex_component(s, 1);
  const ComplexField ux = deriv1(g, u, exec);
  const ComplexField vx = deriv1(g, v, exec);
  ComplexField w1, w2;
  gradients(model, u, v, w1, w2, exec);
  const long n = static_cast<long>(u.size());
  Real4 out(u.size());
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    const cx du = -ux[k] + I * (m * v[k] - w1[k]);
    const cx dv = vx[k] + I * (m * u[k] - w2[k]);
    out.q[0][k] = du.real();
    out.q[1][k] = du.imag();
    out.q[2][k] = dv.real();
    out.q[3][k] = dv.imag();
  }
  return out;
}

SpinorState1D rhs_lab(const SpinorState1D& s, const NonlinearityModel& model, double m) {
  if (s.repr != Repr::lab_uv) throw std::invalid_argument("rhs_lab: state must be lab_uv");
  return SpinorState1D::from_real4(s.grid, Repr::lab_uv, rhs_lab(s.grid, s.real4(), model, m), s.t);
}

Real4 rhs_spinor(const Grid1D& g, const Real4& s, const NonlinearityModel& model, double m, Exec exec) {
  require_arity(model, Arity::spinor_psi, "rhs_spinor");
  const RealField& p11 = s.q[0];
  const RealField& p12 = s.q[1];
  const RealField& p21 = s.q[2];
  const RealField& p22 = s.q[3];
  const RealField d11 = deriv1(g, p11, exec);
  const RealField d12 = deriv1(g, p12, exec);
  const RealField d21 = deriv1(g, p21, exec);
  const RealField d22 = deriv1(g, p22, exec);
  ComplexField w1, w2;
  gradients(model, complex_component(s, 0), complex_component(s, 1), w1, w2, exec);
  const long n = static_cast<long>(p11.size());
  Real4 out(p11.size());
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    const double W11 = w1[k].real(), W12 = w1[k].imag(), W21 = w2[k].real(), W22 = w2[k].imag();
    out.q[0][k] = d22[k] + m * p12[k] - W12;
    out.q[3][k] = d11[k] + m * p21[k] - W21;
    out.q[1][k] = -d21[k] - m * p11[k] + W11;
    out.q[2][k] = -d12[k] - m * p22[k] + W22;
  }
  return out;
}

SpinorState1D rhs_spinor(const SpinorState1D& s, const NonlinearityModel& model, double m) {
  if (s.repr != Repr::spinor_psi) throw std::invalid_argument("rhs_spinor: state must be spinor_psi");
  return SpinorState1D::from_real4(s.grid, Repr::spinor_psi, rhs_spinor(s.grid, s.real4(), model, m), s.t);
}

void rhs_spinor_complex(const Grid1D& g, const ComplexField& psi1, const ComplexField& psi2,
                        const NonlinearityModel& model, double m, ComplexField& d1, ComplexField& d2) {
  require_arity(model, Arity::spinor_psi, "rhs_spinor_complex");
  const ComplexField x1 = deriv1(g, psi1, Exec::serial);
  const ComplexField x2 = deriv1(g, psi2, Exec::serial);
  d1.resize(psi1.size());
  d2.resize(psi1.size());
  for (size_t k = 0; k < psi1.size(); ++k) {
    const GradPair w = model.eval_grad(psi1[k], psi2[k]);
    d1[k] = -I * x2[k] - I * m * psi1[k] + I * w.w1;
    d2[k] = I * x1[k] + I * m * psi2[k] - I * w.w2;
  }
}

Real4 rhs_radial(const RadialGrid& g, const Real4& s, const NonlinearityModel& model, double m, Exec exec) {
  require_arity(model, Arity::radial_phi, "rhs_radial");
  const RealField& p11 = s.q[0];
  const RealField& p12 = s.q[1];
  const RealField& p21 = s.q[2];
  const RealField& p22 = s.q[3];
  const RealField d11 = deriv1(g, p11, Parity::even, exec);
  const RealField d12 = deriv1(g, p12, Parity::even, exec);
  const RealField D21 = radial_div(g, p21, exec);
  const RealField D22 = radial_div(g, p22, exec);
  ComplexField w1, w2;
  gradients(model, complex_component(s, 0), complex_component(s, 1), w1, w2, exec);
  const long n = static_cast<long>(p11.size());
  Real4 out(p11.size());
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    const double W11 = w1[k].real(), W12 = w1[k].imag(), W21 = w2[k].real(), W22 = w2[k].imag();
    out.q[0][k] = D22[k] + m * p12[k] - W12;
    out.q[3][k] = d11[k] + m * p21[k] - W21;
    out.q[1][k] = -D21[k] - m * p11[k] + W11;
    out.q[2][k] = -d12[k] - m * p22[k] + W22;
  }
  return out;
}

void rhs_linear_dirac(const Grid1D& g, const ComplexField& psi1, const ComplexField& psi2, const MatrixC& alpha,
                      const MatrixC& beta, double m, ComplexField& d1, ComplexField& d2) {
  if (alpha.rows != 2 || beta.rows != 2) throw std::invalid_argument("rhs_linear_dirac: 2x2 matrices required");
  const ComplexField x1 = deriv1(g, psi1, Exec::serial);
  const ComplexField x2 = deriv1(g, psi2, Exec::serial);
  d1.resize(psi1.size());
  d2.resize(psi1.size());
  for (size_t k = 0; k < psi1.size(); ++k) {
    d1[k] = -(alpha(0, 0) * x1[k] + alpha(0, 1) * x2[k]) - I * m * (beta(0, 0) * psi1[k] + beta(0, 1) * psi2[k]);
    d2[k] = -(alpha(1, 0) * x1[k] + alpha(1, 1) * x2[k]) - I * m * (beta(1, 0) * psi1[k] + beta(1, 1) * psi2[k]);
  }
}

Real4 rhs(const DiracSystem& sys, const Real4& s) {
  switch (sys.kind) {
    case SystemKind::lab_1d: return rhs_lab(sys.grid, s, sys.model, sys.m, sys.exec);
    case SystemKind::spinor_1d: return rhs_spinor(sys.grid, s, sys.model, sys.m, sys.exec);
    case SystemKind::radial_3d: return rhs_radial(sys.rgrid, s, sys.model, sys.m, sys.exec);
  }
  throw std::logic_error("rhs: bad system kind");
}

void gradient_fields(const NonlinearityModel& model, const ComplexField& z1, const ComplexField& z2, ComplexField& w1,
                     ComplexField& w2, Exec exec) {
  gradients(model, z1, z2, w1, w2, exec);
}

void nonlinear_source(const DiracSystem& sys, const ComplexField& z1, const ComplexField& z2, ComplexField& n1,
                      ComplexField& n2) {
  n1.resize(z1.size());
  n2.resize(z1.size());
  const bool lab = sys.kind == SystemKind::lab_1d;
  for (size_t k = 0; k < z1.size(); ++k) {
    const GradPair w = sys.model.eval_grad(z1[k], z2[k]);
    n1[k] = lab ? -I * w.w1 : I * w.w1;
    n2[k] = -I * w.w2;
  }
}

double radial_origin_parity_defect(const RadialSpinorState& s) {
  double worst = 0.0;
  for (size_t c = 2; c < 4; ++c) {
    double peak = 0.0;
    for (double v : s.phi.q[c]) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) worst = std::max(worst, std::abs(s.phi.q[c][0]) / peak);
  }
  return worst;
}

double monitor_charge(const DiracSystem& sys, const Real4& s) {
  RealField dens(s.size());
  for (size_t k = 0; k < s.size(); ++k)
    dens[k] = s.q[0][k] * s.q[0][k] + s.q[1][k] * s.q[1][k] + s.q[2][k] * s.q[2][k] + s.q[3][k] * s.q[3][k];
  if (sys.kind == SystemKind::radial_3d) return quad(sys.rgrid, dens, Measure::spherical);
  return quad(sys.grid, dens);
}

double boundary_mass(const DiracSystem& sys, const Real4& s, double width) {
  auto dens = [&](size_t k) {
    return s.q[0][k] * s.q[0][k] + s.q[1][k] * s.q[1][k] + s.q[2][k] * s.q[2][k] + s.q[3][k] * s.q[3][k];
  };
  double acc = 0.0;
  if (sys.kind == SystemKind::radial_3d) {
    const auto& g = sys.rgrid;
    for (int k = 0; k < g.n; ++k) {
      const double r = g.r(k);
      if (r >= g.r_max - width) acc += 4.0 * M_PI * r * r * dens(static_cast<size_t>(k)) * g.h;
    }
    return acc;
  }
  const auto& g = sys.grid;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (x <= g.x_min + width || x >= g.x_max - width) acc += dens(static_cast<size_t>(i)) * g.h;
  }
  return acc;
}

Trajectory integrate(const DiracSystem& sys, const Real4& initial, double t0, const IntegrateOptions& opt,
                     const SampleObserver& observer) {
  const double h = sys.kind == SystemKind::radial_3d ? sys.rgrid.h : sys.grid.h;
  if (!(opt.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (opt.dt > opt.cfl_fraction * h * (1.0 + 1e-12))
    throw std::invalid_argument(
        fmt::format("integrate: dt = {} violates CFL bound {} x h = {}", opt.dt, opt.cfl_fraction, opt.cfl_fraction * h));
  if (opt.sample_stride < 1) throw std::invalid_argument("integrate: sample_stride must be >= 1");
  if (!(opt.t_end >= t0)) throw std::invalid_argument("integrate: t_end must not precede t0");
  if (initial.size() != sys.nodes()) throw std::invalid_argument("integrate: state size does not match the grid");
  if (!all_finite(initial)) throw IntegrationError(IntegrationError::Kind::non_finite, "integrate: non-finite initial data");

  const long n_steps = std::lround((opt.t_end - t0) / opt.dt);
  if (std::abs(t0 + n_steps * opt.dt - opt.t_end) > 1e-9 * std::max(1.0, std::abs(opt.t_end)))
    throw std::invalid_argument("integrate: (t_end - t0) must be a multiple of dt");

  Trajectory tr;
  tr.kind = sys.kind;
  tr.grid = sys.grid;
  tr.rgrid = sys.rgrid;
  tr.dt = opt.dt;
  tr.dt_sample = opt.dt * opt.sample_stride;

  const double q0 = monitor_charge(sys, initial);
  const size_t n = initial.size();
  const bool par = sys.exec == Exec::parallel;

  auto record = [&](double t, const Real4& y) {
    SampleDiagnostics d;
    d.t = t;
    d.max_abs = max_abs(y);
    d.boundary_mass = boundary_mass(sys, y, opt.boundary_width);
    if (!all_finite(y))
      throw IntegrationError(IntegrationError::Kind::non_finite, fmt::format("integrate: non-finite state at t = {}", t));
    if (opt.check_boundary && d.boundary_mass > opt.boundary_tol * q0)
      throw IntegrationError(IntegrationError::Kind::boundary,
                             fmt::format("integrate: boundary mass {:.3e} exceeds {:.1e} x Q0 at t = {}",
                                         d.boundary_mass, opt.boundary_tol, t));
    tr.times.push_back(t);
    tr.diagnostics.push_back(d);
    if (opt.keep_states) tr.states.push_back(y);
    if (observer) observer(t, y);
  };

  Real4 y = initial;
  Real4 tmp(n);
  record(t0, y);
  const double dt = opt.dt;
  for (long step = 1; step <= n_steps; ++step) {
    const Real4 k1 = rhs(sys, y);
    for (size_t c = 0; c < 4; ++c) {
#pragma omp parallel for if (par) schedule(static)
      for (long i = 0; i < static_cast<long>(n); ++i)
        tmp.q[c][static_cast<size_t>(i)] = y.q[c][static_cast<size_t>(i)] + 0.5 * dt * k1.q[c][static_cast<size_t>(i)];
    }
    const Real4 k2 = rhs(sys, tmp);
    for (size_t c = 0; c < 4; ++c) {
#pragma omp parallel for if (par) schedule(static)
      for (long i = 0; i < static_cast<long>(n); ++i)
        tmp.q[c][static_cast<size_t>(i)] = y.q[c][static_cast<size_t>(i)] + 0.5 * dt * k2.q[c][static_cast<size_t>(i)];
    }
    const Real4 k3 = rhs(sys, tmp);
    for (size_t c = 0; c < 4; ++c) {
#pragma omp parallel for if (par) schedule(static)
      for (long i = 0; i < static_cast<long>(n); ++i)
        tmp.q[c][static_cast<size_t>(i)] = y.q[c][static_cast<size_t>(i)] + dt * k3.q[c][static_cast<size_t>(i)];
    }
    const Real4 k4 = rhs(sys, tmp);
    for (size_t c = 0; c < 4; ++c) {
#pragma omp parallel for if (par) schedule(static)
      for (long i = 0; i < static_cast<long>(n); ++i) {
        const auto k = static_cast<size_t>(i);
        y.q[c][k] += dt / 6.0 * (k1.q[c][k] + 2.0 * k2.q[c][k] + 2.0 * k3.q[c][k] + k4.q[c][k]);
      }
    }
    if (step % opt.sample_stride == 0) record(t0 + step * dt, y);
  }
  return tr;
}

}  // namespace nld
