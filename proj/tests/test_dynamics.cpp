#include "doctest.h"

#include <cmath>
#include <random>

#include "nld/dynamics.hpp"
#include "nld/exact.hpp"
#include "nld/observables.hpp"

using namespace nld;

namespace {

const cx I(0.0, 1.0);

Real4 random_smooth(size_t n, const Grid1D& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  Real4 r(n);
  for (size_t c = 0; c < 4; ++c) {
    const double a = U(rng), x0 = 2 * U(rng), k = 1.5 * U(rng);
    for (size_t i = 0; i < n; ++i) {
      const double x = g.x(static_cast<int>(i));
      r.q[c][i] = a * std::exp(-(x - x0) * (x - x0)) * std::cos(k * x);
    }
  }
  return r;
}

double l2_diff(const Grid1D& g, const Real4& a, const Real4& b) {
  RealField d(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    double s = 0;
    for (size_t c = 0; c < 4; ++c) s += (a.q[c][i] - b.q[c][i]) * (a.q[c][i] - b.q[c][i]);
    d[i] = s;
  }
  return std::sqrt(quad(g, d));
}

}  // namespace

TEST_CASE("zero state gives zero rhs for every system") {
  const Grid1D g(-5, 5, 101);
  const RadialGrid rg(5, 100);
  const Real4 z(101), zr(100);
  for (const auto* n : {"thirring", "gross_neveu", "bec_resonance"})
    CHECK(max_abs(rhs_lab(g, z, builtin(n), 1.0)) == 0.0);
  for (const auto* n : {"quartic_harmonic", "thirring_psi", "soler", "lab:thirring"})
    CHECK(max_abs(rhs_spinor(g, z, builtin(n), 1.0)) == 0.0);
  CHECK(max_abs(rhs_radial(rg, zr, builtin("soler_radial"), 1.0)) == 0.0);
  CHECK_THROWS(rhs_lab(g, z, models::quartic_harmonic(), 1.0));
  CHECK_THROWS(rhs_radial(rg, zr, models::thirring(1), 1.0));
}

TEST_CASE("lab rhs reduces to transport") {
  const Grid1D g(-10, 10, 401);
  ComplexField u(401), v(401, 0.0);
  for (int i = 0; i < 401; ++i) u[static_cast<size_t>(i)] = std::exp(-g.x(i) * g.x(i));
  const SpinorState1D s(g, Repr::lab_uv, u, v);
  const auto d = rhs_lab(s, models::zero(), 0.0);
  const auto ux = deriv1(g, u);
  for (size_t k = 0; k < u.size(); ++k) CHECK(d.c1[k] == -ux[k]);
}

TEST_CASE("real and complex spinor right-hand sides agree") {
  const Grid1D g(-8, 8, 321);
  for (const auto* n : {"quartic_harmonic", "thirring_psi", "soler:1,0.5", "lab:gross_neveu"}) {
    const auto model = builtin(n);
    const Real4 r = random_smooth(321, g, 17);
    const Real4 real = rhs_spinor(g, r, model, 0.8);
    ComplexField d1, d2;
    rhs_spinor_complex(g, complex_component(r, 0), complex_component(r, 1), model, 0.8, d1, d2);
    const Real4 cplx = to_real4(d1, d2);
    double e = 0;
    for (size_t c = 0; c < 4; ++c)
      for (size_t i = 0; i < r.size(); ++i) e = std::max(e, std::abs(real.q[c][i] - cplx.q[c][i]));
    CHECK_MESSAGE(e <= 1e-13, n);
  }
}

TEST_CASE("mass rotation term") {
  const Grid1D g(-8, 8, 161);
  Real4 r(161);
  for (int i = 0; i < 161; ++i) r.q[0][static_cast<size_t>(i)] = std::exp(-g.x(i) * g.x(i));
  const Real4 d = rhs_spinor(g, r, models::zero(Arity::spinor_psi), 1.0);
  for (size_t i = 0; i < 161; ++i) CHECK(d.q[1][i] == -r.q[0][i]);
}

TEST_CASE("generic linear Dirac rhs reproduces both frames") {
  const Grid1D g(-8, 8, 161);
  const Real4 r = random_smooth(161, g, 3);
  const auto z1 = complex_component(r, 0), z2 = complex_component(r, 1);
  ComplexField d1, d2;
  const auto ab = alpha_beta(1);
  rhs_linear_dirac(g, z1, z2, ab.alpha[0], ab.beta, 0.7, d1, d2);
  ComplexField e1, e2;
  rhs_spinor_complex(g, z1, z2, models::zero(Arity::spinor_psi), 0.7, e1, e2);
  for (size_t k = 0; k < 161; ++k) {
    CHECK(std::abs(d1[k] - e1[k]) < 1e-14);
    CHECK(std::abs(d2[k] - e2[k]) < 1e-14);
  }
  // Lab frame: alpha = sigma^3, beta = -sigma^1.
  rhs_linear_dirac(g, z1, z2, pauli(3), -1.0 * pauli(1), 0.7, d1, d2);
  const Real4 lab = rhs_lab(g, r, models::zero(), 0.7);
  for (size_t k = 0; k < 161; ++k) {
    CHECK(std::abs(d1[k] - cx(lab.q[0][k], lab.q[1][k])) < 1e-14);
    CHECK(std::abs(d2[k] - cx(lab.q[2][k], lab.q[3][k])) < 1e-14);
  }
}

TEST_CASE("radial divergence operator") {
  SUBCASE("(d/dr + 2/r)(r e^{-r^2}): second order at the first node, fourth order at r = 1") {
    double e0[2], e1[2];
    for (int lev = 0; lev < 2; ++lev) {
      const double h = 0.02 / (1 << lev);
      const int n = static_cast<int>(std::lround(6.0 / h));
      const RadialGrid g(6.0, n);
      Real4 s(static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) s.q[3][static_cast<size_t>(k)] = g.r(k) * std::exp(-g.r(k) * g.r(k));
      const Real4 d = rhs_radial(g, s, models::zero(Arity::radial_phi), 0.0);
      // Exact: (3 - 2 r^2) e^{-r^2}.
      auto exact = [](double r) { return (3.0 - 2.0 * r * r) * std::exp(-r * r); };
      e0[lev] = std::abs(d.q[0][0] - exact(g.r(0)));
      const int k1 = static_cast<int>(std::lround(1.0 / h - 0.5));
      e1[lev] = std::abs(d.q[0][static_cast<size_t>(k1)] - exact(g.r(k1)));
    }
    CHECK(e0[0] < 20 * 0.02 * 0.02);
    CHECK(std::log2(e0[0] / e0[1]) > 1.8);
    CHECK(std::log2(e1[0] / e1[1]) > 3.5);
  }
  SUBCASE("linear radial flow conserves the r^2-weighted charge exactly") {
    const RadialGrid g(10.0, 400);
    Real4 s(400);
    for (int k = 0; k < 400; ++k) {
      const double r = g.r(k);
      const auto i = static_cast<size_t>(k);
      s.q[0][i] = std::exp(-r * r) * (1 + r);
      s.q[1][i] = std::cos(r) * std::exp(-r * r / 2);
      s.q[2][i] = r * std::exp(-r * r);
      s.q[3][i] = std::sin(2 * r) * std::exp(-r * r);
    }
    const Real4 d = rhs_radial(g, s, models::zero(Arity::radial_phi), 0.8);
    double dq = 0, scale = 0;
    for (size_t i = 0; i < 400; ++i) {
      const double r = g.r(static_cast<int>(i));
      for (int q = 0; q < 4; ++q) {
        dq += r * r * s.q[q][i] * d.q[q][i];
        scale += r * r * std::abs(s.q[q][i] * d.q[q][i]);
      }
    }
    CHECK(std::abs(dq) < 1e-14 * scale);
  }
  SUBCASE("d phi22 / dt = d phi11 / dr at fourth order") {
    auto err = [](int n) {
      const RadialGrid g(8.0, n);
      Real4 s(static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) s.q[0][static_cast<size_t>(k)] = std::exp(-g.r(k) * g.r(k));
      const Real4 d = rhs_radial(g, s, models::zero(Arity::radial_phi), 0.0);
      double e = 0;
      for (int k = 0; k < n; ++k) {
        const double r = g.r(k);
        e = std::max(e, std::abs(d.q[3][static_cast<size_t>(k)] + 2 * r * std::exp(-r * r)));
      }
      return e;
    };
    CHECK(std::log2(err(200) / err(400)) > 3.7);
  }
}

TEST_CASE("integrator: massless free data") {
  const Grid1D g(-60, 60, 2401);  // h = 0.05
  auto u0 = [](double x) { return cx(std::exp(-x * x / 8), 0.0); };
  auto v0 = [](double x) { return cx(0.0, 0.5 * std::exp(-x * x / 10)); };
  const auto s0 = massless_free(u0, v0, 0.0, g);
  const auto sys = DiracSystem::lab(g, models::zero(), 0.0);
  IntegrateOptions opt;
  opt.dt = 0.02;
  opt.t_end = 5.0;
  opt.sample_stride = 50;
  const auto tr = integrate(sys, s0.real4(), 0.0, opt);
  REQUIRE(tr.times.size() == 6);
  CHECK(tr.times.back() == doctest::Approx(5.0));
  CHECK(l2_diff(g, tr.states.back(), massless_free(u0, v0, 5.0, g).real4()) <= 1e-6);
}

TEST_CASE("integrator: soliton period") {
  const Grid1D g(-40, 40, 1601);
  const double w = 0.5, T = 2 * M_PI / w;
  const int steps = 630;
  const auto s0 = thirring_soliton({w, 0, 0, 0}, g);
  const auto sys = DiracSystem::lab(g, builtin("thirring"), 1.0);
  IntegrateOptions opt;
  opt.dt = T / steps;
  opt.t_end = T;
  opt.sample_stride = steps;
  const auto tr = integrate(sys, s0.real4(), 0.0, opt);
  CHECK(l2_diff(g, tr.states.back(), s0.real4()) <= 1e-4);
}

TEST_CASE("integrator: fourth order in time") {
  const Grid1D g(-30, 30, 601);
  const auto s0 = thirring_soliton({0.3, 0, 0, 0}, g);
  const auto sys = DiracSystem::lab(g, builtin("thirring"), 1.0);
  auto run = [&](double dt) {
    IntegrateOptions opt;
    opt.dt = dt;
    opt.t_end = 2.0;
    opt.sample_stride = static_cast<int>(std::lround(2.0 / dt));
    return integrate(sys, s0.real4(), 0.0, opt).states.back();
  };
  const Real4 a = run(0.05), b = run(0.025), c = run(0.0125);
  const double ratio = l2_diff(g, a, b) / l2_diff(g, b, c);
  CHECK(ratio > 13.0);
  CHECK(ratio < 19.0);
}

TEST_CASE("integrator errors") {
  const Grid1D g(-20, 20, 401);
  const auto sys = DiracSystem::lab(g, models::zero(), 0.0);
  Real4 s(401);
  IntegrateOptions opt;
  opt.dt = 0.06;  // > h / 2
  opt.t_end = 1.0;
  CHECK_THROWS_AS(integrate(sys, s, 0.0, opt), std::invalid_argument);
  opt.dt = 0.05;
  opt.t_end = 1.01;
  CHECK_THROWS_AS(integrate(sys, s, 0.0, opt), std::invalid_argument);
  opt.t_end = 1.0;
  s.q[0][5] = std::nan("");
  CHECK_THROWS_AS(integrate(sys, s, 0.0, opt), IntegrationError);

  // A bump started next to the right end enters the monitored strip.
  Real4 b(401);
  for (int i = 0; i < 401; ++i) b.q[0][static_cast<size_t>(i)] = std::exp(-(g.x(i) - 5) * (g.x(i) - 5));
  opt.t_end = 10.0;
  opt.boundary_width = 5.0;
  try {
    integrate(sys, b, 0.0, opt);
    CHECK(false);
  } catch (const IntegrationError& e) {
    CHECK(e.kind == IntegrationError::Kind::boundary);
  }
}

TEST_CASE("serial and parallel trajectories are bitwise identical") {
  const Grid1D g(-30, 30, 1201);
  const auto s0 = thirring_soliton({0.2, 0, 0, 0}, g);
  IntegrateOptions opt;
  opt.dt = 0.02;
  opt.t_end = 1.0;
  opt.sample_stride = 10;
  const auto a = integrate(DiracSystem::lab(g, builtin("thirring"), 1.0, Exec::serial), s0.real4(), 0.0, opt);
  const auto b = integrate(DiracSystem::lab(g, builtin("thirring"), 1.0, Exec::parallel), s0.real4(), 0.0, opt);
  REQUIRE(a.states.size() == b.states.size());
  for (size_t k = 0; k < a.states.size(); ++k)
    for (size_t c = 0; c < 4; ++c) CHECK(a.states[k].q[c] == b.states[k].q[c]);
}

TEST_CASE("lab and spinor evolutions commute with the T transform") {
  const Grid1D g(-40, 40, 1601);
  ComplexField u(1601), v(1601);
  for (int i = 0; i < 1601; ++i) {
    const double x = g.x(i);
    u[static_cast<size_t>(i)] = 0.6 * std::exp(-x * x) * cx(1.0, 0.3 * x);
    v[static_cast<size_t>(i)] = 0.4 * std::exp(-(x - 0.5) * (x - 0.5));
  }
  const SpinorState1D lab(g, Repr::lab_uv, u, v);
  IntegrateOptions opt;
  opt.dt = 0.02;
  opt.t_end = 3.0;
  opt.sample_stride = 150;
  const auto tl = integrate(DiracSystem::lab(g, builtin("thirring"), 1.0), lab.real4(), 0.0, opt);
  const auto ts = integrate(DiracSystem::spinor(g, builtin("lab:thirring"), 1.0), t_transform(lab).real4(), 0.0, opt);
  const auto mapped = t_transform(SpinorState1D::from_real4(g, Repr::lab_uv, tl.states.back(), 3.0));
  CHECK(l2_diff(g, mapped.real4(), ts.states.back()) < 1e-11);
}

TEST_CASE("mixed parity is preserved by the spinor flow") {
  // psi1 odd, psi2 even is invariant for nonlinearities with W1 odd / W2 even.
  const Grid1D g(-40, 40, 1601);
  Real4 s(1601);
  for (int i = 0; i < 1601; ++i) {
    const double x = g.x(i), e = std::exp(-x * x / 2);
    s.q[0][static_cast<size_t>(i)] = 0.3 * x * e;
    s.q[1][static_cast<size_t>(i)] = 0.1 * std::sin(x) * e;
    s.q[2][static_cast<size_t>(i)] = 0.2 * e;
    s.q[3][static_cast<size_t>(i)] = 0.1 * x * x * e;
  }
  const std::array<Parity, 4> mixed{Parity::odd, Parity::odd, Parity::even, Parity::even};
  for (const auto* n : {"quartic_harmonic", "thirring_psi"}) {
    IntegrateOptions opt;
    opt.dt = 0.02;
    opt.t_end = 5.0;
    opt.sample_stride = 250;
    const auto tr = integrate(DiracSystem::spinor(g, builtin(n), 1.0), s, 0.0, opt);
    CHECK_MESSAGE(parity_defect(g, tr.states.back(), mixed) < 1e-13, n);
  }
}

TEST_CASE("all-odd data does not stay odd: the derivative term maps odd to even") {
  const Grid1D g(-40, 40, 1601);
  Real4 s(1601);
  for (int i = 0; i < 1601; ++i) {
    const double x = g.x(i), e = std::exp(-x * x / 2);
    for (size_t c = 0; c < 4; ++c) s.q[c][static_cast<size_t>(i)] = 0.05 * (1.0 + 0.2 * c) * x * e;
  }
  const Real4 d = rhs_spinor(g, s, models::zero(Arity::spinor_psi), 0.0);
  const std::array<Parity, 4> odd{Parity::odd, Parity::odd, Parity::odd, Parity::odd};
  CHECK(parity_defect(g, s, odd) < 1e-15);
  CHECK(parity_defect(g, d, odd) > 1e-2);
}
