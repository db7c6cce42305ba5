#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "nld/dynamics.hpp"
#include "nld/exact.hpp"
#include "nld/observables.hpp"
#include "nld/virials.hpp"

using namespace nld;

namespace {

Real4 smooth_1d(const Grid1D& g, std::uint64_t seed, double amp = 1.0) {
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

/// Bump supported away from r = 0.
Real4 smooth_radial(const RadialGrid& g, std::uint64_t seed, double amp = 1.0, double rc = 15.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  Real4 r(static_cast<size_t>(g.n));
  for (size_t c = 0; c < 4; ++c) {
    const double a = amp * (0.5 + 0.5 * std::abs(U(rng))), r0 = rc + U(rng), k = 1.5 * U(rng), ph = 3 * U(rng);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.r(i);
      r.q[c][static_cast<size_t>(i)] = a * std::exp(-(x - r0) * (x - r0)) * std::cos(k * x + ph);
    }
  }
  return r;
}

Real4 axpy(const Real4& s, double d, const Real4& r) {
  Real4 o = s;
  for (size_t c = 0; c < 4; ++c)
    for (size_t i = 0; i < s.size(); ++i) o.q[c][i] += d * r.q[c][i];
  return o;
}

struct DirCheck {
  double fd, rhs;
  double rel() const { return std::abs(fd - rhs) / std::max(std::abs(rhs), 1e-300); }
};

/// Directional-derivative oracle: d/dt of the discrete functional along the
/// semi-discrete flow, by a centered difference in the flow direction.
DirCheck directional(const DiracSystem& sys, VirialId id, const VirialParams& p, const Real4& s, double t) {
  const double d = 1e-4;
  const Real4 r = rhs(sys, s);
  const double Fp = evaluate_virial(sys, id, p, axpy(s, d, r), t + d).F;
  const double Fm = evaluate_virial(sys, id, p, axpy(s, -d, r), t - d).F;
  return {(Fp - Fm) / (2 * d), evaluate_virial(sys, id, p, s, t).rhs};
}

const Grid1D G1(-30, 30, 1201);
const RadialGrid GR(30, 600);

}  // namespace

TEST_CASE("zero state gives zero functionals and derivatives") {
  const Real4 z1(static_cast<size_t>(G1.n)), zr(static_cast<size_t>(GR.n));
  const auto lab = DiracSystem::lab(G1, builtin("thirring"), 1.0);
  const auto sp = DiracSystem::spinor(G1, builtin("quartic_harmonic"), 1.0);
  const auto rad = DiracSystem::radial(GR, builtin("soler_radial"), 1.0);
  for (int k = 0; k <= static_cast<int>(VirialId::H_r2); ++k) {
    const auto id = static_cast<VirialId>(k);
    for (const DiracSystem* sys : {&lab, &sp, &rad}) {
      if (!virial_supports(id, sys->kind)) continue;
      const VirialValue v = evaluate_virial(*sys, id, {}, sys->kind == SystemKind::radial_3d ? zr : z1, 1.0);
      CHECK(v.F == 0.0);
      CHECK(v.rhs == 0.0);
    }
  }
}

TEST_CASE("identity names round-trip and systems are checked") {
  for (int k = 0; k <= static_cast<int>(VirialId::H_r2); ++k) {
    const auto id = static_cast<VirialId>(k);
    CHECK(virial_from_string(to_string(id)) == id);
  }
  CHECK_THROWS(virial_from_string("nope"));
  const auto lab = DiracSystem::lab(G1, builtin("thirring"), 1.0);
  CHECK_THROWS(evaluate_virial(lab, VirialId::J1, {}, Real4(static_cast<size_t>(G1.n)), 0.0));
  const auto rad = DiracSystem::radial(GR, builtin("zero_radial"), 0.0);
  VirialParams p;
  p.weight = weights::tanh_w();
  CHECK_THROWS(evaluate_virial(rad, VirialId::K1, p, Real4(static_cast<size_t>(GR.n)), 0.0));
}

/// The oracle differentiates the discrete functional exactly; the analytic
/// right-hand side uses continuum integration by parts, so the two agree to
/// O(h^4). Checked as a refinement ratio; identities free of integration by
/// parts agree to round-off.
void check_converges(const std::function<double(int)>& rel_at_level) {
  const double coarse = rel_at_level(0), fine = rel_at_level(1);
  CAPTURE(coarse);
  CAPTURE(fine);
  if (coarse < 1e-7) {
    CHECK(fine < 1e-7);
    return;
  }
  CHECK(coarse / fine > 12.0);
  CHECK(fine < 1e-4);
}

TEST_CASE("1D identities agree with the directional-derivative oracle") {
  struct Case {
    const char* model;
    double m;
  };
  VirialParams pc;
  pc.scaling = ScalingTriple::constant(2.0, 0.3);
  VirialParams pl;
  pl.scaling = ScalingTriple::log_window();
  VirialParams pj;
  pj.weight = weights::scaled(weights::tanh_w(), 3.0, 3.0);
  auto grid = [](int lev) { return Grid1D(-30, 30, 600 * (1 << lev) + 1); };
  std::uint64_t seed = 1;
  for (const Case c : {Case{"zero", 0.0}, Case{"zero", 1.0}, Case{"gross_neveu", 1.0}, Case{"thirring", 0.7}}) {
    ++seed;
    for (auto id : {VirialId::I, VirialId::K_1d, VirialId::J_1d})
      for (const VirialParams* p : {&pc, &pl}) {
        CAPTURE(c.model);
        CAPTURE(to_string(id));
        check_converges([&](int lev) {
          const Grid1D g = grid(lev);
          return directional(DiracSystem::lab(g, builtin(c.model), c.m), id, *p, smooth_1d(g, seed), 20.0).rel();
        });
      }
  }
  for (const Case c : {Case{"zero_spinor", 0.0}, Case{"zero_spinor", 1.0}, Case{"quartic_harmonic", 1.0},
                       Case{"thirring_psi", 1.0}, Case{"lab:gross_neveu", 0.5}}) {
    ++seed;
    for (auto id : {VirialId::I, VirialId::J1, VirialId::J2, VirialId::J3, VirialId::J4, VirialId::J_combined,
                    VirialId::H_sech}) {
      CAPTURE(c.model);
      CAPTURE(to_string(id));
      check_converges([&](int lev) {
        const Grid1D g = grid(lev);
        return directional(DiracSystem::spinor(g, builtin(c.model), c.m), id, id == VirialId::I ? pc : pj,
                           smooth_1d(g, seed), 20.0)
            .rel();
      });
    }
  }
}

TEST_CASE("radial identities agree with the directional-derivative oracle") {
  std::uint64_t seed = 11;
  for (const auto& [model, m] : std::vector<std::pair<const char*, double>>{
           {"zero_radial", 0.0}, {"zero_radial", 1.0}, {"soler_radial", 1.0}}) {
    ++seed;
    for (auto id : {VirialId::K1, VirialId::tK1, VirialId::K2, VirialId::tK2, VirialId::K_combined, VirialId::H_r2}) {
      CAPTURE(model);
      CAPTURE(m);
      CAPTURE(to_string(id));
      check_converges([&](int lev) {
        const RadialGrid g(30, 600 << lev);
        return directional(DiracSystem::radial(g, builtin(model), m), id, {}, smooth_radial(g, seed), 0.0).rel();
      });
    }
  }
}

TEST_CASE("printed coefficient sets are rejected by the oracle") {
  VirialParams printed;
  printed.variant = Variant::printed;
  printed.scaling = ScalingTriple::log_window();
  const Real4 s = smooth_1d(G1, 41);
  {
    const auto sys = DiracSystem::spinor(G1, builtin("zero_spinor"), 1.0);
    CHECK(directional(sys, VirialId::I, printed, s, 20.0).rel() > 0.1);
    CHECK(directional(sys, VirialId::J1, printed, s, 20.0).rel() > 0.1);
    CHECK(directional(sys, VirialId::J_combined, printed, s, 20.0).rel() > 0.1);
  }
  {
    const auto sys = DiracSystem::lab(G1, builtin("zero"), 1.0);
    CHECK(directional(sys, VirialId::J_1d, printed, s, 20.0).rel() > 0.1);
    CHECK(directional(sys, VirialId::K_1d, printed, s, 20.0).rel() > 1e-2);
  }
  {
    const auto sys = DiracSystem::radial(GR, builtin("zero_radial"), 1.0);
    const Real4 r = smooth_radial(GR, 42, 1.0, 3.0);
    CHECK(directional(sys, VirialId::tK1, printed, r, 0.0).rel() > 1e-2);
    CHECK(directional(sys, VirialId::H_r2, printed, r, 0.0).rel() > 0.1);
  }
}

TEST_CASE("combined forms equal the signed sums of the individual identities") {
  const Real4 s = smooth_1d(G1, 51);
  const auto sys = DiracSystem::spinor(G1, builtin("quartic_harmonic"), 1.0);
  const WeightSpec w = weights::tanh_w();
  const auto r = rhs_J(G1, s, sys.model, 1.0, w);
  const double sum = r[0] - r[1] + r[2] - r[3];
  const double comb = rhs_J_combined(G1, s, sys.model, w).total(1.0);
  CHECK(std::abs(sum - comb) <= 1e-5 * std::abs(sum));

  const Real4 q = smooth_radial(GR, 52);
  const auto rad = DiracSystem::radial(GR, builtin("soler_radial"), 1.0);
  const WeightSpec wr = weights::r32_over_1pr();
  const auto k = rhs_K_3d(GR, q, rad.model, 1.0, wr);
  const double ksum = k[0] + k[1] - k[2] - k[3];
  const double kcomb = rhs_K_combined(GR, q, rad.model, wr).total(1.0);
  CHECK(std::abs(ksum - kcomb) <= 1e-5 * std::abs(ksum));
}

TEST_CASE("B vanishes for odd data, odd weight and odd W") {
  const Grid1D g(-20, 20, 801);
  Real4 s(801);
  for (int i = 0; i < 801; ++i) {
    const double x = g.x(i);
    const double e = std::exp(-x * x / 3);
    s.q[0][static_cast<size_t>(i)] = 0.3 * x * e;
    s.q[1][static_cast<size_t>(i)] = 0.2 * std::sin(x) * e;
    s.q[2][static_cast<size_t>(i)] = -0.25 * x * x * x * e / 3;
    s.q[3][static_cast<size_t>(i)] = 0.1 * std::tanh(x) * e;
  }
  const auto t = rhs_J_combined(g, s, models::quartic_harmonic(), weights::tanh_w());
  CHECK(std::abs(t.A) > 1e-6);
  CHECK(std::abs(t.B) < 1e-13);
}

TEST_CASE("verify_identity on short runs and its streaming form") {
  const Grid1D g(-25, 25, 1001);
  const auto sys = DiracSystem::spinor(g, builtin("quartic_harmonic"), 1.0);
  IntegrateOptions opt;
  opt.dt = 0.01;
  opt.t_end = 1.0;
  VirialParams p;
  VirialMonitor mon(sys, {VirialId::H_sech, VirialId::J_combined}, p);
  const Trajectory tr = integrate(sys, smooth_1d(g, 61, 0.5), 0.0, opt, mon.observer());
  for (auto id : {VirialId::H_sech, VirialId::J_combined, VirialId::J2, VirialId::I}) {
    const VirialReport r = verify_identity(sys, tr, id, p);
    CAPTURE(to_string(id));
    CHECK(r.pass);
    CHECK(r.times.size() == tr.times.size() - 2);
  }
  const auto reps = mon.reports();
  const VirialReport direct = verify_identity(sys, tr, VirialId::H_sech, p);
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].max_defect == direct.max_defect);
  CHECK(reps[0].pass);
}

TEST_CASE("radial K1 on a linear run passes and refines") {
  double defect[2];
  for (int lev = 0; lev < 2; ++lev) {
    const RadialGrid rg(30, 600 << lev);
    const auto sys = DiracSystem::radial(rg, builtin("zero_radial"), 0.0);
    IntegrateOptions opt;
    opt.dt = 0.02 / (1 << lev);
    opt.t_end = 1.0;
    const Trajectory tr = integrate(sys, smooth_radial(rg, 71), 0.0, opt);
    const VirialReport r = verify_identity(sys, tr, VirialId::K1, {});
    CHECK(r.pass);
    defect[lev] = r.max_defect;
  }
  CHECK(defect[1] < 0.5 * defect[0]);
}

TEST_CASE("analytic soliton trajectory with K under a moving window") {
  const Grid1D g(-40, 40, 1601);
  const auto sys = DiracSystem::lab(g, builtin("thirring"), 1.0);
  Trajectory tr;
  tr.kind = SystemKind::lab_1d;
  tr.grid = g;
  for (int k = 0; k <= 40; ++k) {
    SolitonParams sp;
    sp.omega = 0.5;
    sp.x0 = 1.0;
    sp.t = 10.0 + 0.05 * k;
    tr.times.push_back(sp.t);
    tr.states.push_back(thirring_soliton(sp, g).real4());
  }
  VirialParams p;
  p.scaling = ScalingTriple::log_window();
  const VirialReport r = verify_identity(sys, tr, VirialId::K_1d, p);
  CHECK(r.max_rhs > 1e-3);
  CHECK(r.max_defect <= 1e-6);
  CHECK(r.pass);
}

TEST_CASE("verify_series edge cases") {
  const std::vector<double> t{0, 0.1, 0.2, 0.3, 0.4};
  const std::vector<double> zero(5, 0.0);
  CHECK(verify_series("zero", t, zero, zero).pass);
  std::vector<double> F, R;
  for (double x : t) {
    F.push_back(std::sin(x));
    R.push_back(std::cos(x));
  }
  CHECK(verify_series("sin", t, F, R, 1e-2).pass);
  std::vector<double> bad = R;
  for (double& x : bad) x = -x;
  const VirialReport r = verify_series("flip", t, F, bad);
  CHECK_FALSE(r.pass);
  CHECK(r.max_defect > 1.0);
  CHECK_THROWS(verify_series("short", {0, 1}, {0, 0}, {0, 0}));
}

TEST_CASE("exterior functional is non-increasing pointwise") {
  const auto sys = DiracSystem::spinor(G1, builtin("soler"), 1.0);
  for (int side : {1, -1}) {
    const VirialParams p{weights::half_step(side), ScalingTriple::exterior(0.5, 12.0, 1.0, side), Variant::derived};
    for (std::uint64_t seed = 80; seed < 85; ++seed) {
      const Real4 s = smooth_1d(G1, seed);
      for (double t : {2.0, 5.0, 8.0})
        CHECK(evaluate_virial(sys, VirialId::I, p, s, t).rhs <= 0.0);
    }
  }
}

TEST_CASE("I identity with a real alpha exercises the other split branch") {
  const Grid1D g(-20, 20, 801);
  const Real4 s = smooth_1d(g, 91);
  const ComplexField z1 = complex_component(s, 0), z2 = complex_component(s, 1);
  const MatrixC alpha = pauli(1), beta = pauli(3);
  const double m = 0.8, d = 1e-4;
  ComplexField d1, d2, zero(z1.size(), 0.0);
  rhs_linear_dirac(g, z1, z2, alpha, beta, m, d1, d2);
  const WeightSpec w = weights::tanh_w();
  const ScalingTriple sc = ScalingTriple::constant(1.5, -0.2);
  auto shifted = [&](double e, ComplexField& a, ComplexField& b) {
    a = z1;
    b = z2;
    for (size_t k = 0; k < a.size(); ++k) {
      a[k] += e * d1[k];
      b[k] += e * d2[k];
    }
  };
  ComplexField ap, bp, am, bm;
  shifted(d, ap, bp);
  shifted(-d, am, bm);
  const double fd = (functional_I(g, ap, bp, w, sc, 3.0 + d) - functional_I(g, am, bm, w, sc, 3.0 - d)) / (2 * d);
  const double an = rhs_I(g, z1, z2, zero, zero, alpha, w, sc, 3.0);
  CHECK(std::abs(fd - an) < 1e-5 * std::abs(an));
}

TEST_CASE("coercivity quotient") {
  for (double L : {1.0, 5.0, 20.0}) {
    const double X = 40 * std::max(L, 1.0);
    const Grid1D g(-X, X, 1001);
    CAPTURE(L);
    CHECK(coercivity_estimate(L, g) > 0.0);
  }
  CHECK_THROWS(coercivity_estimate(1.0, Grid1D(-10, 10, 1000)));
  // With the 1/(2L) potential the form loses coercivity once L is large.
  CHECK(coercivity_estimate(20.0, Grid1D(-800, 800, 1001), CoercivityForm::printed) < 0.0);
  const Grid1D g(-40, 40, 2001);
  RealField even(2001), far(2001);
  for (int i = 0; i < 2001; ++i) {
    const double x = g.x(i);
    even[static_cast<size_t>(i)] = 1.0 / std::cosh(x / 4);
    far[static_cast<size_t>(i)] = std::exp(-(x - 30) * (x - 30)) - std::exp(-(x + 30) * (x + 30));
  }
  CHECK(coercivity_quotient(1.0, g, even) < 0.0);
  CHECK(coercivity_quotient(1.0, g, far) == doctest::Approx(1.0).epsilon(1e-6));
  // The minimum over odd functions bounds every odd quotient from below.
  CHECK(coercivity_estimate(1.0, g) <= coercivity_quotient(1.0, g, far));
}

TEST_CASE("decay integrands are positive and vanish on zero data") {
  const Real4 s = smooth_1d(G1, 95);
  CHECK(window_decay_integrand(G1, s, 20.0) > 0.0);
  CHECK(window_decay_integrand(G1, Real4(static_cast<size_t>(G1.n)), 20.0) == 0.0);
  CHECK(radial_decay_integrand(GR, smooth_radial(GR, 96)) > 0.0);
}
