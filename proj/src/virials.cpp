#include "nld/virials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace nld {

namespace {

struct WeightTable {
  RealField d0, d1, d2, d3;
};

WeightTable tabulate(const WeightSpec& w, const RealField& y) {
  WeightTable t;
  const size_t n = y.size();
  t.d0.resize(n);
  t.d1.resize(n);
  t.d2.resize(n);
  t.d3.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const WeightValues v = w(y[k]);
    t.d0[k] = v.d0;
    t.d1[k] = v.d1;
    t.d2[k] = v.d2;
    t.d3[k] = v.d3;
  }
  return t;
}

struct RadialTable {
  WeightTable w;
  std::vector<RadialCombos> c;
};

RadialTable tabulate_radial(const WeightSpec& w, const RadialGrid& g) {
  if (!w.has_combos())
    throw std::invalid_argument(fmt::format("weight '{}' lacks the radial singular combinations", w.name));
  RadialTable t;
  const RealField r = g.nodes();
  t.w = tabulate(w, r);
  t.c.resize(r.size());
  for (size_t k = 0; k < r.size(); ++k) t.c[k] = w.combos(r[k]);
  return t;
}

template <class F>
double integrate(const Grid1D& g, F&& f) {
  RealField v(static_cast<size_t>(g.n));
  for (size_t k = 0; k < v.size(); ++k) v[k] = f(k);
  return quad(g, v);
}

template <class F>
double integrate(const RadialGrid& g, F&& f) {
  RealField v(static_cast<size_t>(g.n));
  for (size_t k = 0; k < v.size(); ++k) v[k] = f(k);
  return quad(g, v, Measure::line);
}

WeightSpec resolve_weight(VirialId id, const VirialParams& p) {
  return p.weight.eval ? p.weight : default_weight(id);
}

void require_kind(const DiracSystem& sys, VirialId id) {
  if (!virial_supports(id, sys.kind))
    throw std::invalid_argument(
        fmt::format("identity {} does not apply to system {}", to_string(id), to_string(sys.kind)));
}

/// Real fields of W = (W11 + i W12, W21 + i W22).
Real4 gradient_real4(const NonlinearityModel& model, const Real4& s) {
  ComplexField w1, w2;
  gradient_fields(model, complex_component(s, 0), complex_component(s, 1), w1, w2, Exec::serial);
  return to_real4(w1, w2);
}

Real4 deriv_all(const Grid1D& g, const Real4& s) {
  Real4 d;
  for (int c = 0; c < 4; ++c) d.q[c] = deriv1(g, s.q[c], Exec::serial);
  return d;
}

/// Components 11, 12 even across r = 0, components 21, 22 odd.
Real4 deriv_all(const RadialGrid& g, const Real4& s) {
  Real4 d;
  for (int c = 0; c < 4; ++c) d.q[c] = deriv1(g, s.q[c], c < 2 ? Parity::even : Parity::odd, Exec::serial);
  return d;
}

constexpr int C11 = 0, C12 = 1, C21 = 2, C22 = 3;

}  // namespace

ScalingTriple ScalingTriple::constant(double lambda, double theta) {
  if (!(lambda > 0)) throw std::invalid_argument("ScalingTriple::constant: lambda must be positive");
  ScalingTriple s;
  s.name = "constant";
  s.mu = [](double) { return TimeMap{1.0, 0.0}; };
  s.lambda = [lambda](double) { return TimeMap{lambda, 0.0}; };
  s.rho = [theta](double t) { return TimeMap{theta * t, theta}; };
  return s;
}

ScalingTriple ScalingTriple::log_window() {
  ScalingTriple s;
  s.name = "log_window";
  s.mu = [](double) { return TimeMap{1.0, 0.0}; };
  s.lambda = [](double t) {
    if (!(t > 1.0)) throw std::domain_error("log_window scaling requires t > 1");
    const double L = std::log(t);
    return TimeMap{t / (L * L), 1.0 / (L * L) - 2.0 / (L * L * L)};
  };
  s.rho = [](double) { return TimeMap{0.0, 0.0}; };
  return s;
}

ScalingTriple ScalingTriple::exterior(double b, double t0, double lambda, int side) {
  if (!(b > 0) || !(lambda > 0) || (side != 1 && side != -1))
    throw std::invalid_argument("ScalingTriple::exterior: need b > 0, lambda > 0, side = +-1");
  ScalingTriple s;
  s.name = "exterior";
  s.mu = [](double) { return TimeMap{2.0, 0.0}; };
  s.lambda = [lambda](double) { return TimeMap{lambda, 0.0}; };
  const double sg = side;
  s.rho = [=](double t) {
    return TimeMap{sg * (-(1.0 + b) * t0 + (1.0 + 0.5 * b) * (t0 - t)), -sg * (1.0 + 0.5 * b)};
  };
  return s;
}

std::string to_string(VirialId id) {
  switch (id) {
    case VirialId::I: return "I";
    case VirialId::K_1d: return "K_1d";
    case VirialId::J_1d: return "J_1d";
    case VirialId::J1: return "J1";
    case VirialId::J2: return "J2";
    case VirialId::J3: return "J3";
    case VirialId::J4: return "J4";
    case VirialId::J_combined: return "J_combined";
    case VirialId::K1: return "K1";
    case VirialId::tK1: return "tK1";
    case VirialId::K2: return "K2";
    case VirialId::tK2: return "tK2";
    case VirialId::K_combined: return "K_combined";
    case VirialId::H_sech: return "H_sech";
    case VirialId::H_r2: return "H_r2";
  }
  return "?";
}

VirialId virial_from_string(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(VirialId::H_r2); ++k) {
    const auto id = static_cast<VirialId>(k);
    if (to_string(id) == s) return id;
  }
  throw std::invalid_argument(fmt::format("unknown virial identity '{}'", s));
}

bool virial_supports(VirialId id, SystemKind kind) {
  switch (id) {
    case VirialId::I: return kind != SystemKind::radial_3d;
    case VirialId::K_1d:
    case VirialId::J_1d: return kind == SystemKind::lab_1d;
    case VirialId::J1:
    case VirialId::J2:
    case VirialId::J3:
    case VirialId::J4:
    case VirialId::J_combined:
    case VirialId::H_sech: return kind == SystemKind::spinor_1d;
    default: return kind == SystemKind::radial_3d;
  }
}

WeightSpec default_weight(VirialId id) {
  switch (id) {
    case VirialId::K1:
    case VirialId::tK1:
    case VirialId::K2:
    case VirialId::tK2:
    case VirialId::K_combined: return weights::r32_over_1pr();
    case VirialId::H_sech: return weights::sech_w();
    case VirialId::H_r2: return weights::r2_over_1pr4();
    default: return weights::tanh_w();
  }
}

// ---------------------------------------------------------------- I

double functional_I(const Grid1D& g, const ComplexField& z1, const ComplexField& z2, const WeightSpec& w,
                    const ScalingTriple& sc, double t) {
  const TimeMap mu = sc.mu(t), la = sc.lambda(t), rho = sc.rho(t);
  return integrate(g, [&](size_t k) {
           const double y = (g.x(static_cast<int>(k)) + rho.v) / la.v;
           return w(y).d0 * (std::norm(z1[k]) + std::norm(z2[k]));
         }) /
         mu.v;
}

double rhs_I(const Grid1D& g, const ComplexField& z1, const ComplexField& z2, const ComplexField& n1,
             const ComplexField& n2, const MatrixC& alpha, const WeightSpec& w, const ScalingTriple& sc, double t,
             Variant v) {
  const AlphaSplit sp = split_alpha(alpha);
  const TimeMap mu = sc.mu(t), la = sc.lambda(t), rho = sc.rho(t);
  RealField f0(z1.size()), f1(z1.size()), f2(z1.size()), f3(z1.size());
  for (size_t k = 0; k < z1.size(); ++k) {
    const double y = (g.x(static_cast<int>(k)) + rho.v) / la.v;
    const WeightValues wv = w(y);
    const double mass = std::norm(z1[k]) + std::norm(z2[k]);
    const double u1[2] = {z1[k].real(), z2[k].real()};
    const double u2[2] = {z1[k].imag(), z2[k].imag()};
    double q = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double ar = sp.alpha_r(a, b).real(), ai = sp.alpha_i(a, b).real();
        q += u1[a] * ar * u1[b] + u2[a] * ar * u2[b] - 2.0 * u1[a] * ai * u2[b];
      }
    f0[k] = wv.d0 * mass;
    f1[k] = wv.d1 * (rho.dv / la.v - y * la.dv / la.v) * mass;
    f2[k] = wv.d1 * q;
    f3[k] = wv.d0 * 2.0 * (std::conj(z1[k]) * n1[k] + std::conj(z2[k]) * n2[k]).real();
  }
  const double i0 = quad(g, f0) / mu.v, i1 = quad(g, f1), i2 = quad(g, f2), i3 = quad(g, f3);
  const double c_alpha = v == Variant::derived ? 1.0 : -0.5;
  return -(mu.dv / mu.v) * i0 + i1 / mu.v + c_alpha * i2 / (mu.v * la.v) + i3 / mu.v;
}

// ---------------------------------------------------------------- K_1d, J_1d

double functional_K_1d(const Grid1D& g, const Real4& s, const WeightSpec& w, double lambda) {
  return integrate(g, [&](size_t k) {
    const double y = g.x(static_cast<int>(k)) / lambda;
    return w(y).d0 * (s.q[0][k] * s.q[0][k] + s.q[1][k] * s.q[1][k] + s.q[2][k] * s.q[2][k] + s.q[3][k] * s.q[3][k]);
  });
}

double functional_J_1d(const Grid1D& g, const Real4& s, const WeightSpec& w, double lambda) {
  return integrate(g, [&](size_t k) {
    const double y = g.x(static_cast<int>(k)) / lambda;
    return w(y).d0 * (s.q[0][k] * s.q[0][k] + s.q[1][k] * s.q[1][k] - s.q[2][k] * s.q[2][k] - s.q[3][k] * s.q[3][k]);
  });
}

namespace {

struct LabTerms {
  double d1_s = 0, d1_d = 0;        // int phi'(y) (|u|^2 +- |v|^2)
  double xd1_s = 0, xd1_d = 0;      // int y phi'(y) (|u|^2 +- |v|^2)
  double im_phi_ubar_v = 0;         // Im int phi u-bar v
  double nl_sum = 0, nl_diff = 0;   // 2 Im int phi (u-bar W1 +- v-bar W2)
};

LabTerms lab_terms(const Grid1D& g, const Real4& s, const NonlinearityModel& model, const WeightSpec& w,
                   double lambda) {
  const ComplexField u = complex_component(s, 0), v = complex_component(s, 1);
  ComplexField w1, w2;
  gradient_fields(model, u, v, w1, w2, Exec::serial);
  const size_t n = u.size();
  std::array<RealField, 7> f;
  for (auto& x : f) x.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const double y = g.x(static_cast<int>(k)) / lambda;
    const WeightValues wv = w(y);
    const double au = std::norm(u[k]), av = std::norm(v[k]);
    f[0][k] = wv.d1 * (au + av);
    f[1][k] = wv.d1 * (au - av);
    f[2][k] = y * wv.d1 * (au + av);
    f[3][k] = y * wv.d1 * (au - av);
    f[4][k] = wv.d0 * (std::conj(u[k]) * v[k]).imag();
    f[5][k] = 2.0 * wv.d0 * (std::conj(u[k]) * w1[k] + std::conj(v[k]) * w2[k]).imag();
    f[6][k] = 2.0 * wv.d0 * (std::conj(u[k]) * w1[k] - std::conj(v[k]) * w2[k]).imag();
  }
  LabTerms t;
  t.d1_s = quad(g, f[0]);
  t.d1_d = quad(g, f[1]);
  t.xd1_s = quad(g, f[2]);
  t.xd1_d = quad(g, f[3]);
  t.im_phi_ubar_v = quad(g, f[4]);
  t.nl_sum = quad(g, f[5]);
  t.nl_diff = quad(g, f[6]);
  return t;
}

}  // namespace

double rhs_K_1d(const Grid1D& g, const Real4& s, const NonlinearityModel& model, const WeightSpec& w,
                const ScalingTriple& sc, double t, Variant v) {
  const TimeMap la = sc.lambda(t);
  const LabTerms e = lab_terms(g, s, model, w, la.v);
  if (v == Variant::printed) return e.d1_d / la.v;
  return e.d1_d / la.v - (la.dv / la.v) * e.xd1_s + e.nl_sum;
}

double rhs_J_1d(const Grid1D& g, const Real4& s, const NonlinearityModel& model, double m, const WeightSpec& w,
                const ScalingTriple& sc, double t, Variant v) {
  const TimeMap la = sc.lambda(t);
  const LabTerms e = lab_terms(g, s, model, w, la.v);
  const double drift = -(la.dv / la.v) * e.xd1_d;
  // Im int phi u vbar = -Im int phi ubar v.
  if (v == Variant::printed) return drift - 0.5 * e.d1_s / la.v + 4.0 * m * e.im_phi_ubar_v + e.nl_diff;
  return drift + e.d1_s / la.v - 4.0 * m * e.im_phi_ubar_v + e.nl_diff;
}

// ---------------------------------------------------------------- J1..J4

namespace {

/// int [phi a' + 1/2 phi' a] b
template <class G, class T>
double bracket(const G& g, const T& wt, const RealField& a, const RealField& da, const RealField& b) {
  return integrate(g, [&](size_t k) { return (wt.d0[k] * da[k] + 0.5 * wt.d1[k] * a[k]) * b[k]; });
}

struct JData {
  Real4 s, d, W, dW;
  WeightTable wt;
};

JData j_data(const Grid1D& g, const Real4& s, const NonlinearityModel* model, const WeightSpec& w) {
  JData j;
  j.s = s;
  j.d = deriv_all(g, s);
  j.wt = tabulate(w, g.nodes());
  if (model) {
    j.W = gradient_real4(*model, s);
    j.dW = deriv_all(g, j.W);
  }
  return j;
}

RealField lin(const RealField& a, const RealField& b, double m) {
  RealField r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = a[k] + m * b[k];
  return r;
}

/// (f, g-derivative component, g-mass component) for J1..J4.
constexpr int JF[4] = {C11, C12, C22, C21};
constexpr int JGD[4] = {C22, C21, C11, C12};
constexpr int JGM[4] = {C12, C11, C21, C22};

}  // namespace

std::array<double, 4> functionals_J(const Grid1D& g, const Real4& s, const WeightSpec& w, double m) {
  const JData j = j_data(g, s, nullptr, w);
  std::array<double, 4> out{};
  for (int a = 0; a < 4; ++a)
    out[a] = bracket(g, j.wt, s.q[JF[a]], j.d.q[JF[a]], lin(j.d.q[JGD[a]], s.q[JGM[a]], m));
  return out;
}

std::array<double, 4> rhs_J(const Grid1D& g, const Real4& s, const NonlinearityModel& model, double m,
                            const WeightSpec& w, Variant v) {
  const JData j = j_data(g, s, &model, w);
  const double cg = v == Variant::derived ? 1.0 : 0.5;
  std::array<double, 4> out{};
  for (int a = 0; a < 4; ++a) {
    const int f = JF[a];
    const double quadratic = integrate(g, [&](size_t k) {
      return -cg * j.wt.d1[k] * j.d.q[f][k] * j.d.q[f][k] + 0.25 * j.wt.d3[k] * s.q[f][k] * s.q[f][k];
    });
    const RealField gfield = lin(j.d.q[JGD[a]], s.q[JGM[a]], m);
    // Source pairs: J1 (W12 | W21, W11), J2 (W11 | W22, W12), J3 (W21 | W12, W22), J4 (W22 | W11, W21).
    static constexpr int WA[4] = {C12, C11, C21, C22};
    static constexpr int WB[4] = {C21, C22, C12, C11};
    static constexpr int WC[4] = {C11, C12, C22, C21};
    const RealField second = lin(j.dW.q[WB[a]], j.W.q[WC[a]], -m);
    const double nl = bracket(g, j.wt, j.W.q[WA[a]], j.dW.q[WA[a]], gfield) + bracket(g, j.wt, s.q[f], j.d.q[f], second);
    // J1, J3 carry a minus sign on the whole right-hand side relative to J2, J4.
    const double sgn = (a == 0 || a == 2) ? 1.0 : -1.0;
    out[a] = sgn * quadratic - sgn * nl;
  }
  return out;
}

CombinedTerms rhs_J_combined(const Grid1D& g, const Real4& s, const NonlinearityModel& model, const WeightSpec& w,
                             Variant v) {
  const JData j = j_data(g, s, &model, w);
  const double cg = v == Variant::derived ? 1.0 : 0.5;
  CombinedTerms out;
  out.quadratic = integrate(g, [&](size_t k) {
    double grad2 = 0, mass = 0;
    for (int c = 0; c < 4; ++c) {
      grad2 += j.d.q[c][k] * j.d.q[c][k];
      mass += s.q[c][k] * s.q[c][k];
    }
    return -cg * j.wt.d1[k] * grad2 + 0.25 * j.wt.d3[k] * mass;
  });
  out.A = integrate(g, [&](size_t k) {
    double a = 0;
    for (int c = 0; c < 4; ++c) a += 2.0 * j.wt.d0[k] * j.d.q[c][k] * j.W.q[c][k] + j.wt.d1[k] * j.W.q[c][k] * s.q[c][k];
    return a;
  });
  if (v == Variant::derived) {
    // Each pair: [phi W' + 1/2 phi' W] against a derivative of phi, and [phi phi' + 1/2 phi' phi] against W'.
    static constexpr int P[8][2] = {{C12, C22}, {C21, C11}, {C11, C21}, {C22, C12},
                                    {C21, C11}, {C12, C22}, {C22, C12}, {C11, C21}};
    double B = 0;
    for (int p = 0; p < 8; ++p) {
      const int Wc = P[p][0], Pc = P[p][1];
      if (p % 2 == 0)
        B += bracket(g, j.wt, j.W.q[Wc], j.dW.q[Wc], j.d.q[Pc]);
      else
        B += bracket(g, j.wt, s.q[Pc], j.d.q[Pc], j.dW.q[Wc]);
    }
    out.B = B;
  }
  return out;
}

// ---------------------------------------------------------------- K family (radial)

namespace {

struct KData {
  Real4 s, d, W, dW;
  RadialTable t;
  RealField inv_r;
};

KData k_data(const RadialGrid& g, const Real4& s, const NonlinearityModel* model, const WeightSpec& w) {
  KData kd;
  kd.t = tabulate_radial(w, g);
  kd.s = s;
  kd.d = deriv_all(g, s);
  if (model) {
    kd.W = gradient_real4(*model, s);
    kd.dW = deriv_all(g, kd.W);
  }
  kd.inv_r.resize(static_cast<size_t>(g.n));
  for (int k = 0; k < g.n; ++k) kd.inv_r[static_cast<size_t>(k)] = 1.0 / g.r(k);
  return kd;
}

/// D f = f' + 2 f / r.
RealField Dop(const KData& kd, const RealField& f, const RealField& df) {
  RealField r(f.size());
  for (size_t k = 0; k < f.size(); ++k) r[k] = df[k] + 2.0 * kd.inv_r[k] * f[k];
  return r;
}

/// Per functional: f component, g = (D or plain derivative of gd) + m gm.
constexpr int KF[4] = {C11, C22, C12, C21};
constexpr int KGD[4] = {C22, C11, C21, C12};
constexpr int KGM[4] = {C12, C21, C11, C22};
constexpr bool KUSE_D[4] = {true, false, true, false};

}  // namespace

std::array<double, 4> functionals_K_3d(const RadialGrid& g, const Real4& s, const WeightSpec& w, double m) {
  const KData kd = k_data(g, s, nullptr, w);
  std::array<double, 4> out{};
  for (int a = 0; a < 4; ++a) {
    const RealField dg = KUSE_D[a] ? Dop(kd, s.q[KGD[a]], kd.d.q[KGD[a]]) : kd.d.q[KGD[a]];
    out[a] = bracket(g, kd.t.w, s.q[KF[a]], kd.d.q[KF[a]], lin(dg, s.q[KGM[a]], m));
  }
  return out;
}

std::array<double, 4> rhs_K_3d(const RadialGrid& g, const Real4& s, const NonlinearityModel& model, double m,
                               const WeightSpec& w, Variant v) {
  const KData kd = k_data(g, s, &model, w);
  const double c3 = v == Variant::derived ? 4.0 : -2.0;
  // Source pairs per functional: first bracket in W_A against g, second in f against (op W_B - m W_C).
  static constexpr int WA[4] = {C12, C21, C11, C22};
  static constexpr int WB[4] = {C21, C12, C22, C11};
  static constexpr int WC[4] = {C11, C22, C12, C21};
  static constexpr bool WB_D[4] = {true, false, true, false};
  std::array<double, 4> out{};
  for (int a = 0; a < 4; ++a) {
    const int f = KF[a];
    const bool second_kind = (a == 1 || a == 3);  // tK1, tK2: f odd, extra phi/r^3 term
    const double quadratic = integrate(g, [&](size_t k) {
      const WeightValues wv{kd.t.w.d0[k], kd.t.w.d1[k], kd.t.w.d2[k], kd.t.w.d3[k]};
      const RadialCombos& c = kd.t.c[k];
      double coef = c.d2_over_r - c.d1_over_r2 - 0.5 * wv.d3;
      if (second_kind) coef += c3 * c.phi_over_r3;
      return -(wv.d1 - 2.0 * c.phi_over_r) * kd.d.q[f][k] * kd.d.q[f][k] - 0.5 * coef * s.q[f][k] * s.q[f][k];
    });
    const RealField dg = KUSE_D[a] ? Dop(kd, s.q[KGD[a]], kd.d.q[KGD[a]]) : kd.d.q[KGD[a]];
    const RealField gfield = lin(dg, s.q[KGM[a]], m);
    const RealField opW = WB_D[a] ? Dop(kd, kd.W.q[WB[a]], kd.dW.q[WB[a]]) : kd.dW.q[WB[a]];
    const RealField second = lin(opW, kd.W.q[WC[a]], -m);
    const double nl = bracket(g, kd.t.w, kd.W.q[WA[a]], kd.dW.q[WA[a]], gfield) +
                      bracket(g, kd.t.w, s.q[f], kd.d.q[f], second);
    const double sgn = a < 2 ? 1.0 : -1.0;
    out[a] = sgn * quadratic - sgn * nl;
  }
  return out;
}

CombinedTerms rhs_K_combined(const RadialGrid& g, const Real4& s, const NonlinearityModel& model,
                             const WeightSpec& w, Variant v) {
  const KData kd = k_data(g, s, &model, w);
  const double c3 = v == Variant::derived ? 4.0 : -2.0;
  CombinedTerms out;
  out.quadratic = integrate(g, [&](size_t k) {
    const RadialCombos& c = kd.t.c[k];
    const double base = c.d1_over_r2 + 0.5 * kd.t.w.d3[k] - c.d2_over_r;
    double grad2 = 0;
    for (int q = 0; q < 4; ++q) grad2 += kd.d.q[q][k] * kd.d.q[q][k];
    const double even2 = s.q[C11][k] * s.q[C11][k] + s.q[C12][k] * s.q[C12][k];
    const double odd2 = s.q[C21][k] * s.q[C21][k] + s.q[C22][k] * s.q[C22][k];
    return (2.0 * c.phi_over_r - kd.t.w.d1[k]) * grad2 + 0.5 * base * even2 +
           0.5 * (base - c3 * c.phi_over_r3) * odd2;
  });
  out.A = integrate(g, [&](size_t k) {
    double a = 0;
    for (int q = 0; q < 4; ++q)
      a += 2.0 * kd.t.w.d0[k] * kd.W.q[q][k] * kd.d.q[q][k] + kd.t.w.d1[k] * kd.W.q[q][k] * s.q[q][k];
    return a;
  });
  const RealField D21 = Dop(kd, s.q[C21], kd.d.q[C21]);
  const RealField D22 = Dop(kd, s.q[C22], kd.d.q[C22]);
  const RealField DW21 = Dop(kd, kd.W.q[C21], kd.dW.q[C21]);
  const RealField DW22 = Dop(kd, kd.W.q[C22], kd.dW.q[C22]);
  out.B = bracket(g, kd.t.w, kd.W.q[C12], kd.dW.q[C12], D22) + bracket(g, kd.t.w, s.q[C11], kd.d.q[C11], DW21) +
          bracket(g, kd.t.w, kd.W.q[C21], kd.dW.q[C21], kd.d.q[C11]) +
          bracket(g, kd.t.w, s.q[C22], kd.d.q[C22], kd.dW.q[C12]) +
          bracket(g, kd.t.w, kd.W.q[C11], kd.dW.q[C11], D21) + bracket(g, kd.t.w, s.q[C12], kd.d.q[C12], DW22) +
          bracket(g, kd.t.w, kd.W.q[C22], kd.dW.q[C22], kd.d.q[C12]) +
          bracket(g, kd.t.w, s.q[C21], kd.d.q[C21], kd.dW.q[C11]);
  return out;
}

// ---------------------------------------------------------------- H

double functional_H_sech(const Grid1D& g, const Real4& s) {
  return 0.5 * integrate(g, [&](size_t k) {
           double mass = 0;
           for (int c = 0; c < 4; ++c) mass += s.q[c][k] * s.q[c][k];
           return mass / std::cosh(g.x(static_cast<int>(k)));
         });
}

double rhs_H_sech(const Grid1D& g, const Real4& s, const NonlinearityModel& model) {
  const ComplexField p1 = complex_component(s, 0), p2 = complex_component(s, 1);
  const ComplexField d1 = deriv1(g, p1, Exec::serial), d2 = deriv1(g, p2, Exec::serial);
  ComplexField w1, w2;
  gradient_fields(model, p1, p2, w1, w2, Exec::serial);
  return integrate(g, [&](size_t k) {
    const double sech = 1.0 / std::cosh(g.x(static_cast<int>(k)));
    const cx lin = std::conj(p1[k]) * d2[k] - std::conj(p2[k]) * d1[k];
    const cx nl = w2[k] * std::conj(p2[k]) - w1[k] * std::conj(p1[k]);
    return sech * (lin.imag() + nl.imag());
  });
}

double functional_H_r2(const RadialGrid& g, const Real4& s) {
  const WeightSpec w = weights::r2_over_1pr4();
  return integrate(g, [&](size_t k) {
    double mass = 0;
    for (int c = 0; c < 4; ++c) mass += s.q[c][k] * s.q[c][k];
    return w(g.r(static_cast<int>(k))).d0 * mass;
  });
}

double rhs_H_r2(const RadialGrid& g, const Real4& s, const NonlinearityModel& model, Variant v) {
  const WeightSpec w = weights::r2_over_1pr4();
  const Real4 W = gradient_real4(model, s);
  const double sg = v == Variant::derived ? 1.0 : -1.0;
  return integrate(g, [&](size_t k) {
    const double r = g.r(static_cast<int>(k));
    const WeightValues wv = w(r);
    const RadialCombos c = w.combos(r);
    // Im(conj(phi1) phi2), Im(conj(phi2) W2), Im(conj(phi1) W1) in real components.
    const double im12 = s.q[C11][k] * s.q[C22][k] - s.q[C12][k] * s.q[C21][k];
    const double im2W = s.q[C21][k] * W.q[C22][k] - s.q[C22][k] * W.q[C21][k];
    const double im1W = s.q[C11][k] * W.q[C12][k] - s.q[C12][k] * W.q[C11][k];
    return 2.0 * sg * (2.0 * c.phi_over_r - wv.d1) * im12 + 2.0 * wv.d0 * (im2W - im1W);
  });
}

// ---------------------------------------------------------------- decay integrands

double window_decay_integrand(const Grid1D& g, const Real4& s, double t) {
  const double lambda = ScalingTriple::log_window().lambda(t).v;
  return integrate(g, [&](size_t k) {
           const double c = std::cosh(g.x(static_cast<int>(k)) / lambda);
           double mass = 0;
           for (int q = 0; q < 4; ++q) mass += s.q[q][k] * s.q[q][k];
           return mass / (c * c);
         }) /
         lambda;
}

double radial_decay_integrand(const RadialGrid& g, const Real4& s) {
  const Real4 d = deriv_all(g, s);
  return integrate(g, [&](size_t k) {
    const double r = g.r(static_cast<int>(k));
    double grad2 = 0, mass = 0;
    for (int q = 0; q < 4; ++q) {
      grad2 += d.q[q][k] * d.q[q][k];
      mass += s.q[q][k] * s.q[q][k];
    }
    return std::sqrt(r) * grad2 / (1.0 + r) + mass / (r * std::sqrt(r) * (1.0 + r));
  });
}

// ---------------------------------------------------------------- dispatch

VirialValue evaluate_virial(const DiracSystem& sys, VirialId id, const VirialParams& p, const Real4& s, double t) {
  require_kind(sys, id);
  const WeightSpec w = resolve_weight(id, p);
  const NonlinearityModel& model = sys.model;
  VirialValue out;
  switch (id) {
    case VirialId::I: {
      const ComplexField z1 = complex_component(s, 0), z2 = complex_component(s, 1);
      ComplexField n1, n2;
      nonlinear_source(sys, z1, z2, n1, n2);
      const MatrixC alpha = sys.kind == SystemKind::lab_1d ? pauli(3) : alpha_beta(1).alpha[0];
      out.F = functional_I(sys.grid, z1, z2, w, p.scaling, t);
      out.rhs = rhs_I(sys.grid, z1, z2, n1, n2, alpha, w, p.scaling, t, p.variant);
      break;
    }
    case VirialId::K_1d:
      out.F = functional_K_1d(sys.grid, s, w, p.scaling.lambda(t).v);
      out.rhs = rhs_K_1d(sys.grid, s, model, w, p.scaling, t, p.variant);
      break;
    case VirialId::J_1d:
      out.F = functional_J_1d(sys.grid, s, w, p.scaling.lambda(t).v);
      out.rhs = rhs_J_1d(sys.grid, s, model, sys.m, w, p.scaling, t, p.variant);
      break;
    case VirialId::J1:
    case VirialId::J2:
    case VirialId::J3:
    case VirialId::J4: {
      const int a = static_cast<int>(id) - static_cast<int>(VirialId::J1);
      out.F = functionals_J(sys.grid, s, w, sys.m)[a];
      out.rhs = rhs_J(sys.grid, s, model, sys.m, w, p.variant)[a];
      break;
    }
    case VirialId::J_combined: {
      const auto F = functionals_J(sys.grid, s, w, sys.m);
      out.F = F[0] - F[1] + F[2] - F[3];
      out.rhs = rhs_J_combined(sys.grid, s, model, w, p.variant).total(sys.m);
      break;
    }
    case VirialId::K1:
    case VirialId::tK1:
    case VirialId::K2:
    case VirialId::tK2: {
      const int a = static_cast<int>(id) - static_cast<int>(VirialId::K1);
      out.F = functionals_K_3d(sys.rgrid, s, w, sys.m)[a];
      out.rhs = rhs_K_3d(sys.rgrid, s, model, sys.m, w, p.variant)[a];
      break;
    }
    case VirialId::K_combined: {
      const auto F = functionals_K_3d(sys.rgrid, s, w, sys.m);
      out.F = F[0] + F[1] - F[2] - F[3];
      out.rhs = rhs_K_combined(sys.rgrid, s, model, w, p.variant).total(sys.m);
      break;
    }
    case VirialId::H_sech:
      out.F = functional_H_sech(sys.grid, s);
      out.rhs = rhs_H_sech(sys.grid, s, model);
      break;
    case VirialId::H_r2:
      out.F = functional_H_r2(sys.rgrid, s);
      out.rhs = rhs_H_r2(sys.rgrid, s, model, p.variant);
      break;
  }
  return out;
}

// ---------------------------------------------------------------- verification

VirialReport verify_series(const std::string& id, const std::vector<double>& times, const std::vector<double>& F,
                           const std::vector<double>& rhs, double rtol, double atol_factor) {
  if (times.size() < 3 || F.size() != times.size() || rhs.size() != times.size())
    throw std::invalid_argument(fmt::format("verify {}: need at least three matching samples", id));
  VirialReport r;
  r.id = id;
  r.rtol = rtol;
  double scale = 0.0;
  for (size_t k = 0; k < times.size(); ++k) scale = std::max({scale, std::abs(F[k]), std::abs(rhs[k])});
  r.atol = atol_factor * scale;
  for (size_t k = 1; k + 1 < times.size(); ++k) {
    const double fd = (F[k + 1] - F[k - 1]) / (times[k + 1] - times[k - 1]);
    r.times.push_back(times[k]);
    r.F.push_back(F[k]);
    r.FD.push_back(fd);
    r.RHS.push_back(rhs[k]);
    r.defect.push_back(std::abs(fd - rhs[k]));
    r.max_defect = std::max(r.max_defect, r.defect.back());
    r.max_rhs = std::max(r.max_rhs, std::abs(rhs[k]));
  }
  r.pass = r.max_defect <= std::max(r.atol, rtol * r.max_rhs);
  return r;
}

VirialReport verify_identity(const DiracSystem& sys, const Trajectory& tr, VirialId id, const VirialParams& p,
                             double rtol, double atol_factor) {
  require_kind(sys, id);
  if (tr.states.size() != tr.times.size())
    throw std::invalid_argument("verify_identity: trajectory has no stored states");
  const long n = static_cast<long>(tr.times.size());
  std::vector<double> F(tr.times.size()), R(tr.times.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    const VirialValue v = evaluate_virial(sys, id, p, tr.states[k], tr.times[k]);
    F[k] = v.F;
    R[k] = v.rhs;
  }
  return verify_series(to_string(id), tr.times, F, R, rtol, atol_factor);
}

VirialMonitor::VirialMonitor(DiracSystem sys, std::vector<VirialId> ids, VirialParams p)
    : sys_(std::move(sys)), ids_(std::move(ids)), params_(std::move(p)), F_(ids_.size()), R_(ids_.size()) {
  for (VirialId id : ids_) require_kind(sys_, id);
}

void VirialMonitor::observe(double t, const Real4& s) {
  times_.push_back(t);
  for (size_t k = 0; k < ids_.size(); ++k) {
    const VirialValue v = evaluate_virial(sys_, ids_[k], params_, s, t);
    F_[k].push_back(v.F);
    R_[k].push_back(v.rhs);
  }
}

SampleObserver VirialMonitor::observer() {
  return [this](double t, const Real4& s) { observe(t, s); };
}

std::vector<VirialReport> VirialMonitor::reports(double rtol, double atol_factor) const {
  std::vector<VirialReport> out;
  for (size_t k = 0; k < ids_.size(); ++k)
    out.push_back(verify_series(to_string(ids_[k]), times_, F_[k], R_[k], rtol, atol_factor));
  return out;
}

// ---------------------------------------------------------------- coercivity

namespace {

struct Pencil {
  Eigen::MatrixXd A, B;
};

/// Odd functions on a symmetric grid: unknowns at x_1..x_{N-1} on the positive
/// half with z(0) = z(x_N) = 0. Both forms are even in x, so the half-line
/// sums represent the full integrals up to a common factor 2.
Pencil coercivity_pencil(double L, const Grid1D& g, CoercivityForm form) {
  if (!g.symmetric() || g.n % 2 == 0)
    throw std::invalid_argument("coercivity_estimate: need a symmetric grid with an odd node count");
  const int c = g.n / 2;
  const int N = g.n - 1 - c;  // x_N is the right end
  const int m = N - 1;
  const double h = g.h;
  const double cpot = form == CoercivityForm::derived ? 0.5 / (L * L) : 0.5 / L;
  Pencil p{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
  for (int i = 0; i < m; ++i) {
    const double x = g.x(c + 1 + i);
    const double s = 1.0 / std::cosh(x / L);
    const double kin = 2.0 / h;
    p.A(i, i) = kin - cpot * s * s * h;
    p.B(i, i) = kin + (1.0 / L) * s * s * s * s * h;
    if (i + 1 < m) {
      p.A(i, i + 1) = p.A(i + 1, i) = -1.0 / h;
      p.B(i, i + 1) = p.B(i + 1, i) = -1.0 / h;
    }
  }
  return p;
}

}  // namespace

double coercivity_estimate(double L, const Grid1D& g, CoercivityForm form) {
  if (!(L > 0)) throw std::invalid_argument("coercivity_estimate: L must be positive");
  const Pencil p = coercivity_pencil(L, g, form);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(p.A, p.B, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("coercivity_estimate: eigensolver failed");
  return es.eigenvalues().minCoeff();
}

double coercivity_estimate(double L, CoercivityForm form) {
  const double X = 40.0 * std::max(L, 1.0);
  return coercivity_estimate(L, Grid1D(-X, X, 4001), form);
}

double coercivity_quotient(double L, const Grid1D& g, const RealField& z, CoercivityForm form) {
  const double cpot = form == CoercivityForm::derived ? 0.5 / (L * L) : 0.5 / L;
  double kin = 0, pot = 0, ref = 0;
  for (int i = 0; i + 1 < g.n; ++i) {
    const double dz = (z[static_cast<size_t>(i + 1)] - z[static_cast<size_t>(i)]) / g.h;
    kin += g.h * dz * dz;
  }
  for (int i = 0; i < g.n; ++i) {
    const double s = 1.0 / std::cosh(g.x(i) / L);
    const double z2 = z[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
    pot += g.h * s * s * z2;
    ref += g.h * s * s * s * s * z2;
  }
  return (kin - cpot * pot) / (kin + ref / L);
}

}  // namespace nld
