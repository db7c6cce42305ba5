#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nld {

using cx = std::complex<double>;

enum class Arity { lab_uv, spinor_psi, radial_phi };

std::string to_string(Arity a);

/// The four independent Wirtinger variables (z1, conj z1, z2, conj z2).
struct Quad {
  cx a, b, c, d;
};

inline Quad quad_of(cx z1, cx z2) { return {z1, std::conj(z1), z2, std::conj(z2)}; }

struct GradPair {
  cx w1, w2;
};

/// jac[j][k] = d W_{j+1} / d (a, b, c, d)[k].
using Jacobian = std::array<std::array<cx, 4>, 2>;

/// Forward-mode dual number with four partials; used to get exact Jacobians
/// of the polynomial gradients.
struct Dual4 {
  cx v;
  std::array<cx, 4> d{};

  Dual4() = default;
  Dual4(cx value) : v(value) {}  // NOLINT implicit constant
  Dual4(double value) : v(value) {}  // NOLINT
  static Dual4 var(cx value, int k) {
    Dual4 x(value);
    x.d[static_cast<size_t>(k)] = 1.0;
    return x;
  }
};

inline Dual4 operator+(const Dual4& x, const Dual4& y) {
  Dual4 r(x.v + y.v);
  for (size_t k = 0; k < 4; ++k) r.d[k] = x.d[k] + y.d[k];
  return r;
}
inline Dual4 operator-(const Dual4& x, const Dual4& y) {
  Dual4 r(x.v - y.v);
  for (size_t k = 0; k < 4; ++k) r.d[k] = x.d[k] - y.d[k];
  return r;
}
inline Dual4 operator-(const Dual4& x) {
  Dual4 r(-x.v);
  for (size_t k = 0; k < 4; ++k) r.d[k] = -x.d[k];
  return r;
}
inline Dual4 operator*(const Dual4& x, const Dual4& y) {
  Dual4 r(x.v * y.v);
  for (size_t k = 0; k < 4; ++k) r.d[k] = x.d[k] * y.v + x.v * y.d[k];
  return r;
}

/// x^n for integer n >= 0 by repeated multiplication (exact for polynomials).
template <class T>
T ipow(const T& x, int n) {
  T r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

/// Nonlinearity: gradients (W1, W2) as polynomials in (a,b,c,d), their exact
/// Jacobian, and optionally the potential W and the Soler antiderivative G.
struct NonlinearityModel {
  std::string name;
  Arity arity = Arity::lab_uv;
  int power = 3;
  double coupling = 1.0;
  std::function<GradPair(const Quad&)> grad;
  std::function<Jacobian(const Quad&)> jacobian;
  std::function<cx(const Quad&)> potential;  // empty when no potential is known
  std::function<double(double)> soler_G;     // G(s) = int_0^s g, Soler form only
  std::vector<double> g_coeffs;              // g(s) = sum_k g_coeffs[k] s^(k+1), Soler form only
  std::shared_ptr<const NonlinearityModel> lab_source;  // set by models::transformed_lab

  bool has_potential() const { return static_cast<bool>(potential); }
  bool is_soler() const { return static_cast<bool>(soler_G); }
  GradPair eval_grad(cx z1, cx z2) const { return grad(quad_of(z1, z2)); }
  cx eval_W(cx z1, cx z2) const;
};

/// Builds a model from a kernel providing `template <class T> std::array<T,2> grad(T,T,T,T) const`.
template <class K>
NonlinearityModel model_from_kernel(std::string name, Arity arity, int power, double coupling, K kernel) {
  NonlinearityModel m;
  m.name = std::move(name);
  m.arity = arity;
  m.power = power;
  m.coupling = coupling;
  m.grad = [kernel](const Quad& q) {
    const auto g = kernel.template grad<cx>(q.a, q.b, q.c, q.d);
    return GradPair{g[0], g[1]};
  };
  m.jacobian = [kernel](const Quad& q) {
    const auto g = kernel.template grad<Dual4>(Dual4::var(q.a, 0), Dual4::var(q.b, 1), Dual4::var(q.c, 2),
                                               Dual4::var(q.d, 3));
    return Jacobian{g[0].d, g[1].d};
  };
  return m;
}

namespace models {

NonlinearityModel zero(Arity arity = Arity::lab_uv);
/// W = c |u|^2 |v|^2.
NonlinearityModel thirring(double c);
/// Coupling for which the closed-form solitary wave solves the lab system with m = 1.
constexpr double kThirringCalibratedCoupling = 2.0;
/// W = c (ubar v + u vbar)^2 / 2.
NonlinearityModel gross_neveu(double c = 1.0);
/// W = c (|u|^2 + |v|^2) |u|^2 |v|^2.
NonlinearityModel bec_resonance(double c = 1.0);
/// (W1, W2) = ((psi1^2 + psi2^2) conj psi1 / 4, (psi1^2 + psi2^2) conj psi2 / 4).
NonlinearityModel thirring_psi();
/// W = conj(psi1)^4 + conj(psi2)^4 - 6 conj(psi1)^2 conj(psi2)^2, scaled by c.
NonlinearityModel quartic_harmonic(double c = 1.0);
/// W1 = g(s) psi1, W2 = g(s) psi2 with s = |psi1|^2 - |psi2|^2 and
/// g(s) = sum_k g[k] s^(k+1).
NonlinearityModel soler(std::vector<double> g, Arity arity = Arity::spinor_psi);
/// Radial W_jk = g(a11 phi11^2 + a12 phi12^2 + a21 phi21^2 + a22 phi22^2) phi_jk.
NonlinearityModel power_diag(std::array<double, 4> a11_a12_a21_a22, std::vector<double> g);
/// Spinor-frame image of a lab model under psi = T (u, v):
/// W1hat = i (W_u - W_v), W2hat = -(W_u + W_v) evaluated at (u, v) = T^{-1} psi.
NonlinearityModel transformed_lab(const NonlinearityModel& lab);
/// Two-parameter family W1 = -(a1/a2) X^m + (b1/b2) Y^n, W2 = X^m + Y^n,
/// X = a1 psi1 + a2 psi2, Y = b1 conj psi1 + b2 conj psi2. Checker tests only.
NonlinearityModel isotropic_pair(int m, int n, std::array<cx, 2> a, std::array<cx, 2> b);

}  // namespace models

/// Parses "thirring", "thirring:2", "gross_neveu", "bec_resonance", "thirring_psi",
/// "quartic_harmonic", "soler:g1[,g2...]", "soler_radial:g1[,...]",
/// "power_diag:a11,a12,a21,a22:g1[,...]", "zero" (optionally "zero_radial", "zero_spinor"),
/// and "lab:<lab model spec>" for the spinor-frame image of a lab model.
NonlinearityModel builtin(const std::string& spec);

// ---------------------------------------------------------------------------
// Admissibility checkers

struct GaugeSymmetryResult {
  bool gauge_ok = false;
  bool symmetry_ok = false;
  double gauge_defect = 0.0;     // max |W(e^{i th} u, e^{i th} v) - W(u,v)| / scale
  double symmetry_defect = 0.0;  // max |W(v,u) - W(u,v)| / scale
  int samples = 0;
};

struct HarmonicResult {
  bool ok = false;
  double worst_defect = 0.0;         // max over combinations and samples, unscaled
  double worst_scaled = 0.0;         // max of defect / scale
  std::array<double, 4> combo{};     // per-combination unscaled max
  double max_half_charge_split = 0;  // max |(|psi1|^2 - |psi2|^2) / 2| over the same samples
  int samples = 0;
};

struct BdResult {
  bool ok = false;
  double defect = 0.0;
  int samples = 0;
};

struct GrowthResult {
  bool ok = false;
  double min_slope = 0.0;
  double max_constant = 0.0;
};

struct PolynomialResult {
  bool ok = false;
  double defect = 0.0;
};

struct AdmissibilityReport {
  std::string model;
  bool has_potential = false;
  bool gauge_ok = false, symmetry_ok = false, polynomial_ok = false;
  bool harmonic_ok = false, bd_dependence_ok = false, growth_ok = false;
  double gauge_defect = 0, symmetry_defect = 0, polynomial_defect = 0;
  double harmonic_defect = 0, bd_defect = 0, growth_slope = 0;
  std::array<double, 4> harmonic_combo{};
  int samples = 0;
};

/// Local tolerance scale 1 + |state|^p.
double local_scale(cx z1, cx z2, int p);

GaugeSymmetryResult check_gauge_symmetry(const NonlinearityModel& m, int n_samples, std::uint64_t seed);
/// Combinations, in order: d_a W2 + d_c W1, d_b W2 - d_d W1, d_c W2 - d_a W1, d_d W2 + d_b W1.
HarmonicResult check_harmonic(const NonlinearityModel& m, int n_samples, std::uint64_t seed);
BdResult check_bd_dependence(const NonlinearityModel& m, int n_samples, std::uint64_t seed);
GrowthResult check_growth(const NonlinearityModel& m, int p_expected);
PolynomialResult check_polynomial(const NonlinearityModel& m, int n_samples, std::uint64_t seed);
AdmissibilityReport check_admissibility(const NonlinearityModel& m, int n_samples, std::uint64_t seed);

}  // namespace nld
