#include "nld/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nld {

std::string to_string(Arity a) {
  switch (a) {
    case Arity::lab_uv: return "lab_uv";
    case Arity::spinor_psi: return "spinor_psi";
    case Arity::radial_phi: return "radial_phi";
  }
  return "?";
}

cx NonlinearityModel::eval_W(cx z1, cx z2) const {
  if (!potential) throw std::logic_error("model " + name + " has no potential W");
  return potential(quad_of(z1, z2));
}

namespace {

const cx kI(0.0, 1.0);

template <class T>
T horner_g(const std::vector<double>& g, const T& s) {
  T acc(0.0);
  for (size_t k = g.size(); k-- > 0;) acc = (acc + T(g[k])) * s;
  return acc;
}

struct ZeroK {
  template <class T>
  std::array<T, 2> grad(T, T, T, T) const {
    return {T(0.0), T(0.0)};
  }
};

struct ThirringK {
  double k;
  template <class T>
  std::array<T, 2> grad(T a, T b, T c, T d) const {
    return {T(k) * a * c * d, T(k) * a * b * c};
  }
  template <class T>
  T W(T a, T b, T c, T d) const {
    return T(k) * a * b * c * d;
  }
};

struct GrossNeveuK {
  double k;
  template <class T>
  std::array<T, 2> grad(T a, T b, T c, T d) const {
    const T s = b * c + a * d;
    return {T(k) * s * c, T(k) * s * a};
  }
  template <class T>
  T W(T a, T b, T c, T d) const {
    const T s = b * c + a * d;
    return T(0.5 * k) * s * s;
  }
};

struct BecK {
  double k;
  template <class T>
  std::array<T, 2> grad(T a, T b, T c, T d) const {
    const T ab = a * b, cd = c * d;
    return {T(k) * a * cd * (T(2.0) * ab + cd), T(k) * c * ab * (ab + T(2.0) * cd)};
  }
  template <class T>
  T W(T a, T b, T c, T d) const {
    const T ab = a * b, cd = c * d;
    return T(k) * (ab + cd) * ab * cd;
  }
};

struct ThirringPsiK {
  template <class T>
  std::array<T, 2> grad(T a, T b, T c, T d) const {
    const T s = T(0.25) * (a * a + c * c);
    return {s * b, s * d};
  }
};

struct QuarticK {
  double k;
  template <class T>
  std::array<T, 2> grad(T, T b, T, T d) const {
    return {T(k) * (T(4.0) * b * b * b - T(12.0) * b * d * d), T(k) * (T(4.0) * d * d * d - T(12.0) * b * b * d)};
  }
  template <class T>
  T W(T, T b, T, T d) const {
    return T(k) * (b * b * b * b + d * d * d * d - T(6.0) * b * b * d * d);
  }
};

struct SolerK {
  std::vector<double> g;
  template <class T>
  std::array<T, 2> grad(T a, T b, T c, T d) const {
    const T gs = horner_g(g, a * b - c * d);
    return {gs * a, gs * c};
  }
};

struct PowerDiagK {
  std::array<double, 4> A;
  std::vector<double> g;
  template <class T>
  std::array<T, 2> grad(T a, T b, T c, T d) const {
    const T half(0.5), mhalf_i(cx(0.0, -0.5));
    const T p11 = half * (a + b), p12 = mhalf_i * (a - b);
    const T p21 = half * (c + d), p22 = mhalf_i * (c - d);
    const T s = T(A[0]) * p11 * p11 + T(A[1]) * p12 * p12 + T(A[2]) * p21 * p21 + T(A[3]) * p22 * p22;
    const T gs = horner_g(g, s);
    return {gs * a, gs * c};
  }
};

struct IsotropicK {
  int m, n;
  std::array<cx, 2> a, b;
  template <class T>
  std::array<T, 2> grad(T za, T zb, T zc, T zd) const {
    const T X = T(a[0]) * za + T(a[1]) * zc;
    const T Y = T(b[0]) * zb + T(b[1]) * zd;
    const T Xm = ipow(X, m), Yn = ipow(Y, n);
    return {T(-a[0] / a[1]) * Xm + T(b[0] / b[1]) * Yn, Xm + Yn};
  }
};

template <class K>
void attach_potential(NonlinearityModel& m, K kernel) {
  m.potential = [kernel](const Quad& q) { return kernel.template W<cx>(q.a, q.b, q.c, q.d); };
}

int soler_power(const std::vector<double>& g) {
  for (size_t k = 0; k < g.size(); ++k)
    if (g[k] != 0.0) return static_cast<int>(2 * k + 3);
  return 3;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty entry in list '" + s + "'");
    size_t pos = 0;
    const double x = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    v.push_back(x);
  }
  return v;
}

}  // namespace

namespace models {

NonlinearityModel zero(Arity arity) {
  auto m = model_from_kernel("zero", arity, 3, 0.0, ZeroK{});
  m.potential = [](const Quad&) { return cx(0.0); };
  return m;
}

NonlinearityModel thirring(double c) {
  ThirringK k{c};
  auto m = model_from_kernel("thirring", Arity::lab_uv, 3, c, k);
  attach_potential(m, k);
  return m;
}

NonlinearityModel gross_neveu(double c) {
  GrossNeveuK k{c};
  auto m = model_from_kernel("gross_neveu", Arity::lab_uv, 3, c, k);
  attach_potential(m, k);
  return m;
}

NonlinearityModel bec_resonance(double c) {
  BecK k{c};
  auto m = model_from_kernel("bec_resonance", Arity::lab_uv, 5, c, k);
  attach_potential(m, k);
  return m;
}

NonlinearityModel thirring_psi() { return model_from_kernel("thirring_psi", Arity::spinor_psi, 3, 1.0, ThirringPsiK{}); }

NonlinearityModel quartic_harmonic(double c) {
  QuarticK k{c};
  auto m = model_from_kernel("quartic_harmonic", Arity::spinor_psi, 3, c, k);
  attach_potential(m, k);
  return m;
}

NonlinearityModel soler(std::vector<double> g, Arity arity) {
  if (arity == Arity::lab_uv) throw std::invalid_argument("soler: spinor or radial arity required");
  if (g.empty()) throw std::invalid_argument("soler: g needs at least one coefficient");
  auto m = model_from_kernel(arity == Arity::radial_phi ? "soler_radial" : "soler", arity, soler_power(g), g[0],
                             SolerK{g});
  m.g_coeffs = g;
  m.soler_G = [g](double s) {
    double acc = 0.0;
    for (size_t k = g.size(); k-- > 0;) acc = (acc + g[k] / static_cast<double>(k + 2)) * s;
    return acc * s;
  };
  return m;
}

NonlinearityModel power_diag(std::array<double, 4> A, std::vector<double> g) {
  if (g.empty()) throw std::invalid_argument("power_diag: g needs at least one coefficient");
  return model_from_kernel("power_diag", Arity::radial_phi, soler_power(g), g[0], PowerDiagK{A, g});
}

NonlinearityModel isotropic_pair(int m, int n, std::array<cx, 2> a, std::array<cx, 2> b) {
  if (m < 1 || n < 1) throw std::invalid_argument("isotropic_pair: exponents must be positive");
  if (a[1] == cx(0.0) || b[1] == cx(0.0)) throw std::invalid_argument("isotropic_pair: a2 and b2 must be nonzero");
  return model_from_kernel("isotropic_pair", Arity::spinor_psi, std::min(m, n), 1.0, IsotropicK{m, n, a, b});
}

NonlinearityModel transformed_lab(const NonlinearityModel& lab) {
  if (lab.arity != Arity::lab_uv) throw std::invalid_argument("transformed_lab: lab model required");
  auto src = std::make_shared<const NonlinearityModel>(lab);
  const cx I(0.0, 1.0);
  auto to_lab = [I](const Quad& q) {
    return Quad{0.5 * (I * q.a - q.c), 0.5 * (-I * q.b - q.d), 0.5 * (-I * q.a - q.c), 0.5 * (I * q.b - q.d)};
  };
  NonlinearityModel m;
  m.name = "lab:" + lab.name;
  m.arity = Arity::spinor_psi;
  m.power = lab.power;
  m.coupling = lab.coupling;
  m.lab_source = src;
  m.grad = [src, to_lab, I](const Quad& q) {
    const GradPair w = src->grad(to_lab(q));
    return GradPair{I * (w.w1 - w.w2), -(w.w1 + w.w2)};
  };
  m.jacobian = [src, to_lab, I](const Quad& q) {
    const Jacobian jl = src->jacobian(to_lab(q));
    // d(u, ubar, v, vbar) / d(a, b, c, d)
    const std::array<std::array<cx, 4>, 4> C{{{0.5 * I, 0.0, -0.5, 0.0},
                                              {0.0, -0.5 * I, 0.0, -0.5},
                                              {-0.5 * I, 0.0, -0.5, 0.0},
                                              {0.0, 0.5 * I, 0.0, -0.5}}};
    Jacobian lab_psi{};
    for (size_t j = 0; j < 2; ++j)
      for (size_t k = 0; k < 4; ++k)
        for (size_t l = 0; l < 4; ++l) lab_psi[j][k] += jl[j][l] * C[l][k];
    Jacobian out{};
    for (size_t k = 0; k < 4; ++k) {
      out[0][k] = I * (lab_psi[0][k] - lab_psi[1][k]);
      out[1][k] = -(lab_psi[0][k] + lab_psi[1][k]);
    }
    return out;
  };
  return m;
}

}  // namespace models

NonlinearityModel builtin(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto coupling = [&](double dflt) {
    if (rest.empty()) return dflt;
    const auto v = parse_list(rest);
    if (v.size() != 1) throw std::invalid_argument("model '" + name + "' takes one coupling");
    return v[0];
  };
  if (name == "lab") return models::transformed_lab(builtin(rest));
  if (name == "zero") return models::zero(Arity::lab_uv);
  if (name == "zero_spinor") return models::zero(Arity::spinor_psi);
  if (name == "zero_radial") return models::zero(Arity::radial_phi);
  if (name == "thirring") return models::thirring(coupling(models::kThirringCalibratedCoupling));
  if (name == "gross_neveu") return models::gross_neveu(coupling(1.0));
  if (name == "bec_resonance") return models::bec_resonance(coupling(1.0));
  if (name == "thirring_psi") {
    if (!rest.empty()) throw std::invalid_argument("thirring_psi takes no parameters");
    return models::thirring_psi();
  }
  if (name == "quartic_harmonic") return models::quartic_harmonic(coupling(1.0));
  if (name == "soler") return models::soler(rest.empty() ? std::vector<double>{1.0} : parse_list(rest));
  if (name == "soler_radial")
    return models::soler(rest.empty() ? std::vector<double>{1.0} : parse_list(rest), Arity::radial_phi);
  if (name == "power_diag") {
    const auto c2 = rest.find(':');
    const auto a = parse_list(rest.substr(0, c2));
    if (a.size() != 4) throw std::invalid_argument("power_diag needs four diagonal entries");
    const auto g = c2 == std::string::npos ? std::vector<double>{1.0} : parse_list(rest.substr(c2 + 1));
    return models::power_diag({a[0], a[1], a[2], a[3]}, g);
  }
  throw std::invalid_argument("unknown nonlinearity model: " + spec);
}

// ---------------------------------------------------------------------------

double local_scale(cx z1, cx z2, int p) {
  const double r = std::sqrt(std::norm(z1) + std::norm(z2));
  return 1.0 + std::pow(r, p);
}

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> rad{0.0, 1.5};
  std::uniform_real_distribution<double> ang{0.0, 2.0 * M_PI};
  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  cx z() { return std::polar(rad(rng), ang(rng)); }
  double theta() { return ang(rng); }
};

double gdiff(const GradPair& x, const GradPair& y) { return std::max(std::abs(x.w1 - y.w1), std::abs(x.w2 - y.w2)); }

// 4th-order central difference in one independent Wirtinger variable; exact
// for polynomial dependence of degree <= 4.
std::array<GradPair, 4> partials(const NonlinearityModel& m, const Quad& q, double step) {
  std::array<GradPair, 4> out{};
  for (int k = 0; k < 4; ++k) {
    auto shifted = [&](double s) {
      Quad p = q;
      cx* v = k == 0 ? &p.a : k == 1 ? &p.b : k == 2 ? &p.c : &p.d;
      *v += s;
      return m.grad(p);
    };
    const GradPair f2 = shifted(2 * step), f1 = shifted(step), m1 = shifted(-step), m2 = shifted(-2 * step);
    const double inv = 1.0 / (12.0 * step);
    out[static_cast<size_t>(k)] = {(-f2.w1 + 8.0 * f1.w1 - 8.0 * m1.w1 + m2.w1) * inv,
                                   (-f2.w2 + 8.0 * f1.w2 - 8.0 * m1.w2 + m2.w2) * inv};
  }
  return out;
}

}  // namespace

GaugeSymmetryResult check_gauge_symmetry(const NonlinearityModel& m, int n_samples, std::uint64_t seed) {
  if (!m.has_potential()) throw std::invalid_argument("check_gauge_symmetry: model " + m.name + " has no potential");
  Sampler s(seed);
  GaugeSymmetryResult r;
  r.samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const cx u = s.z(), v = s.z();
    const cx rot = std::polar(1.0, s.theta());
    const double scale = local_scale(u, v, m.power + 1);
    const cx w = m.eval_W(u, v);
    r.gauge_defect = std::max(r.gauge_defect, std::abs(m.eval_W(rot * u, rot * v) - w) / scale);
    r.symmetry_defect = std::max(r.symmetry_defect, std::abs(m.eval_W(v, u) - w) / scale);
  }
  r.gauge_ok = r.gauge_defect <= 1e-12;
  r.symmetry_ok = r.symmetry_defect <= 1e-12;
  return r;
}

HarmonicResult check_harmonic(const NonlinearityModel& m, int n_samples, std::uint64_t seed) {
  Sampler s(seed);
  HarmonicResult r;
  r.samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const cx z1 = s.z(), z2 = s.z();
    const Quad q = quad_of(z1, z2);
    const double amp = std::sqrt(std::norm(z1) + std::norm(z2));
    const auto P = partials(m, q, 1e-3 * (1.0 + amp));
    // P[k] holds (d W1, d W2) with respect to variable k = a, b, c, d.
    const std::array<double, 4> combo{std::abs(P[0].w2 + P[2].w1), std::abs(P[1].w2 - P[3].w1),
                                      std::abs(P[2].w2 - P[0].w1), std::abs(P[3].w2 + P[1].w1)};
    const double scale = local_scale(z1, z2, m.power - 1);
    for (size_t k = 0; k < 4; ++k) {
      r.combo[k] = std::max(r.combo[k], combo[k]);
      r.worst_defect = std::max(r.worst_defect, combo[k]);
      r.worst_scaled = std::max(r.worst_scaled, combo[k] / scale);
    }
    r.max_half_charge_split = std::max(r.max_half_charge_split, 0.5 * std::abs(std::norm(z1) - std::norm(z2)));
  }
  r.ok = r.worst_scaled <= 1e-6;
  return r;
}

BdResult check_bd_dependence(const NonlinearityModel& m, int n_samples, std::uint64_t seed) {
  Sampler s(seed);
  BdResult r;
  r.samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const cx z1 = s.z(), z2 = s.z();
    const Quad q = quad_of(z1, z2);
    Quad p = q;
    p.a += s.z();
    p.c += s.z();
    const double scale = local_scale(z1, z2, m.power);
    r.defect = std::max(r.defect, gdiff(m.grad(p), m.grad(q)) / scale);
  }
  r.ok = r.defect <= 1e-12;
  return r;
}

GrowthResult check_growth(const NonlinearityModel& m, int p_expected) {
  Sampler smp(0x5eed);
  GrowthResult r;
  r.min_slope = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int dir = 0; dir < 8; ++dir) {
    cx z1 = smp.z(), z2 = smp.z();
    const double nrm = std::sqrt(std::norm(z1) + std::norm(z2));
    z1 /= nrm;
    z2 /= nrm;
    std::vector<double> lx, ly;
    for (int k = -8; k <= 0; ++k) {
      const double s = std::ldexp(1.0, k);
      const GradPair g = m.eval_grad(s * z1, s * z2);
      const double mag = std::abs(g.w1) + std::abs(g.w2);
      if (mag == 0.0) continue;
      lx.push_back(std::log(s));
      ly.push_back(std::log(mag));
      r.max_constant = std::max(r.max_constant, mag / std::pow(s, p_expected));
    }
    if (lx.size() < 2) continue;
    any = true;
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    r.min_slope = std::min(r.min_slope, (n * sxy - sx * sy) / (n * sxx - sx * sx));
  }
  if (!any) {
    // Identically zero along every ray: the bound holds with C = 0.
    r.min_slope = static_cast<double>(p_expected);
    r.ok = true;
    return r;
  }
  r.ok = r.min_slope >= p_expected - 0.1 && std::isfinite(r.max_constant);
  return r;
}

PolynomialResult check_polynomial(const NonlinearityModel& m, int n_samples, std::uint64_t seed) {
  // The 12th finite difference along a complex line vanishes for polynomials of degree <= 11.
  constexpr int order = 12;
  double binom[order + 1];
  binom[0] = 1.0;
  for (int k = 1; k <= order; ++k) binom[k] = binom[k - 1] * (order - k + 1) / k;
  Sampler s(seed);
  PolynomialResult r;
  for (int i = 0; i < n_samples; ++i) {
    const Quad q0 = quad_of(s.z(), s.z());
    const Quad dir{s.z(), s.z(), s.z(), s.z()};
    const double tau = 0.1;
    cx d1 = 0, d2 = 0;
    double mag = 0;
    for (int k = 0; k <= order; ++k) {
      const double t = tau * k;
      const Quad q{q0.a + t * dir.a, q0.b + t * dir.b, q0.c + t * dir.c, q0.d + t * dir.d};
      const GradPair g = m.grad(q);
      const double sign = (order - k) % 2 == 0 ? 1.0 : -1.0;
      d1 += sign * binom[k] * g.w1;
      d2 += sign * binom[k] * g.w2;
      mag += binom[k] * (std::abs(g.w1) + std::abs(g.w2));
    }
    r.defect = std::max(r.defect, std::max(std::abs(d1), std::abs(d2)) / (1.0 + mag));
  }
  r.ok = r.defect <= 1e-9;
  return r;
}

AdmissibilityReport check_admissibility(const NonlinearityModel& m, int n_samples, std::uint64_t seed) {
  AdmissibilityReport rep;
  rep.model = m.name;
  rep.samples = n_samples;
  rep.has_potential = m.has_potential();
  if (m.has_potential()) {
    const auto gs = check_gauge_symmetry(m, n_samples, seed);
    rep.gauge_ok = gs.gauge_ok;
    rep.symmetry_ok = gs.symmetry_ok;
    rep.gauge_defect = gs.gauge_defect;
    rep.symmetry_defect = gs.symmetry_defect;
  }
  const auto poly = check_polynomial(m, n_samples, seed + 1);
  rep.polynomial_ok = poly.ok;
  rep.polynomial_defect = poly.defect;
  const auto h = check_harmonic(m, n_samples, seed + 2);
  rep.harmonic_ok = h.ok;
  rep.harmonic_defect = h.worst_defect;
  rep.harmonic_combo = h.combo;
  const auto bd = check_bd_dependence(m, n_samples, seed + 3);
  rep.bd_dependence_ok = bd.ok;
  rep.bd_defect = bd.defect;
  const auto g = check_growth(m, m.power);
  rep.growth_ok = g.ok;
  rep.growth_slope = g.min_slope;
  return rep;
}

}  // namespace nld
