#include "nld/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace nld {

double SolitonParams::gamma() const { return std::sqrt(1.0 - omega * omega); }

cx soliton_profile(double omega, double x) {
  if (!(std::abs(omega) < 1.0)) throw std::invalid_argument("soliton: |omega| must be < 1");
  const double g = std::sqrt(1.0 - omega * omega);
  const double y = g * x;
  if (std::abs(y) > 350.0) return {0.0, 0.0};
  // gamma / (A cosh + i B sinh) = gamma (A - i B tanh) sech / (A^2 + B^2 tanh^2)
  const double a = std::sqrt(1.0 + omega);
  const double b = std::sqrt(1.0 - omega);
  const double th = std::tanh(y);
  const double sech = 1.0 / std::cosh(y);
  const double den = a * a + b * b * th * th;
  return cx(g * a * sech / den, -g * b * th * sech / den);
}

SpinorState1D thirring_soliton(const SolitonParams& p, const Grid1D& grid) {
  if (!(std::abs(p.omega) < 1.0)) throw std::invalid_argument("thirring_soliton: |omega| must be < 1");
  ComplexField u(static_cast<size_t>(grid.n)), v(u.size());
  const cx phase = std::polar(1.0, p.omega * p.t + p.alpha);
  for (int i = 0; i < grid.n; ++i) {
    const cx U = soliton_profile(p.omega, grid.x(i) + p.x0);
    u[static_cast<size_t>(i)] = U * phase;
    v[static_cast<size_t>(i)] = std::conj(U) * phase;
  }
  return SpinorState1D(grid, Repr::lab_uv, std::move(u), std::move(v), p.t);
}

double soliton_charge(double omega) { return 2.0 * std::acos(omega); }

void t_transform(const ComplexField& u, const ComplexField& v, ComplexField& psi1, ComplexField& psi2) {
  if (u.size() != v.size()) throw std::invalid_argument("t_transform: size mismatch");
  const cx I(0.0, 1.0);
  psi1.resize(u.size());
  psi2.resize(u.size());
  for (size_t k = 0; k < u.size(); ++k) {
    psi1[k] = I * (v[k] - u[k]);
    psi2[k] = -(u[k] + v[k]);
  }
}

void t_transform_inverse(const ComplexField& psi1, const ComplexField& psi2, ComplexField& u, ComplexField& v) {
  if (psi1.size() != psi2.size()) throw std::invalid_argument("t_transform_inverse: size mismatch");
  const cx I(0.0, 1.0);
  u.resize(psi1.size());
  v.resize(psi1.size());
  for (size_t k = 0; k < psi1.size(); ++k) {
    u[k] = 0.5 * (I * psi1[k] - psi2[k]);
    v[k] = 0.5 * (-I * psi1[k] - psi2[k]);
  }
}

SpinorState1D t_transform(const SpinorState1D& lab) {
  if (lab.repr != Repr::lab_uv) throw std::invalid_argument("t_transform: state must be lab_uv");
  ComplexField p1, p2;
  t_transform(lab.c1, lab.c2, p1, p2);
  return SpinorState1D(lab.grid, Repr::spinor_psi, std::move(p1), std::move(p2), lab.t);
}

SpinorState1D t_transform_inverse(const SpinorState1D& spinor) {
  if (spinor.repr != Repr::spinor_psi) throw std::invalid_argument("t_transform_inverse: state must be spinor_psi");
  ComplexField u, v;
  t_transform_inverse(spinor.c1, spinor.c2, u, v);
  return SpinorState1D(spinor.grid, Repr::lab_uv, std::move(u), std::move(v), spinor.t);
}

SpinorState1D massless_free(const Profile& u0, const Profile& v0, double t, const Grid1D& grid) {
  ComplexField u(static_cast<size_t>(grid.n)), v(u.size());
  double peak = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    u[static_cast<size_t>(i)] = u0(x - t);
    v[static_cast<size_t>(i)] = v0(x + t);
    peak = std::max({peak, std::abs(u[static_cast<size_t>(i)]), std::abs(v[static_cast<size_t>(i)])});
  }
  const size_t last = u.size() - 1;
  const double edge = std::max({std::abs(u[0]), std::abs(v[0]), std::abs(u[last]), std::abs(v[last])});
  if (edge > 1e-12 * peak) throw std::domain_error("massless_free: profile support reaches the grid boundary");
  return SpinorState1D(grid, Repr::lab_uv, std::move(u), std::move(v), t);
}

}  // namespace nld
