#pragma once

#include <array>

#include "nld/grid.hpp"

namespace nld {

enum class Repr { lab_uv, spinor_psi };

/// Four real component fields, ordered (11, 12, 21, 22): for a spinor pair
/// psi_j = phi_j1 + i phi_j2; for the lab pair (Re u, Im u, Re v, Im v).
struct Real4 {
  std::array<RealField, 4> q;

  Real4() = default;
  explicit Real4(size_t n) { for (auto& f : q) f.assign(n, 0.0); }
  size_t size() const { return q[0].size(); }
  RealField& operator[](size_t k) { return q[k]; }
  const RealField& operator[](size_t k) const { return q[k]; }
};

Real4 to_real4(const ComplexField& z1, const ComplexField& z2);
void from_real4(const Real4& r, ComplexField& z1, ComplexField& z2);
ComplexField complex_component(const Real4& r, int j);  // j = 0 or 1
double max_abs(const Real4& r);
bool all_finite(const Real4& r);

/// Two complex fields on a 1D grid, either (u, v) or (psi1, psi2).
struct SpinorState1D {
  Grid1D grid;
  Repr repr = Repr::spinor_psi;
  ComplexField c1, c2;
  double t = 0.0;

  SpinorState1D() = default;
  SpinorState1D(Grid1D g, Repr r, ComplexField a, ComplexField b, double time = 0.0);
  Real4 real4() const { return to_real4(c1, c2); }
  static SpinorState1D from_real4(const Grid1D& g, Repr r, const Real4& q, double time);
};

/// Radial reduction: (phi11, phi12) even across r = 0, (phi21, phi22) odd.
struct RadialSpinorState {
  RadialGrid grid;
  Real4 phi;
  double t = 0.0;
};

}  // namespace nld
