#include "nld/state.hpp"

#include <cmath>
#include <stdexcept>

namespace nld {

Real4 to_real4(const ComplexField& z1, const ComplexField& z2) {
  if (z1.size() != z2.size()) throw std::invalid_argument("to_real4: component size mismatch");
  Real4 r(z1.size());
  for (size_t i = 0; i < z1.size(); ++i) {
    r.q[0][i] = z1[i].real();
    r.q[1][i] = z1[i].imag();
    r.q[2][i] = z2[i].real();
    r.q[3][i] = z2[i].imag();
  }
  return r;
}

void from_real4(const Real4& r, ComplexField& z1, ComplexField& z2) {
  z1 = complex_component(r, 0);
  z2 = complex_component(r, 1);
}

ComplexField complex_component(const Real4& r, int j) {
  const RealField& re = r.q[static_cast<size_t>(2 * j)];
  const RealField& im = r.q[static_cast<size_t>(2 * j + 1)];
  ComplexField z(re.size());
  for (size_t i = 0; i < re.size(); ++i) z[i] = cx(re[i], im[i]);
  return z;
}

double max_abs(const Real4& r) {
  double m = 0.0;
  for (const auto& f : r.q)
    for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Real4& r) {
  for (const auto& f : r.q)
    if (!all_finite(f)) return false;
  return true;
}

SpinorState1D::SpinorState1D(Grid1D g, Repr r, ComplexField a, ComplexField b, double time)
    : grid(g), repr(r), c1(std::move(a)), c2(std::move(b)), t(time) {
  check_field(c1, static_cast<size_t>(grid.n), "SpinorState1D component 1");
  check_field(c2, static_cast<size_t>(grid.n), "SpinorState1D component 2");
}

SpinorState1D SpinorState1D::from_real4(const Grid1D& g, Repr r, const Real4& q, double time) {
  return SpinorState1D(g, r, complex_component(q, 0), complex_component(q, 1), time);
}

}  // namespace nld
