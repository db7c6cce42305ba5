#pragma once

#include <functional>

#include "nld/state.hpp"

namespace nld {

struct SolitonParams {
  double omega = 0.0;
  double x0 = 0.0;
  double alpha = 0.0;
  double t = 0.0;
  double gamma() const;
};

/// U_omega(x) in rationalised form; exactly 0 once |gamma x| > 350.
cx soliton_profile(double omega, double x);

/// Lab-frame standing wave u = U(x+x0) e^{i(wt+a)}, v = conj(U)(x+x0) e^{i(wt+a)},
/// a solution of the lab system with m = 1 and the calibrated Thirring coupling.
SpinorState1D thirring_soliton(const SolitonParams& p, const Grid1D& grid);

/// Closed-form charge 2 arccos(omega).
double soliton_charge(double omega);

/// psi = T (u, v) with T = i [[-1, 1], [i, i]], and its inverse.
void t_transform(const ComplexField& u, const ComplexField& v, ComplexField& psi1, ComplexField& psi2);
void t_transform_inverse(const ComplexField& psi1, const ComplexField& psi2, ComplexField& u, ComplexField& v);
SpinorState1D t_transform(const SpinorState1D& lab);
SpinorState1D t_transform_inverse(const SpinorState1D& spinor);

using Profile = std::function<cx(double)>;

/// u(t,x) = u0(x - t), v(t,x) = v0(x + t). Throws std::domain_error when the
/// translated profiles are not negligible (1e-12 of the peak) at the grid ends.
SpinorState1D massless_free(const Profile& u0, const Profile& v0, double t, const Grid1D& grid);

}  // namespace nld
