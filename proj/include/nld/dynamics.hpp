#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nld/algebra.hpp"
#include "nld/nonlinearity.hpp"
#include "nld/state.hpp"

namespace nld {

enum class SystemKind { lab_1d, spinor_1d, radial_3d };

std::string to_string(SystemKind k);
SystemKind system_from_string(const std::string& s);
Arity arity_for(SystemKind k);

/// Everything the semi-discrete right-hand side depends on.
struct DiracSystem {
  SystemKind kind = SystemKind::lab_1d;
  NonlinearityModel model;
  double m = 0.0;
  Grid1D grid;
  RadialGrid rgrid;
  Exec exec = Exec::parallel;

  static DiracSystem lab(Grid1D g, NonlinearityModel model, double m, Exec exec = Exec::parallel);
  static DiracSystem spinor(Grid1D g, NonlinearityModel model, double m, Exec exec = Exec::parallel);
  static DiracSystem radial(RadialGrid g, NonlinearityModel model, double m, Exec exec = Exec::parallel);
  size_t nodes() const;
};

/// Lab frame, components (Re u, Im u, Re v, Im v):
/// u_t = -u_x + i(m v - W1), v_t = v_x + i(m u - W2).
Real4 rhs_lab(const Grid1D& g, const Real4& s, const NonlinearityModel& model, double m, Exec exec = Exec::parallel);
SpinorState1D rhs_lab(const SpinorState1D& s, const NonlinearityModel& model, double m);

/// Spinor frame in real form, components (phi11, phi12, phi21, phi22).
Real4 rhs_spinor(const Grid1D& g, const Real4& s, const NonlinearityModel& model, double m,
                 Exec exec = Exec::parallel);
SpinorState1D rhs_spinor(const SpinorState1D& s, const NonlinearityModel& model, double m);
/// Complex form psi1_t = -i psi2_x - i m psi1 + i W1, psi2_t = i psi1_x + i m psi2 - i W2.
void rhs_spinor_complex(const Grid1D& g, const ComplexField& psi1, const ComplexField& psi2,
                        const NonlinearityModel& model, double m, ComplexField& d1, ComplexField& d2);

/// Radial reduction with D = d/dr + 2/r on the odd components, applied as radial_div.
Real4 rhs_radial(const RadialGrid& g, const Real4& s, const NonlinearityModel& model, double m,
                 Exec exec = Exec::parallel);

/// Linear 1D Dirac flow psi_t = -alpha psi_x - i m beta psi for any 2x2 (alpha, beta).
void rhs_linear_dirac(const Grid1D& g, const ComplexField& psi1, const ComplexField& psi2, const MatrixC& alpha,
                      const MatrixC& beta, double m, ComplexField& d1, ComplexField& d2);

Real4 rhs(const DiracSystem& sys, const Real4& s);

/// Pointwise gradients (W1, W2) of the model.
void gradient_fields(const NonlinearityModel& model, const ComplexField& z1, const ComplexField& z2, ComplexField& w1,
                     ComplexField& w2, Exec exec = Exec::parallel);

/// Pointwise nonlinear source N in psi_t = -alpha psi_x - i m beta psi + N.
/// Lab: N = -i (W1, W2); spinor and radial: N = (i W1, -i W2).
void nonlinear_source(const DiracSystem& sys, const ComplexField& z1, const ComplexField& z2, ComplexField& n1,
                      ComplexField& n2);

/// Largest |f(r_0)| / max|f| over the odd components; small for data that vanish linearly at r = 0.
double radial_origin_parity_defect(const RadialSpinorState& s);

struct IntegrateOptions {
  double dt = 0.02;
  double t_end = 1.0;
  int sample_stride = 1;
  double cfl_fraction = 0.5;
  double boundary_tol = 1e-8;   // relative to the initial charge
  double boundary_width = 10.0; // length of the monitored strip at each outer end
  bool keep_states = true;
  bool check_boundary = true;
};

struct SampleDiagnostics {
  double t = 0.0;
  double boundary_mass = 0.0;
  double max_abs = 0.0;
};

struct Trajectory {
  SystemKind kind = SystemKind::lab_1d;
  Grid1D grid;
  RadialGrid rgrid;
  double dt = 0.0;
  double dt_sample = 0.0;
  std::vector<double> times;
  std::vector<Real4> states;  // empty when keep_states is false
  std::vector<SampleDiagnostics> diagnostics;
};

class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { non_finite, boundary };
  IntegrationError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

using SampleObserver = std::function<void(double t, const Real4& state)>;

/// Charge used for the boundary monitor: line measure in 1D, spherical in the radial case.
double monitor_charge(const DiracSystem& sys, const Real4& s);
double boundary_mass(const DiracSystem& sys, const Real4& s, double width);

/// Classical RK4 from t0 to t_end. Throws std::invalid_argument on a CFL
/// violation or bad options, IntegrationError on non-finite values or
/// boundary contamination.
Trajectory integrate(const DiracSystem& sys, const Real4& initial, double t0, const IntegrateOptions& opt,
                     const SampleObserver& observer = {});

}  // namespace nld
