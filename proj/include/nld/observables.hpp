#pragma once

#include <array>
#include <optional>
#include <string>

#include "nld/dynamics.hpp"
#include "nld/state.hpp"

namespace nld {

double charge(const SpinorState1D& s);
double charge(const RadialSpinorState& s, Measure measure = Measure::spherical);
/// Line measure in 1D, spherical measure in the radial case.
double charge(const DiracSystem& sys, const Real4& s);

/// Conserved lab-frame Hamiltonian
///   H = Im int (u_x ubar - v_x vbar) - 2 m Re int u vbar + int W.
/// Requires a model with a real potential.
double hamiltonian_1d(const Grid1D& g, const ComplexField& u, const ComplexField& v, const NonlinearityModel& model,
                      double m);
double hamiltonian_1d(const SpinorState1D& s, const NonlinearityModel& model, double m);
/// P = Im int (u ubar_x + v vbar_x).
double momentum_1d(const Grid1D& g, const ComplexField& u, const ComplexField& v);
double momentum_1d(const SpinorState1D& s);

/// Soler energy with alpha = -sigma^2, beta = sigma^3:
///   E = 2 Re int conj(psi1) psi2_x + m int s - int G(s), s = |psi1|^2 - |psi2|^2.
double energy_psi(const SpinorState1D& s, const NonlinearityModel& model, double m);
/// Radial Soler energy, E = int r^2 [m s + Re(conj(phi1) D phi2 - conj(phi2) phi1_r) - G(s)] dr.
double energy_radial(const RadialSpinorState& s, const NonlinearityModel& model, double m);

/// The conserved energy of the system if one is known: lab models with a real
/// potential, spinor images of such models, and Soler models. Empty otherwise.
std::optional<double> conserved_energy(const DiracSystem& sys, const Real4& s);

enum class RegionKind { whole, log_window, exterior_box, ball, fixed_interval };

struct Region {
  RegionKind kind = RegionKind::whole;
  double b = 0.0;  // exterior_box: |x| >= (1 + b) t
  double R = 0.0;  // ball radius
  double lo = 0.0, hi = 0.0;
  std::string label() const;
};

/// t / log^2 t for t >= 10.
double log_window_half_width(double t);
/// Throws std::domain_error if the region is undefined at time t.
bool region_contains(const Region& rg, double x, double t);
/// Sharp node-indicator mass; radial states use the spherical measure.
double region_mass(const SpinorState1D& s, const Region& rg, double t);
double region_mass(const RadialSpinorState& s, const Region& rg, double t);
double region_mass(const DiracSystem& sys, const Real4& s, const Region& rg, double t);

/// max_c ||f_c(x) - p_c f_c(-x)||_inf / (1 + ||f_c||_inf) where p_c = -1 for
/// odd and +1 for even expected parity. Requires a symmetric grid.
double parity_defect(const Grid1D& g, const Real4& s, const std::array<Parity, 4>& expected);
/// All four components expected odd.
double parity_defect(const SpinorState1D& s);

}  // namespace nld
