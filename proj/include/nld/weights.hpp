#pragma once

#include <functional>
#include <optional>
#include <string>

namespace nld {

/// phi and its first three derivatives at one point.
struct WeightValues {
  double d0 = 0, d1 = 0, d2 = 0, d3 = 0;
};

/// Singular coefficient combinations needed by the radial identities.
struct RadialCombos {
  double phi_over_r = 0, phi_over_r2 = 0, phi_over_r3 = 0;
  double d1_over_r = 0, d1_over_r2 = 0, d2_over_r = 0;
};

/// Virial weight with analytic derivatives. Radial weights additionally carry
/// closed forms for the combinations that are singular at r = 0.
struct WeightSpec {
  std::string name;
  std::function<WeightValues(double)> eval;
  std::function<RadialCombos(double)> combos;  // empty for 1D weights

  WeightValues operator()(double x) const { return eval(x); }
  bool has_combos() const { return static_cast<bool>(combos); }
};

namespace weights {

WeightSpec tanh_w();
WeightSpec sech_w();
WeightSpec sech2();
WeightSpec sech4();
/// (1 + sign tanh(x)) / 2 with sign = +1 or -1.
WeightSpec half_step(int sign);
/// x -> amp * w(x / L); amp = L gives L tanh(x/L) from tanh.
WeightSpec scaled(const WeightSpec& w, double L, double amp);
/// Constant weight (all derivatives zero).
WeightSpec constant(double c);
/// r^{3/2} / (1 + r).
WeightSpec r32_over_1pr();
/// r^2 / (1 + r)^4.
WeightSpec r2_over_1pr4();

/// Looks a weight up by name: tanh, sech, sech2, sech4, step_plus, step_minus, r32, r2.
WeightSpec by_name(const std::string& name);

}  // namespace weights

/// Closed forms of the seven coefficient combinations built from r^{3/2}/(1+r).
struct R32Table {
  double d1;              // phi'
  double two_phi_r_m_d1;  // 2 phi / r - phi'
  double phi_over_r;      // phi / r
  double b_even;          // (phi'/r^2 + phi'''/2 - phi''/r) / 2
  double b_odd;           // (2 phi/r^3 + phi'/r^2 + phi'''/2 - phi''/r) / 2
  double c_w1;            // 2 phi/r^2 - phi''/2 - phi'/r
  double c_w2;            // -(phi'' - 2 phi'/r) / 2
};

R32Table weight_closed_forms_r32(double r);

}  // namespace nld
