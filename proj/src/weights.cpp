#include "nld/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace nld::weights {

WeightSpec tanh_w() {
  return {"tanh",
          [](double x) {
            const double t = std::tanh(x), s2 = 1.0 - t * t;
            return WeightValues{t, s2, -2.0 * s2 * t, 4.0 * s2 * t * t - 2.0 * s2 * s2};
          },
          {}};
}

WeightSpec sech_w() {
  return {"sech",
          [](double x) {
            const double s = 1.0 / std::cosh(x), t = std::tanh(x);
            return WeightValues{s, -s * t, s * t * t - s * s * s, -s * t * t * t + 5.0 * s * s * s * t};
          },
          {}};
}

WeightSpec sech2() {
  return {"sech2",
          [](double x) {
            const double t = std::tanh(x), s2 = 1.0 - t * t;
            return WeightValues{s2, -2.0 * s2 * t, 4.0 * s2 * t * t - 2.0 * s2 * s2,
                                -8.0 * s2 * t * t * t + 16.0 * s2 * s2 * t};
          },
          {}};
}

WeightSpec sech4() {
  return {"sech4",
          [](double x) {
            const double t = std::tanh(x), s2 = 1.0 - t * t, s4 = s2 * s2, s6 = s4 * s2;
            return WeightValues{s4, -4.0 * s4 * t, 16.0 * s4 * t * t - 4.0 * s6,
                                -64.0 * s4 * t * t * t + 56.0 * s6 * t};
          },
          {}};
}

WeightSpec half_step(int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("half_step: sign must be +1 or -1");
  const double s = 0.5 * sign;
  return {sign > 0 ? "step_plus" : "step_minus",
          [s](double x) {
            const WeightValues w = tanh_w().eval(x);
            return WeightValues{0.5 + s * w.d0, s * w.d1, s * w.d2, s * w.d3};
          },
          {}};
}

WeightSpec scaled(const WeightSpec& w, double L, double amp) {
  if (!(L > 0)) throw std::invalid_argument("scaled: L must be positive");
  auto f = w.eval;
  return {w.name + "_scaled",
          [f, L, amp](double x) {
            const WeightValues v = f(x / L);
            return WeightValues{amp * v.d0, amp * v.d1 / L, amp * v.d2 / (L * L), amp * v.d3 / (L * L * L)};
          },
          {}};
}

WeightSpec constant(double c) {
  return {"constant", [c](double) { return WeightValues{c, 0.0, 0.0, 0.0}; }, {}};
}

WeightSpec r32_over_1pr() {
  WeightSpec w;
  w.name = "r32";
  w.eval = [](double r) {
    const double sr = std::sqrt(r), p = 1.0 + r;
    return WeightValues{r * sr / p, sr * (r + 3.0) / (2.0 * p * p), -(r * r + 6.0 * r - 3.0) / (4.0 * sr * p * p * p),
                        3.0 * (r - 1.0) * (r * r + 10.0 * r + 1.0) / (8.0 * r * sr * p * p * p * p)};
  };
  w.combos = [](double r) {
    const double sr = std::sqrt(r), p = 1.0 + r;
    RadialCombos c;
    c.phi_over_r = sr / p;
    c.phi_over_r2 = 1.0 / (sr * p);
    c.phi_over_r3 = 1.0 / (r * sr * p);
    c.d1_over_r = (r + 3.0) / (2.0 * sr * p * p);
    c.d1_over_r2 = (r + 3.0) / (2.0 * r * sr * p * p);
    c.d2_over_r = -(r * r + 6.0 * r - 3.0) / (4.0 * r * sr * p * p * p);
    return c;
  };
  return w;
}

WeightSpec r2_over_1pr4() {
  WeightSpec w;
  w.name = "r2";
  w.eval = [](double r) {
    const double p = 1.0 + r, p4 = p * p * p * p;
    return WeightValues{r * r / p4, -2.0 * r * (r - 1.0) / (p4 * p), 2.0 * (3.0 * r * r - 6.0 * r + 1.0) / (p4 * p * p),
                        -24.0 * (r * r - 3.0 * r + 1.0) / (p4 * p * p * p)};
  };
  w.combos = [](double r) {
    const double p = 1.0 + r, p4 = p * p * p * p;
    RadialCombos c;
    c.phi_over_r = r / p4;
    c.phi_over_r2 = 1.0 / p4;
    c.phi_over_r3 = 1.0 / (r * p4);
    c.d1_over_r = -2.0 * (r - 1.0) / (p4 * p);
    c.d1_over_r2 = -2.0 * (r - 1.0) / (r * p4 * p);
    c.d2_over_r = 2.0 * (3.0 * r * r - 6.0 * r + 1.0) / (r * p4 * p * p);
    return c;
  };
  return w;
}

WeightSpec by_name(const std::string& name) {
  if (name == "tanh") return tanh_w();
  if (name == "sech") return sech_w();
  if (name == "sech2") return sech2();
  if (name == "sech4") return sech4();
  if (name == "step_plus") return half_step(1);
  if (name == "step_minus") return half_step(-1);
  if (name == "r32") return r32_over_1pr();
  if (name == "r2") return r2_over_1pr4();
  throw std::invalid_argument("unknown weight: " + name);
}

}  // namespace nld::weights

namespace nld {

R32Table weight_closed_forms_r32(double r) {
  const double sr = std::sqrt(r), p = 1.0 + r, p2 = p * p, p3 = p2 * p, p4 = p2 * p2;
  R32Table t;
  t.d1 = sr * (r + 3.0) / (2.0 * p2);
  t.two_phi_r_m_d1 = sr * (1.0 + 3.0 * r) / (2.0 * p2);
  t.phi_over_r = sr / p;
  t.b_even = (15.0 * r * r * r + 95.0 * r * r + 41.0 * r + 9.0) / (32.0 * r * sr * p4);
  t.b_odd = (47.0 * r * r * r + 191.0 * r * r + 137.0 * r + 41.0) / (32.0 * r * sr * p4);
  t.c_w1 = (13.0 * r * r + 22.0 * r + 1.0) / (8.0 * sr * p3);
  t.c_w2 = (5.0 * r * r + 22.0 * r + 9.0) / (8.0 * sr * p3);
  return t;
}

}  // namespace nld
