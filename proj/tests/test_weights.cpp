#include "doctest.h"

#include <array>
#include <cmath>

#include "nld/weights.hpp"

using namespace nld;

namespace {

// Sixth-order central first derivative.
template <class F>
double d6(F f, double x, double h) {
  return (f(x + 3 * h) - 9 * f(x + 2 * h) + 45 * f(x + h) - 45 * f(x - h) + 9 * f(x - 2 * h) - f(x - 3 * h)) / (60 * h);
}

// Leibniz rule for the product f g from the derivative lists of each factor.
std::array<double, 4> leibniz(const std::array<double, 4>& f, const std::array<double, 4>& g) {
  return {f[0] * g[0], f[1] * g[0] + f[0] * g[1], f[2] * g[0] + 2 * f[1] * g[1] + f[0] * g[2],
          f[3] * g[0] + 3 * f[2] * g[1] + 3 * f[1] * g[2] + f[0] * g[3]};
}

std::array<double, 4> r32_oracle(double r) {
  const std::array<double, 4> f{std::pow(r, 1.5), 1.5 * std::sqrt(r), 0.75 / std::sqrt(r), -0.375 / std::pow(r, 1.5)};
  const double p = 1 + r;
  const std::array<double, 4> g{1 / p, -1 / (p * p), 2 / (p * p * p), -6 / (p * p * p * p)};
  return leibniz(f, g);
}

std::array<double, 4> r2_oracle(double r) {
  const std::array<double, 4> f{r * r, 2 * r, 2, 0};
  const double p = 1 + r;
  const std::array<double, 4> g{std::pow(p, -4), -4 * std::pow(p, -5), 20 * std::pow(p, -6), -120 * std::pow(p, -7)};
  return leibniz(f, g);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST_CASE("analytic derivatives match sixth-order differences") {
  for (const char* name : {"tanh", "sech", "sech2", "sech4", "step_plus", "step_minus", "r32", "r2"}) {
    const WeightSpec w = weights::by_name(name);
    const bool radial = w.has_combos();
    for (double x : {-3.0, -1.1, -0.2, 0.4, 0.9, 2.5, 6.0}) {
      if (radial && x < 0.3) continue;
      const double h = 1e-3;
      const auto v = w(x);
      CHECK_MESSAGE(std::abs(v.d1 - d6([&](double y) { return w(y).d0; }, x, h)) < 1e-9, name);
      CHECK_MESSAGE(std::abs(v.d2 - d6([&](double y) { return w(y).d1; }, x, h)) < 1e-9, name);
      CHECK_MESSAGE(std::abs(v.d3 - d6([&](double y) { return w(y).d2; }, x, h)) < 1e-8, name);
    }
  }
  CHECK_THROWS(weights::by_name("cosine"));
}

TEST_CASE("radial weights vanish at the origin") {
  CHECK(weights::r32_over_1pr()(1e-12).d0 < 1e-17);
  CHECK(weights::r2_over_1pr4()(1e-12).d0 < 1e-23);
}

TEST_CASE("scaled weights") {
  const WeightSpec phiL = weights::scaled(weights::tanh_w(), 5.0, 5.0);
  const auto v = phiL(2.0);
  CHECK(v.d0 == doctest::Approx(5.0 * std::tanh(0.4)));
  CHECK(v.d1 == doctest::Approx(1.0 / std::pow(std::cosh(0.4), 2)));
  const WeightSpec c = weights::constant(3.0);
  CHECK(c(7.0).d0 == 3.0);
  CHECK(c(7.0).d1 == 0.0);
}

TEST_CASE("radial weight derivatives against Leibniz composition") {
  for (double r = 0.01; r <= 50.0; r *= 1.07) {
    const auto a = weights::r32_over_1pr()(r);
    const auto o = r32_oracle(r);
    CHECK(rel(a.d0, o[0]) < 1e-12);
    CHECK(rel(a.d1, o[1]) < 1e-12);
    CHECK(rel(a.d2, o[2]) < 1e-11);
    CHECK(rel(a.d3, o[3]) < 1e-11);
    const auto b = weights::r2_over_1pr4()(r);
    const auto q = r2_oracle(r);
    CHECK(rel(b.d0, q[0]) < 1e-12);
    CHECK(rel(b.d1, q[1]) < 1e-11);
    CHECK(rel(b.d2, q[2]) < 1e-10);
    if (std::abs(r * r - 3 * r + 1) > 1e-3) CHECK(rel(b.d3, q[3]) < 1e-10);
  }
}

TEST_CASE("radial singular combinations against composition") {
  for (const char* name : {"r32", "r2"}) {
    const WeightSpec w = weights::by_name(name);
    REQUIRE(w.has_combos());
    for (double r = 0.01; r <= 50.0; r *= 1.11) {
      const auto o = std::string(name) == "r32" ? r32_oracle(r) : r2_oracle(r);
      const auto c = w.combos(r);
      CHECK(rel(c.phi_over_r, o[0] / r) < 1e-12);
      CHECK(rel(c.phi_over_r2, o[0] / (r * r)) < 1e-12);
      CHECK(rel(c.phi_over_r3, o[0] / (r * r * r)) < 1e-12);
      CHECK(rel(c.d1_over_r, o[1] / r) < 1e-11);
      CHECK(rel(c.d1_over_r2, o[1] / (r * r)) < 1e-11);
      if (std::abs(o[2]) > 1e-8) CHECK(rel(c.d2_over_r, o[2] / r) < 1e-10);
    }
  }
}

TEST_CASE("closed-form coefficient table for r^{3/2}/(1+r)") {
  CHECK(weight_closed_forms_r32(1.0).d1 == doctest::Approx(0.5));
  for (double r = 0.01; r <= 50.0; r *= 1.03) {
    const auto o = r32_oracle(r);
    const double phi = o[0], d1 = o[1], d2 = o[2], d3 = o[3];
    const auto t = weight_closed_forms_r32(r);
    CHECK(rel(t.d1, d1) < 1e-10);
    CHECK(rel(t.two_phi_r_m_d1, 2 * phi / r - d1) < 1e-10);
    CHECK(rel(t.phi_over_r, phi / r) < 1e-10);
    CHECK(rel(t.b_even, 0.5 * (d1 / (r * r) + 0.5 * d3 - d2 / r)) < 1e-10);
    CHECK(rel(t.b_odd, 0.5 * (2 * phi / (r * r * r) + d1 / (r * r) + 0.5 * d3 - d2 / r)) < 1e-10);
    CHECK(rel(t.c_w1, 2 * phi / (r * r) - 0.5 * d2 - d1 / r) < 1e-10);
    CHECK(rel(t.c_w2, -0.5 * (d2 - 2 * d1 / r)) < 1e-10);
    for (double v : {t.d1, t.two_phi_r_m_d1, t.phi_over_r, t.b_even, t.b_odd, t.c_w1, t.c_w2}) CHECK(v > 0.0);
  }
}
