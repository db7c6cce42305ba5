#include "doctest.h"

#include <cmath>
#include <random>

#include "nld/grid.hpp"
#include "nld/ibp.hpp"
#include "nld/weights.hpp"

using namespace nld;

namespace {

double max_err(const RealField& a, const RealField& b) {
  double e = 0.0;
  for (size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

double sin_deriv_error(int n) {
  const Grid1D g(-M_PI, M_PI, n);
  RealField f(static_cast<size_t>(n)), df(f.size());
  for (int i = 0; i < n; ++i) {
    f[static_cast<size_t>(i)] = std::sin(g.x(i));
    df[static_cast<size_t>(i)] = std::cos(g.x(i));
  }
  return max_err(deriv1(g, f), df);
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid1D g(-1.0, 1.0, 21);
  CHECK(g.h == doctest::Approx(0.1));
  CHECK(g.symmetric());
  CHECK_THROWS(Grid1D(0.0, 1.0, 8));
  CHECK_THROWS(Grid1D(1.0, 0.0, 32));
  const RadialGrid r(10.0, 100);
  CHECK(r.h == doctest::Approx(0.1));
  CHECK(r.r(0) == doctest::Approx(0.05));
  CHECK(r.r(99) < 10.0 + r.h);
}

TEST_CASE("deriv1 exactness and order") {
  const Grid1D g(-2.0, 3.0, 64);
  RealField c(64, 3.5), p(64), dp(64);
  for (int i = 0; i < 64; ++i) {
    const double x = g.x(i);
    p[static_cast<size_t>(i)] = 1 + x - 2 * x * x + 0.5 * x * x * x - 0.25 * x * x * x * x;
    dp[static_cast<size_t>(i)] = 1 - 4 * x + 1.5 * x * x - x * x * x;
  }
  CHECK(max_err(deriv1(g, c), RealField(64, 0.0)) < 1e-12);
  // Both the centered and the one-sided closures are exact on quartics.
  CHECK(max_err(deriv1(g, p), dp) < 1e-10);

  const double e1 = sin_deriv_error(512), e2 = sin_deriv_error(1024);
  CHECK(std::log2(e1 / e2) >= 3.7);
}

TEST_CASE("radial deriv1 with parity ghosts") {
  const RadialGrid g(4.0, 400);
  RealField lin(400), ones(400);
  for (int k = 0; k < 400; ++k) lin[static_cast<size_t>(k)] = g.r(k);
  const auto d = deriv1(g, lin, Parity::odd);
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(deriv1(g, lin, Parity::none));

  auto err = [](int n) {
    const RadialGrid gr(6.0, n);
    RealField f(static_cast<size_t>(n)), df(f.size());
    for (int k = 0; k < n; ++k) {
      const double r = gr.r(k);
      f[static_cast<size_t>(k)] = std::exp(-r * r);
      df[static_cast<size_t>(k)] = -2 * r * std::exp(-r * r);
    }
    return max_err(deriv1(gr, f, Parity::even), df);
  };
  CHECK(std::log2(err(256) / err(512)) >= 3.7);
}

TEST_CASE("serial and parallel derivatives agree bitwise") {
  const Grid1D g(-10, 10, 4001);
  ComplexField f(4001);
  for (int i = 0; i < 4001; ++i) f[static_cast<size_t>(i)] = cx(std::exp(-g.x(i) * g.x(i)), std::sin(g.x(i)));
  const auto a = deriv1(g, f, Exec::serial), b = deriv1(g, f, Exec::parallel);
  CHECK(a == b);
}

TEST_CASE("quadrature") {
  const Grid1D unit(0.0, 1.0, 101);
  CHECK(quad(unit, RealField(101, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));

  const Grid1D line(-50.0, 50.0, 20001);
  RealField s2(20001);
  for (int i = 0; i < 20001; ++i) s2[static_cast<size_t>(i)] = 1.0 / std::pow(std::cosh(line.x(i)), 2);
  CHECK(std::abs(quad(line, s2) - 2.0) < 1e-8);

  const RadialGrid rg(12.0, 4800);
  RealField gauss(4800);
  for (int k = 0; k < 4800; ++k) gauss[static_cast<size_t>(k)] = std::exp(-rg.r(k) * rg.r(k));
  CHECK(std::abs(quad(rg, gauss, Measure::spherical) - std::pow(M_PI, 1.5)) < 1e-6);
}

TEST_CASE("quadrature is linear and positive") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid1D g(-3, 3, 97);
  RealField a(97), b(97), ab(97);
  for (size_t i = 0; i < 97; ++i) {
    a[i] = U(rng);
    b[i] = U(rng);
    ab[i] = 2.0 * a[i] - 3.0 * b[i];
  }
  CHECK(quad(g, a) > 0.0);
  CHECK(quad(g, ab) == doctest::Approx(2.0 * quad(g, a) - 3.0 * quad(g, b)).epsilon(1e-13));
}

TEST_CASE("health checks") {
  RealField f(20, 0.0);
  CHECK(all_finite(f));
  f[3] = std::nan("");
  CHECK_FALSE(all_finite(f));
  CHECK_THROWS(check_field(f, 20, "f"));
  CHECK_THROWS(check_field(RealField(19, 0.0), 20, "short"));
}

// ---------------------------------------------------------------------------

namespace {

RealPair bump_pair(const Grid1D& g, double c1, double w1, double c2, double w2, double k) {
  RealPair p{RealField(static_cast<size_t>(g.n)), RealField(static_cast<size_t>(g.n))};
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    p[0][static_cast<size_t>(i)] = std::exp(-(x - c1) * (x - c1) / w1) * std::cos(k * x);
    p[1][static_cast<size_t>(i)] = std::exp(-(x - c2) * (x - c2) / w2) * std::sin(k * x + 0.3);
  }
  return p;
}

}  // namespace

TEST_CASE("discrete summation by parts") {
  const WeightSpec phi = weights::tanh_w();
  SUBCASE("zero field") {
    const Grid1D g(-10, 10, 256);
    const RealPair z{RealField(256, 0.0), RealField(256, 0.0)};
    CHECK(discrete_ibp_defect(g, z, z, phi, IbpPart::real_part) == 0.0);
    CHECK(discrete_ibp_defect(g, z, z, phi, IbpPart::imag_part) == 0.0);
  }
  SUBCASE("refinement order on random smooth pairs") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> C(-2.0, 2.0), W(0.5, 2.0), K(0.5, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
      const double c1 = C(rng), c2 = C(rng), w1 = W(rng), w2 = W(rng), k = K(rng);
      for (IbpPart part : {IbpPart::real_part, IbpPart::imag_part}) {
        double prev = 0.0;
        for (int n : {256, 512, 1024}) {
          const Grid1D g(-12, 12, n);
          const RealPair f = bump_pair(g, c1, w1, c2, w2, k);
          const RealPair h = bump_pair(g, c2, w2, c1, w1, 1.3 * k);
          const double d = discrete_ibp_defect(g, f, h, phi, part);
          if (n > 256) CHECK(prev / d >= 8.0);
          prev = d;
        }
      }
    }
  }
  SUBCASE("f = g reduces to the weighted half-derivative form") {
    // With the symmetric part and f = g the identity becomes
    // int phi f^T A f' = -1/2 int phi' f^T A f.
    const Grid1D g(-12, 12, 1024);
    const RealPair f = bump_pair(g, 0.3, 1.0, -0.4, 1.5, 1.1);
    CHECK(discrete_ibp_defect(g, f, f, phi, IbpPart::real_part) < 1e-5);
  }
}
