#include "nld/ibp.hpp"

#include <cmath>
#include <stdexcept>

namespace nld {

namespace {

// Bilinear form a^T A b at node i for a real 2x2 matrix.
double form(const MatrixC& A, const RealPair& a, const RealPair& b, size_t i) {
  double s = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) s += a[static_cast<size_t>(r)][i] * A(r, c).real() * b[static_cast<size_t>(c)][i];
  return s;
}

}  // namespace

double discrete_ibp_defect(const Grid1D& grid, const RealPair& f, const RealPair& g, const WeightSpec& phi,
                           IbpPart part, const AlphaSplit& split) {
  const size_t n = static_cast<size_t>(grid.n);
  for (const auto* p : {&f, &g})
    for (const auto& c : *p) check_field(c, n, "discrete_ibp_defect");
  const MatrixC& A = part == IbpPart::real_part ? split.alpha_r : split.alpha_i;
  if (A.rows != 2) throw std::invalid_argument("discrete_ibp_defect: expects the n = 1 (2x2) split");
  const RealPair df{deriv1(grid, f[0]), deriv1(grid, f[1])};
  const RealPair dg{deriv1(grid, g[0]), deriv1(grid, g[1])};
  RealField lhs(n), w1(n), w2(n);
  for (size_t i = 0; i < n; ++i) {
    const WeightValues w = phi(grid.x(static_cast<int>(i)));
    lhs[i] = w.d0 * form(A, f, dg, i);
    w1[i] = w.d1 * form(A, f, g, i);
    w2[i] = w.d0 * form(A, g, df, i);
  }
  const double sign = part == IbpPart::real_part ? -1.0 : 1.0;
  return std::abs(quad(grid, lhs) - (-quad(grid, w1) + sign * quad(grid, w2)));
}

double discrete_ibp_defect(const Grid1D& grid, const RealPair& f, const RealPair& g, const WeightSpec& phi,
                           IbpPart part) {
  const AlphaSplit s = part == IbpPart::real_part ? split_alpha(pauli(1)) : split_alpha(alpha_beta(1).alpha[0]);
  return discrete_ibp_defect(grid, f, g, phi, part, s);
}

}  // namespace nld
