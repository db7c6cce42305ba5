#pragma once

#include <complex>
#include <string>
#include <vector>

namespace nld {

using cx = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<cx>;

enum class Parity { none, even, odd };
enum class Measure { line, spherical };

/// Selects the OpenMP node loop or the serial reference loop. Both produce
/// bitwise identical results since every node is computed independently.
enum class Exec { serial, parallel };

/// Uniform grid on [x_min, x_max] including both end points.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0;
  double h = 0.0;

  Grid1D() = default;
  Grid1D(double xmin, double xmax, int n_points);
  double x(int i) const { return x_min + h * i; }
  RealField nodes() const;
  /// True when x(i) = -x(n-1-i) to round-off.
  bool symmetric() const;
};

/// Staggered grid r_k = (k + 1/2) h, k = 0..n-1, h = r_max / n. The origin is
/// never a node.
struct RadialGrid {
  double r_max = 0.0;
  int n = 0;
  double h = 0.0;

  RadialGrid() = default;
  RadialGrid(double rmax, int n_cells);
  double r(int k) const { return (k + 0.5) * h; }
  RealField nodes() const;
};

RealField deriv1(const Grid1D& g, const RealField& f, Exec exec = Exec::parallel);
ComplexField deriv1(const Grid1D& g, const ComplexField& f, Exec exec = Exec::parallel);
/// Parity selects the ghost reflection across r = 0; Parity::none throws.
RealField deriv1(const RadialGrid& g, const RealField& f, Parity parity, Exec exec = Exec::parallel);
ComplexField deriv1(const RadialGrid& g, const ComplexField& f, Parity parity, Exec exec = Exec::parallel);
/// D f = (1/r^2) d/dr (r^2 f) for an odd component, differenced in this
/// conservative form: D is the negative adjoint of the even-parity deriv1 in the
/// r^2-weighted midpoint inner product, so the discrete charge is conserved.
RealField radial_div(const RadialGrid& g, const RealField& f, Exec exec = Exec::parallel);

/// Composite trapezoid rule.
double quad(const Grid1D& g, const RealField& f);
cx quad(const Grid1D& g, const ComplexField& f);
/// Midpoint rule; Measure::spherical integrates 4 pi r^2 f dr.
double quad(const RadialGrid& g, const RealField& f, Measure measure = Measure::line);

bool all_finite(const RealField& f);
bool all_finite(const ComplexField& f);

/// Throws std::invalid_argument naming `what` unless f has one finite value per node.
void check_field(const RealField& f, size_t n, const std::string& what);
void check_field(const ComplexField& f, size_t n, const std::string& what);

/// Writes a header row (x or r, then component names) and one row per node.
void write_field_csv(const std::string& path, const std::string& coord_name, const RealField& coord,
                     const std::vector<std::string>& names, const std::vector<RealField>& columns);

}  // namespace nld
