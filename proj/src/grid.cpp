#include "nld/grid.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace nld {

Grid1D::Grid1D(double xmin, double xmax, int n_points) : x_min(xmin), x_max(xmax), n(n_points) {
  if (n_points < 16) throw std::invalid_argument("Grid1D: need at least 16 points");
  if (!(xmax > xmin)) throw std::invalid_argument("Grid1D: x_max must exceed x_min");
  h = (xmax - xmin) / (n_points - 1);
}

RealField Grid1D::nodes() const {
  RealField x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = this->x(i);
  return x;
}

bool Grid1D::symmetric() const {
  const double tol = 1e-12 * std::max(std::abs(x_min), std::abs(x_max));
  return std::abs(x_min + x_max) <= tol;
}

RadialGrid::RadialGrid(double rmax, int n_cells) : r_max(rmax), n(n_cells) {
  if (n_cells < 16) throw std::invalid_argument("RadialGrid: need at least 16 cells");
  if (!(rmax > 0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
  h = rmax / n_cells;
}

RealField RadialGrid::nodes() const {
  RealField r(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) r[static_cast<size_t>(k)] = this->r(k);
  return r;
}

namespace {

// 4th-order one-sided closures for the first two and last two nodes.
template <class T>
void closure_left(const std::vector<T>& f, std::vector<T>& d, double inv12h) {
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv12h;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv12h;
}

template <class T>
void closure_right(const std::vector<T>& f, std::vector<T>& d, double inv12h) {
  const size_t n = f.size();
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * inv12h;
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * inv12h;
}

template <class T>
void interior(const std::vector<T>& f, std::vector<T>& d, double inv12h, Exec exec) {
  const long n = static_cast<long>(f.size());
  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (long i = 2; i < n - 2; ++i)
    d[static_cast<size_t>(i)] = (f[static_cast<size_t>(i - 2)] - 8.0 * f[static_cast<size_t>(i - 1)] +
                                 8.0 * f[static_cast<size_t>(i + 1)] - f[static_cast<size_t>(i + 2)]) *
                                inv12h;
}

template <class T>
std::vector<T> deriv1_line(const Grid1D& g, const std::vector<T>& f, Exec exec) {
  if (f.size() != static_cast<size_t>(g.n)) throw std::invalid_argument("deriv1: field size does not match grid");
  std::vector<T> d(f.size());
  const double inv12h = 1.0 / (12.0 * g.h);
  interior(f, d, inv12h, exec);
  closure_left(f, d, inv12h);
  closure_right(f, d, inv12h);
  return d;
}

template <class T>
std::vector<T> deriv1_radial(const RadialGrid& g, const std::vector<T>& f, Parity parity, Exec exec) {
  if (parity == Parity::none) throw std::invalid_argument("deriv1: radial grid requires even or odd parity");
  if (f.size() != static_cast<size_t>(g.n)) throw std::invalid_argument("deriv1: field size does not match grid");
  std::vector<T> d(f.size());
  const double inv12h = 1.0 / (12.0 * g.h);
  interior(f, d, inv12h, exec);
  // Ghosts: f(r_{-1}) = s f(r_0), f(r_{-2}) = s f(r_1) because r_{-1-k} = -r_k.
  const double s = parity == Parity::even ? 1.0 : -1.0;
  const T gm1 = s * f[0];
  const T gm2 = s * f[1];
  d[0] = (gm2 - 8.0 * gm1 + 8.0 * f[1] - f[2]) * inv12h;
  d[1] = (gm1 - 8.0 * f[0] + 8.0 * f[2] - f[3]) * inv12h;
  closure_right(f, d, inv12h);
  return d;
}

}  // namespace

RealField deriv1(const Grid1D& g, const RealField& f, Exec exec) { return deriv1_line(g, f, exec); }
ComplexField deriv1(const Grid1D& g, const ComplexField& f, Exec exec) { return deriv1_line(g, f, exec); }
RealField deriv1(const RadialGrid& g, const RealField& f, Parity p, Exec exec) { return deriv1_radial(g, f, p, exec); }
ComplexField deriv1(const RadialGrid& g, const ComplexField& f, Parity p, Exec exec) {
  return deriv1_radial(g, f, p, exec);
}

RealField radial_div(const RadialGrid& g, const RealField& f, Exec exec) {
  RealField w(f.size());
  for (size_t k = 0; k < f.size(); ++k) {
    const double r = g.r(static_cast<int>(k));
    w[k] = r * r * f[k];
  }
  RealField d = deriv1_radial(g, w, Parity::odd, exec);
  for (size_t k = 0; k < d.size(); ++k) {
    const double r = g.r(static_cast<int>(k));
    d[k] /= r * r;
  }
  return d;
}

double quad(const Grid1D& g, const RealField& f) {
  if (f.size() != static_cast<size_t>(g.n)) throw std::invalid_argument("quad: field size does not match grid");
  double s = 0.5 * (f.front() + f.back());
  for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * g.h;
}

cx quad(const Grid1D& g, const ComplexField& f) {
  if (f.size() != static_cast<size_t>(g.n)) throw std::invalid_argument("quad: field size does not match grid");
  cx s = 0.5 * (f.front() + f.back());
  for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * g.h;
}

double quad(const RadialGrid& g, const RealField& f, Measure measure) {
  if (f.size() != static_cast<size_t>(g.n)) throw std::invalid_argument("quad: field size does not match grid");
  double s = 0.0;
  if (measure == Measure::line) {
    for (double v : f) s += v;
  } else {
    for (int k = 0; k < g.n; ++k) {
      const double r = g.r(k);
      s += 4.0 * M_PI * r * r * f[static_cast<size_t>(k)];
    }
  }
  return s * g.h;
}

bool all_finite(const RealField& f) {
  for (double v : f)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const ComplexField& f) {
  for (const cx& v : f)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void check_field(const RealField& f, size_t n, const std::string& what) {
  if (f.size() != n) throw std::invalid_argument(what + ": size does not match grid");
  if (!all_finite(f)) throw std::invalid_argument(what + ": non-finite value");
}

void check_field(const ComplexField& f, size_t n, const std::string& what) {
  if (f.size() != n) throw std::invalid_argument(what + ": size does not match grid");
  if (!all_finite(f)) throw std::invalid_argument(what + ": non-finite value");
}

void write_field_csv(const std::string& path, const std::string& coord_name, const RealField& coord,
                     const std::vector<std::string>& names, const std::vector<RealField>& columns) {
  if (names.size() != columns.size()) throw std::invalid_argument("write_field_csv: names/columns mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
  out << coord_name;
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (size_t i = 0; i < coord.size(); ++i) {
    out << fmt::format("{:.17g}", coord[i]);
    for (const auto& c : columns) out << fmt::format(",{:.17g}", c.at(i));
    out << '\n';
  }
}

}  // namespace nld
