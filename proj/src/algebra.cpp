#include "nld/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nld {

MatrixC::MatrixC(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r * c), cx(0.0, 0.0)) {
  if (r <= 0 || c <= 0) throw std::invalid_argument("MatrixC: dimensions must be positive");
}

MatrixC::MatrixC(int r, int c, std::vector<cx> entries) : rows(r), cols(c), a(std::move(entries)) {
  if (r <= 0 || c <= 0 || a.size() != static_cast<size_t>(r * c))
    throw std::invalid_argument("MatrixC: entry count does not match dimensions");
  for (const cx& z : a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("MatrixC: non-finite entry");
}

MatrixC MatrixC::identity(int n) {
  MatrixC m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

MatrixC MatrixC::zero(int n) { return MatrixC(n, n); }

MatrixC MatrixC::adjoint() const {
  MatrixC m(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

MatrixC MatrixC::transpose() const {
  MatrixC m(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(j, i) = (*this)(i, j);
  return m;
}

MatrixC MatrixC::real_part() const {
  MatrixC m(rows, cols);
  for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k].real();
  return m;
}

MatrixC MatrixC::imag_part() const {
  MatrixC m(rows, cols);
  for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k].imag();
  return m;
}

double MatrixC::max_abs() const {
  double d = 0.0;
  for (const cx& z : a) d = std::max({d, std::abs(z.real()), std::abs(z.imag())});
  return d;
}

static void require_same_shape(const MatrixC& x, const MatrixC& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("MatrixC: shape mismatch");
}

MatrixC operator+(const MatrixC& x, const MatrixC& y) {
  require_same_shape(x, y);
  MatrixC m = x;
  for (size_t k = 0; k < m.a.size(); ++k) m.a[k] += y.a[k];
  return m;
}

MatrixC operator-(const MatrixC& x, const MatrixC& y) {
  require_same_shape(x, y);
  MatrixC m = x;
  for (size_t k = 0; k < m.a.size(); ++k) m.a[k] -= y.a[k];
  return m;
}

MatrixC operator*(const MatrixC& x, const MatrixC& y) {
  if (x.cols != y.rows) throw std::invalid_argument("MatrixC: inner dimension mismatch");
  MatrixC m(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < y.cols; ++j) {
      cx s = 0.0;
      for (int k = 0; k < x.cols; ++k) s += x(i, k) * y(k, j);
      m(i, j) = s;
    }
  return m;
}

MatrixC operator*(cx s, const MatrixC& x) {
  MatrixC m = x;
  for (cx& z : m.a) z *= s;
  return m;
}

bool operator==(const MatrixC& x, const MatrixC& y) {
  return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
}

MatrixC pauli(int j) {
  const cx I(0.0, 1.0);
  switch (j) {
    case 1: return MatrixC(2, 2, {0.0, 1.0, 1.0, 0.0});
    case 2: return MatrixC(2, 2, {0.0, -I, I, 0.0});
    case 3: return MatrixC(2, 2, {1.0, 0.0, 0.0, -1.0});
    default: throw std::out_of_range("pauli: index must be 1, 2 or 3");
  }
}

static MatrixC block_offdiag(const MatrixC& s) {
  MatrixC m(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      m(i, j + 2) = s(i, j);
      m(i + 2, j) = s(i, j);
    }
  return m;
}

AlphaBeta alpha_beta(int n) {
  AlphaBeta ab;
  switch (n) {
    case 1:
      ab.alpha = {cx(-1.0) * pauli(2)};
      ab.beta = pauli(3);
      break;
    case 2:
      ab.alpha = {pauli(1), pauli(2)};
      ab.beta = pauli(3);
      break;
    case 3:
      ab.alpha = {block_offdiag(pauli(1)), block_offdiag(pauli(2)), block_offdiag(pauli(3))};
      ab.beta = MatrixC(4, 4, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0});
      break;
    default: throw std::invalid_argument("alpha_beta: only n = 1, 2, 3 are supported");
  }
  return ab;
}

AlphaSplit split_alpha(const MatrixC& alpha) {
  AlphaSplit s{alpha.real_part(), alpha.imag_part()};
  if (!s.alpha_r.is_zero() && !s.alpha_i.is_zero())
    throw std::invalid_argument("split_alpha: matrix has both real and imaginary entries");
  return s;
}

bool ValidationReport::pass() const {
  return std::all_of(relations.begin(), relations.end(), [](const RelationCheck& r) { return r.pass; });
}

double ValidationReport::max_defect() const {
  double d = 0.0;
  for (const auto& r : relations) d = std::max(d, r.defect);
  return d;
}

ValidationReport check_clifford(int n) {
  const AlphaBeta ab = alpha_beta(n);
  const int N = ab.beta.rows;
  const MatrixC I = MatrixC::identity(N);
  const MatrixC Z = MatrixC::zero(N);

  ValidationReport rep;
  rep.n = n;
  auto add = [&rep](std::string name, double defect) { rep.relations.push_back({std::move(name), defect, defect == 0.0}); };
  // Running maximum per relation family.
  double anti = 0, ab_anti = 0, invol = 0, herm = 0, sym = 0, split_anti = 0, split_sq = 0, split_mixed = 0, recon = 0;

  std::vector<AlphaSplit> sp;
  for (const auto& a : ab.alpha) sp.push_back(split_alpha(a));

  for (int j = 0; j < n; ++j) {
    const MatrixC& aj = ab.alpha[static_cast<size_t>(j)];
    const AlphaSplit& sj = sp[static_cast<size_t>(j)];
    ab_anti = std::max(ab_anti, (aj * ab.beta + ab.beta * aj - Z).max_abs());
    invol = std::max(invol, (aj * aj - I).max_abs());
    herm = std::max(herm, (aj.adjoint() - aj).max_abs());
    sym = std::max({sym, (sj.alpha_r.transpose() - sj.alpha_r).max_abs(), (sj.alpha_i.transpose() + sj.alpha_i).max_abs()});
    split_sq = std::max(split_sq, (sj.alpha_r * sj.alpha_r - sj.alpha_i * sj.alpha_i - I).max_abs());
    recon = std::max(recon, (sj.alpha_r + cx(0.0, 1.0) * sj.alpha_i - aj).max_abs());
    for (int k = 0; k < n; ++k) {
      const MatrixC& ak = ab.alpha[static_cast<size_t>(k)];
      const AlphaSplit& sk = sp[static_cast<size_t>(k)];
      const MatrixC target = j == k ? cx(2.0) * I : Z;
      anti = std::max(anti, (aj * ak + ak * aj - target).max_abs());
      const MatrixC rr = sj.alpha_r * sk.alpha_r + sk.alpha_r * sj.alpha_r;
      const MatrixC ii = sj.alpha_i * sk.alpha_i + sk.alpha_i * sj.alpha_i;
      split_anti = std::max(split_anti, (rr - ii - target).max_abs());
      split_mixed = std::max(split_mixed, (sj.alpha_r * sk.alpha_i + sk.alpha_i * sj.alpha_r).max_abs());
    }
  }
  invol = std::max(invol, (ab.beta * ab.beta - I).max_abs());
  herm = std::max(herm, (ab.beta.adjoint() - ab.beta).max_abs());

  add("alpha^j alpha^k + alpha^k alpha^j = 2 delta_jk I", anti);
  add("alpha^j beta + beta alpha^j = 0", ab_anti);
  add("(alpha^j)^2 = beta^2 = I", invol);
  add("alpha^j, beta Hermitian", herm);
  add("alpha_r + i alpha_i = alpha", recon);
  add("alpha_r symmetric, alpha_i antisymmetric", sym);
  add("alpha_r^j alpha_r^k + alpha_r^k alpha_r^j - (alpha_i^j alpha_i^k + alpha_i^k alpha_i^j) = 2 delta_jk I", split_anti);
  add("(alpha_r^j)^2 - (alpha_i^j)^2 = I", split_sq);
  add("alpha_r^j alpha_i^k + alpha_i^k alpha_r^j = 0", split_mixed);
  return rep;
}

}  // namespace nld
