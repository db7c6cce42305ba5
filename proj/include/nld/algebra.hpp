#pragma once

#include <complex>
#include <string>
#include <vector>

namespace nld {

using cx = std::complex<double>;

/// Dense square complex matrix, row-major. Entries in this project are small
/// integers (or i times them), so products are exact in double precision.
struct MatrixC {
  int rows = 0;
  int cols = 0;
  std::vector<cx> a;

  MatrixC() = default;
  MatrixC(int r, int c);
  MatrixC(int r, int c, std::vector<cx> entries);

  cx& operator()(int i, int j) { return a[static_cast<size_t>(i * cols + j)]; }
  const cx& operator()(int i, int j) const { return a[static_cast<size_t>(i * cols + j)]; }

  static MatrixC identity(int n);
  static MatrixC zero(int n);

  MatrixC adjoint() const;
  MatrixC transpose() const;
  MatrixC real_part() const;
  MatrixC imag_part() const;
  double max_abs() const;
  bool is_zero() const { return max_abs() == 0.0; }
};

MatrixC operator+(const MatrixC& x, const MatrixC& y);
MatrixC operator-(const MatrixC& x, const MatrixC& y);
MatrixC operator*(const MatrixC& x, const MatrixC& y);
MatrixC operator*(cx s, const MatrixC& x);
bool operator==(const MatrixC& x, const MatrixC& y);

/// Pauli matrix sigma^j, j in {1,2,3}.
MatrixC pauli(int j);

struct AlphaBeta {
  std::vector<MatrixC> alpha;
  MatrixC beta;
};

/// Dirac matrices for spatial dimension n in {1,2,3}.
AlphaBeta alpha_beta(int n);

/// alpha = alpha_r + i alpha_i with both parts real.
struct AlphaSplit {
  MatrixC alpha_r;
  MatrixC alpha_i;
};

/// Throws std::invalid_argument if alpha is neither purely real nor purely imaginary.
AlphaSplit split_alpha(const MatrixC& alpha);

struct RelationCheck {
  std::string name;
  double defect = 0.0;
  bool pass = false;
};

struct ValidationReport {
  int n = 0;
  std::vector<RelationCheck> relations;
  bool pass() const;
  double max_defect() const;
};

/// Every anticommutation, involution, Hermiticity and split relation for dimension n.
/// A relation passes only when its defect is exactly zero.
ValidationReport check_clifford(int n);

}  // namespace nld
