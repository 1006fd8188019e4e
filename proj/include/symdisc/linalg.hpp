#pragma once

#include <complex>
#include <span>
#include <vector>

namespace symdisc {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Every matrix in this project is tiny
/// (at most ~64x64), so plain cubic arithmetic is used throughout.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static Matrix identity(int n);
  static Matrix diagonal(std::span<const cplx> d);
  static Matrix diagonal_real(std::span<const double> d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const cplx& at(int r, int c) const {
    return a_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<const cplx> data() const { return a_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix adjoint(const Matrix& a);

std::vector<cplx> apply(const Matrix& a, std::span<const cplx> v);

/// <a|b> with the left argument conjugated.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> v);

double frobenius_norm(const Matrix& a);

/// Eigenvalues of a Hermitian matrix, ascending. Cyclic complex Jacobi;
/// the input is symmetrized against roundoff before iterating.
std::vector<double> hermitian_eigenvalues(Matrix h);

/// Largest singular value (spectral norm); valid for any rectangular matrix.
double operator_norm(const Matrix& a);

/// ||A† A - I|| in operator norm; zero for exactly unitary A.
double unitarity_residual(const Matrix& a);

}  // namespace symdisc
