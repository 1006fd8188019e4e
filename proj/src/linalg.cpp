#include "symdisc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "symdisc/errors.hpp"

namespace symdisc {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const cplx> d) {
  Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (int i = 0; i < m.rows(); ++i) m.at(i, i) = d[i];
  return m;
}

Matrix Matrix::diagonal_real(std::span<const double> d) {
  Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (int i = 0; i < m.rows(); ++i) m.at(i, i) = d[i];
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  Matrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const cplx aik = a.at(i, k);
      if (aik == cplx{}) continue;
      for (int j = 0; j < b.cols(); ++j) r.at(i, j) += aik * b.at(k, j);
    }
  return r;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix sum shape mismatch");
  Matrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j) + b.at(i, j);
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix difference shape mismatch");
  Matrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j) - b.at(i, j);
  return r;
}

Matrix adjoint(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.at(j, i) = std::conj(a.at(i, j));
  return r;
}

std::vector<cplx> apply(const Matrix& a, std::span<const cplx> v) {
  if (a.cols() != static_cast<int>(v.size()))
    throw DimensionMismatch("matrix-vector shape mismatch");
  std::vector<cplx> r(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    cplx s{};
    for (int j = 0; j < a.cols(); ++j) s += a.at(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DimensionMismatch("inner product length mismatch");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (const cplx& x : a.data()) s += std::norm(x);
  return std::sqrt(s);
}

std::vector<double> hermitian_eigenvalues(Matrix h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("eigenvalues need a square matrix");
  const int n = h.rows();
  for (int p = 0; p < n; ++p) {
    h.at(p, p) = h.at(p, p).real();
    for (int q = p + 1; q < n; ++q) {
      const cplx m = 0.5 * (h.at(p, q) + std::conj(h.at(q, p)));
      h.at(p, q) = m;
      h.at(q, p) = std::conj(m);
    }
  }

  double scale = frobenius_norm(h);
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(h.at(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx hpq = h.at(p, q);
        const double b = std::abs(hpq);
        if (b <= 1e-18 * scale) continue;
        const cplx phase = hpq / b;
        const double app = h.at(p, p).real();
        const double aqq = h.at(q, q).real();
        const double tau = (aqq - app) / (2.0 * b);
        const double sg = tau >= 0.0 ? 1.0 : -1.0;
        const double t = -sg / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Plane rotation J: J(p,p)=c, J(p,q)=-s*phase, J(q,p)=s*conj(phase),
        // J(q,q)=c; update H <- J† H J.
        for (int k = 0; k < n; ++k) {
          const cplx kp = h.at(k, p);
          const cplx kq = h.at(k, q);
          h.at(k, p) = c * kp + s * std::conj(phase) * kq;
          h.at(k, q) = -s * phase * kp + c * kq;
        }
        for (int k = 0; k < n; ++k) {
          const cplx pk = h.at(p, k);
          const cplx qk = h.at(q, k);
          h.at(p, k) = c * pk + s * phase * qk;
          h.at(q, k) = -s * std::conj(phase) * pk + c * qk;
        }
        h.at(p, q) = 0.0;
        h.at(q, p) = 0.0;
        h.at(p, p) = h.at(p, p).real();
        h.at(q, q) = h.at(q, q).real();
      }
    }
  }

  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = h.at(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double operator_norm(const Matrix& a) {
  const Matrix g = adjoint(a) * a;
  const std::vector<double> ev = hermitian_eigenvalues(g);
  const double top = ev.empty() ? 0.0 : std::max(0.0, ev.back());
  return std::sqrt(top);
}

double unitarity_residual(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("unitarity needs a square matrix");
  return operator_norm(adjoint(a) * a - Matrix::identity(a.rows()));
}

}  // namespace symdisc
