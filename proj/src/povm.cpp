#include "symdisc/povm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "symdisc/errors.hpp"

namespace symdisc {

namespace {

void require_valid(const CoefficientVector& c) {
  const int n = c.dim();
  Dimension::of(n);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    if (c.c[k] == 0.0)
      throw ZeroCoefficient("coefficient " + std::to_string(k) + " is zero");
    s += c.c[k] * c.c[k];
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw CoefficientNotNormalized("squared coefficients must sum to 1 within 1e-12");
}

std::vector<double> success_diagonal(const CoefficientVector& c) {
  const double cmin = min_coefficient(c);
  std::vector<double> d(c.c.size());
  for (std::size_t k = 0; k < c.c.size(); ++k) d[k] = cmin / std::abs(c.c[k]);
  return d;
}

}  // namespace

double optimal_probability(const CoefficientVector& c) {
  require_valid(c);
  const double cmin = min_coefficient(c);
  return c.dim() * cmin * cmin;
}

Matrix success_operator(const CoefficientVector& c) {
  require_valid(c);
  return Matrix::diagonal_real(success_diagonal(c));
}

Matrix failure_operator(const CoefficientVector& c) {
  require_valid(c);
  std::vector<double> d = success_diagonal(c);
  for (double& x : d) x = std::sqrt(std::max(0.0, 1.0 - x * x));
  return Matrix::diagonal_real(d);
}

ConditionalUnitary conditional_unitary(const CoefficientVector& c) {
  require_valid(c);
  const int n = c.dim();
  const std::vector<double> s = success_diagonal(c);
  Matrix u(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const double f = std::sqrt(std::max(0.0, 1.0 - s[k] * s[k]));
    u.at(k, k) = s[k];
    u.at(k, n + k) = -f;
    u.at(n + k, k) = f;
    u.at(n + k, n + k) = s[k];
  }
  return ConditionalUnitary{std::move(u), n};
}

std::vector<Matrix> detection_operators(const SymmetricFamily& family, double p) {
  const int n = family.dim.n;
  if (!(p >= 0.0)) throw ProbabilityOutOfRange("conclusive probability must be >= 0");

  const Matrix f = fourier(family.dim);
  const double scale = std::sqrt(p) * std::sqrt(family.q) / n;  // sqrt(p) / <rec|state>
  std::vector<Matrix> ops;
  ops.reserve(n);
  for (int k = 0; k < n; ++k) {
    Matrix a(n, n);
    for (int r = 0; r < n; ++r) {
      const cplx uk = f.at(r, k);  // |u_k> = F |k>
      for (int s = 0; s < n; ++s)
        a.at(r, s) = scale * uk * std::conj(family.reciprocals[k][s]);
    }
    ops.push_back(std::move(a));
  }

  // Feasibility: the leftover element I - sum A_k† A_k must stay positive.
  Matrix sum(n, n);
  for (const Matrix& a : ops) sum = sum + adjoint(a) * a;
  const Matrix residual = Matrix::identity(n) - sum;
  const std::vector<double> ev = hermitian_eigenvalues(residual);
  if (!ev.empty() && ev.front() < -1e-10)
    throw ProbabilityOutOfRange("requested conclusive probability exceeds the optimum");
  return ops;
}

Matrix fourier(Dimension dim) {
  Dimension::of(dim.n);
  const int n = dim.n;
  Matrix f(n, n);
  const double rn = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      f.at(k, l) = rn * std::polar(1.0, 2.0 * std::numbers::pi * k * l / n);
  return f;
}

Matrix inverse_fourier(Dimension dim) { return adjoint(fourier(dim)); }

ProtocolOutcome apply_protocol(const CoefficientVector& c, int input_index) {
  require_valid(c);
  const int n = c.dim();
  if (input_index < 0 || input_index >= n)
    throw std::out_of_range("input index " + std::to_string(input_index) +
                            " outside 0.." + std::to_string(n - 1));

  const SymmetricFamily fam = build_family(c);
  const ConditionalUnitary u = conditional_unitary(c);

  std::vector<cplx> joint(2 * n);  // |psi_l> (x) |0>_a
  for (int k = 0; k < n; ++k) joint[k] = fam.states[input_index][k];
  const std::vector<cplx> out = apply(u.matrix, joint);

  StateVector conclusive(out.begin(), out.begin() + n);
  StateVector failure(out.begin() + n, out.end());
  const double pc = norm(conclusive) * norm(conclusive);

  ProtocolOutcome r;
  r.input_index = input_index;
  r.p_conclusive = pc;
  const double cn = norm(conclusive);
  for (cplx& x : conclusive) x /= cn;
  r.conclusive_state = std::move(conclusive);
  const double fn = norm(failure);
  if (1.0 - pc > 1e-14) {
    for (cplx& x : failure) x /= fn;
    r.failure_state = std::move(failure);
  }

  const std::vector<cplx> clicks = apply(inverse_fourier(fam.dim), r.conclusive_state);
  r.fourier_click_distribution.resize(n);
  for (int k = 0; k < n; ++k) r.fourier_click_distribution[k] = std::norm(clicks[k]);
  return r;
}

double two_state_bound(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("states live in different dimensions");
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw InvalidConfig("states must be nonzero");
  return 1.0 - std::abs(inner(a, b)) / (na * nb);
}

Povm make_povm(const CoefficientVector& c) {
  const SymmetricFamily fam = build_family(c);
  const double p = optimal_probability(c);
  Povm povm;
  povm.detection_ops = detection_operators(fam, p);
  povm.success_op = success_operator(c);
  povm.failure_op = failure_operator(c);
  povm.p_success = p;
  return povm;
}

double verify_completeness(const Povm& povm) {
  if (povm.detection_ops.empty()) throw InvalidConfig("POVM has no detection operators");
  const int n = povm.detection_ops.front().rows();
  Matrix sum(n, n);
  for (const Matrix& a : povm.detection_ops) sum = sum + adjoint(a) * a;
  sum = sum + adjoint(povm.failure_op) * povm.failure_op;
  return operator_norm(sum - Matrix::identity(n));
}

}  // namespace symdisc
