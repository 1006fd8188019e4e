#pragma once

#include "symdisc/states.hpp"

namespace symdisc {

/// Measurement elements of the discrimination protocol: one rank-one
/// detection operator per input state plus the shared failure element.
struct Povm {
  std::vector<Matrix> detection_ops;
  Matrix success_op;  // diagonal, entries c_min/c_k
  Matrix failure_op;  // diagonal, entries sqrt(1 - (c_min/c_k)^2)
  double p_success = 0.0;
};

/// 2N x 2N unitary on system (x) ancilla, ancilla index major:
/// rows/cols 0..N-1 are ancilla |0>, N..2N-1 are ancilla |1>.
/// Blocks [[S, -F], [F, S]] with S, F the success/failure diagonals.
struct ConditionalUnitary {
  Matrix matrix;
  int dim = 0;
};

struct ProtocolOutcome {
  int input_index = 0;
  double p_conclusive = 0.0;
  StateVector conclusive_state;  // unit norm; u_l up to global phase
  StateVector failure_state;     // empty when p_conclusive ~ 1
  std::vector<double> fourier_click_distribution;
};

/// N * min_k |c_k|^2: the largest conclusive probability any unambiguous
/// strategy reaches on this family.
double optimal_probability(const CoefficientVector& c);

Matrix success_operator(const CoefficientVector& c);
Matrix failure_operator(const CoefficientVector& c);
ConditionalUnitary conditional_unitary(const CoefficientVector& c);

/// Rank-one detection operators at conclusive probability p; feasibility is
/// checked through positivity of the remaining failure element.
std::vector<Matrix> detection_operators(const SymmetricFamily& family, double p);

Matrix fourier(Dimension dim);          // F[k][l] = e^{2 pi i k l / N} / sqrt(N)
Matrix inverse_fourier(Dimension dim);  // adjoint of fourier()

ProtocolOutcome apply_protocol(const CoefficientVector& c, int input_index);

/// 1 - |<a|b>|: the two-state unambiguous bound for unit vectors.
double two_state_bound(const StateVector& a, const StateVector& b);

Povm make_povm(const CoefficientVector& c);

/// Operator-norm residual of sum_k A_k† A_k + A_I† A_I - I.
double verify_completeness(const Povm& povm);

}  // namespace symdisc
