#pragma once

#include <vector>

#include "symdisc/linalg.hpp"

namespace symdisc {

struct Dimension {
  int n = 0;

  static Dimension of(int n);  // requires n >= 2
  bool is_power_of_two() const;
  int log2() const;  // requires is_power_of_two()

  bool operator==(const Dimension&) const = default;
};

/// theta_1..theta_{N-1}, each strictly inside (0, pi/2) so that every
/// hyperspherical coefficient is strictly positive.
struct AngleVector {
  std::vector<double> thetas;

  int dim() const { return static_cast<int>(thetas.size()) + 1; }
};

void validate_angles(const AngleVector& angles);

/// Real positive amplitudes of the fiducial state, unit 2-norm.
struct CoefficientVector {
  std::vector<double> c;

  int dim() const { return static_cast<int>(c.size()); }
  static CoefficientVector from_values(std::vector<double> values);
};

double min_coefficient(const CoefficientVector& c);
int min_coefficient_index(const CoefficientVector& c);  // smallest index on ties

using StateVector = std::vector<cplx>;

/// The N symmetric states, their reciprocal (biorthogonal) partners, and the
/// normalization q = sum_j |c_j|^-2 shared by the reciprocals.
struct SymmetricFamily {
  Dimension dim;
  CoefficientVector coefficients;
  std::vector<StateVector> states;
  std::vector<StateVector> reciprocals;
  double q = 0.0;
};

/// Product chain c_0 = cos t1, c_k = cos t_{k+1} prod_{j<=k} sin t_j,
/// c_{N-1} = prod_j sin t_j.
CoefficientVector coefficients_from_angles(const AngleVector& angles);

/// Inverse of the product chain; requires strictly positive coefficients.
AngleVector angles_from_coefficients(const CoefficientVector& c);

/// diag(e^{2 pi i k / N}): the cyclic generator of the family.
Matrix z_operator(Dimension dim);

SymmetricFamily build_family(const CoefficientVector& c);

}  // namespace symdisc
