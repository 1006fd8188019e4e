#include "symdisc/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "symdisc/errors.hpp"

namespace symdisc {

namespace {

constexpr double kNormTol = 1e-12;

void require_nonzero(const CoefficientVector& c) {
  for (int k = 0; k < c.dim(); ++k)
    if (c.c[k] == 0.0)
      throw ZeroCoefficient("coefficient " + std::to_string(k) + " is zero");
}

}  // namespace

Dimension Dimension::of(int n) {
  if (n < 2) throw InvalidConfig("dimension must be at least 2, got " + std::to_string(n));
  return Dimension{n};
}

bool Dimension::is_power_of_two() const {
  return n >= 2 && std::has_single_bit(static_cast<unsigned>(n));
}

int Dimension::log2() const {
  if (!is_power_of_two())
    throw DimensionNotPowerOfTwo("dimension " + std::to_string(n) + " is not a power of two");
  return std::bit_width(static_cast<unsigned>(n)) - 1;
}

void validate_angles(const AngleVector& angles) {
  if (angles.thetas.empty()) throw AngleOutOfDomain("need at least one angle");
  constexpr double half_pi = std::numbers::pi / 2.0;
  for (std::size_t j = 0; j < angles.thetas.size(); ++j) {
    const double t = angles.thetas[j];
    if (!(t > 0.0) || !(t < half_pi))
      throw AngleOutOfDomain("theta_" + std::to_string(j + 1) +
                             " must lie strictly inside (0, pi/2)");
  }
}

CoefficientVector CoefficientVector::from_values(std::vector<double> values) {
  if (values.size() < 2) throw InvalidConfig("need at least two coefficients");
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0))
      throw NonPositiveCoefficient("coefficient " + std::to_string(k) +
                                   " must be strictly positive");
    s += values[k] * values[k];
  }
  if (std::abs(s - 1.0) > kNormTol)
    throw CoefficientNotNormalized("squared coefficients must sum to 1 within 1e-12");
  return CoefficientVector{std::move(values)};
}

double min_coefficient(const CoefficientVector& c) {
  return std::abs(c.c[static_cast<std::size_t>(min_coefficient_index(c))]);
}

int min_coefficient_index(const CoefficientVector& c) {
  if (c.c.empty()) throw InvalidConfig("empty coefficient vector");
  int best = 0;
  for (int k = 1; k < c.dim(); ++k)
    if (std::abs(c.c[k]) < std::abs(c.c[best])) best = k;
  return best;
}

CoefficientVector coefficients_from_angles(const AngleVector& angles) {
  validate_angles(angles);
  const int n = angles.dim();
  std::vector<double> c(n);
  double sines = 1.0;  // prod_{j<=k} sin theta_j
  for (int k = 0; k + 1 < n; ++k) {
    c[k] = std::cos(angles.thetas[k]) * sines;
    sines *= std::sin(angles.thetas[k]);
  }
  c[n - 1] = sines;
  return CoefficientVector{std::move(c)};
}

AngleVector angles_from_coefficients(const CoefficientVector& c) {
  const int n = c.dim();
  if (n < 2) throw InvalidConfig("need at least two coefficients");
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    if (!(c.c[k] > 0.0))
      throw NonPositiveCoefficient("coefficient " + std::to_string(k) +
                                   " must be strictly positive to invert the chain");
    s += c.c[k] * c.c[k];
  }
  if (std::abs(s - 1.0) > kNormTol)
    throw CoefficientNotNormalized("squared coefficients must sum to 1 within 1e-12");

  std::vector<double> thetas(n - 1);
  double sines = 1.0;
  for (int j = 0; j + 2 < n; ++j) {
    double ratio = c.c[j] / sines;
    ratio = std::clamp(ratio, -1.0, 1.0);
    thetas[j] = std::acos(ratio);
    sines *= std::sin(thetas[j]);
  }
  thetas[n - 2] = std::atan2(c.c[n - 1], c.c[n - 2]);
  return AngleVector{std::move(thetas)};
}

Matrix z_operator(Dimension dim) {
  Dimension::of(dim.n);
  Matrix z(dim.n, dim.n);
  for (int k = 0; k < dim.n; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / dim.n;
    z.at(k, k) = std::polar(1.0, phi);
  }
  return z;
}

SymmetricFamily build_family(const CoefficientVector& c) {
  const int n = c.dim();
  Dimension dim = Dimension::of(n);
  require_nonzero(c);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += c.c[k] * c.c[k];
  if (std::abs(s - 1.0) > kNormTol)
    throw CoefficientNotNormalized("squared coefficients must sum to 1 within 1e-12");

  double q = 0.0;
  for (int k = 0; k < n; ++k) q += 1.0 / (c.c[k] * c.c[k]);

  SymmetricFamily fam;
  fam.dim = dim;
  fam.coefficients = c;
  fam.q = q;
  fam.states.resize(n);
  fam.reciprocals.resize(n);
  const double rq = 1.0 / std::sqrt(q);
  for (int l = 0; l < n; ++l) {
    StateVector psi(n), rec(n);
    for (int k = 0; k < n; ++k) {
      const double phi = 2.0 * std::numbers::pi * k * l / n;
      psi[k] = c.c[k] * std::polar(1.0, phi);
      rec[k] = rq / c.c[k] * std::polar(1.0, phi);
    }
    fam.states[l] = std::move(psi);
    fam.reciprocals[l] = std::move(rec);
  }
  return fam;
}

}  // namespace symdisc
