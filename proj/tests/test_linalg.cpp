#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "symdisc/linalg.hpp"

using namespace symdisc;

namespace {

/// splitmix64; deterministic filler for property tests.
double next_double(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

Matrix random_matrix(int n, std::uint64_t& s) {
  Matrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a.at(r, c) = cplx(next_double(s), next_double(s));
  return a;
}

Matrix random_hermitian(int n, std::uint64_t& s) {
  Matrix a = random_matrix(n, s);
  Matrix h(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      h.at(r, c) = 0.5 * (a.at(r, c) + std::conj(a.at(c, r)));
  return h;
}

}  // namespace

TEST_CASE("matrix product against a hand-multiplied pair") {
  Matrix a(2, 2);
  a.at(0, 0) = {1, 1};
  a.at(0, 1) = {0, 2};
  a.at(1, 0) = {3, 0};
  a.at(1, 1) = {1, -1};
  Matrix b(2, 2);
  b.at(0, 0) = {2, 0};
  b.at(0, 1) = {0, 1};
  b.at(1, 0) = {1, 1};
  b.at(1, 1) = {4, 0};
  Matrix p = a * b;
  CHECK(std::abs(p.at(0, 0) - cplx(0, 4)) < 1e-15);   // (1+i)2 + 2i(1+i)
  CHECK(std::abs(p.at(0, 1) - cplx(-1, 9)) < 1e-15);  // (1+i)i + 2i*4
  CHECK(std::abs(p.at(1, 0) - cplx(8, 0)) < 1e-15);   // 6 + (1-i)(1+i)
  CHECK(std::abs(p.at(1, 1) - cplx(4, -1)) < 1e-15);  // 3i + (1-i)4
}

TEST_CASE("adjoint conjugates and transposes") {
  std::uint64_t s = 1;
  Matrix a = random_matrix(4, s);
  Matrix ad = adjoint(a);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(ad.at(r, c) == std::conj(a.at(c, r)));
  CHECK(frobenius_norm(adjoint(ad) - a) == 0.0);
}

TEST_CASE("apply matches the row-by-row definition") {
  std::uint64_t s = 2;
  Matrix a = random_matrix(3, s);
  std::vector<cplx> v = {{1, 2}, {0, -1}, {3, 0}};
  std::vector<cplx> w = symdisc::apply(a, v);
  for (int r = 0; r < 3; ++r) {
    cplx expect = 0.0;
    for (int c = 0; c < 3; ++c) expect += a.at(r, c) * v[static_cast<std::size_t>(c)];
    CHECK(std::abs(w[static_cast<std::size_t>(r)] - expect) < 1e-15);
  }
}

TEST_CASE("inner conjugates the left argument") {
  std::vector<cplx> a = {{0, 1}, {2, 0}};
  std::vector<cplx> b = {{1, 0}, {0, 3}};
  CHECK(std::abs(inner(a, b) - cplx(0, 5)) < 1e-15);  // conj(i)*1 + 2*3i
  CHECK(norm(a) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("eigenvalues of a diagonal matrix come back sorted") {
  std::vector<double> d = {3.0, -1.0, 2.0, 0.5};
  std::vector<double> ev = hermitian_eigenvalues(Matrix::diagonal_real(d));
  REQUIRE(ev.size() == 4);
  CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ev[2] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ev[3] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("known 2x2 eigenvalues, real and complex") {
  Matrix a(2, 2);
  a.at(0, 0) = 2.0;
  a.at(0, 1) = 1.0;
  a.at(1, 0) = 1.0;
  a.at(1, 1) = 2.0;
  std::vector<double> ev = hermitian_eigenvalues(a);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-13));

  Matrix b(2, 2);
  b.at(0, 0) = 2.0;
  b.at(0, 1) = {0.0, 1.0};
  b.at(1, 0) = {0.0, -1.0};
  b.at(1, 1) = 2.0;
  ev = hermitian_eigenvalues(b);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("known tridiagonal 3x3 eigenvalues") {
  Matrix a(3, 3);
  for (int i = 0; i < 3; ++i) a.at(i, i) = 2.0;
  a.at(0, 1) = a.at(1, 0) = a.at(1, 2) = a.at(2, 1) = 1.0;
  std::vector<double> ev = hermitian_eigenvalues(a);
  const double r2 = std::sqrt(2.0);
  CHECK(ev[0] == doctest::Approx(2.0 - r2).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(ev[2] == doctest::Approx(2.0 + r2).epsilon(1e-13));
}

TEST_CASE("eigenvalue trace and Frobenius identities on random Hermitian input") {
  std::uint64_t s = 3;
  for (int n : {2, 3, 5, 8, 13}) {
    Matrix h = random_hermitian(n, s);
    std::vector<double> ev = hermitian_eigenvalues(h);
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += h.at(i, i).real();
    double sum = 0.0, sum2 = 0.0;
    for (double v : ev) {
      sum += v;
      sum2 += v * v;
    }
    double frob2 = frobenius_norm(h);
    frob2 *= frob2;
    CHECK(std::abs(sum - trace) < 1e-10);
    CHECK(std::abs(sum2 - frob2) < 1e-10);
  }
}

TEST_CASE("Gram matrices are positive semidefinite") {
  std::uint64_t s = 4;
  for (int rep = 0; rep < 5; ++rep) {
    Matrix b = random_matrix(6, s);
    std::vector<double> ev = hermitian_eigenvalues(adjoint(b) * b);
    for (double v : ev) CHECK(v > -1e-12);
  }
}

TEST_CASE("operator norm of a diagonal matrix is the largest magnitude") {
  std::vector<cplx> d = {{0, -4}, {3, 0}, {0.5, 0.5}};
  CHECK(operator_norm(Matrix::diagonal(d)) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("unitarity residual separates unitary from non-unitary") {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix u(2, 2);
  u.at(0, 0) = r;
  u.at(0, 1) = cplx(0, r);
  u.at(1, 0) = cplx(0, r);
  u.at(1, 1) = r;
  CHECK(unitarity_residual(u) < 1e-14);
  u.at(0, 0) = 2.0 * r;
  CHECK(unitarity_residual(u) > 0.4);
  CHECK(operator_norm(Matrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-13));
}
