#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "binbeam/linalg.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace binbeam;
using testsupport::lu_solve;
using testsupport::random_hpd;
using testsupport::random_vector;
using testsupport::rel_error;

namespace {

Eigen::MatrixXcd to_eigen(const HermitianMatrix& m) {
  Eigen::MatrixXcd e(m.dim(), m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) e(r, c) = m(r, c);
  return e;
}

}  // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("hermitian_solve identity") {
  HermitianMatrix m = HermitianMatrix::identity(2);
  ComplexVector rhs = {Complex(1, 0), Complex(0, 2)};
  ComplexVector x = hermitian_solve(m, rhs, 0.0);
  CHECK(std::abs(x[0] - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(x[1] - Complex(0, 2)) < 1e-15);
}

TEST_CASE("hermitian_solve diagonal") {
  HermitianMatrix m(2);
  m(0, 0) = 2.0;
  m(1, 1) = 4.0;
  ComplexVector x = hermitian_solve(m, {Complex(2, 0), Complex(4, 0)}, 0.0);
  CHECK(std::abs(x[0] - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(x[1] - Complex(1, 0)) < 1e-15);
}

TEST_CASE("hermitian_solve matches elimination oracle on seeded 4x4") {
  auto g = testsupport::rng(42);
  HermitianMatrix m = random_hpd(g, 4);
  ComplexVector rhs = random_vector(g, 4);

  ComplexVector x = hermitian_solve(m, rhs, 0.0);
  ComplexVector x_oracle = lu_solve(m.to_matrix(), rhs);
  CHECK(rel_error(x, x_oracle) < 1e-10);

  ComplexVector back = m.apply(x);
  double resid = 0.0;
  for (std::size_t i = 0; i < 4; ++i) resid += std::norm(back[i] - rhs[i]);
  CHECK(std::sqrt(resid) < 1e-10 * norm2(rhs));
}

TEST_CASE("hermitian_solve residual property over random PD matrices") {
  // Solve-then-multiply reproduces the rhs for all small dims.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto g = testsupport::rng(seed);
    const std::size_t dim = 2 + static_cast<std::size_t>(seed % 7);
    HermitianMatrix m = random_hpd(g, dim);
    ComplexVector rhs = random_vector(g, dim);
    ComplexVector x = hermitian_solve(m, rhs, 0.0);
    ComplexVector back = m.apply(x);
    double resid = 0.0;
    for (std::size_t i = 0; i < dim; ++i) resid += std::norm(back[i] - rhs[i]);
    CHECK(std::sqrt(resid) <= 1e-8 * norm2(rhs));
  }
}

TEST_CASE("hermitian_solve handles multi-column right-hand sides") {
  auto g = testsupport::rng(314);
  HermitianMatrix m = random_hpd(g, 4);
  ComplexMatrix rhs(4, 3);
  for (std::size_t c = 0; c < 3; ++c) rhs.set_column(c, random_vector(g, 4));
  const ComplexMatrix x = hermitian_solve(m, rhs, 0.0);
  REQUIRE(x.rows() == 4);
  REQUIRE(x.cols() == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    const ComplexVector single = hermitian_solve(m, rhs.column(c), 0.0);
    CHECK(rel_error(x.column(c), single) == 0.0);
    const ComplexVector back = m.apply(x.column(c));
    CHECK(rel_error(back, rhs.column(c)) < 1e-10);
  }
}

TEST_CASE("hermitian_solve rejects dimension mismatch and singular input") {
  HermitianMatrix m(3);
  CHECK_THROWS_AS(hermitian_solve(m, ComplexVector(2), 0.0), DimensionMismatch);
  CHECK_THROWS_AS(hermitian_solve(m, ComplexVector(3), 0.0), SingularMatrix);
  // Ridge rescues it.
  ComplexVector x = hermitian_solve(m, ComplexVector{1.0, 1.0, 1.0}, 2.0);
  CHECK(std::abs(x[0] - Complex(0.5, 0)) < 1e-14);
}

TEST_CASE("gevd_principal diagonal pair") {
  HermitianMatrix a(2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  GevdResult r = gevd_principal(a, HermitianMatrix::identity(2));
  CHECK(r.eigenvalue == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(r.eigenvector[0] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(r.eigenvector[1]) < 1e-12);
}

TEST_CASE("gevd_principal rank-one plus identity") {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ComplexVector v = {inv_sqrt2, inv_sqrt2};
  HermitianMatrix a = HermitianMatrix::outer(v, 10.0);
  a.add_diagonal(1.0);
  GevdResult r = gevd_principal(a, HermitianMatrix::identity(2));
  CHECK(r.eigenvalue == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(std::abs(r.eigenvector[0] - Complex(inv_sqrt2, 0)) < 1e-10);
  CHECK(std::abs(r.eigenvector[1] - Complex(inv_sqrt2, 0)) < 1e-10);
}

TEST_CASE("gevd_principal matches Eigen whitening oracle on seeded PD pairs") {
  for (std::uint64_t seed = 7; seed < 27; ++seed) {
    auto g = testsupport::rng(seed);
    HermitianMatrix a = random_hpd(g, 4);
    HermitianMatrix b = random_hpd(g, 4);

    GevdResult r = gevd_principal(a, b);

    // Oracle: b^{-1/2} a b^{-1/2} through Eigen's self-adjoint solver.
    Eigen::MatrixXcd ea = to_eigen(a), eb = to_eigen(b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sb(eb);
    Eigen::MatrixXcd b_inv_half = sb.operatorInverseSqrt();
    Eigen::MatrixXcd w = b_inv_half * ea * b_inv_half;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sw(0.5 * (w + w.adjoint()));
    const double lam_oracle = sw.eigenvalues()(3);
    Eigen::VectorXcd x_oracle = b_inv_half * sw.eigenvectors().col(3);
    x_oracle.normalize();

    CHECK(std::abs(r.eigenvalue - lam_oracle) < 1e-8 * std::abs(lam_oracle));
    ComplexVector xo(4);
    for (int i = 0; i < 4; ++i) xo[i] = x_oracle(i);
    CHECK(testsupport::rel_error_up_to_phase(xo, r.eigenvector) < 1e-8);

    // Residual a x = lambda b x, componentwise.
    ComplexVector ax = a.apply(r.eigenvector);
    ComplexVector bx = b.apply(r.eigenvector);
    const double ax_norm = norm2(ax);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(std::abs(ax[i] - r.eigenvalue * bx[i]) <= 1e-8 * ax_norm);
    }
  }
}

TEST_CASE("gevd_principal eigenvalue dominates sampled Rayleigh quotients") {
  auto g = testsupport::rng(99);
  HermitianMatrix a = random_hpd(g, 5);
  HermitianMatrix b = random_hpd(g, 5);
  GevdResult r = gevd_principal(a, b);

  double sampled_max = 0.0;
  for (int i = 0; i < 1000; ++i) {
    ComplexVector v = random_vector(g, 5);
    const double q = a.quadratic_form(v) / b.quadratic_form(v);
    sampled_max = std::max(sampled_max, q);
  }
  // No sampled quotient may exceed the returned eigenvalue, and the
  // eigenvalue is attained at the returned eigenvector.
  CHECK(r.eigenvalue >= sampled_max * (1.0 - 1e-12));
  const double at_vec = a.quadratic_form(r.eigenvector) / b.quadratic_form(r.eigenvector);
  CHECK(at_vec == doctest::Approx(r.eigenvalue).epsilon(1e-10));
  CHECK(at_vec >= sampled_max * (1.0 - 1e-12));
}

TEST_CASE("gevd_principal phase convention") {
  for (std::uint64_t seed = 3; seed < 13; ++seed) {
    auto g = testsupport::rng(seed);
    HermitianMatrix a = random_hpd(g, 4);
    HermitianMatrix b = random_hpd(g, 4);
    GevdResult r = gevd_principal(a, b);
    CHECK(std::abs(norm2(r.eigenvector) - 1.0) < 1e-12);
    for (const Complex& z : r.eigenvector) {
      if (std::abs(z) > 1e-12) {
        CHECK(std::abs(std::arg(z)) < 1e-10);
        break;
      }
    }
  }
}

TEST_CASE("gevd_principal rejects non-PD second matrix") {
  HermitianMatrix a = HermitianMatrix::identity(3);
  HermitianMatrix b(3);  // zero matrix
  CHECK_THROWS_AS(gevd_principal(a, b), NotPositiveDefinite);
  CHECK_THROWS_AS(gevd_principal(a, HermitianMatrix::identity(4)), DimensionMismatch);
}

TEST_CASE("hermitian_factor identity and diagonal") {
  ComplexMatrix f = hermitian_factor(HermitianMatrix::identity(3));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(std::abs(f(r, c) - (r == c ? Complex(1, 0) : Complex(0, 0))) < 1e-15);

  HermitianMatrix d(2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  ComplexMatrix fd = hermitian_factor(d);
  CHECK(std::abs(fd(0, 0) - Complex(2, 0)) < 1e-15);
  CHECK(std::abs(fd(1, 1) - Complex(3, 0)) < 1e-15);
  CHECK(std::abs(fd(1, 0)) < 1e-15);
}

TEST_CASE("hermitian_factor reconstructs rank-deficient all-ones matrix") {
  HermitianMatrix ones(4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) ones(r, c) = 1.0;
  ComplexMatrix f = hermitian_factor(ones);
  // F F^H == m
  double err = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      Complex acc(0, 0);
      for (std::size_t k = 0; k < 4; ++k) acc += f(r, k) * std::conj(f(c, k));
      err += std::norm(acc - ones(r, c));
    }
  }
  CHECK(std::sqrt(err) < 1e-8 * ones.frobenius());
}

TEST_CASE("hermitian_factor rejects indefinite input") {
  HermitianMatrix m(2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  CHECK_THROWS_AS(hermitian_factor(m), NotPositiveSemidefinite);
}

TEST_CASE("hermitian_eig recovers known spectrum") {
  auto g = testsupport::rng(5);
  HermitianMatrix m = random_hpd(g, 6);
  EigenDecomposition d = hermitian_eig(m);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
  for (int i = 0; i < 6; ++i) {
    CHECK(d.eigenvalues[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-10));
  }
  // Residual check m v = lambda v.
  for (std::size_t c = 0; c < 6; ++c) {
    ComplexVector v(6);
    for (std::size_t r = 0; r < 6; ++r) v[r] = d.eigenvectors(r, c);
    ComplexVector mv = m.apply(v);
    for (std::size_t r = 0; r < 6; ++r) {
      CHECK(std::abs(mv[r] - d.eigenvalues[c] * v[r]) < 1e-10 * m.frobenius());
    }
  }
}

TEST_SUITE_END();
