// Shared helpers for the unit and acceptance suites: seeded generators and
// independent oracles (dense Gaussian elimination, Eigen-based whitening).
// Everything here stays out of the library so the oracles cannot share code
// with the paths they check.
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "binbeam/linalg.hpp"

namespace testsupport {

using binbeam::Complex;
using binbeam::ComplexMatrix;
using binbeam::ComplexVector;
using binbeam::HermitianMatrix;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Complex random_complex(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Complex(n(g), n(g));
}

inline ComplexVector random_vector(std::mt19937_64& g, std::size_t n) {
  ComplexVector v(n);
  for (auto& z : v) z = random_complex(g);
  return v;
}

// Random Hermitian positive definite matrix G G^H + eps I.
inline HermitianMatrix random_hpd(std::mt19937_64& g, std::size_t n, double eps = 0.1) {
  HermitianMatrix m(n);
  for (std::size_t k = 0; k < n; ++k) m.add_outer(random_vector(g, n));
  m.add_diagonal(eps);
  m.symmetrize();
  return m;
}

// Dense complex LU solve with partial pivoting. Independent of the
// library's Cholesky path.
inline ComplexVector lu_solve(ComplexMatrix a, ComplexVector b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        pivot = r;
      }
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    const Complex d = a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex f = a(r, col) / d;
      if (f == Complex(0.0, 0.0)) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  ComplexVector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = b[ii];
    for (std::size_t c = ii + 1; c < n; ++c) s -= a(ii, c) * x[c];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

inline double rel_error(const ComplexVector& got, const ComplexVector& want) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += std::norm(got[i] - want[i]);
    den += std::norm(want[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Independent oracle for constrained minimum-variance solutions: solve the
// KKT system [[R~, C], [C^H, 0]] [w; mu] = [0; g^H] by dense elimination and
// return w.
inline ComplexVector kkt_solve(const HermitianMatrix& stacked, const ComplexMatrix& c,
                               const ComplexVector& g) {
  const std::size_t n = stacked.dim();
  const std::size_t k = c.cols();
  ComplexMatrix m(n + k, n + k);
  ComplexVector rhs(n + k, Complex(0, 0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t cc = 0; cc < n; ++cc) m(r, cc) = stacked(r, cc);
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < k; ++j) {
      m(r, n + j) = c(r, j);
      m(n + j, r) = std::conj(c(r, j));
    }
  }
  for (std::size_t j = 0; j < k; ++j) rhs[n + j] = std::conj(g[j]);
  const ComplexVector sol = lu_solve(m, rhs);
  return ComplexVector(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
}

// Random per-bin beamforming instance: Hermitian PD correlation matrix plus
// reference-normalized desired and interferer RTFs.
struct BeamformInstance {
  HermitianMatrix r;
  ComplexVector a_left, a_right;
  ComplexMatrix b_left, b_right;
  std::vector<ComplexVector> b_raw;
};

inline BeamformInstance random_instance(std::uint64_t seed, std::size_t mics2,
                                        std::size_t p_count) {
  auto g = rng(seed);
  BeamformInstance inst;
  inst.r = random_hpd(g, mics2, 0.5);
  const std::size_t ref_r = mics2 / 2;
  ComplexVector a = random_vector(g, mics2);
  inst.a_left = a;
  inst.a_right = a;
  const Complex rl = a[0], rr = a[ref_r];
  for (std::size_t i = 0; i < mics2; ++i) {
    inst.a_left[i] = a[i] / rl;
    inst.a_right[i] = a[i] / rr;
  }
  inst.a_left[0] = 1.0;
  inst.a_right[ref_r] = 1.0;
  inst.b_left = ComplexMatrix(mics2, p_count);
  inst.b_right = ComplexMatrix(mics2, p_count);
  for (std::size_t p = 0; p < p_count; ++p) {
    ComplexVector b = random_vector(g, mics2);
    inst.b_raw.push_back(b);
    for (std::size_t i = 0; i < mics2; ++i) {
      inst.b_left(i, p) = b[i] / b[0];
      inst.b_right(i, p) = b[i] / b[ref_r];
    }
    inst.b_left(0, p) = 1.0;
    inst.b_right(ref_r, p) = 1.0;
  }
  return inst;
}

// Relative error modulo a global complex phase (for eigenvector compares).
inline double rel_error_up_to_phase(const ComplexVector& got, const ComplexVector& want) {
  Complex align(0.0, 0.0);
  for (std::size_t i = 0; i < got.size(); ++i) align += std::conj(got[i]) * want[i];
  const double mag = std::abs(align);
  if (mag == 0.0) return 1.0;
  align /= mag;
  ComplexVector rotated(got.size());
  for (std::size_t i = 0; i < got.size(); ++i) rotated[i] = got[i] * align;
  return rel_error(rotated, want);
}

}  // namespace testsupport
