// Copyright 2026 The binbeam Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "binbeam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace binbeam {

namespace {

constexpr double kJacobiTol = 1e-15;
constexpr int kMaxJacobiSweeps = 64;

}  // namespace

Complex inner(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("inner: vector lengths differ");
  }
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::conj(a[i]) * b[i];
  }
  return acc;
}

double norm2(const ComplexVector& v) {
  double acc = 0.0;
  for (const Complex& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

bool all_finite(const ComplexVector& v) {
  for (const Complex& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::from_columns(const std::vector<ComplexVector>& cols) {
  if (cols.empty()) return ComplexMatrix(0, 0);
  const std::size_t rows = cols.front().size();
  ComplexMatrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows) {
      throw DimensionMismatch("from_columns: ragged column lengths");
    }
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
  }
  return m;
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
  ComplexVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void ComplexMatrix::set_column(std::size_t c, const ComplexVector& v) {
  if (v.size() != rows_) throw DimensionMismatch("set_column: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  }
  return m;
}

ComplexMatrix ComplexMatrix::multiply(const ComplexMatrix& other) const {
  if (cols_ != other.rows_) throw DimensionMismatch("multiply: inner dimensions differ");
  ComplexMatrix out(rows_, other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Complex v = (*this)(r, k);
      if (v == Complex(0.0, 0.0)) continue;
      for (std::size_t c = 0; c < other.cols_; ++c) {
        out(r, c) += v * other(k, c);
      }
    }
  }
  return out;
}

ComplexVector ComplexMatrix::apply(const ComplexVector& v) const {
  if (v.size() != cols_) throw DimensionMismatch("apply: length mismatch");
  ComplexVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    Complex acc(0.0, 0.0);
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

ComplexVector ComplexMatrix::apply_adjoint(const ComplexVector& v) const {
  if (v.size() != rows_) throw DimensionMismatch("apply_adjoint: length mismatch");
  ComplexVector out(cols_);
  for (std::size_t c = 0; c < cols_; ++c) {
    Complex acc(0.0, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) acc += std::conj((*this)(r, c)) * v[r];
    out[c] = acc;
  }
  return out;
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
  HermitianMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

HermitianMatrix HermitianMatrix::outer(const ComplexVector& v, double weight) {
  HermitianMatrix m(v.size());
  m.add_outer(v, weight);
  return m;
}

void HermitianMatrix::add_outer(const ComplexVector& v, double weight) {
  if (v.size() != dim_) throw DimensionMismatch("add_outer: length mismatch");
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      (*this)(r, c) += weight * v[r] * std::conj(v[c]);
    }
  }
}

void HermitianMatrix::add_scaled(const HermitianMatrix& other, double weight) {
  if (other.dim_ != dim_) throw DimensionMismatch("add_scaled: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += weight * other.data_[i];
}

void HermitianMatrix::add_diagonal(double value) {
  for (std::size_t i = 0; i < dim_; ++i) (*this)(i, i) += value;
}

void HermitianMatrix::scale(double s) {
  for (Complex& z : data_) z *= s;
}

double HermitianMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i).real();
  return t;
}

double HermitianMatrix::frobenius() const {
  double acc = 0.0;
  for (const Complex& z : data_) acc += std::norm(z);
  return std::sqrt(acc);
}

void HermitianMatrix::symmetrize() {
  for (std::size_t r = 0; r < dim_; ++r) {
    (*this)(r, r) = Complex((*this)(r, r).real(), 0.0);
    for (std::size_t c = r + 1; c < dim_; ++c) {
      const Complex v = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
      (*this)(r, c) = v;
      (*this)(c, r) = std::conj(v);
    }
  }
}

bool HermitianMatrix::is_hermitian(double rel_tol) const {
  const double scale = frobenius();
  const double tol = rel_tol * std::max(scale, 1e-300);
  for (std::size_t r = 0; r < dim_; ++r) {
    if (std::abs((*this)(r, r).imag()) > tol) return false;
    for (std::size_t c = r + 1; c < dim_; ++c) {
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
    }
  }
  return true;
}

ComplexVector HermitianMatrix::apply(const ComplexVector& v) const {
  if (v.size() != dim_) throw DimensionMismatch("apply: length mismatch");
  ComplexVector out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    Complex acc(0.0, 0.0);
    for (std::size_t c = 0; c < dim_; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

double HermitianMatrix::quadratic_form(const ComplexVector& w) const {
  return inner(w, apply(w)).real();
}

ComplexMatrix HermitianMatrix::to_matrix() const {
  ComplexMatrix m(dim_, dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) m(r, c) = (*this)(r, c);
  }
  return m;
}

namespace {

// Unpivoted complex Cholesky. Returns false (leaving *lower unusable) when a
// pivot drops below the floor. In semidefinite mode pivots within zero_band
// of zero deflate to an all-zero column instead of failing.
bool cholesky_attempt(const HermitianMatrix& m, double load, double pivot_floor,
                      double zero_band, bool semidefinite, ComplexMatrix* lower) {
  const std::size_t n = m.dim();
  ComplexMatrix f(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j).real() + load;
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(f(j, k));
    if (semidefinite && d <= zero_band) {
      if (d < -zero_band) return false;
      // Deflate: PSD structure forces the rest of this column to ~0.
      continue;
    }
    if (d <= pivot_floor) return false;
    const double fjj = std::sqrt(d);
    f(j, j) = fjj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= f(i, k) * std::conj(f(j, k));
      f(i, j) = s / fjj;
    }
  }
  *lower = std::move(f);
  return true;
}

}  // namespace

CholeskyFactor CholeskyFactor::positive_definite(const HermitianMatrix& m, double ridge) {
  if (ridge < 0.0) throw Error("cholesky: negative ridge");
  const std::size_t n = m.dim();
  if (n == 0) throw DimensionMismatch("cholesky: empty matrix");
  const double scale = m.trace() / static_cast<double>(n) + ridge;
  const double floor = 1e-15 * static_cast<double>(n) * std::max(scale, 0.0);
  ComplexMatrix lower;
  if (!cholesky_attempt(m, ridge, floor, 0.0, /*semidefinite=*/false, &lower)) {
    throw SingularMatrix("hermitian factorization failed (pivot below floor)");
  }
  return CholeskyFactor(std::move(lower));
}

CholeskyFactor CholeskyFactor::semidefinite(const HermitianMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw DimensionMismatch("cholesky: empty matrix");
  const double scale = std::max(m.trace() / static_cast<double>(n), 0.0);
  const double zero_band = 1e-12 * scale;
  ComplexMatrix lower;
  if (cholesky_attempt(m, 0.0, 0.0, zero_band, /*semidefinite=*/true, &lower)) {
    return CholeskyFactor(std::move(lower));
  }
  const double load = 1e-10 * scale;
  if (cholesky_attempt(m, load, 0.0, zero_band, /*semidefinite=*/true, &lower)) {
    return CholeskyFactor(std::move(lower));
  }
  throw NotPositiveSemidefinite("matrix has a significantly negative pivot");
}

ComplexVector CholeskyFactor::forward(const ComplexVector& b) const {
  const std::size_t n = dim();
  if (b.size() != n) throw DimensionMismatch("forward: length mismatch");
  ComplexVector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * z[k];
    const Complex d = lower_(i, i);
    if (d == Complex(0.0, 0.0)) {
      // Deflated column from the semidefinite path; consistent only if s ~ 0.
      z[i] = 0.0;
      continue;
    }
    z[i] = s / d;
  }
  return z;
}

ComplexVector CholeskyFactor::backward(const ComplexVector& b) const {
  const std::size_t n = dim();
  if (b.size() != n) throw DimensionMismatch("backward: length mismatch");
  ComplexVector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(lower_(k, ii)) * x[k];
    const Complex d = std::conj(lower_(ii, ii));
    if (d == Complex(0.0, 0.0)) {
      x[ii] = 0.0;
      continue;
    }
    x[ii] = s / d;
  }
  return x;
}

ComplexVector CholeskyFactor::solve(const ComplexVector& rhs) const {
  return backward(forward(rhs));
}

ComplexMatrix CholeskyFactor::solve(const ComplexMatrix& rhs) const {
  if (rhs.rows() != dim()) throw DimensionMismatch("solve: row count mismatch");
  ComplexMatrix out(rhs.rows(), rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    out.set_column(c, solve(rhs.column(c)));
  }
  return out;
}

ComplexVector hermitian_solve(const HermitianMatrix& m, const ComplexVector& rhs,
                              double ridge) {
  if (rhs.size() != m.dim()) throw DimensionMismatch("hermitian_solve: rhs length");
  return CholeskyFactor::positive_definite(m, ridge).solve(rhs);
}

ComplexMatrix hermitian_solve(const HermitianMatrix& m, const ComplexMatrix& rhs,
                              double ridge) {
  if (rhs.rows() != m.dim()) throw DimensionMismatch("hermitian_solve: rhs rows");
  return CholeskyFactor::positive_definite(m, ridge).solve(rhs);
}

ComplexMatrix hermitian_factor(const HermitianMatrix& m) {
  return CholeskyFactor::semidefinite(m).lower();
}

EigenDecomposition hermitian_eig(const HermitianMatrix& m) {
  const std::size_t n = m.dim();
  ComplexMatrix a = m.to_matrix();
  ComplexMatrix q = ComplexMatrix::identity(n);

  const double scale = std::max(m.frobenius(), 1e-300);
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t qq = p + 1; qq < n; ++qq) off += std::norm(a(p, qq));
    }
    if (std::sqrt(off) <= kJacobiTol * scale) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const Complex beta = a(p, r);
        if (std::abs(beta) <= kJacobiTol * 1e-2 * scale) continue;
        const double alpha = a(p, p).real();
        const double gamma = a(r, r).real();
        const double half_gap = 0.5 * (alpha - gamma);
        const double rad = std::sqrt(half_gap * half_gap + std::norm(beta));
        // Eigenvector of the 2x2 block [[alpha, beta], [conj(beta), gamma]]
        // for its larger eigenvalue, plus the orthogonal complement.
        // lambda_plus - alpha = rad - half_gap, written cancellation-free.
        Complex v1 = beta;
        const double v2 = (half_gap >= 0.0) ? std::norm(beta) / (rad + half_gap)
                                            : rad - half_gap;
        const double nv = std::sqrt(std::norm(v1) + v2 * v2);
        if (nv == 0.0) continue;
        const Complex u1 = v1 / nv;
        const double u2 = v2 / nv;
        const Complex w1 = -u2;  // -conj(u2), u2 real
        const Complex w2 = std::conj(u1);

        for (std::size_t i = 0; i < n; ++i) {
          const Complex aip = a(i, p);
          const Complex air = a(i, r);
          a(i, p) = aip * u1 + air * u2;
          a(i, r) = aip * w1 + air * w2;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const Complex apj = a(p, j);
          const Complex arj = a(r, j);
          a(p, j) = std::conj(u1) * apj + u2 * arj;
          a(r, j) = std::conj(w1) * apj + std::conj(w2) * arj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const Complex qip = q(i, p);
          const Complex qir = q(i, r);
          q(i, p) = qip * u1 + qir * u2;
          q(i, r) = qip * w1 + qir * w2;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = a(order[c], order[c]).real();
    for (std::size_t rr = 0; rr < n; ++rr) out.eigenvectors(rr, c) = q(rr, order[c]);
  }
  return out;
}

GevdResult gevd_principal(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("gevd: dimension mismatch");
  const std::size_t n = a.dim();

  CholeskyFactor fb = [&] {
    try {
      return CholeskyFactor::positive_definite(b);
    } catch (const SingularMatrix&) {
      throw NotPositiveDefinite("gevd: second matrix is not positive definite");
    }
  }();

  // Whitened matrix S = F^-1 A F^-H, assembled column by column.
  HermitianMatrix s(n);
  {
    ComplexMatrix x(n, n);  // F^-1 A
    for (std::size_t c = 0; c < n; ++c) {
      ComplexVector col(n);
      for (std::size_t rr = 0; rr < n; ++rr) col[rr] = a(rr, c);
      x.set_column(c, fb.forward(col));
    }
    // Column c of S^H = F^-1 (X^H e_c); by hermiticity that is also
    // column c of S.
    for (std::size_t c = 0; c < n; ++c) {
      ComplexVector xh_col(n);
      for (std::size_t k = 0; k < n; ++k) xh_col[k] = std::conj(x(c, k));
      const ComplexVector y = fb.forward(xh_col);
      for (std::size_t rr = 0; rr < n; ++rr) s(rr, c) = y[rr];
    }
  }
  s.symmetrize();

  const EigenDecomposition eig = hermitian_eig(s);
  const std::size_t top = n - 1;
  ComplexVector u(n);
  for (std::size_t rr = 0; rr < n; ++rr) u[rr] = eig.eigenvectors(rr, top);

  ComplexVector x = fb.backward(u);
  const double nx = norm2(x);
  if (nx == 0.0) throw SingularMatrix("gevd: zero eigenvector");
  for (Complex& z : x) z /= nx;

  // Phase convention: first non-negligible entry real positive.
  for (const Complex& z : x) {
    const double mag = std::abs(z);
    if (mag > 1e-12) {
      const Complex rot = std::conj(z) / mag;
      for (Complex& w : x) w *= rot;
      break;
    }
  }

  GevdResult out;
  out.eigenvalue = eig.eigenvalues[top];
  out.eigenvector = std::move(x);
  return out;
}

}  // namespace binbeam
