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

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "binbeam/errors.hpp"

namespace binbeam {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

// a^H b (conjugate-linear in the first argument).
Complex inner(const ComplexVector& a, const ComplexVector& b);

// Euclidean norm.
double norm2(const ComplexVector& v);

bool all_finite(const ComplexVector& v);

// Dense complex matrix, row-major. Used for constraint matrices, RTF
// collections and triangular factors; dimensions stay small (<= 4M).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);
  // Builds a matrix from column vectors (all of equal length).
  static ComplexMatrix from_columns(const std::vector<ComplexVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ComplexVector column(std::size_t c) const;
  void set_column(std::size_t c, const ComplexVector& v);

  ComplexMatrix adjoint() const;
  ComplexMatrix multiply(const ComplexMatrix& other) const;
  // this * v
  ComplexVector apply(const ComplexVector& v) const;
  // this^H * v
  ComplexVector apply_adjoint(const ComplexVector& v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ComplexVector data_;
};

// Hermitian matrix stored dense. Callers accumulate outer products and the
// matrix is symmetrized explicitly where rounding drift matters.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static HermitianMatrix identity(std::size_t dim);
  // weight * v v^H
  static HermitianMatrix outer(const ComplexVector& v, double weight = 1.0);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  void add_outer(const ComplexVector& v, double weight = 1.0);
  void add_scaled(const HermitianMatrix& other, double weight);
  void add_diagonal(double value);
  void scale(double s);

  double trace() const;
  double frobenius() const;
  // (A + A^H) / 2, washing out accumulation drift.
  void symmetrize();
  bool is_hermitian(double rel_tol = 1e-12) const;

  ComplexVector apply(const ComplexVector& v) const;
  // real(w^H A w); the imaginary part vanishes for Hermitian A.
  double quadratic_form(const ComplexVector& w) const;

  ComplexMatrix to_matrix() const;

 private:
  std::size_t dim_ = 0;
  ComplexVector data_;
};

// Lower-triangular Cholesky factor F with F F^H = A (+ ridge I).
// positive_definite() throws SingularMatrix when a pivot collapses;
// semidefinite() zeroes negligible pivot columns and retries once with the
// bounded diagonal loading before giving up.
class CholeskyFactor {
 public:
  static CholeskyFactor positive_definite(const HermitianMatrix& m, double ridge = 0.0);
  static CholeskyFactor semidefinite(const HermitianMatrix& m);

  std::size_t dim() const { return lower_.rows(); }
  const ComplexMatrix& lower() const { return lower_; }

  // Solves (F F^H) x = rhs.
  ComplexVector solve(const ComplexVector& rhs) const;
  ComplexMatrix solve(const ComplexMatrix& rhs) const;
  // F z = b
  ComplexVector forward(const ComplexVector& b) const;
  // F^H x = b
  ComplexVector backward(const ComplexVector& b) const;

 private:
  explicit CholeskyFactor(ComplexMatrix lower) : lower_(std::move(lower)) {}
  ComplexMatrix lower_;
};

// Solves (m + ridge I) x = rhs for Hermitian positive definite m.
ComplexVector hermitian_solve(const HermitianMatrix& m, const ComplexVector& rhs,
                              double ridge = 0.0);
ComplexMatrix hermitian_solve(const HermitianMatrix& m, const ComplexMatrix& rhs,
                              double ridge = 0.0);

// Lower-triangular F with F F^H = m for Hermitian PSD m.
ComplexMatrix hermitian_factor(const HermitianMatrix& m);

// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
// rotations. Eigenvalues ascending; eigenvectors are the matching columns.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};
EigenDecomposition hermitian_eig(const HermitianMatrix& m);

// Principal generalized eigenpair of (a, b): maximizes x^H a x / x^H b x.
// b must be positive definite. Implemented by whitening with the Cholesky
// factor of b and decomposing the whitened matrix. The eigenvector is
// returned with unit Euclidean norm and its first entry of magnitude
// > 1e-12 rotated to be real positive.
struct GevdResult {
  double eigenvalue = 0.0;
  ComplexVector eigenvector;
};
GevdResult gevd_principal(const HermitianMatrix& a, const HermitianMatrix& b);

}  // namespace binbeam
