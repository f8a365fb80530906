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

#include "binbeam/beamformer.hpp"

#include <cmath>

namespace binbeam {

ComplexVector BeamformerPair::stacked() const {
  ComplexVector w(left.size() + right.size());
  std::copy(left.begin(), left.end(), w.begin());
  std::copy(right.begin(), right.end(), w.begin() + static_cast<std::ptrdiff_t>(left.size()));
  return w;
}

ScalingParameters ScalingParameters::uniform(Complex delta, std::size_t count, DeltaMode mode) {
  ScalingParameters p;
  p.left.assign(count, delta);
  p.right.assign(count, delta);
  p.provenance = mode;
  return p;
}

HermitianMatrix StackedCorrelation::full() const {
  const std::size_t n = half.dim();
  HermitianMatrix m(2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      m(r, c) = half(r, c);
      m(n + r, n + c) = half(r, c);
    }
  }
  return m;
}

bool constraint_full_rank(const ComplexMatrix& c, double tol) {
  if (c.cols() == 0) return true;
  // Singular values of C are the square roots of the eigenvalues of C^H C.
  HermitianMatrix gram(c.cols());
  for (std::size_t i = 0; i < c.cols(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      Complex acc(0.0, 0.0);
      for (std::size_t r = 0; r < c.rows(); ++r) acc += std::conj(c(r, i)) * c(r, j);
      gram(i, j) = acc;
    }
  }
  gram.symmetrize();
  const EigenDecomposition eig = hermitian_eig(gram);
  const double largest = eig.eigenvalues.back();
  const double smallest = eig.eigenvalues.front();
  if (largest <= 0.0) return false;
  return smallest > tol * tol * largest;
}

double default_ridge(const HermitianMatrix& r) {
  return 1e-9 * r.trace() / static_cast<double>(r.dim());
}

namespace {

void check_binaural_lengths(const ComplexVector& a_left, const ComplexVector& a_right,
                            const ComplexMatrix& b_left, const ComplexMatrix& b_right) {
  if (a_left.size() != a_right.size()) {
    throw DimensionMismatch("beamformer: left/right RTF lengths differ");
  }
  if (b_left.cols() != b_right.cols()) {
    throw DimensionMismatch("beamformer: interferer counts differ across ears");
  }
  if (b_left.cols() > 0 && (b_left.rows() != a_left.size() || b_right.rows() != a_left.size())) {
    throw DimensionMismatch("beamformer: interferer RTF length mismatch");
  }
}

}  // namespace

ConstraintSystem bmvdr_constraints(const ComplexVector& a_left, const ComplexVector& a_right) {
  const std::size_t n = a_left.size();
  ConstraintSystem cs;
  cs.c = ComplexMatrix(2 * n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    cs.c(i, 0) = a_left[i];
    cs.c(n + i, 1) = a_right[i];
  }
  cs.g = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
  return cs;
}

ConstraintSystem blcmv_constraints(const ComplexVector& a_left, const ComplexVector& a_right,
                                   const ComplexMatrix& b_left, const ComplexMatrix& b_right,
                                   const ScalingParameters& deltas) {
  check_binaural_lengths(a_left, a_right, b_left, b_right);
  const std::size_t n = a_left.size();
  const std::size_t p = b_left.cols();
  if (deltas.left.size() != p || deltas.right.size() != p) {
    throw DimensionMismatch("blcmv: scaling parameter count mismatch");
  }
  ConstraintSystem cs;
  cs.c = ComplexMatrix(2 * n, 2 * (p + 1));
  cs.g.assign(2 * (p + 1), Complex(0.0, 0.0));
  // Column layout [a_L | B_L | a_R | B_R], upper half left, lower half right.
  for (std::size_t i = 0; i < n; ++i) cs.c(i, 0) = a_left[i];
  cs.g[0] = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) cs.c(i, 1 + j) = b_left(i, j);
    cs.g[1 + j] = deltas.left[j];
  }
  for (std::size_t i = 0; i < n; ++i) cs.c(n + i, p + 1) = a_right[i];
  cs.g[p + 1] = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) cs.c(n + i, p + 2 + j) = b_right(i, j);
    cs.g[p + 2 + j] = deltas.right[j];
  }
  return cs;
}

ConstraintSystem bmvdr_rtf_constraints(const ComplexVector& a_left, const ComplexVector& a_right,
                                       const ComplexMatrix& b_left, const ComplexMatrix& b_right) {
  check_binaural_lengths(a_left, a_right, b_left, b_right);
  const std::size_t n = a_left.size();
  const std::size_t p = b_left.cols();
  ConstraintSystem cs;
  cs.c = ComplexMatrix(2 * n, p + 2);
  cs.g.assign(p + 2, Complex(0.0, 0.0));
  // Column layout [a_L | (B_L over -B_R) | a_R]; the middle columns couple
  // the ears: w_L^H b_L,p - w_R^H b_R,p = 0.
  for (std::size_t i = 0; i < n; ++i) cs.c(i, 0) = a_left[i];
  cs.g[0] = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      cs.c(i, 1 + j) = b_left(i, j);
      cs.c(n + i, 1 + j) = -b_right(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) cs.c(n + i, p + 1) = a_right[i];
  cs.g[p + 1] = 1.0;
  return cs;
}

BeamformerPair lcmv_solve(const StackedCorrelation& r, const ConstraintSystem& constraints,
                          std::optional<double> ridge) {
  const std::size_t half_dim = r.half.dim();
  const std::size_t stacked = 2 * half_dim;
  const std::size_t k = constraints.count();
  if (constraints.c.rows() != stacked) {
    throw DimensionMismatch("lcmv: constraint rows do not match stacked dimension");
  }
  if (k > stacked) throw TooManyConstraints("lcmv: more constraints than degrees of freedom");
  if (!constraint_full_rank(constraints.c)) {
    throw RankDeficientConstraints("lcmv: constraint columns nearly dependent");
  }

  const double load = ridge.value_or(default_ridge(r.half));
  CholeskyFactor factor = [&] {
    try {
      return CholeskyFactor::positive_definite(r.half, load);
    } catch (const SingularMatrix&) {
      throw SingularMatrix("lcmv: correlation matrix singular even with ridge");
    }
  }();

  // D = R~^-1 C, solved per block thanks to the block-diagonal structure.
  ComplexMatrix d(stacked, k);
  for (std::size_t j = 0; j < k; ++j) {
    ComplexVector top(half_dim), bottom(half_dim);
    for (std::size_t i = 0; i < half_dim; ++i) {
      top[i] = constraints.c(i, j);
      bottom[i] = constraints.c(half_dim + i, j);
    }
    const ComplexVector top_solved = factor.solve(top);
    const ComplexVector bottom_solved = factor.solve(bottom);
    for (std::size_t i = 0; i < half_dim; ++i) {
      d(i, j) = top_solved[i];
      d(half_dim + i, j) = bottom_solved[i];
    }
  }

  // Gram matrix C^H R~^-1 C, Hermitian positive definite for full-rank C.
  HermitianMatrix gram(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      Complex acc(0.0, 0.0);
      for (std::size_t row = 0; row < stacked; ++row) {
        acc += std::conj(constraints.c(row, i)) * d(row, j);
      }
      gram(i, j) = acc;
    }
  }
  gram.symmetrize();

  ComplexVector rhs(k);
  for (std::size_t i = 0; i < k; ++i) rhs[i] = std::conj(constraints.g[i]);
  ComplexVector y;
  try {
    y = hermitian_solve(gram, rhs, 0.0);
  } catch (const SingularMatrix&) {
    throw RankDeficientConstraints("lcmv: Gram matrix of constraints is singular");
  }

  BeamformerPair w;
  w.left.assign(half_dim, Complex(0.0, 0.0));
  w.right.assign(half_dim, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < half_dim; ++i) {
    Complex top(0.0, 0.0), bottom(0.0, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      top += d(i, j) * y[j];
      bottom += d(half_dim + i, j) * y[j];
    }
    w.left[i] = top;
    w.right[i] = bottom;
  }
  if (!all_finite(w.left) || !all_finite(w.right)) {
    throw SingularMatrix("lcmv: non-finite weights");
  }
  return w;
}

BeamformerPair bmvdr(const HermitianMatrix& r, const ComplexVector& a_left,
                     const ComplexVector& a_right, std::optional<double> ridge) {
  if (a_left.size() != r.dim() || a_right.size() != r.dim()) {
    throw DimensionMismatch("bmvdr: RTF length does not match correlation dimension");
  }
  const double load = ridge.value_or(default_ridge(r));
  const CholeskyFactor factor = CholeskyFactor::positive_definite(r, load);

  BeamformerPair w;
  for (int ear = 0; ear < 2; ++ear) {
    const ComplexVector& a = (ear == 0) ? a_left : a_right;
    const ComplexVector ra = factor.solve(a);
    const Complex denom = inner(a, ra);
    if (std::abs(denom) < 1e-14) {
      throw ZeroDenominator("bmvdr: a^H R^-1 a vanishes");
    }
    ComplexVector wi(r.dim());
    for (std::size_t i = 0; i < r.dim(); ++i) wi[i] = ra[i] / denom;
    if (!all_finite(wi)) throw SingularMatrix("bmvdr: non-finite weights");
    if (ear == 0) {
      w.left = std::move(wi);
    } else {
      w.right = std::move(wi);
    }
  }
  return w;
}

BeamformerPair blcmv(const StackedCorrelation& r, const ComplexVector& a_left,
                     const ComplexVector& a_right, const ComplexMatrix& b_left,
                     const ComplexMatrix& b_right, const ScalingParameters& deltas,
                     std::optional<double> ridge) {
  const std::size_t p = b_left.cols();
  if (p + 1 > r.half.dim()) {
    throw TooManyConstraints("blcmv: P + 1 constraints exceed per-ear degrees of freedom");
  }
  return lcmv_solve(r, blcmv_constraints(a_left, a_right, b_left, b_right, deltas), ridge);
}

BeamformerPair bmvdr_rtf(const StackedCorrelation& r, const ComplexVector& a_left,
                         const ComplexVector& a_right, const ComplexMatrix& b_left,
                         const ComplexMatrix& b_right, std::optional<double> ridge) {
  return lcmv_solve(r, bmvdr_rtf_constraints(a_left, a_right, b_left, b_right), ridge);
}

ScalingParameters optimal_deltas(const BeamformerPair& w_rtf, const ComplexMatrix& b_left,
                                 const ComplexMatrix& b_right) {
  const std::size_t p = b_left.cols();
  if (b_right.cols() != p) throw DimensionMismatch("optimal_deltas: interferer count mismatch");
  ScalingParameters out;
  out.provenance = DeltaMode::kOptimal;
  out.left.resize(p);
  out.right.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const Complex left = inner(w_rtf.left, b_left.column(j));
    const Complex right = inner(w_rtf.right, b_right.column(j));
    if (std::abs(left - right) >= 1e-8) {
      throw ConsistencyViolation(
          "optimal_deltas: left and right responses differ; inputs do not "
          "match the ratio-preserving beamformer");
    }
    out.left[j] = left;
    out.right[j] = left;
  }
  return out;
}

ScalingParameters threshold_deltas(const ScalingParameters& optimal, double delta_min,
                                   double delta_max) {
  if (!(delta_min > 0.0) || !(delta_max > 0.0) || !(delta_min < delta_max)) {
    throw InvalidThresholds("threshold_deltas: require 0 < delta_min < delta_max");
  }
  ScalingParameters out;
  out.provenance = DeltaMode::kThresholded;
  out.left.resize(optimal.count());
  out.right.resize(optimal.count());
  for (std::size_t j = 0; j < optimal.count(); ++j) {
    const double mag = std::abs(optimal.left[j]);
    double thr = mag;
    if (mag <= delta_min) {
      thr = delta_min;
    } else if (mag >= delta_max) {
      thr = delta_max;
    }
    out.left[j] = thr;
    out.right[j] = thr;
  }
  return out;
}

}  // namespace binbeam
