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

#include <optional>
#include <vector>

#include "binbeam/linalg.hpp"

namespace binbeam {

// Left/right filter pair for one frequency bin. Channel convention follows
// the stacked microphone vector: [L1..LM, R1..RM].
struct BeamformerPair {
  ComplexVector left;   // w_L, length 2M
  ComplexVector right;  // w_R, length 2M

  // [w_L; w_R], length 4M.
  ComplexVector stacked() const;
};

enum class DeltaMode { kOptimal, kThresholded, kManual };

// Interference scaling parameters, one per interferer and ear. |delta| sets
// the suppression of that interferer; equal values across ears preserve its
// interaural cues.
struct ScalingParameters {
  std::vector<Complex> left;
  std::vector<Complex> right;
  DeltaMode provenance = DeltaMode::kManual;

  static ScalingParameters uniform(Complex delta, std::size_t count,
                                   DeltaMode mode = DeltaMode::kManual);
  std::size_t count() const { return left.size(); }
};

// Linear response constraints w^H C = g.
struct ConstraintSystem {
  ComplexMatrix c;  // 4M x K
  ComplexVector g;  // K response values

  std::size_t count() const { return g.size(); }
};

// Block-diagonal 4M x 4M correlation matrix diag(R, R) used by the stacked
// minimization; only the 2M x 2M half is stored so the block structure holds
// by construction.
struct StackedCorrelation {
  HermitianMatrix half;

  std::size_t stacked_dim() const { return 2 * half.dim(); }
  HermitianMatrix full() const;
};

// Smallest/largest singular value ratio of the constraint columns must stay
// above this for a solvable system.
inline constexpr double kConstraintRankTol = 1e-8;
bool constraint_full_rank(const ComplexMatrix& c, double tol = kConstraintRankTol);

// 1e-9 * trace / dim, the loading applied when no explicit ridge is given.
double default_ridge(const HermitianMatrix& r);

ConstraintSystem bmvdr_constraints(const ComplexVector& a_left, const ComplexVector& a_right);
ConstraintSystem blcmv_constraints(const ComplexVector& a_left, const ComplexVector& a_right,
                                   const ComplexMatrix& b_left, const ComplexMatrix& b_right,
                                   const ScalingParameters& deltas);
ConstraintSystem bmvdr_rtf_constraints(const ComplexVector& a_left, const ComplexVector& a_right,
                                       const ComplexMatrix& b_left, const ComplexMatrix& b_right);

// Shared closed form w = R~^-1 C (C^H R~^-1 C)^-1 g^H for any constraint set.
BeamformerPair lcmv_solve(const StackedCorrelation& r, const ConstraintSystem& constraints,
                          std::optional<double> ridge = std::nullopt);

// Minimum variance with one distortionless constraint per ear:
// w_L = R^-1 a_L / (a_L^H R^-1 a_L) and likewise for the right ear.
BeamformerPair bmvdr(const HermitianMatrix& r, const ComplexVector& a_left,
                     const ComplexVector& a_right, std::optional<double> ridge = std::nullopt);

// Adds per-interferer scaled-response constraints (columns of b_left/b_right
// are interferer RTF vectors).
BeamformerPair blcmv(const StackedCorrelation& r, const ComplexVector& a_left,
                     const ComplexVector& a_right, const ComplexMatrix& b_left,
                     const ComplexMatrix& b_right, const ScalingParameters& deltas,
                     std::optional<double> ridge = std::nullopt);

// Variant whose interferer constraints tie the left and right responses
// together (interaural ratio preservation) without fixing the suppression.
BeamformerPair bmvdr_rtf(const StackedCorrelation& r, const ComplexVector& a_left,
                         const ComplexVector& a_right, const ComplexMatrix& b_left,
                         const ComplexMatrix& b_right,
                         std::optional<double> ridge = std::nullopt);

// Reads the interference scaling values realized by a ratio-preserving
// beamformer: delta_p = w_L^H b_L,p (= w_R^H b_R,p up to solver rounding).
ScalingParameters optimal_deltas(const BeamformerPair& w_rtf, const ComplexMatrix& b_left,
                                 const ComplexMatrix& b_right);

// Clamps |delta_p| into [delta_min, delta_max]; output is real and identical
// for both ears.
ScalingParameters threshold_deltas(const ScalingParameters& optimal, double delta_min = 0.2,
                                   double delta_max = 0.4);

}  // namespace binbeam
