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

#include <stdexcept>
#include <string>

namespace binbeam {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define BINBEAM_DEFINE_ERROR(Name)                         \
  class Name : public Error {                              \
   public:                                                 \
    explicit Name(const std::string& msg) : Error(msg) {}  \
  }

// Linear algebra.
BINBEAM_DEFINE_ERROR(DimensionMismatch);
BINBEAM_DEFINE_ERROR(SingularMatrix);
BINBEAM_DEFINE_ERROR(NotPositiveDefinite);
BINBEAM_DEFINE_ERROR(NotPositiveSemidefinite);

// Filterbank and signal I/O.
BINBEAM_DEFINE_ERROR(SignalTooShort);
BINBEAM_DEFINE_ERROR(ChannelCountMismatch);
BINBEAM_DEFINE_ERROR(EmptyInput);
BINBEAM_DEFINE_ERROR(BinCountMismatch);
BINBEAM_DEFINE_ERROR(InvalidBin);
BINBEAM_DEFINE_ERROR(FormatError);

// Scene generation.
BINBEAM_DEFINE_ERROR(InfeasibleSpec);

// Estimation.
BINBEAM_DEFINE_ERROR(EmptyInterval);
BINBEAM_DEFINE_ERROR(IntervalOutOfRange);
BINBEAM_DEFINE_ERROR(ReferenceEntryNearZero);

// Beamforming.
BINBEAM_DEFINE_ERROR(ZeroDenominator);
BINBEAM_DEFINE_ERROR(RankDeficientConstraints);
BINBEAM_DEFINE_ERROR(TooManyConstraints);
BINBEAM_DEFINE_ERROR(InvalidThresholds);
BINBEAM_DEFINE_ERROR(ConsistencyViolation);

// Metrics and result handling.
BINBEAM_DEFINE_ERROR(AllBinsSkipped);
BINBEAM_DEFINE_ERROR(SchemaMismatch);
BINBEAM_DEFINE_ERROR(ConfigError);

#undef BINBEAM_DEFINE_ERROR

}  // namespace binbeam
