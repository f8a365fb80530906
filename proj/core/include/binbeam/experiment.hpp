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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "binbeam/beamformer.hpp"
#include "binbeam/estimation.hpp"
#include "binbeam/metrics.hpp"
#include "binbeam/scene.hpp"

namespace binbeam {

enum class RChoice { kMixture, kUndesired, kNoise };  // Ry, Rv, Rn
enum class BeamformerKind { kBmvdr, kBlcmvOptimal, kBlcmvThresholded, kBmvdrRtf };

std::string to_string(RChoice r);
std::string to_string(BeamformerKind b);
RChoice r_choice_from_string(const std::string& s);
BeamformerKind beamformer_from_string(const std::string& s);

// Sweep configuration. Defaults reproduce the reference protocol: three
// spatial scenarios, observation intervals 0.1..3 s, all three correlation
// matrix choices, all four beamformers, five seeds averaged.
struct ExperimentConfig {
  std::vector<SceneSpec> scenarios;
  std::vector<double> intervals_s;
  std::vector<RChoice> r_choices;
  std::vector<BeamformerKind> beamformers;
  double delta_min = 0.2;
  double delta_max = 0.4;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  ArrayGeometry geometry = ArrayGeometry::binaural_default();
  WolaConfig wola;

  static ExperimentConfig defaults();
  void validate() const;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

struct RunManifest {
  std::string config_json;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::string csv_path;

  std::string to_json() const;
};

// One sweep cell, averaged over seeds. status is "ok" or an error note; a
// failed cell keeps its coordinates but carries no metric values.
struct SweepRow {
  MetricsReport metrics;
  std::string status = "ok";
  std::size_t fallback_bins = 0;

  std::string csv_row() const;
  static std::string csv_header();
};

struct SweepResult {
  std::vector<SweepRow> rows;
  RunManifest manifest;
  bool all_ok = true;

  std::string csv() const;
};

// Per-bin filter bank for one beamformer/R choice, with per-bin fallback:
// a bin whose constraint system is unusable falls back to the plain
// distortionless beamformer and is counted.
struct FilterBank {
  std::vector<BeamformerPair> filters;
  std::size_t fallback_bins = 0;
};
FilterBank build_filter_bank(BeamformerKind kind, RChoice r_choice,
                             const CorrelationSet& correlations, const RtfEstimate& rtfs,
                             double delta_min, double delta_max);

// Runs the full sweep: per scenario and seed builds the scene, estimates
// matrices and RTFs per interval, builds fixed filters per (R, beamformer)
// and evaluates them against the true scene model. Rows are ordered by
// (scenario, beamformer, R, L) and averaged over seeds. Writes results.csv
// and manifest.json into cfg.out_dir.
SweepResult run_experiment(const ExperimentConfig& cfg);

// Scenario-averaged summary per (beamformer, R, L).
struct SummaryRow {
  std::string beamformer;
  std::string r_choice;
  std::string delta_mode;
  double interval_s = 0.0;
  double snr_improvement_db = 0.0;
  double sir_improvement_db = 0.0;
  double sinr_improvement_db = 0.0;
  double ild_error_db = 0.0;
  double itd_error_us = 0.0;
  std::size_t scenario_count = 0;
};

struct Summary {
  std::vector<SummaryRow> rows;

  std::string csv() const;
  // gnuplot-friendly: one block per (beamformer, R), columns L and metrics.
  std::string dat() const;
};

Summary summarize(const std::string& csv_text);
Summary summarize_file(const std::filesystem::path& csv_path);

// Filter bank JSON (complex entries as [re, im]) for replay through
// apply_filter.
std::string filter_bank_to_json(const std::vector<BeamformerPair>& filters,
                                const std::string& label);
std::vector<BeamformerPair> filter_bank_from_json(const std::string& text);

}  // namespace binbeam
