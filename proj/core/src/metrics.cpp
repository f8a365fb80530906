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

#include "binbeam/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace binbeam {

namespace {

double db(double ratio) { return 10.0 * std::log10(ratio); }

double binaural_power(const HermitianMatrix& r, const BeamformerPair& w) {
  return r.quadratic_form(w.left) + r.quadratic_form(w.right);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

BeamformerPair selector_pair(std::size_t channels, std::size_t mics_per_device) {
  BeamformerPair e;
  e.left.assign(channels, Complex(0.0, 0.0));
  e.right.assign(channels, Complex(0.0, 0.0));
  e.left[0] = 1.0;
  e.right[mics_per_device] = 1.0;
  return e;
}

BinauralRatios binaural_ratios(const HermitianMatrix& r_desired,
                               const HermitianMatrix& r_interference,
                               const HermitianMatrix& r_noise,
                               const HermitianMatrix& r_undesired, const BeamformerPair& w) {
  const double desired = binaural_power(r_desired, w);
  const double noise = binaural_power(r_noise, w);
  const double interference = binaural_power(r_interference, w);
  const double undesired = binaural_power(r_undesired, w);
  if (noise <= 0.0 || interference <= 0.0 || undesired <= 0.0) {
    throw ZeroDenominator("binaural_ratios: undesired output power vanishes");
  }
  BinauralRatios out;
  out.snr_db = db(desired / noise);
  out.sir_db = db(desired / interference);
  out.sinr_db = db(desired / undesired);
  return out;
}

BinauralRatios input_ratios(const HermitianMatrix& r_desired,
                            const HermitianMatrix& r_interference,
                            const HermitianMatrix& r_noise, const HermitianMatrix& r_undesired,
                            std::size_t mics_per_device) {
  return binaural_ratios(r_desired, r_interference, r_noise, r_undesired,
                         selector_pair(r_desired.dim(), mics_per_device));
}

CueErrors cue_errors(const std::vector<BeamformerPair>& filters,
                     const std::vector<ComplexVector>& interferer_atf, const WolaConfig& cfg,
                     std::size_t mics_per_device, double itd_band_hz) {
  if (filters.size() != interferer_atf.size()) {
    throw BinCountMismatch("cue_errors: filter and ATF bin counts differ");
  }

  double ild_sum = 0.0;
  std::size_t ild_bins = 0;
  double itd_sum = 0.0;
  std::size_t itd_bins = 0;
  std::size_t skipped = 0;

  for (std::size_t k = 0; k < filters.size(); ++k) {
    const ComplexVector& b = interferer_atf[k];
    const Complex out_left = inner(filters[k].left, b);
    const Complex out_right = inner(filters[k].right, b);
    const Complex in_left = b.front();
    const Complex in_right = b[mics_per_device];
    if (std::abs(out_left) <= 1e-12 || std::abs(out_right) <= 1e-12 ||
        std::abs(in_left) <= 1e-12 || std::abs(in_right) <= 1e-12) {
      ++skipped;
      continue;
    }
    const Complex h_out = out_left / out_right;
    const Complex h_in = in_left / in_right;

    ild_sum += std::abs(20.0 * std::log10(std::abs(h_out)) - 20.0 * std::log10(std::abs(h_in)));
    ++ild_bins;

    const double f = cfg.bin_frequency_hz(k);
    if (f > 0.0 && f < itd_band_hz) {
      // Principal-value phase difference per bin pair.
      double dphi = std::arg(h_out) - std::arg(h_in);
      while (dphi > std::numbers::pi) dphi -= 2.0 * std::numbers::pi;
      while (dphi <= -std::numbers::pi) dphi += 2.0 * std::numbers::pi;
      itd_sum += std::abs(dphi) / (2.0 * std::numbers::pi * f) * 1e6;
      ++itd_bins;
    }
  }

  if (ild_bins == 0) throw AllBinsSkipped("cue_errors: no usable bin");

  CueErrors out;
  out.ild_db = ild_sum / static_cast<double>(ild_bins);
  out.itd_us = itd_bins > 0 ? itd_sum / static_cast<double>(itd_bins) : 0.0;
  out.skipped_bins = skipped;
  return out;
}

std::string MetricsReport::csv_header() {
  return "scenario,beamformer,R,delta_mode,L_seconds,snr_in,snr_out,sir_in,sir_out,"
         "sinr_in,sinr_out,sinr_improvement,ild_err_db,itd_err_us";
}

std::string MetricsReport::csv_row() const {
  std::string row = scenario;
  row += ',';
  row += beamformer;
  row += ',';
  row += r_choice;
  row += ',';
  row += delta_mode;
  row += ',';
  row += format_double(interval_s);
  for (double v : {snr_in_db, snr_out_db, sir_in_db, sir_out_db, sinr_in_db, sinr_out_db,
                   sinr_improvement_db(), ild_error_db.empty() ? 0.0 : ild_error_db.front(),
                   itd_error_us.empty() ? 0.0 : itd_error_us.front()}) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

MetricsReport evaluate_filters(const SceneModel& model,
                               const std::vector<BeamformerPair>& filters) {
  const std::size_t bins = model.bin_count();
  if (filters.size() != bins) throw BinCountMismatch("evaluate_filters: bin count mismatch");
  const std::size_t mics = static_cast<std::size_t>(model.geometry.mics_per_device);

  MetricsReport report;
  const bool has_interferers = model.interferer_count() > 0;
  double snr_in = 0.0, snr_out = 0.0, sir_in = 0.0, sir_out = 0.0, sinr_in = 0.0, sinr_out = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const HermitianMatrix r_x = model.correlation_desired(k);
    const HermitianMatrix r_n = model.correlation_noise(k);
    const HermitianMatrix r_v = model.correlation_undesired(k);
    // Without interferers the SIR denominator vanishes; stand in with the
    // noise matrix and zero the SIR columns afterwards.
    const HermitianMatrix r_u = has_interferers ? model.correlation_interference(k) : r_n;
    const BinauralRatios in = input_ratios(r_x, r_u, r_n, r_v, mics);
    const BinauralRatios out = binaural_ratios(r_x, r_u, r_n, r_v, filters[k]);
    snr_in += in.snr_db;
    snr_out += out.snr_db;
    sir_in += in.sir_db;
    sir_out += out.sir_db;
    sinr_in += in.sinr_db;
    sinr_out += out.sinr_db;
  }
  const double inv_bins = 1.0 / static_cast<double>(bins);
  report.snr_in_db = snr_in * inv_bins;
  report.snr_out_db = snr_out * inv_bins;
  report.sir_in_db = has_interferers ? sir_in * inv_bins : 0.0;
  report.sir_out_db = has_interferers ? sir_out * inv_bins : 0.0;
  report.sinr_in_db = sinr_in * inv_bins;
  report.sinr_out_db = sinr_out * inv_bins;

  for (std::size_t p = 0; p < model.interferer_count(); ++p) {
    const CueErrors cue = cue_errors(filters, model.interferer_atf[p], model.wola, mics);
    report.ild_error_db.push_back(cue.ild_db);
    report.itd_error_us.push_back(cue.itd_us);
  }
  return report;
}

}  // namespace binbeam
