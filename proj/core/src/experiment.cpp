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

#include "binbeam/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace binbeam {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string sanitize_csv_field(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t scene_seed(std::uint64_t base_seed, std::size_t scenario_index) {
  return base_seed * 0x100000001b3ULL + scenario_index + 1;
}

std::string delta_mode_label(BeamformerKind kind) {
  switch (kind) {
    case BeamformerKind::kBlcmvOptimal:
      return "opt";
    case BeamformerKind::kBlcmvThresholded:
      return "thr";
    default:
      return "none";
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

// Accumulates seed-averaged metrics for one sweep cell.
struct CellAccumulator {
  MetricsReport sum;
  std::size_t count = 0;
  std::size_t fallback_bins = 0;
  std::string error;

  void add(const MetricsReport& m, std::size_t fallbacks) {
    if (count == 0) {
      sum = m;
    } else {
      sum.snr_in_db += m.snr_in_db;
      sum.snr_out_db += m.snr_out_db;
      sum.sir_in_db += m.sir_in_db;
      sum.sir_out_db += m.sir_out_db;
      sum.sinr_in_db += m.sinr_in_db;
      sum.sinr_out_db += m.sinr_out_db;
      for (std::size_t p = 0; p < sum.ild_error_db.size(); ++p) {
        sum.ild_error_db[p] += m.ild_error_db[p];
        sum.itd_error_us[p] += m.itd_error_us[p];
      }
    }
    fallback_bins += fallbacks;
    ++count;
  }

  void fail(const std::string& why) {
    if (error.empty()) error = why;
  }

  MetricsReport mean() const {
    MetricsReport m = sum;
    const double inv = 1.0 / static_cast<double>(count);
    m.snr_in_db *= inv;
    m.snr_out_db *= inv;
    m.sir_in_db *= inv;
    m.sir_out_db *= inv;
    m.sinr_in_db *= inv;
    m.sinr_out_db *= inv;
    for (std::size_t p = 0; p < m.ild_error_db.size(); ++p) {
      m.ild_error_db[p] *= inv;
      m.itd_error_us[p] *= inv;
    }
    return m;
  }
};

}  // namespace

std::string to_string(RChoice r) {
  switch (r) {
    case RChoice::kMixture:
      return "Ry";
    case RChoice::kUndesired:
      return "Rv";
    case RChoice::kNoise:
      return "Rn";
  }
  return "?";
}

std::string to_string(BeamformerKind b) {
  switch (b) {
    case BeamformerKind::kBmvdr:
      return "BMVDR";
    case BeamformerKind::kBlcmvOptimal:
      return "BLCMV_opt";
    case BeamformerKind::kBlcmvThresholded:
      return "BLCMV_thr";
    case BeamformerKind::kBmvdrRtf:
      return "BMVDR_RTF";
  }
  return "?";
}

RChoice r_choice_from_string(const std::string& s) {
  if (s == "Ry") return RChoice::kMixture;
  if (s == "Rv") return RChoice::kUndesired;
  if (s == "Rn") return RChoice::kNoise;
  throw ConfigError("unknown correlation matrix choice: " + s);
}

BeamformerKind beamformer_from_string(const std::string& s) {
  if (s == "BMVDR") return BeamformerKind::kBmvdr;
  if (s == "BLCMV_opt") return BeamformerKind::kBlcmvOptimal;
  if (s == "BLCMV_thr") return BeamformerKind::kBlcmvThresholded;
  if (s == "BMVDR_RTF") return BeamformerKind::kBmvdrRtf;
  throw ConfigError("unknown beamformer: " + s);
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  SceneSpec s1;
  s1.desired_angle_deg = -35.0;
  s1.interferer_angles_deg = {150.0};
  SceneSpec s2;
  s2.desired_angle_deg = 0.0;
  s2.interferer_angles_deg = {-35.0};
  SceneSpec s3;
  s3.desired_angle_deg = 0.0;
  s3.interferer_angles_deg = {-35.0, 150.0};
  cfg.scenarios = {s1, s2, s3};
  cfg.intervals_s = {0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 3.0};
  cfg.r_choices = {RChoice::kMixture, RChoice::kUndesired, RChoice::kNoise};
  cfg.beamformers = {BeamformerKind::kBmvdr, BeamformerKind::kBlcmvOptimal,
                     BeamformerKind::kBlcmvThresholded, BeamformerKind::kBmvdrRtf};
  cfg.seeds = {1, 2, 3, 4, 5};
  return cfg;
}

void ExperimentConfig::validate() const {
  if (scenarios.empty() || intervals_s.empty() || r_choices.empty() || beamformers.empty() ||
      seeds.empty()) {
    throw ConfigError("experiment: empty sweep dimension");
  }
  wola.validate();
  for (const SceneSpec& s : scenarios) {
    s.validate();
    for (double l : intervals_s) {
      if (l <= 0.0 || l > s.active_s) {
        throw ConfigError("experiment: observation interval outside the active segment");
      }
    }
  }
  if (!(delta_min > 0.0 && delta_min < delta_max)) {
    throw ConfigError("experiment: require 0 < delta_min < delta_max");
  }
  if (geometry.channel_count() != 2 * static_cast<std::size_t>(geometry.mics_per_device)) {
    throw ConfigError("experiment: geometry must hold 2M microphones");
  }
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  nlohmann::json scen = nlohmann::json::array();
  for (const SceneSpec& s : scenarios) {
    scen.push_back({
        {"desired_angle_deg", s.desired_angle_deg},
        {"interferer_angles_deg", s.interferer_angles_deg},
        {"snr_db", s.snr_db},
        {"sir_db", s.sir_db},
        {"noise_only_s", s.noise_only_s},
        {"active_s", s.active_s},
    });
  }
  j["scenarios"] = std::move(scen);
  j["intervals_s"] = intervals_s;
  nlohmann::json rs = nlohmann::json::array();
  for (RChoice r : r_choices) rs.push_back(to_string(r));
  j["r_choices"] = std::move(rs);
  nlohmann::json bs = nlohmann::json::array();
  for (BeamformerKind b : beamformers) bs.push_back(to_string(b));
  j["beamformers"] = std::move(bs);
  j["delta_min"] = delta_min;
  j["delta_max"] = delta_max;
  j["seeds"] = seeds;
  j["out_dir"] = out_dir;
  nlohmann::json pos = nlohmann::json::array();
  for (const Vec3& p : geometry.positions) pos.push_back({p.x, p.y, p.z});
  j["geometry"] = {
      {"mics_per_device", geometry.mics_per_device},
      {"positions", std::move(pos)},
      {"speed_of_sound", geometry.speed_of_sound},
  };
  j["wola"] = {
      {"block_length", wola.block_length},
      {"overlap", wola.overlap},
      {"sample_rate", wola.sample_rate},
  };
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg = defaults();
  if (j.contains("scenarios")) {
    cfg.scenarios.clear();
    for (const auto& js : j.at("scenarios")) {
      SceneSpec s;
      s.desired_angle_deg = js.at("desired_angle_deg").get<double>();
      s.interferer_angles_deg = js.value("interferer_angles_deg", std::vector<double>{});
      s.snr_db = js.value("snr_db", 5.0);
      s.sir_db = js.value("sir_db", std::vector<double>{});
      s.noise_only_s = js.value("noise_only_s", 2.0);
      s.active_s = js.value("active_s", 20.0);
      cfg.scenarios.push_back(std::move(s));
    }
  }
  if (j.contains("intervals_s")) cfg.intervals_s = j.at("intervals_s").get<std::vector<double>>();
  if (j.contains("r_choices")) {
    cfg.r_choices.clear();
    for (const auto& r : j.at("r_choices")) cfg.r_choices.push_back(r_choice_from_string(r));
  }
  if (j.contains("beamformers")) {
    cfg.beamformers.clear();
    for (const auto& b : j.at("beamformers")) cfg.beamformers.push_back(beamformer_from_string(b));
  }
  cfg.delta_min = j.value("delta_min", 0.2);
  cfg.delta_max = j.value("delta_max", 0.4);
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.out_dir = j.value("out_dir", std::string("out"));
  if (j.contains("geometry")) {
    const auto& jg = j.at("geometry");
    cfg.geometry.positions.clear();
    cfg.geometry.mics_per_device = jg.at("mics_per_device").get<int>();
    for (const auto& p : jg.at("positions")) {
      cfg.geometry.positions.push_back(
          {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    }
    cfg.geometry.speed_of_sound = jg.value("speed_of_sound", 343.0);
  }
  if (j.contains("wola")) {
    const auto& jw = j.at("wola");
    cfg.wola.block_length = jw.value("block_length", std::size_t{256});
    cfg.wola.overlap = jw.value("overlap", 0.5);
    cfg.wola.sample_rate = jw.value("sample_rate", 16000);
  }
  return cfg;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_json);
  j["config_hash"] = config_hash;
  j["seeds"] = seeds;
  j["artifacts"] = {{"csv", csv_path}};
  return j.dump(2);
}

std::string SweepRow::csv_header() {
  return MetricsReport::csv_header() + ",status,fallback_bins";
}

std::string SweepRow::csv_row() const {
  return metrics.csv_row() + "," + sanitize_csv_field(status) + "," +
         std::to_string(fallback_bins);
}

std::string SweepResult::csv() const {
  std::string out = SweepRow::csv_header();
  out += '\n';
  for (const SweepRow& row : rows) {
    out += row.csv_row();
    out += '\n';
  }
  return out;
}

FilterBank build_filter_bank(BeamformerKind kind, RChoice r_choice,
                             const CorrelationSet& correlations, const RtfEstimate& rtfs,
                             double delta_min, double delta_max) {
  const std::size_t bins = correlations.bin_count();
  const std::size_t p_count = rtfs.interferer_count();

  FilterBank bank;
  bank.filters.reserve(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const HermitianMatrix& r = (r_choice == RChoice::kMixture)   ? correlations.mixture[k]
                               : (r_choice == RChoice::kUndesired) ? correlations.undesired[k]
                                                                   : correlations.noise[k];
    const ComplexVector& a_l = rtfs.desired_left[k];
    const ComplexVector& a_r = rtfs.desired_right[k];
    std::vector<ComplexVector> cols_l(p_count), cols_r(p_count);
    for (std::size_t p = 0; p < p_count; ++p) {
      cols_l[p] = rtfs.interferer_left[p][k];
      cols_r[p] = rtfs.interferer_right[p][k];
    }
    const ComplexMatrix b_l = p_count ? ComplexMatrix::from_columns(cols_l)
                                      : ComplexMatrix(a_l.size(), 0);
    const ComplexMatrix b_r = p_count ? ComplexMatrix::from_columns(cols_r)
                                      : ComplexMatrix(a_r.size(), 0);

    try {
      switch (kind) {
        case BeamformerKind::kBmvdr:
          bank.filters.push_back(bmvdr(r, a_l, a_r));
          break;
        case BeamformerKind::kBmvdrRtf:
          bank.filters.push_back(bmvdr_rtf(StackedCorrelation{r}, a_l, a_r, b_l, b_r));
          break;
        case BeamformerKind::kBlcmvOptimal:
        case BeamformerKind::kBlcmvThresholded: {
          const BeamformerPair w_rtf = bmvdr_rtf(StackedCorrelation{r}, a_l, a_r, b_l, b_r);
          ScalingParameters deltas = optimal_deltas(w_rtf, b_l, b_r);
          if (kind == BeamformerKind::kBlcmvThresholded) {
            deltas = threshold_deltas(deltas, delta_min, delta_max);
          }
          bank.filters.push_back(blcmv(StackedCorrelation{r}, a_l, a_r, b_l, b_r, deltas));
          break;
        }
      }
    } catch (const RankDeficientConstraints&) {
      bank.filters.push_back(bmvdr(r, a_l, a_r));
      ++bank.fallback_bins;
    } catch (const TooManyConstraints&) {
      bank.filters.push_back(bmvdr(r, a_l, a_r));
      ++bank.fallback_bins;
    } catch (const ConsistencyViolation&) {
      bank.filters.push_back(bmvdr(r, a_l, a_r));
      ++bank.fallback_bins;
    } catch (const Error&) {
      // Even the fallback path is hopeless at this bin; pass the references
      // through unchanged.
      bank.filters.push_back(selector_pair(a_l.size(), rtfs.mics_per_device));
      ++bank.fallback_bins;
    }
  }
  return bank;
}

SweepResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  const std::size_t n_scen = cfg.scenarios.size();
  const std::size_t n_bf = cfg.beamformers.size();
  const std::size_t n_r = cfg.r_choices.size();
  const std::size_t n_l = cfg.intervals_s.size();
  const std::size_t mics = static_cast<std::size_t>(cfg.geometry.mics_per_device);

  auto cell_index = [&](std::size_t s, std::size_t b, std::size_t r, std::size_t l) {
    return ((s * n_bf + b) * n_r + r) * n_l + l;
  };
  std::vector<CellAccumulator> cells(n_scen * n_bf * n_r * n_l);

  for (std::size_t s = 0; s < n_scen; ++s) {
    for (std::uint64_t base_seed : cfg.seeds) {
      SceneSpec spec = cfg.scenarios[s];
      spec.seed = scene_seed(base_seed, s);

      Scene scene;
      AnalyzedTimeline analyzed;
      try {
        scene = mix_scene(spec, cfg.geometry, cfg.wola);
        analyzed = AnalyzedTimeline::from(scene.timeline, cfg.wola);
      } catch (const Error& e) {
        for (std::size_t b = 0; b < n_bf; ++b)
          for (std::size_t r = 0; r < n_r; ++r)
            for (std::size_t l = 0; l < n_l; ++l)
              cells[cell_index(s, b, r, l)].fail(std::string("scene: ") + e.what());
        continue;
      }

      for (std::size_t l = 0; l < n_l; ++l) {
        EstimationResult est;
        try {
          est = estimate_from_analyzed(analyzed, cfg.wola, mics, cfg.intervals_s[l]);
        } catch (const Error& e) {
          for (std::size_t b = 0; b < n_bf; ++b)
            for (std::size_t r = 0; r < n_r; ++r)
              cells[cell_index(s, b, r, l)].fail(std::string("estimation: ") + e.what());
          continue;
        }

        for (std::size_t b = 0; b < n_bf; ++b) {
          for (std::size_t r = 0; r < n_r; ++r) {
            CellAccumulator& cell = cells[cell_index(s, b, r, l)];
            try {
              const FilterBank bank =
                  build_filter_bank(cfg.beamformers[b], cfg.r_choices[r], est.correlations,
                                    est.rtfs, cfg.delta_min, cfg.delta_max);
              cell.add(evaluate_filters(scene.model, bank.filters), bank.fallback_bins);
            } catch (const Error& e) {
              cell.fail(e.what());
            }
          }
        }
      }
    }
  }

  SweepResult result;
  result.rows.reserve(cells.size());
  for (std::size_t s = 0; s < n_scen; ++s) {
    for (std::size_t b = 0; b < n_bf; ++b) {
      for (std::size_t r = 0; r < n_r; ++r) {
        for (std::size_t l = 0; l < n_l; ++l) {
          const CellAccumulator& cell = cells[cell_index(s, b, r, l)];
          SweepRow row;
          if (cell.count > 0 && cell.error.empty()) {
            row.metrics = cell.mean();
          } else {
            row.status = cell.error.empty() ? "error: no data" : "error: " + cell.error;
            result.all_ok = false;
          }
          row.metrics.scenario = std::to_string(s + 1);
          row.metrics.beamformer = to_string(cfg.beamformers[b]);
          row.metrics.r_choice = to_string(cfg.r_choices[r]);
          row.metrics.delta_mode = delta_mode_label(cfg.beamformers[b]);
          row.metrics.interval_s = cfg.intervals_s[l];
          row.fallback_bins = cell.fallback_bins;
          result.rows.push_back(std::move(row));
        }
      }
    }
  }

  result.manifest.config_json = cfg.to_json();
  result.manifest.config_hash = hex64(fnv1a64(result.manifest.config_json));
  result.manifest.seeds = cfg.seeds;

  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path csv_path = out_dir / "results.csv";
  result.manifest.csv_path = csv_path.string();
  {
    std::ofstream csv(csv_path, std::ios::binary);
    csv << result.csv();
  }
  {
    std::ofstream manifest(out_dir / "manifest.json", std::ios::binary);
    manifest << result.manifest.to_json() << '\n';
  }
  return result;
}

std::string Summary::csv() const {
  std::string out =
      "beamformer,R,delta_mode,L_seconds,snr_improvement,sir_improvement,sinr_improvement,"
      "ild_err_db,itd_err_us,scenarios";
  out += '\n';
  for (const SummaryRow& r : rows) {
    out += r.beamformer + "," + r.r_choice + "," + r.delta_mode + "," +
           format_double(r.interval_s) + "," + format_double(r.snr_improvement_db) + "," +
           format_double(r.sir_improvement_db) + "," + format_double(r.sinr_improvement_db) +
           "," + format_double(r.ild_error_db) + "," + format_double(r.itd_error_us) + "," +
           std::to_string(r.scenario_count) + "\n";
  }
  return out;
}

std::string Summary::dat() const {
  std::string out = "# L_seconds sinr_improvement snr_improvement sir_improvement "
                    "ild_err_db itd_err_us\n";
  std::string block_key;
  for (const SummaryRow& r : rows) {
    const std::string key = r.beamformer + " R=" + r.r_choice + " delta=" + r.delta_mode;
    if (key != block_key) {
      if (!block_key.empty()) out += "\n\n";
      out += "# " + key + "\n";
      block_key = key;
    }
    out += format_double(r.interval_s) + " " + format_double(r.sinr_improvement_db) + " " +
           format_double(r.snr_improvement_db) + " " + format_double(r.sir_improvement_db) +
           " " + format_double(r.ild_error_db) + " " + format_double(r.itd_error_us) + "\n";
  }
  return out;
}

Summary summarize(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("summarize: empty input");
  if (line != SweepRow::csv_header()) {
    throw SchemaMismatch("summarize: unexpected CSV header");
  }

  struct Key {
    std::string beamformer, r_choice, delta_mode;
    double interval;
    bool operator<(const Key& o) const {
      if (beamformer != o.beamformer) return beamformer < o.beamformer;
      if (r_choice != o.r_choice) return r_choice < o.r_choice;
      if (delta_mode != o.delta_mode) return delta_mode < o.delta_mode;
      return interval < o.interval;
    }
  };
  struct Agg {
    double snr = 0.0, sir = 0.0, sinr = 0.0, ild = 0.0, itd = 0.0;
    std::size_t n = 0;
    std::size_t first_seen = 0;
  };
  std::map<Key, Agg> groups;
  std::size_t row_counter = 0;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 16) throw SchemaMismatch("summarize: wrong column count");
    ++row_counter;
    if (f[14] != "ok") continue;
    Key key{f[1], f[2], f[3], std::stod(f[4])};
    Agg& agg = groups[key];
    if (agg.n == 0) agg.first_seen = row_counter;
    agg.snr += std::stod(f[6]) - std::stod(f[5]);
    agg.sir += std::stod(f[8]) - std::stod(f[7]);
    agg.sinr += std::stod(f[11]);
    agg.ild += std::stod(f[12]);
    agg.itd += std::stod(f[13]);
    ++agg.n;
  }

  std::vector<std::pair<Key, Agg>> ordered(groups.begin(), groups.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.second.first_seen < b.second.first_seen; });

  Summary summary;
  for (const auto& [key, agg] : ordered) {
    SummaryRow row;
    row.beamformer = key.beamformer;
    row.r_choice = key.r_choice;
    row.delta_mode = key.delta_mode;
    row.interval_s = key.interval;
    const double inv = 1.0 / static_cast<double>(agg.n);
    row.snr_improvement_db = agg.snr * inv;
    row.sir_improvement_db = agg.sir * inv;
    row.sinr_improvement_db = agg.sinr * inv;
    row.ild_error_db = agg.ild * inv;
    row.itd_error_us = agg.itd * inv;
    row.scenario_count = agg.n;
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

Summary summarize_file(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw ConfigError("summarize: cannot open " + csv_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return summarize(buf.str());
}

std::string filter_bank_to_json(const std::vector<BeamformerPair>& filters,
                                const std::string& label) {
  nlohmann::json j;
  j["label"] = label;
  j["bins"] = filters.size();
  j["channels"] = filters.empty() ? 0 : filters.front().left.size();
  nlohmann::json left = nlohmann::json::array();
  nlohmann::json right = nlohmann::json::array();
  for (const BeamformerPair& w : filters) {
    nlohmann::json l = nlohmann::json::array();
    nlohmann::json r = nlohmann::json::array();
    for (const Complex& z : w.left) l.push_back({z.real(), z.imag()});
    for (const Complex& z : w.right) r.push_back({z.real(), z.imag()});
    left.push_back(std::move(l));
    right.push_back(std::move(r));
  }
  j["left"] = std::move(left);
  j["right"] = std::move(right);
  return j.dump();
}

std::vector<BeamformerPair> filter_bank_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const auto& left = j.at("left");
  const auto& right = j.at("right");
  if (left.size() != right.size()) throw SchemaMismatch("filter bank: ragged sides");
  std::vector<BeamformerPair> out(left.size());
  for (std::size_t k = 0; k < left.size(); ++k) {
    for (const auto& z : left.at(k)) {
      out[k].left.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    }
    for (const auto& z : right.at(k)) {
      out[k].right.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return out;
}

}  // namespace binbeam
