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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "binbeam/experiment.hpp"
#include "binbeam/wav.hpp"

namespace {

namespace fs = std::filesystem;
using namespace binbeam;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

struct SweepOptions {
  std::string config_path;
  std::vector<std::size_t> scenarios;  // 1-based selection
  std::vector<double> intervals;
  std::vector<std::string> r_choices;
  std::vector<std::string> beamformers;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
};

void add_sweep_options(CLI::App* cmd, SweepOptions* opt) {
  cmd->add_option("--config", opt->config_path, "JSON sweep configuration file");
  cmd->add_option("--scenario", opt->scenarios, "restrict to scenario numbers (1-based)");
  cmd->add_option("--interval", opt->intervals, "observation interval(s) in seconds");
  cmd->add_option("--r-choice", opt->r_choices, "correlation matrix choice(s): Ry, Rv, Rn");
  cmd->add_option("--beamformer", opt->beamformers,
                  "beamformer(s): BMVDR, BLCMV_opt, BLCMV_thr, BMVDR_RTF");
  cmd->add_option("--seed", opt->seeds, "seed(s) for scene generation");
  cmd->add_option("--out", opt->out_dir, "output directory");
}

ExperimentConfig resolve_config(const SweepOptions& opt) {
  ExperimentConfig cfg = opt.config_path.empty()
                             ? ExperimentConfig::defaults()
                             : ExperimentConfig::from_json(read_file(opt.config_path));
  if (!opt.scenarios.empty()) {
    std::vector<SceneSpec> picked;
    for (std::size_t n : opt.scenarios) {
      if (n == 0 || n > cfg.scenarios.size()) {
        throw ConfigError("scenario number out of range: " + std::to_string(n));
      }
      picked.push_back(cfg.scenarios[n - 1]);
    }
    cfg.scenarios = std::move(picked);
  }
  if (!opt.intervals.empty()) cfg.intervals_s = opt.intervals;
  if (!opt.r_choices.empty()) {
    cfg.r_choices.clear();
    for (const auto& s : opt.r_choices) cfg.r_choices.push_back(r_choice_from_string(s));
  }
  if (!opt.beamformers.empty()) {
    cfg.beamformers.clear();
    for (const auto& s : opt.beamformers) cfg.beamformers.push_back(beamformer_from_string(s));
  }
  if (!opt.seeds.empty()) cfg.seeds = opt.seeds;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (const char* env = std::getenv("BINBEAM_OUT_DIR")) cfg.out_dir = env;
  cfg.validate();
  return cfg;
}

int cmd_run(const SweepOptions& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  const SweepResult result = run_experiment(cfg);
  std::size_t failed = 0;
  for (const SweepRow& row : result.rows) failed += row.status != "ok";
  std::cout << "wrote " << result.manifest.csv_path << " (" << result.rows.size() << " rows, "
            << failed << " failed cells)\n";
  std::cout << "config hash " << result.manifest.config_hash << "\n";
  return result.all_ok ? 0 : 2;
}

int cmd_summarize(const std::string& in_path, std::string out_path, std::string dat_path) {
  const Summary summary = summarize_file(in_path);
  if (out_path.empty()) {
    out_path = (fs::path(in_path).parent_path() / "summary.csv").string();
  }
  write_file(out_path, summary.csv());
  std::cout << "wrote " << out_path << " (" << summary.rows.size() << " groups)\n";
  if (!dat_path.empty()) {
    write_file(dat_path, summary.dat());
    std::cout << "wrote " << dat_path << "\n";
  }
  return 0;
}

int cmd_simulate(const SweepOptions& opt, std::size_t scenario, bool components) {
  ExperimentConfig cfg = resolve_config(opt);
  if (scenario == 0 || scenario > cfg.scenarios.size()) {
    throw ConfigError("scenario number out of range");
  }
  SceneSpec spec = cfg.scenarios[scenario - 1];
  spec.seed = cfg.seeds.front();
  const Scene scene = mix_scene(spec, cfg.geometry, cfg.wola);

  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  const std::string stem = "scene" + std::to_string(scenario);
  write_wav(dir / (stem + ".wav"), scene.timeline.mixture, cfg.wola.sample_rate);
  write_file(dir / (stem + ".json"), scene.model.to_json());
  if (components) {
    write_wav(dir / (stem + "_desired.wav"), scene.timeline.desired, cfg.wola.sample_rate);
    write_wav(dir / (stem + "_noise.wav"), scene.timeline.noise, cfg.wola.sample_rate);
    for (std::size_t p = 0; p < scene.timeline.interferers.size(); ++p) {
      write_wav(dir / (stem + "_interferer" + std::to_string(p + 1) + ".wav"),
                scene.timeline.interferers[p], cfg.wola.sample_rate);
    }
  }
  std::cout << "wrote " << (dir / (stem + ".wav")).string() << " and sidecar json\n";
  return 0;
}

int cmd_filters(const SweepOptions& opt, std::size_t scenario, double interval,
                const std::string& r_choice, const std::string& beamformer,
                std::string out_file) {
  ExperimentConfig cfg = resolve_config(opt);
  if (scenario == 0 || scenario > cfg.scenarios.size()) {
    throw ConfigError("scenario number out of range");
  }
  SceneSpec spec = cfg.scenarios[scenario - 1];
  spec.seed = cfg.seeds.front();
  const Scene scene = mix_scene(spec, cfg.geometry, cfg.wola);
  const EstimationResult est = build_correlation_set(
      scene.timeline, cfg.wola, static_cast<std::size_t>(cfg.geometry.mics_per_device), interval);
  const FilterBank bank =
      build_filter_bank(beamformer_from_string(beamformer), r_choice_from_string(r_choice),
                        est.correlations, est.rtfs, cfg.delta_min, cfg.delta_max);
  if (out_file.empty()) {
    out_file = (fs::path(cfg.out_dir) / "filters.json").string();
  }
  const std::string label = beamformer + " R=" + r_choice + " L=" + std::to_string(interval) +
                            " scenario=" + std::to_string(scenario);
  write_file(out_file, filter_bank_to_json(bank.filters, label));
  std::cout << "wrote " << out_file << " (" << bank.filters.size() << " bins, "
            << bank.fallback_bins << " fallback bins)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binaural beamforming experiments: scene synthesis, estimation, "
               "BMVDR/BLCMV filters and evaluation sweeps"};
  app.require_subcommand(1);

  SweepOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run the experiment sweep and write results.csv");
  add_sweep_options(run, &run_opt);

  std::string sum_in, sum_out, sum_dat;
  CLI::App* sum = app.add_subcommand("summarize", "average a results.csv over scenarios");
  sum->add_option("--in", sum_in, "results.csv produced by run")->required();
  sum->add_option("--out", sum_out, "summary csv path");
  sum->add_option("--dat", sum_dat, "optional gnuplot data file");

  SweepOptions sim_opt;
  std::size_t sim_scenario = 1;
  bool sim_components = false;
  CLI::App* sim = app.add_subcommand("simulate", "export a scene as WAV plus model sidecar");
  add_sweep_options(sim, &sim_opt);
  sim->add_option("--scenario-id", sim_scenario, "scenario to export (1-based)");
  sim->add_flag("--components", sim_components, "also export per-component WAV files");

  SweepOptions fil_opt;
  std::size_t fil_scenario = 1;
  double fil_interval = 1.0;
  std::string fil_r = "Rv";
  std::string fil_bf = "BMVDR";
  std::string fil_out;
  CLI::App* fil = app.add_subcommand("filters", "export beamformer weights as JSON");
  add_sweep_options(fil, &fil_opt);
  fil->add_option("--scenario-id", fil_scenario, "scenario (1-based)");
  fil->add_option("--interval-s", fil_interval, "observation interval in seconds");
  fil->add_option("--r", fil_r, "correlation matrix choice");
  fil->add_option("--bf", fil_bf, "beamformer");
  fil->add_option("--out-file", fil_out, "output JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (sum->parsed()) return cmd_summarize(sum_in, sum_out, sum_dat);
    if (sim->parsed()) return cmd_simulate(sim_opt, sim_scenario, sim_components);
    if (fil->parsed()) {
      return cmd_filters(fil_opt, fil_scenario, fil_interval, fil_r, fil_bf, fil_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
