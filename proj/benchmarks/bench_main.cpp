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

#include <benchmark/benchmark.h>

#include <random>

#include "binbeam/beamformer.hpp"
#include "binbeam/estimation.hpp"
#include "binbeam/linalg.hpp"
#include "binbeam/scene.hpp"
#include "binbeam/wola.hpp"

namespace {

using namespace binbeam;

HermitianMatrix random_hpd(std::mt19937_64& g, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  HermitianMatrix m(n);
  for (std::size_t k = 0; k < n; ++k) {
    ComplexVector v(n);
    for (auto& z : v) z = Complex(d(g), d(g));
    m.add_outer(v);
  }
  m.add_diagonal(0.5);
  m.symmetrize();
  return m;
}

ComplexVector random_rtf(std::mt19937_64& g, std::size_t n, std::size_t ref) {
  std::normal_distribution<double> d(0.0, 1.0);
  ComplexVector v(n);
  for (auto& z : v) z = Complex(d(g), d(g));
  const Complex r = v[ref];
  for (auto& z : v) z /= r;
  v[ref] = 1.0;
  return v;
}

void bm_hermitian_solve(benchmark::State& state) {
  std::mt19937_64 g(1);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const HermitianMatrix m = random_hpd(g, n);
  ComplexVector rhs(n, Complex(1.0, -0.5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermitian_solve(m, rhs, 1e-9));
  }
}
BENCHMARK(bm_hermitian_solve)->Arg(4)->Arg(8)->Arg(16);

void bm_gevd_principal(benchmark::State& state) {
  std::mt19937_64 g(2);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const HermitianMatrix a = random_hpd(g, n);
  const HermitianMatrix b = random_hpd(g, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gevd_principal(a, b));
  }
}
BENCHMARK(bm_gevd_principal)->Arg(4)->Arg(8);

void bm_bmvdr(benchmark::State& state) {
  std::mt19937_64 g(3);
  const HermitianMatrix r = random_hpd(g, 4);
  const ComplexVector a_l = random_rtf(g, 4, 0);
  const ComplexVector a_r = random_rtf(g, 4, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bmvdr(r, a_l, a_r));
  }
}
BENCHMARK(bm_bmvdr);

void bm_blcmv(benchmark::State& state) {
  std::mt19937_64 g(4);
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  const StackedCorrelation r{random_hpd(g, 4)};
  const ComplexVector a_l = random_rtf(g, 4, 0);
  const ComplexVector a_r = random_rtf(g, 4, 2);
  ComplexMatrix b_l(4, p), b_r(4, p);
  for (std::size_t j = 0; j < p; ++j) {
    const ComplexVector left = random_rtf(g, 4, 0);
    const ComplexVector right = random_rtf(g, 4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
      b_l(i, j) = left[i];
      b_r(i, j) = right[i];
    }
  }
  const ScalingParameters deltas = ScalingParameters::uniform(0.3, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(blcmv(r, a_l, a_r, b_l, b_r, deltas));
  }
}
BENCHMARK(bm_blcmv)->Arg(1)->Arg(2);

void bm_wola_analyze(benchmark::State& state) {
  WolaConfig cfg;
  std::mt19937_64 g(5);
  std::normal_distribution<double> d(0.0, 1.0);
  SampleStream sig(4, std::vector<double>(16000));
  for (auto& ch : sig) {
    for (double& v : ch) v = d(g);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze(sig, cfg));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 16000 * 4);
}
BENCHMARK(bm_wola_analyze);

void bm_estimate_correlation(benchmark::State& state) {
  WolaConfig cfg;
  std::mt19937_64 g(6);
  std::normal_distribution<double> d(0.0, 1.0);
  SampleStream sig(4, std::vector<double>(16000));
  for (auto& ch : sig) {
    for (double& v : ch) v = d(g);
  }
  const auto frames = analyze(sig, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_correlation(frames, 32, FrameInterval{0, frames.size()}));
  }
}
BENCHMARK(bm_estimate_correlation);

void bm_diffuse_noise_second(benchmark::State& state) {
  const ArrayGeometry geom = ArrayGeometry::binaural_default();
  WolaConfig cfg;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(diffuse_noise(geom, cfg, 1.0, seed++));
  }
}
BENCHMARK(bm_diffuse_noise_second);

}  // namespace

BENCHMARK_MAIN();
