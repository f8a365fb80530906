#include <algorithm>
#include <cmath>
#include <numeric>

#include "binbeam/estimation.hpp"
#include "binbeam/scene.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace binbeam;
using testsupport::random_vector;
using testsupport::rel_error;

namespace {

std::vector<SpectralFrame> frames_from_vectors(const std::vector<ComplexVector>& ys) {
  std::vector<SpectralFrame> frames(ys.size());
  for (std::size_t t = 0; t < ys.size(); ++t) {
    frames[t].frame_index = t;
    frames[t].bins = {ys[t]};
  }
  return frames;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
    return r;
  };
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

// Draws a spectral frame y = s a + n from the narrowband model with noise
// coherence gamma (via its Cholesky factor).
class ModelSampler {
 public:
  ModelSampler(ComplexVector atf, double source_psd, const HermitianMatrix& gamma,
               std::uint64_t seed)
      : atf_(std::move(atf)), sigma_(std::sqrt(source_psd)),
        shaper_(hermitian_factor(gamma)), rng_(seed) {}

  ComplexVector noise_only() {
    ComplexVector g(atf_.size());
    for (auto& z : g) z = gauss();
    return shaper_.apply(g);
  }

  ComplexVector source_plus_noise() {
    ComplexVector y = noise_only();
    const Complex s = sigma_ * gauss();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * atf_[i];
    return y;
  }

 private:
  Complex gauss() {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    return Complex(n(rng_), n(rng_));
  }
  ComplexVector atf_;
  double sigma_;
  ComplexMatrix shaper_;
  std::mt19937_64 rng_;
};

}  // namespace

TEST_SUITE_BEGIN("estimation");

TEST_CASE("estimate_correlation of a single frame is the outer product") {
  const ComplexVector y = {Complex(1, 0), Complex(0, 1)};
  const HermitianMatrix r = estimate_correlation(frames_from_vectors({y}), 0, {0, 1});
  CHECK(std::abs(r(0, 0) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(r(0, 1) - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(r(1, 0) - Complex(0, 1)) < 1e-15);
  CHECK(std::abs(r(1, 1) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("estimate_correlation of zero frames is the zero matrix") {
  std::vector<ComplexVector> ys(8, ComplexVector(3, Complex(0, 0)));
  const HermitianMatrix r = estimate_correlation(frames_from_vectors(ys), 0, {0, 8});
  CHECK(r.frobenius() == 0.0);
}

TEST_CASE("estimate_correlation matches a direct two-loop accumulation") {
  auto g = testsupport::rng(1);
  std::vector<ComplexVector> ys;
  for (int t = 0; t < 100; ++t) ys.push_back(random_vector(g, 4));
  const HermitianMatrix r = estimate_correlation(frames_from_vectors(ys), 0, {0, 100});

  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      Complex acc(0, 0);
      for (int t = 0; t < 100; ++t) acc += ys[t][i] * std::conj(ys[t][j]);
      acc /= 100.0;
      CHECK(std::abs(r(i, j) - acc) < 1e-12);
    }
  }

  // Positive semidefinite within rounding.
  const EigenDecomposition eig = hermitian_eig(r);
  CHECK(eig.eigenvalues.front() >= -1e-10 * r.trace());
}

TEST_CASE("estimate_correlation validates its interval") {
  std::vector<ComplexVector> ys(4, ComplexVector(2, Complex(1, 0)));
  const auto frames = frames_from_vectors(ys);
  CHECK_THROWS_AS(estimate_correlation(frames, 0, {2, 2}), EmptyInterval);
  CHECK_THROWS_AS(estimate_correlation(frames, 0, {0, 9}), IntervalOutOfRange);
  CHECK_THROWS_AS(estimate_correlation(frames, 5, {0, 4}), InvalidBin);
}

TEST_CASE("rtf recovery with identity noise reduces to the principal eigenvector") {
  const ComplexVector a = {Complex(1, 0), Complex(0.5, -0.5), Complex(0.8, 0), Complex(0, 0.2)};
  HermitianMatrix r_sn = HermitianMatrix::outer(a, 10.0);
  r_sn.add_diagonal(1.0);
  const RtfGevdResult res = estimate_rtf_gevd(r_sn, HermitianMatrix::identity(4), 2);
  CHECK(res.source_detected);

  ComplexVector a_l(4), a_r(4);
  for (std::size_t i = 0; i < 4; ++i) {
    a_l[i] = a[i] / a[0];
    a_r[i] = a[i] / a[2];
  }
  CHECK(rel_error(res.left, a_l) < 1e-8);
  CHECK(rel_error(res.right, a_r) < 1e-8);
  CHECK(res.left[0] == Complex(1, 0));
  CHECK(res.right[2] == Complex(1, 0));
}

TEST_CASE("no source flagged when source-plus-noise equals noise") {
  auto g = testsupport::rng(4);
  const HermitianMatrix r_n = testsupport::random_hpd(g, 4);
  const RtfGevdResult res = estimate_rtf_gevd(r_n, r_n, 2);
  CHECK(res.eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(res.source_detected);
}

TEST_CASE("rtf recovery under correlated noise matches the true direction") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    auto g = testsupport::rng(seed);
    const HermitianMatrix r_n = testsupport::random_hpd(g, 4, 0.5);
    const ComplexVector a = random_vector(g, 4);
    HermitianMatrix r_sn = r_n;
    r_sn.add_scaled(HermitianMatrix::outer(a, 5.0), 1.0);

    const RtfGevdResult res = estimate_rtf_gevd(r_sn, r_n, 2);
    ComplexVector a_l(4);
    for (std::size_t i = 0; i < 4; ++i) a_l[i] = a[i] / a[0];
    CHECK(rel_error(res.left, a_l) < 1e-7);

    // Scaling both matrices leaves the recovered RTF unchanged.
    HermitianMatrix r_sn2 = r_sn;
    HermitianMatrix r_n2 = r_n;
    r_sn2.scale(7.25);
    r_n2.scale(7.25);
    const RtfGevdResult scaled = estimate_rtf_gevd(r_sn2, r_n2, 2);
    CHECK(rel_error(scaled.left, res.left) < 1e-10);
    CHECK(rel_error(scaled.right, res.right) < 1e-10);
  }
}

TEST_CASE("sampled estimation error decreases with the observation length") {
  const ArrayGeometry geom = ArrayGeometry::binaural_default();
  const HermitianMatrix gamma = diffuse_coherence(geom, 1500.0);
  WolaConfig cfg;
  const ComplexVector a = atf_from_angle(-35.0, geom, 24, cfg).a;
  ComplexVector a_l(4);
  for (std::size_t i = 0; i < 4; ++i) a_l[i] = a[i] / a[0];

  const std::vector<std::size_t> t_grid = {10, 20, 40, 80, 160, 320, 640};
  std::vector<double> mean_err(t_grid.size(), 0.0);
  const int n_seeds = 20;
  for (int seed = 0; seed < n_seeds; ++seed) {
    ModelSampler sampler(a, 3.0, gamma, 1000 + static_cast<std::uint64_t>(seed));
    HermitianMatrix r_n(4);
    for (int t = 0; t < 500; ++t) r_n.add_outer(sampler.noise_only());
    r_n.scale(1.0 / 500.0);
    r_n.symmetrize();

    for (std::size_t gi = 0; gi < t_grid.size(); ++gi) {
      HermitianMatrix r_sn(4);
      for (std::size_t t = 0; t < t_grid[gi]; ++t) r_sn.add_outer(sampler.source_plus_noise());
      r_sn.scale(1.0 / static_cast<double>(t_grid[gi]));
      r_sn.symmetrize();
      const RtfGevdResult res = estimate_rtf_gevd(r_sn, r_n, 2);
      mean_err[gi] += rel_error(res.left, a_l) / n_seeds;
    }
  }

  std::vector<double> log_t, log_e;
  for (std::size_t gi = 0; gi < t_grid.size(); ++gi) {
    log_t.push_back(std::log(static_cast<double>(t_grid[gi])));
    log_e.push_back(std::log(mean_err[gi]));
  }
  CHECK(spearman(log_t, log_e) < -0.8);
}

TEST_CASE("build_correlation_set on a synthetic scene") {
  SceneSpec spec;
  spec.desired_angle_deg = -35.0;
  spec.interferer_angles_deg = {150.0};
  spec.active_s = 8.0;
  spec.seed = 31;
  WolaConfig cfg;
  const ArrayGeometry geom = ArrayGeometry::binaural_default();
  const Scene scene = mix_scene(spec, geom, cfg);
  const AnalyzedTimeline analyzed = AnalyzedTimeline::from(scene.timeline, cfg);

  const EstimationResult est = estimate_from_analyzed(analyzed, cfg, 2, 0.1);
  // floor(0.1 * 16000 / 128) frames starting at the 2 s mark (frame 250).
  CHECK(est.correlations.observation_frames == 12);
  CHECK(est.observation_interval.begin == 250);
  CHECK(est.noise_interval.end == 249);
  CHECK(est.correlations.bin_count() == cfg.bin_count());
  CHECK(est.rtfs.desired_left[10][0] == Complex(1, 0));
  CHECK(est.rtfs.interferer_left[0][10][0] == Complex(1, 0));
  CHECK(est.rtfs.desired_right[10][2] == Complex(1, 0));

  // The noise estimate stays close to the coherence model times the noise
  // power at that bin.
  for (std::size_t k : {8u, 24u, 48u}) {
    const HermitianMatrix& est_n = est.correlations.noise[k];
    HermitianMatrix model = diffuse_coherence(geom, cfg.bin_frequency_hz(k));
    model.scale(est_n.trace() / 4.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) diff += std::norm(est_n(i, j) - model(i, j));
    }
    CHECK(std::sqrt(diff) < 0.10 * model.frobenius());
  }

  // A long observation interval estimates the desired RTF better than the
  // 0.1 s one.
  const EstimationResult est_long = estimate_from_analyzed(analyzed, cfg, 2, 8.0);
  double err_short = 0.0, err_long = 0.0;
  for (std::size_t k = 4; k < cfg.bin_count(); k += 8) {
    const AtfVector truth{k, scene.model.desired_atf[k]};
    err_short += rel_error(est.rtfs.desired_left[k], truth.rtf_left());
    err_long += rel_error(est_long.rtfs.desired_left[k], truth.rtf_left());
  }
  CHECK(err_long < err_short);

  CHECK_THROWS_AS(estimate_from_analyzed(analyzed, cfg, 2, 100.0), IntervalOutOfRange);
}

TEST_CASE("correlation set and rtf estimate json round trips") {
  auto g = testsupport::rng(77);
  CorrelationSet cs;
  cs.dim = 2;
  cs.noise_frames = 3;
  cs.observation_frames = 5;
  for (int k = 0; k < 3; ++k) {
    cs.noise.push_back(testsupport::random_hpd(g, 2));
    cs.mixture.push_back(testsupport::random_hpd(g, 2));
    cs.undesired.push_back(testsupport::random_hpd(g, 2));
    cs.desired_plus_noise.push_back(testsupport::random_hpd(g, 2));
  }
  cs.interferer_plus_noise.push_back({testsupport::random_hpd(g, 2),
                                      testsupport::random_hpd(g, 2),
                                      testsupport::random_hpd(g, 2)});
  const CorrelationSet back = CorrelationSet::from_json(cs.to_json());
  CHECK(back.dim == 2);
  CHECK(back.noise_frames == 3);
  CHECK(back.bin_count() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(back.noise[k](i, j) == cs.noise[k](i, j));
        CHECK(back.interferer_plus_noise[0][k](i, j) == cs.interferer_plus_noise[0][k](i, j));
      }
    }
  }

  RtfEstimate rtf;
  rtf.mics_per_device = 1;
  rtf.desired_left = {random_vector(g, 2)};
  rtf.desired_right = {random_vector(g, 2)};
  rtf.interferer_left = {{random_vector(g, 2)}};
  rtf.interferer_right = {{random_vector(g, 2)}};
  const RtfEstimate rtf_back = RtfEstimate::from_json(rtf.to_json());
  CHECK(rtf_back.mics_per_device == 1);
  CHECK(rtf_back.desired_left[0] == rtf.desired_left[0]);
  CHECK(rtf_back.interferer_right[0][0] == rtf.interferer_right[0][0]);
}

TEST_SUITE_END();
