// tests/augment_test.cc

// Copyright 2026  serkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the Apache 2 License for the specific language governing permissions
// and limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "audio/dsp.h"
#include "audio/waveform.h"
#include "augment/augment.h"
#include "util/error.h"
#include "util/rng.h"

using namespace serkit;

namespace {

constexpr int kSr = audio::kCanonicalRateHz;

audio::Waveform tone(double hz, double seconds, double amp = 0.3) {
  audio::Waveform w;
  w.sample_rate_hz = kSr;
  w.samples.resize(static_cast<size_t>(seconds * kSr));
  for (size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = amp * std::sin(2.0 * M_PI * hz * i / kSr);
  }
  return w;
}

audio::Waveform noise_wave(size_t n, uint64_t seed, double amp = 0.3) {
  Rng rng(seed);
  audio::Waveform w;
  w.sample_rate_hz = kSr;
  w.samples.resize(n);
  for (auto& s : w.samples) s = rng.uniform(-amp, amp);
  return w;
}

// Dominant frequency by sign-change counting; good to a few hertz for a
// clean tone.
double zero_cross_hz(const audio::Waveform& w) {
  int flips = 0;
  for (size_t i = 1; i < w.samples.size(); ++i) {
    if ((w.samples[i - 1] < 0 && w.samples[i] > 0) ||
        (w.samples[i - 1] > 0 && w.samples[i] < 0)) {
      ++flips;
    }
  }
  return flips * static_cast<double>(w.sample_rate_hz) /
         (2.0 * w.samples.size());
}

// Two-sided Kolmogorov-Smirnov statistic against Uniform(lo, hi).
double ks_uniform(std::vector<double> xs, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    const double cdf = (xs[i] - lo) / (hi - lo);
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

augment::AugmentationConfig pooled_config() {
  augment::AugmentationConfig cfg;
  cfg.noise_pool = {"n1", "n2", "n3"};
  cfg.ir_pool = {"r1", "r2"};
  return cfg;
}

augment::AssetPool test_pool() {
  augment::AssetPool pool;
  pool.add_noise("n1", noise_wave(2000, 71, 0.2));
  pool.add_noise("n2", noise_wave(3000, 72, 0.2));
  pool.add_noise("n3", noise_wave(2500, 73, 0.2));
  audio::ImpulseResponse r1;
  r1.taps = {1.0, 0.3, 0.1};
  audio::ImpulseResponse r2;
  r2.taps = {0.9, -0.2, 0.05, 0.01};
  pool.add_ir("r1", r1);
  pool.add_ir("r2", r2);
  return pool;
}

}  // namespace

TEST_CASE("sampled parameters are uniform over their ranges") {
  const augment::AugmentationConfig cfg = pooled_config();
  Rng rng(101);
  std::vector<double> tempos, gains, nsrs;
  std::map<std::string, int> noise_counts, ir_counts;
  int applied_tempo = 0;
  const int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    // Each draw owns a child stream, mirroring how training hands every
    // (utterance, epoch) pair its own rng.
    Rng draw = rng.split("draw", uint64_t(i));
    const augment::AugmentationPlan plan = augment::sample_plan(cfg, draw);
    if (plan.tempo_factor) {
      ++applied_tempo;
      tempos.push_back(*plan.tempo_factor);
      CHECK(*plan.tempo_factor >= cfg.tempo_lo);
      CHECK(*plan.tempo_factor <= cfg.tempo_hi);
    }
    if (plan.gain_db) {
      gains.push_back(*plan.gain_db);
      CHECK(*plan.gain_db >= cfg.gain_lo_db);
      CHECK(*plan.gain_db <= cfg.gain_hi_db);
    }
    if (plan.noise_id) {
      REQUIRE(plan.nsr.has_value());
      nsrs.push_back(*plan.nsr);
      CHECK(*plan.nsr >= cfg.nsr_lo);
      CHECK(*plan.nsr <= cfg.nsr_hi);
      ++noise_counts[*plan.noise_id];
    }
    if (plan.ir_id) ++ir_counts[*plan.ir_id];
  }
  // Each component fires with probability 0.5.
  CHECK(std::abs(applied_tempo / double(kDraws) - 0.5) <= 0.02);
  CHECK(ks_uniform(tempos, cfg.tempo_lo, cfg.tempo_hi) < 0.02);
  CHECK(ks_uniform(gains, cfg.gain_lo_db, cfg.gain_hi_db) < 0.02);
  CHECK(ks_uniform(nsrs, cfg.nsr_lo, cfg.nsr_hi) < 0.02);
  // Pool picks are close to uniform over the ids.
  for (const auto& [id, count] : noise_counts) {
    CHECK(std::abs(count / double(kDraws) - 0.5 / 3.0) <= 0.02);
  }
  for (const auto& [id, count] : ir_counts) {
    CHECK(std::abs(count / double(kDraws) - 0.5 / 2.0) <= 0.02);
  }
}

TEST_CASE("plans replay bit exactly through json") {
  const augment::AugmentationConfig cfg = pooled_config();
  const augment::AssetPool pool = test_pool();
  Rng rng(202);
  const audio::Waveform w = tone(200.0, 0.4);
  int nontrivial = 0;
  for (int i = 0; i < 20; ++i) {
    Rng draw = rng.split("draw", uint64_t(i));
    const augment::AugmentationPlan plan = augment::sample_plan(cfg, draw);
    const augment::AugmentationPlan replayed =
        augment::AugmentationPlan::from_json(plan.to_json());
    const audio::Waveform a = augment::apply_plan(w, plan, pool);
    const audio::Waveform b = augment::apply_plan(w, replayed, pool);
    REQUIRE(a.samples.size() == b.samples.size());
    CHECK(a.samples == b.samples);
    if (!plan.empty()) ++nontrivial;
  }
  CHECK(nontrivial > 10);
}

TEST_CASE("an empty plan is the identity") {
  const augment::AssetPool pool = test_pool();
  const audio::Waveform w = noise_wave(1500, 33);
  const augment::AugmentationPlan plan;
  CHECK(plan.empty());
  const audio::Waveform out = augment::apply_plan(w, plan, pool);
  CHECK(out.samples == w.samples);
}

TEST_CASE("gain-only plan matches the decibel form") {
  const augment::AssetPool pool = test_pool();
  const audio::Waveform w = tone(300.0, 0.2, 0.4);
  augment::AugmentationPlan plan;
  plan.gain_db = -6.0;
  const audio::Waveform out = augment::apply_plan(w, plan, pool);
  const double factor = std::pow(10.0, -6.0 / 20.0);
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  // 0.4 at -6 dB sits at 0.2005.
  CHECK(std::abs(peak - 0.4 * factor) <= 1e-3);
  CHECK(std::abs(peak - 0.2005) <= 2e-3);
}

TEST_CASE("tempo change hits the target duration and keeps pitch") {
  const audio::Waveform w = tone(220.0, 1.0);
  for (double factor : {0.85, 1.1, 1.2}) {
    const audio::Waveform out = augment::change_tempo(w, factor);
    const double want_s = (w.samples.size() / factor) / kSr;
    CHECK(std::abs(out.duration_seconds() - want_s) <= 0.03);
    CHECK(std::abs(zero_cross_hz(out) - 220.0) <= 5.0);
  }
}

TEST_CASE("tempo factor one bypasses exactly") {
  const audio::Waveform w = noise_wave(5000, 44);
  const audio::Waveform out = augment::change_tempo(w, 1.0);
  CHECK(out.samples == w.samples);
}

TEST_CASE("tempo factors outside the supported band are rejected") {
  const audio::Waveform w = tone(220.0, 0.5);
  CHECK_THROWS_AS(augment::change_tempo(w, 0.4), ConfigError);
  CHECK_THROWS_AS(augment::change_tempo(w, 2.5), ConfigError);
  CHECK_THROWS_AS(augment::change_tempo(w, -1.0), ConfigError);
}

TEST_CASE("noise mixing inside a plan lands on the planned ratio") {
  const augment::AssetPool pool = test_pool();
  const audio::Waveform w = tone(260.0, 0.3);
  augment::AugmentationPlan plan;
  plan.noise_id = "n2";
  plan.nsr = 0.7;
  const audio::Waveform out = augment::apply_plan(w, plan, pool);
  std::vector<double> added(w.samples.size());
  for (size_t i = 0; i < added.size(); ++i) {
    added[i] = out.samples[i] - w.samples[i];
  }
  audio::Waveform diff;
  diff.samples = std::move(added);
  CHECK(std::abs(audio::rms(diff) / audio::rms(w) - 0.7) <= 1e-6);
}

TEST_CASE("plan application queries the pool by id only") {
  // Identical settings and identical audio under two different labels give
  // the same result; the augmentation path has no access to any label.
  const augment::AssetPool pool = test_pool();
  augment::AugmentationPlan plan;
  plan.tempo_factor = 1.1;
  plan.gain_db = 2.0;
  plan.noise_id = "n1";
  plan.nsr = 0.6;
  plan.ir_id = "r1";
  const audio::Waveform w = tone(180.0, 0.5);
  const audio::Waveform a = augment::apply_plan(w, plan, pool);
  const audio::Waveform b = augment::apply_plan(w, plan, pool);
  CHECK(a.samples == b.samples);
  CHECK_THROWS_AS(
      [&] {
        augment::AugmentationPlan bad = plan;
        bad.noise_id = "absent";
        return augment::apply_plan(w, bad, pool);
      }(),
      DataError);
}

TEST_CASE("disabled components never fire") {
  augment::AugmentationConfig cfg = pooled_config();
  cfg.apply_prob = 1.0;
  cfg.tempo_enabled = false;
  cfg.noise_enabled = false;
  Rng rng(303);
  for (int i = 0; i < 50; ++i) {
    Rng draw = rng.split("draw", uint64_t(i));
    const augment::AugmentationPlan plan = augment::sample_plan(cfg, draw);
    CHECK(!plan.tempo_factor.has_value());
    CHECK(!plan.noise_id.has_value());
    CHECK(plan.gain_db.has_value());
    CHECK(plan.ir_id.has_value());
  }
}

TEST_CASE("switching one component off leaves the other draws untouched") {
  // Each component samples from its own sub-stream, so a single-component
  // ablation changes exactly one dimension of the plan.
  const augment::AugmentationConfig full = pooled_config();
  augment::AugmentationConfig no_noise = full;
  no_noise.noise_enabled = false;
  for (int i = 0; i < 200; ++i) {
    Rng a = Rng(404).split("draw", uint64_t(i));
    Rng b = Rng(404).split("draw", uint64_t(i));
    const augment::AugmentationPlan p = augment::sample_plan(full, a);
    const augment::AugmentationPlan q = augment::sample_plan(no_noise, b);
    CHECK(!q.noise_id.has_value());
    CHECK(p.tempo_factor == q.tempo_factor);
    CHECK(p.gain_db == q.gain_db);
    CHECK(p.ir_id == q.ir_id);
    CHECK(p.gaussian_sigma == q.gaussian_sigma);
  }
}

TEST_CASE("config validation catches malformed settings") {
  augment::AugmentationConfig cfg = pooled_config();
  cfg.tempo_lo = 1.3;
  cfg.tempo_hi = 1.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = pooled_config();
  cfg.apply_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = pooled_config();
  cfg.nsr_lo = -0.2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = pooled_config();
  cfg.noise_pool.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  // Disabling the component lifts the pool requirement.
  cfg.noise_enabled = false;
  CHECK_NOTHROW(cfg.validate());

  cfg = pooled_config();
  cfg.apply_prob = 0.0;
  cfg.noise_pool.clear();
  cfg.ir_pool.clear();
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("degrade_channel is deterministic and adds the requested bed") {
  const audio::Waveform w = tone(240.0, 0.4);
  audio::ImpulseResponse ir;
  ir.taps = {1.0, 0.4, 0.2, 0.05};
  const audio::Waveform bed = noise_wave(3000, 88, 0.15);
  const audio::Waveform a = augment::degrade_channel(w, ir, bed, 0.7);
  const audio::Waveform b = augment::degrade_channel(w, ir, bed, 0.7);
  CHECK(a.samples == b.samples);
  REQUIRE(a.samples.size() == w.samples.size());
  // The reverberant dry path alone has the same peak as the input, so the
  // degraded copy differs from the clean signal well beyond rounding.
  double diff = 0.0;
  for (size_t i = 0; i < w.samples.size(); ++i) {
    diff = std::max(diff, std::abs(a.samples[i] - w.samples[i]));
  }
  CHECK(diff > 0.01);
}

TEST_CASE("plan json carries every field through") {
  augment::AugmentationPlan plan;
  plan.tempo_factor = 0.9;
  plan.gain_db = -3.5;
  plan.noise_id = "n3";
  plan.nsr = 0.55;
  plan.ir_id = "r2";
  plan.gaussian_sigma = 0.004;
  plan.gaussian_seed = 987654321;
  const augment::AugmentationPlan r =
      augment::AugmentationPlan::from_json(plan.to_json());
  CHECK(r.tempo_factor == plan.tempo_factor);
  CHECK(r.gain_db == plan.gain_db);
  CHECK(r.noise_id == plan.noise_id);
  CHECK(r.nsr == plan.nsr);
  CHECK(r.ir_id == plan.ir_id);
  CHECK(r.gaussian_sigma == plan.gaussian_sigma);
  CHECK(r.gaussian_seed == plan.gaussian_seed);

  const augment::AugmentationPlan empty =
      augment::AugmentationPlan::from_json(augment::AugmentationPlan().to_json());
  CHECK(empty.empty());
}
