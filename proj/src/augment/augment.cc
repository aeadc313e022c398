// augment/augment.cc

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

#include "augment/augment.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>

#include "audio/dsp.h"
#include "audio/wav_io.h"
#include "nlohmann/json.hpp"
#include "util/error.h"

namespace serkit::augment {

namespace {

// 20 ms analysis window, 10 ms synthesis hop, 15 ms seek radius at 16 kHz.
constexpr int kTsmWindow = 320;
constexpr int kTsmHop = 160;
constexpr int kTsmSeek = 240;

// Hann segment of the source, zero padded outside [0, n).
void read_segment(const std::vector<double>& x, long pos, double* out) {
  const long n = static_cast<long>(x.size());
  for (int i = 0; i < kTsmWindow; ++i) {
    const long j = pos + i;
    out[i] = (j >= 0 && j < n) ? x[j] : 0.0;
  }
}

double segment_ncc(const double* a, const double* b) {
  Eigen::Map<const Eigen::VectorXd> va(a, kTsmWindow);
  Eigen::Map<const Eigen::VectorXd> vb(b, kTsmWindow);
  const double e = std::sqrt(va.squaredNorm() * vb.squaredNorm()) + 1e-20;
  return va.dot(vb) / e;
}

}  // namespace

void AugmentationConfig::validate() const {
  if (tempo_lo > tempo_hi || gain_lo_db > gain_hi_db || nsr_lo > nsr_hi ||
      gaussian_sigma_lo > gaussian_sigma_hi) {
    throw ConfigError("augmentation range has lower bound above upper bound");
  }
  if (apply_prob < 0.0 || apply_prob > 1.0) {
    throw ConfigError("apply_prob outside [0, 1]");
  }
  if (tempo_lo < 0.5 || tempo_hi > 2.0) {
    throw ConfigError("tempo range outside supported [0.5, 2.0]");
  }
  if (nsr_lo < 0.0) throw ConfigError("nsr range must be non-negative");
  if (noise_enabled && apply_prob > 0.0 && noise_pool.empty()) {
    throw ConfigError("noise augmentation enabled with empty noise pool");
  }
  if (ir_enabled && apply_prob > 0.0 && ir_pool.empty()) {
    throw ConfigError("ir augmentation enabled with empty ir pool");
  }
}

std::string AugmentationPlan::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (tempo_factor) j["tempo_factor"] = *tempo_factor;
  if (gain_db) j["gain_db"] = *gain_db;
  if (noise_id) {
    j["noise_id"] = *noise_id;
    j["nsr"] = nsr.value_or(0.0);
  }
  if (ir_id) j["ir_id"] = *ir_id;
  if (gaussian_sigma) {
    j["gaussian_sigma"] = *gaussian_sigma;
    j["gaussian_seed"] = gaussian_seed;
  }
  return j.dump();
}

AugmentationPlan AugmentationPlan::from_json(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  AugmentationPlan p;
  if (j.contains("tempo_factor")) p.tempo_factor = j["tempo_factor"].get<double>();
  if (j.contains("gain_db")) p.gain_db = j["gain_db"].get<double>();
  if (j.contains("noise_id")) {
    p.noise_id = j["noise_id"].get<std::string>();
    p.nsr = j.at("nsr").get<double>();
  }
  if (j.contains("ir_id")) p.ir_id = j["ir_id"].get<std::string>();
  if (j.contains("gaussian_sigma")) {
    p.gaussian_sigma = j["gaussian_sigma"].get<double>();
    p.gaussian_seed = j.at("gaussian_seed").get<uint64_t>();
  }
  return p;
}

void AssetPool::add_noise(const std::string& id, audio::Waveform w) {
  noises_[id] = std::move(w);
}

void AssetPool::add_ir(const std::string& id, audio::ImpulseResponse ir) {
  irs_[id] = std::move(ir);
}

void AssetPool::load_noise_dir(const std::string& dir) {
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".wav") continue;
    add_noise(entry.path().stem().string(),
              audio::read_wav_at(entry.path().string(),
                                 audio::kCanonicalRateHz));
  }
}

void AssetPool::load_ir_dir(const std::string& dir) {
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".wav") continue;
    add_ir(entry.path().stem().string(),
           audio::read_ir(entry.path().string(), audio::kCanonicalRateHz));
  }
}

const audio::Waveform& AssetPool::noise(const std::string& id) const {
  const auto it = noises_.find(id);
  if (it == noises_.end()) throw DataError("unknown noise id: " + id);
  return it->second;
}

const audio::ImpulseResponse& AssetPool::ir(const std::string& id) const {
  const auto it = irs_.find(id);
  if (it == irs_.end()) throw DataError("unknown ir id: " + id);
  return it->second;
}

std::vector<std::string> AssetPool::noise_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, w] : noises_) ids.push_back(id);
  return ids;
}

std::vector<std::string> AssetPool::ir_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, ir] : irs_) ids.push_back(id);
  return ids;
}

AugmentationPlan sample_plan(const AugmentationConfig& cfg, Rng& rng) {
  cfg.validate();
  AugmentationPlan plan;
  // Each component draws from its own sub-stream, so switching one off
  // leaves every other component's parameters untouched. Ablation variants
  // then differ from the full recipe in exactly one dimension.
  Rng tempo_rng = rng.split("tempo");
  Rng gain_rng = rng.split("gain");
  Rng noise_rng = rng.split("noise");
  Rng ir_rng = rng.split("ir");
  Rng gauss_rng = rng.split("gauss");
  if (cfg.tempo_enabled && tempo_rng.next_bool(cfg.apply_prob)) {
    plan.tempo_factor = tempo_rng.uniform(cfg.tempo_lo, cfg.tempo_hi);
  }
  if (cfg.gain_enabled && gain_rng.next_bool(cfg.apply_prob)) {
    plan.gain_db = gain_rng.uniform(cfg.gain_lo_db, cfg.gain_hi_db);
  }
  if (cfg.noise_enabled && noise_rng.next_bool(cfg.apply_prob) &&
      !cfg.noise_pool.empty()) {
    plan.noise_id =
        cfg.noise_pool[noise_rng.next_below(cfg.noise_pool.size())];
    plan.nsr = noise_rng.uniform(cfg.nsr_lo, cfg.nsr_hi);
  }
  if (cfg.ir_enabled && ir_rng.next_bool(cfg.apply_prob) &&
      !cfg.ir_pool.empty()) {
    plan.ir_id = cfg.ir_pool[ir_rng.next_below(cfg.ir_pool.size())];
  }
  if (cfg.gaussian_enabled && gauss_rng.next_bool(cfg.apply_prob)) {
    plan.gaussian_sigma =
        gauss_rng.uniform(cfg.gaussian_sigma_lo, cfg.gaussian_sigma_hi);
    plan.gaussian_seed = gauss_rng.next_u64();
  }
  return plan;
}

audio::Waveform change_tempo(const audio::Waveform& w, double factor) {
  if (!(factor >= 0.5 && factor <= 2.0)) {
    throw ConfigError("tempo factor " + std::to_string(factor) +
                      " outside [0.5, 2.0]");
  }
  if (factor == 1.0 || w.size() < static_cast<size_t>(2 * kTsmWindow)) {
    return w;
  }

  const long n = static_cast<long>(w.size());
  const long out_len = std::lround(static_cast<double>(n) / factor);
  const double analysis_hop = factor * kTsmHop;

  std::vector<double> hann(kTsmWindow);
  for (int i = 0; i < kTsmWindow; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / kTsmWindow);
  }

  std::vector<double> acc(out_len + kTsmWindow, 0.0);
  std::vector<double> norm(out_len + kTsmWindow, 0.0);
  std::vector<double> seg(kTsmWindow);
  std::vector<double> tmpl(kTsmWindow);

  // prev holds the analysis position chosen for the previous output frame;
  // its natural continuation one synthesis hop later is the similarity
  // template for the next frame.
  long prev = 0;
  for (long k = 0; k * kTsmHop < out_len; ++k) {
    const long out_pos = k * kTsmHop;
    long pos;
    if (k == 0) {
      pos = 0;
    } else {
      const long nominal = std::lround(k * analysis_hop);
      read_segment(w.samples, prev + kTsmHop, tmpl.data());
      const long lo = std::max<long>(0, nominal - kTsmSeek);
      const long hi = std::min<long>(n - kTsmWindow, nominal + kTsmSeek);
      pos = std::clamp(nominal, lo, std::max(lo, hi));
      if (hi > lo) {
        // Coarse scan every 4 samples, then refine around the best hit.
        double best = -2.0;
        long best_pos = pos;
        for (long s = lo; s <= hi; s += 4) {
          read_segment(w.samples, s, seg.data());
          const double score = segment_ncc(seg.data(), tmpl.data());
          if (score > best) {
            best = score;
            best_pos = s;
          }
        }
        for (long s = std::max(lo, best_pos - 3);
             s <= std::min(hi, best_pos + 3); ++s) {
          if (s == best_pos) continue;
          read_segment(w.samples, s, seg.data());
          const double score = segment_ncc(seg.data(), tmpl.data());
          if (score > best) {
            best = score;
            best_pos = s;
          }
        }
        pos = best_pos;
      }
    }
    read_segment(w.samples, pos, seg.data());
    for (int i = 0; i < kTsmWindow; ++i) {
      acc[out_pos + i] += hann[i] * seg[i];
      norm[out_pos + i] += hann[i];
    }
    prev = pos;
  }

  audio::Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(out_len);
  for (long i = 0; i < out_len; ++i) {
    out.samples[i] = norm[i] > 1e-6 ? acc[i] / norm[i] : acc[i];
    out.samples[i] = std::clamp(out.samples[i], -1.0, 1.0);
  }
  return out;
}

audio::Waveform apply_plan(const audio::Waveform& w,
                           const AugmentationPlan& plan,
                           const AssetPool& pool) {
  audio::Waveform out = w;
  if (plan.tempo_factor) out = change_tempo(out, *plan.tempo_factor);
  if (plan.gain_db) out = audio::apply_gain_db(out, *plan.gain_db);
  if (plan.noise_id) {
    out = audio::mix_at_nsr(out, pool.noise(*plan.noise_id),
                            plan.nsr.value_or(0.0));
  }
  if (plan.ir_id) out = audio::convolve_ir(out, pool.ir(*plan.ir_id));
  if (plan.gaussian_sigma) {
    Rng g(plan.gaussian_seed);
    for (double& s : out.samples) {
      s = std::clamp(s + *plan.gaussian_sigma * g.next_gaussian(), -1.0, 1.0);
    }
  }
  return out;
}

audio::Waveform degrade_channel(const audio::Waveform& w,
                                const audio::ImpulseResponse& ir,
                                const audio::Waveform& ego_noise, double nsr) {
  if (nsr <= 0.0) throw ConfigError("degrade_channel requires nsr > 0");
  const audio::Waveform reverbed = audio::convolve_ir(w, ir);
  return audio::mix_at_nsr(reverbed, ego_noise, nsr);
}

}  // namespace serkit::augment
