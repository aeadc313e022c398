// eval/metrics.cc

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

#include "eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "util/error.h"

namespace serkit::eval {

using corpus::kNumClasses;

CategoricalMetrics categorical_metrics(const std::vector<int>& preds,
                                       const std::vector<int>& targets) {
  if (preds.size() != targets.size()) {
    throw DataError("prediction/target length mismatch");
  }
  if (preds.empty()) throw DataError("no predictions to score");
  CategoricalMetrics m;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] >= kNumClasses || targets[i] < 0 ||
        targets[i] >= kNumClasses) {
      throw DataError("class index outside [0, 4) at position " +
                      std::to_string(i));
    }
    ++m.confusion[targets[i]][preds[i]];
  }

  long correct = 0;
  double recall_sum = 0.0;
  int present = 0;
  double f1_sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    correct += m.confusion[c][c];
    long row = 0;
    long col = 0;
    for (int j = 0; j < kNumClasses; ++j) {
      row += m.confusion[c][j];
      col += m.confusion[j][c];
    }
    const double recall =
        row > 0 ? static_cast<double>(m.confusion[c][c]) / row : 0.0;
    const double precision =
        col > 0 ? static_cast<double>(m.confusion[c][c]) / col : 0.0;
    // Recall is averaged over classes that occur in the targets; macro F
    // averages all four classes, counting absent ones as zero.
    if (row > 0) {
      recall_sum += recall;
      ++present;
    }
    if (precision + recall > 0.0) {
      f1_sum += 2.0 * precision * recall / (precision + recall);
    }
  }
  m.uw_acc = static_cast<double>(correct) / preds.size();
  m.uar = present > 0 ? recall_sum / present : 0.0;
  m.macro_f = f1_sum / kNumClasses;
  return m;
}

namespace {

std::optional<double> pearson(const std::vector<double>& x,
                              const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

DimensionalMetrics dimensional_metrics(
    const std::vector<std::array<double, 2>>& preds,
    const std::vector<std::array<double, 2>>& targets) {
  if (preds.size() != targets.size()) {
    throw DataError("prediction/target length mismatch");
  }
  if (preds.size() < 2) {
    throw DataError("dimensional metrics need at least two pairs");
  }
  DimensionalMetrics m;
  std::vector<double> pa, pv, ta, tv;
  for (size_t i = 0; i < preds.size(); ++i) {
    m.arousal_mae += std::abs(preds[i][0] - targets[i][0]);
    m.valence_mae += std::abs(preds[i][1] - targets[i][1]);
    pa.push_back(preds[i][0]);
    pv.push_back(preds[i][1]);
    ta.push_back(targets[i][0]);
    tv.push_back(targets[i][1]);
  }
  m.arousal_mae /= preds.size();
  m.valence_mae /= preds.size();
  m.arousal_corr = pearson(pa, ta);
  m.valence_corr = pearson(pv, tv);
  return m;
}

double gap_percent(double clean, double degraded) {
  if (clean == 0.0) throw DataError("gap undefined for zero clean value");
  return (degraded - clean) / clean * 100.0;
}

double improvement_percent(double baseline, double augmented) {
  if (baseline == 0.0) {
    throw DataError("improvement undefined for zero baseline");
  }
  return (augmented - baseline) / baseline * 100.0;
}

std::vector<FoldSpec> make_loso_folds(
    const std::vector<corpus::UtteranceRecord>& records) {
  std::map<int, std::set<std::string>> speakers_by_session;
  for (const auto& r : records) {
    if (r.session <= 0 || r.speaker.empty()) {
      throw DataError(r.id + ": record lacks session or speaker annotation");
    }
    speakers_by_session[r.session].insert(r.speaker);
  }
  if (speakers_by_session.size() != 5) {
    throw DataError("leave-one-speaker-out needs exactly 5 sessions, got " +
                    std::to_string(speakers_by_session.size()));
  }
  for (const auto& [session, speakers] : speakers_by_session) {
    if (speakers.size() != 2) {
      throw DataError("session " + std::to_string(session) + " has " +
                      std::to_string(speakers.size()) +
                      " speakers, expected 2");
    }
  }

  std::vector<FoldSpec> folds;
  int fold_id = 0;
  for (const auto& [session, speakers] : speakers_by_session) {
    std::vector<std::string> pair(speakers.begin(), speakers.end());
    std::vector<int> train_sessions;
    for (const auto& [other, unused] : speakers_by_session) {
      if (other != session) train_sessions.push_back(other);
    }
    for (int flip = 0; flip < 2; ++flip) {
      FoldSpec f;
      f.fold_id = fold_id++;
      f.train_sessions = train_sessions;
      f.held_session = session;
      f.test_speaker = pair[flip];
      f.val_speaker = pair[1 - flip];
      folds.push_back(std::move(f));
    }
  }
  return folds;
}

}  // namespace serkit::eval
