// include/tcm/metrics/evaluate.hpp

// Copyright 2026 The tcmdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcm/data/files.hpp"
#include "tcm/metrics/metrics.hpp"
#include "tcm/metrics/scores.hpp"
#include "tcm/model/inference.hpp"
#include "tcm/train/loss.hpp"

namespace tcm {

struct MetricsReport {
  double eer = 0.0;
  double min_tdcf = 0.0;
  double threshold = 0.0;
  std::size_t n_bona = 0;
  std::size_t n_spoof = 0;
};

inline Json to_json(const MetricsReport& r) {
  return Json{{"eer", r.eer},           {"min_tdcf", r.min_tdcf}, {"threshold", r.threshold},
              {"n_bona", r.n_bona},     {"n_spoof", r.n_spoof}};
}

/// Joins scores with protocol labels and computes both metrics. Every
/// scored id must appear in the protocol.
inline MetricsReport score_report(const std::vector<ScoreRecord>& scores,
                                  const std::vector<ProtocolEntry>& protocol,
                                  const TdcfCosts& costs) {
  std::unordered_map<std::string, Label> labels;
  for (const auto& e : protocol) labels.emplace(e.id, e.label);
  std::vector<double> bona, spoof;
  for (const auto& s : scores) {
    const auto it = labels.find(s.id);
    if (it == labels.end()) {
      throw ConsistencyError("scored id '" + s.id + "' is not in the protocol");
    }
    (it->second == Label::kBonafide ? bona : spoof).push_back(s.score);
  }
  MetricsReport r;
  const EerResult e = compute_eer(bona, spoof);
  r.eer = e.eer;
  r.threshold = e.threshold;
  r.min_tdcf = compute_min_tdcf(bona, spoof, costs);
  r.n_bona = bona.size();
  r.n_spoof = spoof.size();
  return r;
}

struct Evaluation {
  MetricsReport report;
  std::vector<ScoreRecord> scores;
  std::vector<UtteranceLogits> logits;
};

/// Scores an evaluation split (fixed: fix_length(target_t); variable: full
/// length) and computes EER and min t-DCF against the split's labels.
inline Evaluation evaluate(const Model& model, std::span<const Utterance> split,
                           LengthMode mode, std::size_t target_t, const TdcfCosts& costs,
                           std::size_t jobs = 1) {
  costs.validate();
  Evaluation ev;
  ev.logits = score_utterances(model, split, mode, target_t, jobs);
  std::vector<ProtocolEntry> protocol;
  for (std::size_t i = 0; i < split.size(); ++i) {
    ev.scores.push_back({split[i].id, ev.logits[i].score()});
    protocol.push_back({split[i].id, split[i].label});
  }
  ev.report = score_report(ev.scores, protocol, costs);
  return ev;
}

}  // namespace tcm
