// include/tcm/model/inference.hpp

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

#include <algorithm>
#include <array>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "tcm/data/batching.hpp"
#include "tcm/model/model.hpp"

namespace tcm {

struct UtteranceLogits {
  std::array<double, 2> logits{};  // bona fide, spoof
  double score() const { return logits[0] - logits[1]; }
};

/// Scores every utterance in evaluation mode. Fixed mode applies
/// fix_length(target_t) first. With jobs > 1 utterances are split into
/// contiguous ranges scored on separate threads; the result is ordered like
/// the input and identical to the single-threaded result.
inline std::vector<UtteranceLogits> score_utterances(const Model& model,
                                                     std::span<const Utterance> utts,
                                                     LengthMode mode,
                                                     std::size_t target_t,
                                                     std::size_t jobs = 1) {
  std::vector<UtteranceLogits> out(utts.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Tensor features = mode == LengthMode::kFixed
                                  ? fix_length(utts[i], target_t)
                                  : utts[i].features;
      const ModelOutput o = model_forward(model, features);
      out[i].logits = {o.logits[0], o.logits[1]};
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, utts.size()));
  if (jobs == 1) {
    run(0, utts.size());
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  const std::size_t chunk = (utts.size() + jobs - 1) / jobs;
  for (std::size_t j = 0; j < jobs; ++j) {
    const std::size_t begin = std::min(utts.size(), j * chunk);
    const std::size_t end = std::min(utts.size(), begin + chunk);
    workers.emplace_back([&, j, begin, end] {
      try {
        run(begin, end);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace tcm
