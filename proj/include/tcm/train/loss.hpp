// include/tcm/train/loss.hpp

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
#include <cmath>
#include <span>
#include <vector>

#include "tcm/data/utterance.hpp"
#include "tcm/ops.hpp"

namespace tcm {

using ClassWeights = std::array<double, 2>;  // {bona fide, spoof}

/// mean_b  w[y_b] * -log softmax(logits_b)[y_b]  over a [B×2] batch.
inline Tensor weighted_cross_entropy(const Tensor& logits,
                                     std::span<const Label> labels,
                                     const ClassWeights& weights) {
  if (logits.rank() != 2 || logits.dim(1) != 2 || logits.dim(0) != labels.size()) {
    throw DimensionError("weighted_cross_entropy: logits " +
                         shape_str(logits.shape()) + " for " +
                         std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw EmptyInputError("weighted_cross_entropy: empty batch");
  const double inv_b = 1.0 / static_cast<double>(labels.size());
  std::vector<double> select(logits.numel(), 0.0);
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const std::size_t y = label_index(labels[b]);
    select[b * 2 + y] = -weights[y] * inv_b;
  }
  return sum(mul(log_softmax_rows(logits), Tensor(logits.shape(), std::move(select))));
}

/// Per-utterance weighted negative log-likelihood from raw logits.
inline double weighted_nll(const std::array<double, 2>& logits, Label label,
                           const ClassWeights& weights) {
  const double mx = std::max(logits[0], logits[1]);
  const double lse = mx + std::log(std::exp(logits[0] - mx) + std::exp(logits[1] - mx));
  const std::size_t y = label_index(label);
  return weights[y] * (lse - logits[y]);
}

/// w_c = N / (2 N_c): inverse class frequency, [1, 1] on a balanced list.
inline ClassWeights inverse_frequency_weights(std::span<const Label> labels) {
  std::array<double, 2> counts{0.0, 0.0};
  for (Label l : labels) counts[label_index(l)] += 1.0;
  if (counts[0] == 0.0 || counts[1] == 0.0) {
    throw InputError("class weights need both classes present in training data");
  }
  const double n = counts[0] + counts[1];
  return {n / (2.0 * counts[0]), n / (2.0 * counts[1])};
}

inline ClassWeights inverse_frequency_weights(std::span<const Utterance> utts) {
  std::vector<Label> labels;
  labels.reserve(utts.size());
  for (const auto& u : utts) labels.push_back(u.label);
  return inverse_frequency_weights(std::span<const Label>(labels));
}

}  // namespace tcm
