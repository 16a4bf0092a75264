// include/tcm/data/batching.hpp

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
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcm/data/utterance.hpp"
#include "tcm/random.hpp"

namespace tcm {

/// Crops to the first target_t frames, or repeats the utterance cyclically
/// until it has target_t frames.
inline Tensor fix_length(const Utterance& utt, std::size_t target_t) {
  if (target_t < 1) throw ConfigError("fix_length: target_T must be >= 1");
  const std::size_t t_len = utt.frames();
  const std::size_t f = utt.feature_dim();
  if (t_len == 0) throw EmptyInputError("fix_length: utterance '" + utt.id + "' is empty");
  if (t_len == target_t) return utt.features;
  std::vector<double> out(target_t * f);
  const auto src = utt.features.data();
  for (std::size_t t = 0; t < target_t; ++t) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>((t % t_len) * f), f,
                out.begin() + static_cast<std::ptrdiff_t>(t * f));
  }
  return Tensor({target_t, f}, std::move(out));
}

enum class LengthMode { kFixed, kVariable };

inline std::string to_string(LengthMode m) {
  return m == LengthMode::kFixed ? "fixed" : "variable";
}

inline LengthMode parse_length_mode(const std::string& s) {
  if (s == "fixed" || s == "fix") return LengthMode::kFixed;
  if (s == "variable" || s == "var") return LengthMode::kVariable;
  throw ConfigError("unknown length mode '" + s + "' (expected fixed|variable)");
}

/// B utterances. In fixed mode `features` is dense [B × target_T × F]; in
/// variable mode B = 1 and it is [1 × T × F] at the original length.
struct Batch {
  std::vector<std::size_t> indices;  // positions in the source list
  Tensor features;
  std::vector<Label> labels;

  std::size_t size() const { return indices.size(); }

  /// The i-th utterance of the batch as a T×F matrix.
  Tensor utterance(std::size_t i) const {
    const std::size_t t_len = features.dim(1), f = features.dim(2);
    const auto src = features.data().subspan(i * t_len * f, t_len * f);
    return Tensor({t_len, f}, std::vector<double>(src.begin(), src.end()));
  }
};

struct BatchOptions {
  std::size_t batch_size = 20;
  LengthMode mode = LengthMode::kFixed;
  std::size_t target_t = 200;
  bool shuffle = true;
  std::uint64_t seed = 0;
};

/// Deterministic batch stream over a list of utterances. The visiting order
/// is a shuffle keyed by the seed (or the list order when shuffling is off);
/// the final partial batch is emitted. Variable mode forces batches of one.
class BatchIterator {
 public:
  BatchIterator(std::span<const Utterance> utterances, BatchOptions options)
      : utts_(utterances), opt_(options), order_(utterances.size()) {
    if (opt_.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (opt_.mode == LengthMode::kVariable) opt_.batch_size = 1;
    if (opt_.mode == LengthMode::kFixed && opt_.target_t < 1) {
      throw ConfigError("target_T must be >= 1");
    }
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (opt_.shuffle) {
      Rng rng = make_rng({opt_.seed, 0xba7c4ULL});
      std::shuffle(order_.begin(), order_.end(), rng);
    }
  }

  const std::vector<std::size_t>& order() const { return order_; }

  std::size_t batch_count() const {
    return (order_.size() + opt_.batch_size - 1) / opt_.batch_size;
  }

  std::optional<Batch> next() {
    if (pos_ >= order_.size()) return std::nullopt;
    const std::size_t end = std::min(order_.size(), pos_ + opt_.batch_size);
    Batch b;
    b.indices.assign(order_.begin() + static_cast<std::ptrdiff_t>(pos_),
                     order_.begin() + static_cast<std::ptrdiff_t>(end));
    pos_ = end;
    for (std::size_t i : b.indices) b.labels.push_back(utts_[i].label);
    if (opt_.mode == LengthMode::kVariable) {
      const Utterance& u = utts_[b.indices[0]];
      b.features = reshape_copy(u.features, {1, u.frames(), u.feature_dim()});
      return b;
    }
    const std::size_t f = utts_[b.indices[0]].feature_dim();
    std::vector<double> dense;
    dense.reserve(b.size() * opt_.target_t * f);
    for (std::size_t i : b.indices) {
      if (utts_[i].feature_dim() != f) {
        throw DimensionError("batch mixes feature dims " + std::to_string(f) +
                             " and " + std::to_string(utts_[i].feature_dim()));
      }
      const Tensor fixed = fix_length(utts_[i], opt_.target_t);
      dense.insert(dense.end(), fixed.data().begin(), fixed.data().end());
    }
    b.features = Tensor({b.size(), opt_.target_t, f}, std::move(dense));
    return b;
  }

 private:
  static Tensor reshape_copy(const Tensor& t, Shape shape) {
    return Tensor(std::move(shape), std::vector<double>(t.data().begin(), t.data().end()));
  }

  std::span<const Utterance> utts_;
  BatchOptions opt_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

}  // namespace tcm
