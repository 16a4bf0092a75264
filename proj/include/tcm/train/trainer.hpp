// include/tcm/train/trainer.hpp

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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tcm/data/batching.hpp"
#include "tcm/model/inference.hpp"
#include "tcm/train/adam.hpp"
#include "tcm/train/checkpoint.hpp"
#include "tcm/train/loss.hpp"

namespace tcm {

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::size_t batch_size = 20;
  // Empty: inverse class frequency of the training split.
  std::optional<ClassWeights> class_weights;
  std::size_t patience = 7;
  std::size_t max_epochs = 30;
  std::size_t top_k_average = 5;
  std::uint64_t seed = 0;
  std::size_t target_t = 200;
  LengthMode validation_mode = LengthMode::kFixed;
  std::size_t jobs = 1;  // threads for validation scoring

  /// Fine-tuning recipe of the original large-model setup (lr 1e-6).
  static TrainConfig full_scale() {
    TrainConfig t;
    t.lr = 1e-6;
    return t;
  }

  void validate() const {
    if (!(lr >= 0.0)) throw ConfigError("train.lr must be >= 0");
    if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay must be >= 0");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (patience < 1) throw ConfigError("train.patience must be >= 1");
    if (max_epochs < 1) throw ConfigError("train.max_epochs must be >= 1");
    if (top_k_average < 1) throw ConfigError("train.top_k_average must be >= 1");
    if (target_t < 1) throw ConfigError("train.target_T must be >= 1");
    if (class_weights && ((*class_weights)[0] <= 0.0 || (*class_weights)[1] <= 0.0)) {
      throw ConfigError("train.class_weights must be positive");
    }
  }
};

inline Json to_json(const TrainConfig& t) {
  Json j{{"lr", t.lr},
         {"weight_decay", t.weight_decay},
         {"batch_size", t.batch_size},
         {"patience", t.patience},
         {"max_epochs", t.max_epochs},
         {"top_k_average", t.top_k_average},
         {"seed", t.seed},
         {"target_T", t.target_t},
         {"validation_mode", to_string(t.validation_mode)},
         {"jobs", t.jobs}};
  j["class_weights"] = t.class_weights ? Json(*t.class_weights) : Json(nullptr);
  return j;
}

inline void read_json(const Json& j, TrainConfig& t, const std::string& path) {
  FieldReader r(j, path);
  r.get("lr", t.lr);
  r.get("weight_decay", t.weight_decay);
  r.get("batch_size", t.batch_size);
  r.get("patience", t.patience);
  r.get("max_epochs", t.max_epochs);
  r.get("top_k_average", t.top_k_average);
  r.get("seed", t.seed);
  r.get("target_T", t.target_t);
  std::string mode = to_string(t.validation_mode);
  r.get("validation_mode", mode);
  t.validation_mode = parse_length_mode(mode);
  r.get("jobs", t.jobs);
  if (const Json* w = r.child("class_weights"); w && !w->is_null()) {
    if (!w->is_array() || w->size() != 2) {
      throw ConfigError("train.class_weights must be [w_bonafide, w_spoof] or null");
    }
    t.class_weights = ClassWeights{(*w)[0].get<double>(), (*w)[1].get<double>()};
  } else if (w) {
    t.class_weights.reset();
  }
  r.finish();
}

inline ClassWeights resolve_class_weights(const TrainConfig& cfg,
                                          std::span<const Utterance> train) {
  return cfg.class_weights ? *cfg.class_weights : inverse_frequency_weights(train);
}

/// True iff the first occurrence of the minimum lies at least `patience`
/// epochs before the latest entry, i.e. the last `patience` epochs brought
/// no improvement.
inline bool early_stop(std::span<const double> history, std::size_t patience) {
  if (history.empty()) throw EmptyInputError("early_stop: empty history");
  const auto best = static_cast<std::size_t>(
      std::min_element(history.begin(), history.end()) - history.begin());
  return history.size() - 1 - best >= patience;
}

/// Mean weighted NLL over a split, in evaluation mode. Independent of how
/// the split would be batched.
inline double mean_weighted_loss(std::span<const UtteranceLogits> logits,
                                 std::span<const Utterance> utts,
                                 const ClassWeights& weights) {
  if (utts.empty()) throw EmptyInputError("validation split is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    total += weighted_nll(logits[i].logits, utts[i].label, weights);
  }
  return total / static_cast<double>(utts.size());
}

inline double validate(const Model& model, std::span<const Utterance> dev,
                       const TrainConfig& cfg, const ClassWeights& weights) {
  const auto logits =
      score_utterances(model, dev, cfg.validation_mode, cfg.target_t, cfg.jobs);
  return mean_weighted_loss(logits, dev, weights);
}

/// One pass over the training split in fixed-length batches; returns the
/// mean training loss per utterance. Shuffling and dropout are keyed by
/// (seed, epoch, batch, utterance) so the epoch is reproducible.
inline double train_epoch(Model& model, Adam& optimizer, std::span<const Utterance> train,
                          const TrainConfig& cfg, const ClassWeights& weights,
                          std::uint32_t epoch) {
  BatchIterator batches(train, BatchOptions{cfg.batch_size, LengthMode::kFixed,
                                            cfg.target_t, true,
                                            hash_key({cfg.seed, epoch})});
  const double dropout = model.config().dropout;
  double total = 0.0;
  std::size_t seen = 0;
  std::uint64_t batch_index = 0;
  while (auto batch = batches.next()) {
    Tape tape;
    TapeScope scope(tape);
    model.parameters().zero_grad();
    std::vector<Tensor> rows;
    rows.reserve(batch->size());
    for (std::size_t i = 0; i < batch->size(); ++i) {
      ForwardContext ctx = ForwardContext::training(
          dropout, hash_key({cfg.seed, epoch, batch_index, i}));
      const ModelOutput out = model_forward(model, batch->utterance(i), ctx);
      rows.push_back(reshape(out.logits, {1, 2}));
    }
    const Tensor loss = weighted_cross_entropy(concat(rows, 0), batch->labels, weights);
    tape.backward(loss);
    optimizer.step(model.parameters());
    total += loss.item() * static_cast<double>(batch->size());
    seen += batch->size();
    ++batch_index;
  }
  model.parameters().zero_grad();
  return total / static_cast<double>(seen);
}

struct EpochRecord {
  std::uint32_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::vector<Checkpoint> checkpoints;  // one per epoch
  Checkpoint averaged;                  // val_loss re-measured on dev
  bool early_stopped = false;
};

struct TrainCallbacks {
  std::function<void(const EpochRecord&, const Checkpoint&)> on_epoch;
};

/// Full recipe: epochs of train + validate with a checkpoint each, early
/// stopping on validation loss, then the elementwise mean of the top-k
/// checkpoints, re-validated on dev.
inline TrainResult train_model(const ModelConfig& model_config,
                               std::span<const Utterance> train,
                               std::span<const Utterance> dev, const TrainConfig& cfg,
                               const Json& config_echo,
                               const TrainCallbacks& callbacks = {}) {
  cfg.validate();
  Model model = Model::initialize(model_config, hash_key({cfg.seed, 0x1417ULL}));
  const ClassWeights weights = resolve_class_weights(cfg, train);
  Adam optimizer(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  TrainResult result;
  std::vector<double> val_history;
  for (std::uint32_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_epoch(model, optimizer, train, cfg, weights, epoch);
    rec.val_loss = validate(model, dev, cfg, weights);
    result.history.push_back(rec);
    result.checkpoints.push_back(snapshot(model, config_echo, epoch, rec.val_loss));
    if (callbacks.on_epoch) callbacks.on_epoch(rec, result.checkpoints.back());
    val_history.push_back(rec.val_loss);
    if (early_stop(val_history, cfg.patience)) {
      result.early_stopped = true;
      break;
    }
  }
  result.averaged = average_checkpoints(result.checkpoints, cfg.top_k_average);
  const Model averaged = model_from_checkpoint(result.averaged, model_config);
  result.averaged.val_loss = validate(averaged, dev, cfg, weights);
  return result;
}

}  // namespace tcm
