// include/tcm/model/model.hpp

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

#include <cstdint>
#include <vector>

#include "tcm/model/blocks.hpp"

namespace tcm {

/// Bona fide / spoof classifier: projection, CLS, L encoder blocks and a
/// two-way linear head on the final CLS state.
class Model {
 public:
  Model(ModelConfig config, ParameterStore params)
      : config_(std::move(config)), params_(std::move(params)) {
    config_.validate();
    const auto specs = parameter_specs(config_);
    if (specs.size() != params_.size()) {
      throw ConfigError("parameter inventory has " +
                        std::to_string(params_.size()) + " tensors, config needs " +
                        std::to_string(specs.size()));
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& e = params_.entries()[i];
      if (e.name != specs[i].name || e.tensor.shape() != specs[i].shape) {
        throw ConfigError("parameter " + std::to_string(i) + " is '" + e.name +
                          "' " + shape_str(e.tensor.shape()) + ", expected '" +
                          specs[i].name + "' " + shape_str(specs[i].shape));
      }
    }
    bind();
  }

  static Model initialize(const ModelConfig& config, std::uint64_t seed) {
    return Model(config, initialize_parameters(config, seed));
  }

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const { return config_; }
  const ParameterStore& parameters() const { return params_; }
  ParameterStore& parameters() { return params_; }

  const Linear& projection() const { return projection_; }
  const Tensor& cls() const { return cls_; }
  const std::vector<BlockWeights>& blocks() const { return blocks_; }
  const Linear& classifier() const { return classifier_; }

  /// Independent copy of all parameter values (no shared storage).
  Model clone() const {
    ParameterStore copy;
    for (const auto& e : params_.entries()) {
      copy.add(e.name, e.tensor.detach(e.tensor.requires_grad()));
    }
    return Model(config_, std::move(copy));
  }

 private:
  void bind() {
    projection_ = Linear::bind(params_, "projection");
    cls_ = params_.at("cls");
    blocks_.clear();
    for (std::size_t b = 0; b < config_.blocks; ++b) {
      blocks_.push_back(BlockWeights::bind(params_, b, config_));
    }
    classifier_ = Linear::bind(params_, "classifier");
  }

  ModelConfig config_;
  ParameterStore params_;
  Linear projection_;
  Tensor cls_;
  std::vector<BlockWeights> blocks_;
  Linear classifier_;
};

struct ModelOutput {
  Tensor logits;  // [2]: index 0 bona fide, 1 spoof
  double score = 0.0;
};

/// Runs the encoder over features[T×F] and returns the final token sequence.
inline TokenSequence encode(const Model& model, const Tensor& features,
                            ForwardContext& ctx) {
  const ModelConfig& c = model.config();
  TokenSequence seq =
      prepend_cls(project_features(features, model.projection(), c), model.cls());
  for (std::size_t b = 0; b < model.blocks().size(); ++b) {
    ctx.block_index = b;
    seq = block_forward(seq, model.blocks()[b], c, ctx);
  }
  return seq;
}

/// score = logit[bona fide] - logit[spoof]; higher means more bona fide.
inline ModelOutput model_forward(const Model& model, const Tensor& features,
                                 ForwardContext& ctx) {
  if (features.rank() != 2 || features.dim(0) == 0) {
    throw EmptyInputError("model_forward: utterance has no frames");
  }
  const TokenSequence seq = encode(model, features, ctx);
  const Tensor logits =
      reshape(model.classifier()(seq.cls()), {2});
  return {logits, logits[0] - logits[1]};
}

inline ModelOutput model_forward(const Model& model, const Tensor& features) {
  ForwardContext ctx;
  return model_forward(model, features, ctx);
}

struct ParamCount {
  std::size_t total = 0;
  std::size_t tcm_delta = 0;
};

inline std::size_t count_parameters(const ModelConfig& c) {
  std::size_t n = 0;
  for (const auto& s : parameter_specs(c)) n += shape_numel(s.shape);
  return n;
}

/// Total learnable scalars of the config, and the scalars TCM adds on top of
/// plain MHSA for the same architecture (TCM forced on, other toggles kept).
inline ParamCount param_count(const ModelConfig& c) {
  ModelConfig with_tcm = c;
  with_tcm.toggles.use_tcm = true;
  ModelConfig plain = c;
  plain.toggles = TcmToggles::plain();
  return {count_parameters(c),
          count_parameters(with_tcm) - count_parameters(plain)};
}

inline ParamCount param_count(const Model& model) {
  ParamCount p = param_count(model.config());
  p.total = model.parameters().scalar_count();
  return p;
}

/// Closed form of the TCM parameter delta: L (d D + D + H D), the last term
/// only when the head-token embedding is enabled.
inline std::size_t analytic_tcm_delta(const ModelConfig& c) {
  const std::size_t d_model = c.model_dim;
  const std::size_t embedding = c.toggles.ht_embedding ? c.heads * d_model : 0;
  return c.blocks * (c.head_dim() * d_model + d_model + embedding);
}

}  // namespace tcm
