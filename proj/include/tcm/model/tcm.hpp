// include/tcm/model/tcm.hpp

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

#include <cmath>
#include <string>
#include <vector>

#include "tcm/model/attention.hpp"
#include "tcm/model/config.hpp"

namespace tcm {

/// (T+1)×D activations with the classification token in row 0.
struct TokenSequence {
  Tensor tokens;

  std::size_t temporal_length() const { return tokens.dim(0) - 1; }
  std::size_t width() const { return tokens.dim(1); }
  Tensor cls() const { return slice(tokens, 0, 0, 1); }
  Tensor temporal() const { return slice(tokens, 0, 1, tokens.dim(0)); }
};

/// Sinusoidal absolute position table [T×D]: sin on even, cos on odd columns.
inline Tensor sinusoidal_positions(std::size_t t_len, std::size_t d) {
  std::vector<double> pe(t_len * d);
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      const double exponent =
          static_cast<double>(c - c % 2) / static_cast<double>(d);
      const double angle = static_cast<double>(t) / std::pow(10000.0, exponent);
      pe[t * d + c] = c % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
  return Tensor({t_len, d}, std::move(pe));
}

/// Frame-wise affine map F -> D, plus the position table when enabled.
inline Tensor project_features(const Tensor& features, const Linear& projection,
                               const ModelConfig& c) {
  if (features.rank() != 2 || features.dim(1) != c.feature_dim) {
    throw ConfigError("features of shape " + shape_str(features.shape()) +
                      " do not match model.F=" + std::to_string(c.feature_dim));
  }
  Tensor x = projection(features);
  if (c.positional_encoding == PositionalEncoding::kSinusoidal &&
      features.dim(0) > 0) {
    x = add(x, sinusoidal_positions(features.dim(0), c.model_dim));
  }
  return x;
}

inline TokenSequence prepend_cls(const Tensor& x, const Tensor& cls) {
  if (x.rank() != 2 || cls.rank() != 1 || cls.dim(0) != x.dim(1)) {
    throw DimensionError("prepend_cls: tokens " + shape_str(x.shape()) +
                         " vs cls " + shape_str(cls.shape()));
  }
  const Tensor cls_row = reshape(cls, {1, cls.dim(0)});
  if (x.dim(0) == 0) return {cls_row};
  return {concat({cls_row, x}, 0)};
}

struct TcmWeights {
  Linear head_proj;       // d -> D, shared across heads
  Tensor head_embedding;  // H×D; undefined when the embedding is disabled

  static TcmWeights bind(const ParameterStore& s, const std::string& prefix) {
    TcmWeights w{Linear::bind(s, prefix + ".head_proj"), Tensor()};
    if (s.contains(prefix + ".head_embedding")) {
      w.head_embedding = s.at(prefix + ".head_embedding");
    }
    return w;
  }
};

/// Builds H head tokens from the channel segments of the sequence.
///
/// The D channels are split into H contiguous segments of d = D/H; each
/// segment is averaged over the tokens, passed through the shared d -> D
/// affine map and GeLU, and offset by its row of the head-token embedding.
inline Tensor generate_head_tokens(const TokenSequence& seq, const TcmWeights& w,
                                   const ModelConfig& c) {
  const std::size_t d_model = seq.width();
  if (c.heads == 0 || d_model % c.heads != 0) {
    throw ConfigError("head tokens: D=" + std::to_string(d_model) +
                      " not divisible by H=" + std::to_string(c.heads));
  }
  const std::size_t d = d_model / c.heads;
  const Tensor pooled = mean_over_time(
      c.head_pool_includes_cls ? seq.tokens : seq.temporal());
  Tensor heads = gelu(w.head_proj(reshape(pooled, {c.heads, d})));
  if (c.toggles.ht_embedding && w.head_embedding.defined()) {
    heads = add(heads, w.head_embedding);
  }
  return heads;
}

struct TcmAttentionOutput {
  Tensor temporal;  // (T+1)×D, CLS in row 0
  Tensor heads;     // H×D
};

/// Self-attention over [tokens; head tokens] (length T+H+1) when head tokens
/// take part, else over the T+1 tokens with head tokens passed through.
inline TcmAttentionOutput tcm_attention(const TokenSequence& seq,
                                        const Tensor& head_tokens,
                                        const MhsaWeights& w,
                                        const ModelConfig& c,
                                        ForwardContext& ctx) {
  if (!c.toggles.ht_in_mhsa) {
    return {multi_head_attention(seq.tokens, w, c.heads, ctx), head_tokens};
  }
  const std::size_t n = seq.tokens.dim(0);
  const std::size_t h = head_tokens.dim(0);
  const Tensor joint = multi_head_attention(concat({seq.tokens, head_tokens}, 0),
                                            w, c.heads, ctx);
  return {slice(joint, 0, 0, n), slice(joint, 0, n, n + h)};
}

/// CLS' = CLS + mean(head rows) + mean(temporal rows 1..T), each term per
/// its toggle; the head rows are then dropped. With T = 0 there is no
/// temporal token to average and the temporal term is omitted.
inline TokenSequence enrich_cls(const TcmAttentionOutput& out,
                                const ModelConfig& c) {
  const TcmToggles& tg = c.toggles;
  if (!tg.add_mean_ht_to_cls && !tg.add_mean_tt_to_cls) return {out.temporal};
  const std::size_t n = out.temporal.dim(0);
  Tensor cls = row(out.temporal, 0);
  if (tg.add_mean_ht_to_cls) cls = add(cls, mean_over_time(out.heads));
  if (tg.add_mean_tt_to_cls) {
    if (c.mean_tt_includes_cls) {
      cls = add(cls, mean_over_time(out.temporal));
    } else if (n > 1) {
      cls = add(cls, mean_over_time(slice(out.temporal, 0, 1, n)));
    }
  }
  const Tensor cls_row = reshape(cls, {1, cls.dim(0)});
  if (n == 1) return {cls_row};
  return {concat({cls_row, slice(out.temporal, 0, 1, n)}, 0)};
}

/// Head-token generation, joint attention and CLS enrichment; preserves the
/// (T+1)×D shape of the input.
inline TokenSequence tcm_forward(const TokenSequence& seq, const MhsaWeights& mhsa,
                                 const TcmWeights& tcm, const ModelConfig& c,
                                 ForwardContext& ctx) {
  const Tensor head_tokens = generate_head_tokens(seq, tcm, c);
  return enrich_cls(tcm_attention(seq, head_tokens, mhsa, c, ctx), c);
}

}  // namespace tcm
