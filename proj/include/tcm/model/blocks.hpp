// include/tcm/model/blocks.hpp

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

#include <optional>
#include <string>

#include "tcm/model/tcm.hpp"

namespace tcm {

struct FeedForwardWeights {
  Norm norm;
  Linear up;
  Linear down;

  static FeedForwardWeights bind(const ParameterStore& s,
                                 const std::string& prefix, double eps) {
    return {Norm::bind(s, prefix + ".norm", eps), Linear::bind(s, prefix + ".up"),
            Linear::bind(s, prefix + ".down")};
  }
};

struct AttentionWeights {
  Norm norm;
  MhsaWeights mhsa;
  std::optional<TcmWeights> tcm;

  static AttentionWeights bind(const ParameterStore& s, const std::string& prefix,
                               const ModelConfig& c) {
    AttentionWeights w{Norm::bind(s, prefix + ".norm", c.layer_norm_eps),
                       MhsaWeights::bind(s, prefix), std::nullopt};
    if (c.toggles.use_tcm) w.tcm = TcmWeights::bind(s, prefix + ".tcm");
    return w;
  }
};

struct ConvModuleWeights {
  Norm norm;
  Linear pointwise_in;  // D -> 2D, halved again by the GLU
  Tensor depthwise_kernel;
  Tensor depthwise_bias;
  Norm depthwise_norm;
  Linear pointwise_out;

  static ConvModuleWeights bind(const ParameterStore& s, const std::string& prefix,
                                double eps) {
    return {Norm::bind(s, prefix + ".norm", eps),
            Linear::bind(s, prefix + ".pointwise_in"),
            s.at(prefix + ".depthwise.kernel"),
            s.at(prefix + ".depthwise.bias"),
            Norm::bind(s, prefix + ".depthwise_norm", eps),
            Linear::bind(s, prefix + ".pointwise_out")};
  }
};

/// Weights of one encoder block. Transformer blocks use attention and
/// ffn_in only.
struct BlockWeights {
  BlockKind kind = BlockKind::kConformer;
  FeedForwardWeights ffn_in;
  AttentionWeights attention;
  std::optional<ConvModuleWeights> conv;
  std::optional<FeedForwardWeights> ffn_out;
  std::optional<Norm> final_norm;

  static BlockWeights bind(const ParameterStore& s, std::size_t index,
                           const ModelConfig& c) {
    const std::string p = "blocks." + std::to_string(index);
    const double eps = c.layer_norm_eps;
    BlockWeights w;
    w.kind = c.block_kind;
    w.attention = AttentionWeights::bind(s, p + ".attention", c);
    if (c.block_kind == BlockKind::kConformer) {
      w.ffn_in = FeedForwardWeights::bind(s, p + ".ffn_in", eps);
      w.conv = ConvModuleWeights::bind(s, p + ".conv", eps);
      w.ffn_out = FeedForwardWeights::bind(s, p + ".ffn_out", eps);
      w.final_norm = Norm::bind(s, p + ".final_norm", eps);
    } else {
      w.ffn_in = FeedForwardWeights::bind(s, p + ".ffn", eps);
    }
    return w;
  }
};

/// Attention sub-layer body: TCM when enabled, else plain MHSA.
inline Tensor attention_forward(const Tensor& x, const AttentionWeights& w,
                                const ModelConfig& c, ForwardContext& ctx) {
  if (c.toggles.use_tcm) {
    if (!w.tcm) throw ConfigError("TCM enabled but block has no TCM weights");
    return tcm_forward({x}, w.mhsa, *w.tcm, c, ctx).tokens;
  }
  return multi_head_attention(x, w.mhsa, c.heads, ctx);
}

enum class FfnActivation { kSwish, kGelu };

inline Tensor feed_forward(const Tensor& x, const FeedForwardWeights& w,
                           FfnActivation act, ForwardContext& ctx) {
  Tensor h = w.up(w.norm(x));
  h = act == FfnActivation::kSwish ? silu(h) : gelu(h);
  return ctx.dropout(w.down(h));
}

/// Layer norm, pointwise D->2D, GLU, depthwise conv, layer norm, swish,
/// pointwise D->D.
inline Tensor conv_module(const Tensor& x, const ConvModuleWeights& w) {
  Tensor h = glu(w.pointwise_in(w.norm(x)));
  h = add_bias(depthwise_conv1d(h, w.depthwise_kernel), w.depthwise_bias);
  h = silu(w.depthwise_norm(h));
  return w.pointwise_out(h);
}

/// Macaron Conformer block:
///   x += FFN(x)/2; x += Attn(LN x); x += Conv(x); x += FFN(x)/2; LN(x).
inline TokenSequence conformer_block_forward(const TokenSequence& seq,
                                             const BlockWeights& w,
                                             const ModelConfig& c,
                                             ForwardContext& ctx) {
  if (!w.conv || !w.ffn_out || !w.final_norm) {
    throw ConfigError("conformer block weights incomplete");
  }
  Tensor x = seq.tokens;
  x = add(x, scale(feed_forward(x, w.ffn_in, FfnActivation::kSwish, ctx), 0.5));
  x = add(x, ctx.dropout(attention_forward(w.attention.norm(x), w.attention, c, ctx)));
  x = add(x, conv_module(x, *w.conv));
  x = add(x, scale(feed_forward(x, *w.ffn_out, FfnActivation::kSwish, ctx), 0.5));
  return {(*w.final_norm)(x)};
}

/// Pre-norm Transformer encoder block: x += Attn(LN x); x += FFN(LN x).
inline TokenSequence transformer_block_forward(const TokenSequence& seq,
                                               const BlockWeights& w,
                                               const ModelConfig& c,
                                               ForwardContext& ctx) {
  Tensor x = seq.tokens;
  x = add(x, ctx.dropout(attention_forward(w.attention.norm(x), w.attention, c, ctx)));
  x = add(x, feed_forward(x, w.ffn_in, FfnActivation::kGelu, ctx));
  return {x};
}

inline TokenSequence block_forward(const TokenSequence& seq, const BlockWeights& w,
                                   const ModelConfig& c, ForwardContext& ctx) {
  return w.kind == BlockKind::kConformer
             ? conformer_block_forward(seq, w, c, ctx)
             : transformer_block_forward(seq, w, c, ctx);
}

}  // namespace tcm
