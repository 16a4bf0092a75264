// include/tcm/model/config.hpp

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

#include <cstddef>
#include <string>

#include "tcm/errors.hpp"
#include "tcm/json_fields.hpp"

namespace tcm {

enum class BlockKind { kConformer, kTransformer };
enum class PositionalEncoding { kNone, kSinusoidal };

inline std::string to_string(BlockKind k) {
  return k == BlockKind::kConformer ? "conformer" : "transformer";
}

inline BlockKind parse_block_kind(const std::string& s) {
  if (s == "conformer") return BlockKind::kConformer;
  if (s == "transformer") return BlockKind::kTransformer;
  throw ConfigError("unknown block_kind '" + s + "'");
}

inline std::string to_string(PositionalEncoding p) {
  return p == PositionalEncoding::kNone ? "none" : "sinusoidal";
}

inline PositionalEncoding parse_positional_encoding(const std::string& s) {
  if (s == "none") return PositionalEncoding::kNone;
  if (s == "sinusoidal") return PositionalEncoding::kSinusoidal;
  throw ConfigError("unknown positional_encoding '" + s + "'");
}

/// Switches of the temporal-channel attention module. With use_tcm off the
/// block runs plain multi-head self-attention and the other four are ignored.
struct TcmToggles {
  bool use_tcm = true;
  bool ht_embedding = true;
  bool ht_in_mhsa = true;
  bool add_mean_ht_to_cls = true;
  bool add_mean_tt_to_cls = true;

  static TcmToggles plain() { return TcmToggles{false, false, false, false, false}; }
  static TcmToggles full() { return TcmToggles{}; }

  bool operator==(const TcmToggles&) const = default;
};

struct ModelConfig {
  std::size_t feature_dim = 64;  // F
  std::size_t model_dim = 32;    // D
  std::size_t heads = 4;         // H
  std::size_t blocks = 2;        // L
  BlockKind block_kind = BlockKind::kConformer;
  std::size_t conv_kernel = 15;
  std::size_t ffn_expansion = 4;
  double dropout = 0.1;
  PositionalEncoding positional_encoding = PositionalEncoding::kSinusoidal;
  double layer_norm_eps = 1e-5;
  TcmToggles toggles;
  // Head-token pooling averages over the CLS row as well as temporal rows.
  bool head_pool_includes_cls = true;
  // The mean temporal token added to CLS averages rows 1..T only.
  bool mean_tt_includes_cls = false;

  std::size_t head_dim() const { return model_dim / heads; }

  void validate() const {
    if (feature_dim < 1) throw ConfigError("model.F must be >= 1");
    if (model_dim < 1) throw ConfigError("model.D must be >= 1");
    if (heads < 1) throw ConfigError("model.H must be >= 1");
    if (blocks < 1) throw ConfigError("model.L must be >= 1");
    if (model_dim % heads != 0) {
      throw ConfigError("model.D=" + std::to_string(model_dim) +
                        " is not divisible by model.H=" +
                        std::to_string(heads));
    }
    if (conv_kernel % 2 == 0) {
      throw ConfigError("model.conv_kernel must be odd, got " +
                        std::to_string(conv_kernel));
    }
    if (ffn_expansion < 1) throw ConfigError("model.ffn_expansion must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) {
      throw ConfigError("model.dropout must lie in [0, 1)");
    }
    if (!(layer_norm_eps > 0.0)) {
      throw ConfigError("model.layer_norm_eps must be positive");
    }
  }

  /// D=32, H=4, L=2 with a 15-frame depthwise kernel.
  static ModelConfig desk_scale() { return ModelConfig{}; }

  /// D=144, H=4, L=4 with a 31-frame depthwise kernel.
  static ModelConfig full_scale() {
    ModelConfig c;
    c.feature_dim = 1024;
    c.model_dim = 144;
    c.heads = 4;
    c.blocks = 4;
    c.conv_kernel = 31;
    return c;
  }
};

inline Json to_json(const TcmToggles& t) {
  return Json{{"use_tcm", t.use_tcm},
              {"ht_embedding", t.ht_embedding},
              {"ht_in_mhsa", t.ht_in_mhsa},
              {"add_mean_ht_to_cls", t.add_mean_ht_to_cls},
              {"add_mean_tt_to_cls", t.add_mean_tt_to_cls}};
}

inline void read_json(const Json& j, TcmToggles& t, const std::string& path) {
  FieldReader r(j, path);
  r.get("use_tcm", t.use_tcm);
  r.get("ht_embedding", t.ht_embedding);
  r.get("ht_in_mhsa", t.ht_in_mhsa);
  r.get("add_mean_ht_to_cls", t.add_mean_ht_to_cls);
  r.get("add_mean_tt_to_cls", t.add_mean_tt_to_cls);
  r.finish();
}

inline Json to_json(const ModelConfig& c) {
  return Json{{"F", c.feature_dim},
              {"D", c.model_dim},
              {"H", c.heads},
              {"L", c.blocks},
              {"block_kind", to_string(c.block_kind)},
              {"conv_kernel", c.conv_kernel},
              {"ffn_expansion", c.ffn_expansion},
              {"dropout", c.dropout},
              {"positional_encoding", to_string(c.positional_encoding)},
              {"layer_norm_eps", c.layer_norm_eps},
              {"head_pool_includes_cls", c.head_pool_includes_cls},
              {"mean_tt_includes_cls", c.mean_tt_includes_cls},
              {"toggles", to_json(c.toggles)}};
}

inline void read_json(const Json& j, ModelConfig& c, const std::string& path) {
  FieldReader r(j, path);
  r.get("F", c.feature_dim);
  r.get("D", c.model_dim);
  r.get("H", c.heads);
  r.get("L", c.blocks);
  std::string kind = to_string(c.block_kind);
  r.get("block_kind", kind);
  c.block_kind = parse_block_kind(kind);
  r.get("conv_kernel", c.conv_kernel);
  r.get("ffn_expansion", c.ffn_expansion);
  r.get("dropout", c.dropout);
  std::string pe = to_string(c.positional_encoding);
  r.get("positional_encoding", pe);
  c.positional_encoding = parse_positional_encoding(pe);
  r.get("layer_norm_eps", c.layer_norm_eps);
  r.get("head_pool_includes_cls", c.head_pool_includes_cls);
  r.get("mean_tt_includes_cls", c.mean_tt_includes_cls);
  if (const Json* t = r.child("toggles")) {
    read_json(*t, c.toggles, r.qualified("toggles"));
  }
  r.finish();
}

}  // namespace tcm
