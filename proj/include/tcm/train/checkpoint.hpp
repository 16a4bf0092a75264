// include/tcm/train/checkpoint.hpp

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

// Checkpoint file (.tcmc), all integers little-endian:
//   "TCMC" | u32 version = 1 | u32 tensor count
//   per tensor: u16 name length | name (UTF-8) | u8 rank | rank x u32 dims
//               | prod(dims) binary64 values, row-major
//   u32 config length | config echo (UTF-8 JSON)
//   f64 validation loss | u32 epoch

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tcm/io/binary.hpp"
#include "tcm/json_fields.hpp"
#include "tcm/model/model.hpp"

namespace tcm {

inline constexpr char kCheckpointMagic[] = "TCMC";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::vector<NamedTensor> tensors;
  Json config;  // echo of the run configuration; holds at least "model"
  double val_loss = 0.0;
  std::uint32_t epoch = 0;
};

/// Copies the current parameter values of a model.
inline Checkpoint snapshot(const Model& model, Json config, std::uint32_t epoch,
                           double val_loss) {
  Checkpoint c;
  for (const auto& e : model.parameters().entries()) {
    c.tensors.push_back({e.name, e.tensor.detach()});
  }
  c.config = std::move(config);
  c.val_loss = val_loss;
  c.epoch = epoch;
  return c;
}

inline io::Bytes encode_checkpoint(const Checkpoint& c) {
  io::ByteWriter w;
  w.raw(std::string_view(kCheckpointMagic, 4));
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(c.tensors.size()));
  for (const auto& t : c.tensors) {
    if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw FormatError("tensor name longer than 65535 bytes");
    }
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.raw(t.name);
    w.u8(static_cast<std::uint8_t>(t.tensor.rank()));
    for (std::size_t d : t.tensor.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : t.tensor.data()) w.f64(v);
  }
  const std::string config = c.config.dump();
  w.u32(static_cast<std::uint32_t>(config.size()));
  w.raw(config);
  w.f64(c.val_loss);
  w.u32(c.epoch);
  return w.take();
}

inline Checkpoint decode_checkpoint(const io::Bytes& bytes,
                                    const std::string& source = "<memory>") {
  io::ByteReader r(bytes, source);
  if (r.raw(4, "magic") != std::string_view(kCheckpointMagic, 4)) {
    r.fail_at(0, "bad magic, expected \"TCMC\"");
  }
  const std::size_t version_at = r.offset();
  if (const auto v = r.u32("version"); v != kCheckpointVersion) {
    r.fail_at(version_at, "unsupported version " + std::to_string(v));
  }
  Checkpoint c;
  const std::uint32_t count = r.u32("tensor count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t name_len = r.u16("tensor name length");
    std::string name = r.raw(name_len, "tensor name");
    const std::uint8_t rank = r.u8("tensor rank");
    Shape shape;
    std::uint64_t numel = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      shape.push_back(r.u32("tensor dim"));
      numel *= shape.back();
    }
    r.need(numel * 8, "tensor values");
    std::vector<double> values(numel);
    for (auto& v : values) v = r.f64("tensor value");
    c.tensors.push_back({std::move(name), Tensor(std::move(shape), std::move(values))});
  }
  const std::uint32_t config_len = r.u32("config length");
  const std::size_t config_at = r.offset();
  const std::string config = r.raw(config_len, "config echo");
  try {
    c.config = Json::parse(config);
  } catch (const Json::parse_error& e) {
    r.fail_at(config_at, std::string("config echo is not valid JSON: ") + e.what());
  }
  c.val_loss = r.f64("validation loss");
  c.epoch = r.u32("epoch");
  if (!r.at_end()) r.fail("trailing bytes after checkpoint");
  return c;
}

inline void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_checkpoint(c));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path), path.string());
}

/// Model configuration stored in a checkpoint's config echo.
inline ModelConfig checkpoint_model_config(const Checkpoint& c) {
  if (!c.config.is_object() || !c.config.contains("model")) {
    throw FormatError("checkpoint config echo has no 'model' section");
  }
  ModelConfig mc;
  read_json(c.config.at("model"), mc, "model");
  return mc;
}

/// Builds a model of the given config from checkpoint tensors; names and
/// shapes must match the config's inventory exactly.
inline Model model_from_checkpoint(const Checkpoint& c, const ModelConfig& config) {
  const auto specs = parameter_specs(config);
  if (specs.size() != c.tensors.size()) {
    throw ConsistencyError("checkpoint holds " + std::to_string(c.tensors.size()) +
                           " tensors but the model config needs " +
                           std::to_string(specs.size()));
  }
  ParameterStore store;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& t = c.tensors[i];
    if (t.name != specs[i].name || t.tensor.shape() != specs[i].shape) {
      throw ConsistencyError("checkpoint tensor '" + t.name + "' " +
                             shape_str(t.tensor.shape()) + " does not match '" +
                             specs[i].name + "' " + shape_str(specs[i].shape));
    }
    store.add(t.name, t.tensor.detach(true));
  }
  return Model(config, std::move(store));
}

inline Model model_from_checkpoint(const Checkpoint& c) {
  return model_from_checkpoint(c, checkpoint_model_config(c));
}

/// Elementwise mean of the k checkpoints with the lowest validation loss
/// (ties go to the earlier epoch); all of them when fewer than k exist.
/// The result carries the mean validation loss and the latest epoch of the
/// selection.
inline Checkpoint average_checkpoints(std::span<const Checkpoint> all, std::size_t k) {
  if (all.empty()) throw EmptyInputError("average_checkpoints: no checkpoints");
  if (k < 1) throw ConfigError("average_checkpoints: k must be >= 1");
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (all[a].val_loss != all[b].val_loss) return all[a].val_loss < all[b].val_loss;
    return all[a].epoch < all[b].epoch;
  });
  order.resize(std::min(k, order.size()));

  const Checkpoint& first = all[order[0]];
  for (std::size_t idx : order) {
    const Checkpoint& c = all[idx];
    if (c.tensors.size() != first.tensors.size()) {
      throw ConsistencyError("checkpoints hold different tensor counts");
    }
    for (std::size_t t = 0; t < c.tensors.size(); ++t) {
      if (c.tensors[t].name != first.tensors[t].name ||
          c.tensors[t].tensor.shape() != first.tensors[t].tensor.shape()) {
        throw ConsistencyError("checkpoint tensor '" + c.tensors[t].name +
                               "' is incompatible with '" + first.tensors[t].name + "'");
      }
    }
  }

  // Running mean: identical inputs come back bit-identical.
  Checkpoint out;
  out.config = first.config;
  for (std::size_t t = 0; t < first.tensors.size(); ++t) {
    std::vector<double> acc(first.tensors[t].tensor.numel(), 0.0);
    double n = 0.0;
    for (std::size_t idx : order) {
      const auto v = all[idx].tensors[t].tensor.data();
      n += 1.0;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += (v[i] - acc[i]) / n;
    }
    out.tensors.push_back(
        {first.tensors[t].name, Tensor(first.tensors[t].tensor.shape(), std::move(acc))});
  }
  double loss = 0.0;
  for (std::size_t idx : order) {
    loss += all[idx].val_loss;
    out.epoch = std::max(out.epoch, all[idx].epoch);
  }
  out.val_loss = loss / static_cast<double>(order.size());
  return out;
}

}  // namespace tcm
