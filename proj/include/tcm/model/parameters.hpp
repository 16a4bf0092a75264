// include/tcm/model/parameters.hpp

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
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tcm/model/config.hpp"
#include "tcm/random.hpp"
#include "tcm/tensor.hpp"

namespace tcm {

struct ParameterSpec {
  std::string name;
  Shape shape;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

namespace detail {

inline void add_norm(std::vector<ParameterSpec>& out, const std::string& p,
                     std::size_t d) {
  out.push_back({p + ".gamma", {d}});
  out.push_back({p + ".beta", {d}});
}

inline void add_linear(std::vector<ParameterSpec>& out, const std::string& p,
                       std::size_t in, std::size_t outd) {
  out.push_back({p + ".weight", {in, outd}});
  out.push_back({p + ".bias", {outd}});
}

inline void add_ffn(std::vector<ParameterSpec>& out, const std::string& p,
                    const ModelConfig& c) {
  const std::size_t hidden = c.model_dim * c.ffn_expansion;
  add_norm(out, p + ".norm", c.model_dim);
  add_linear(out, p + ".up", c.model_dim, hidden);
  add_linear(out, p + ".down", hidden, c.model_dim);
}

inline void add_attention(std::vector<ParameterSpec>& out, const std::string& p,
                          const ModelConfig& c) {
  const std::size_t d = c.model_dim;
  add_norm(out, p + ".norm", d);
  add_linear(out, p + ".query", d, d);
  add_linear(out, p + ".key", d, d);
  add_linear(out, p + ".value", d, d);
  add_linear(out, p + ".output", d, d);
  if (c.toggles.use_tcm) {
    add_linear(out, p + ".tcm.head_proj", c.head_dim(), d);
    if (c.toggles.ht_embedding) {
      out.push_back({p + ".tcm.head_embedding", {c.heads, d}});
    }
  }
}

}  // namespace detail

/// Complete, ordered inventory of learnable tensors implied by a config.
inline std::vector<ParameterSpec> parameter_specs(const ModelConfig& c) {
  c.validate();
  std::vector<ParameterSpec> out;
  const std::size_t d = c.model_dim;
  detail::add_linear(out, "projection", c.feature_dim, d);
  out.push_back({"cls", {d}});
  for (std::size_t b = 0; b < c.blocks; ++b) {
    const std::string p = "blocks." + std::to_string(b);
    if (c.block_kind == BlockKind::kConformer) {
      detail::add_ffn(out, p + ".ffn_in", c);
      detail::add_attention(out, p + ".attention", c);
      detail::add_norm(out, p + ".conv.norm", d);
      detail::add_linear(out, p + ".conv.pointwise_in", d, 2 * d);
      out.push_back({p + ".conv.depthwise.kernel", {c.conv_kernel, d}});
      out.push_back({p + ".conv.depthwise.bias", {d}});
      detail::add_norm(out, p + ".conv.depthwise_norm", d);
      detail::add_linear(out, p + ".conv.pointwise_out", d, d);
      detail::add_ffn(out, p + ".ffn_out", c);
      detail::add_norm(out, p + ".final_norm", d);
    } else {
      detail::add_attention(out, p + ".attention", c);
      detail::add_ffn(out, p + ".ffn", c);
    }
  }
  detail::add_linear(out, "classifier", d, 2);
  return out;
}

/// Name-addressed collection of parameter tensors in inventory order.
class ParameterStore {
 public:
  ParameterStore() = default;

  void add(std::string name, Tensor t) {
    if (index_.count(name)) throw ConfigError("duplicate parameter '" + name + "'");
    index_.emplace(name, entries_.size());
    entries_.push_back({std::move(name), std::move(t)});
  }

  const Tensor& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("no parameter named '" + name + "'");
    return entries_[it->second].tensor;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<NamedTensor>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.tensor.numel();
    return n;
  }

  void zero_grad() {
    for (auto& e : entries_) e.tensor.zero_grad();
  }

 private:
  std::vector<NamedTensor> entries_;
  std::map<std::string, std::size_t> index_;
};

namespace detail {

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

/// Draws initial values: Xavier-uniform for affine weights, zero biases,
/// unit/zero layer-norm affine, N(0, 0.02) for the CLS token and head-token
/// embedding. The depthwise kernel uses U(+-1/sqrt(K)).
inline ParameterStore initialize_parameters(const ModelConfig& c,
                                            std::uint64_t seed) {
  ParameterStore store;
  Rng rng = make_rng({seed, 0x70a7a17eULL});
  for (const auto& spec : parameter_specs(c)) {
    Tensor t = Tensor::zeros(spec.shape, true);
    auto v = t.mutable_data();
    const std::string& n = spec.name;
    if (detail::ends_with(n, ".weight")) {
      const double fan_in = static_cast<double>(spec.shape[0]);
      const double fan_out = static_cast<double>(spec.shape[1]);
      const double a = std::sqrt(6.0 / (fan_in + fan_out));
      std::uniform_real_distribution<double> u(-a, a);
      for (double& x : v) x = u(rng);
    } else if (detail::ends_with(n, ".kernel")) {
      const double a = 1.0 / std::sqrt(static_cast<double>(spec.shape[0]));
      std::uniform_real_distribution<double> u(-a, a);
      for (double& x : v) x = u(rng);
    } else if (detail::ends_with(n, ".gamma")) {
      for (double& x : v) x = 1.0;
    } else if (n == "cls" || detail::ends_with(n, ".head_embedding")) {
      std::normal_distribution<double> g(0.0, 0.02);
      for (double& x : v) x = g(rng);
    }
    store.add(spec.name, std::move(t));
  }
  return store;
}

}  // namespace tcm
