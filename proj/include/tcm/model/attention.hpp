// include/tcm/model/attention.hpp

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
#include <functional>
#include <string>
#include <vector>

#include "tcm/model/parameters.hpp"
#include "tcm/ops.hpp"
#include "tcm/random.hpp"

namespace tcm {

/// Affine map y = x W + b with W stored as [in × out].
struct Linear {
  Tensor weight;
  Tensor bias;

  static Linear bind(const ParameterStore& s, const std::string& prefix) {
    return {s.at(prefix + ".weight"), s.at(prefix + ".bias")};
  }

  Tensor operator()(const Tensor& x) const {
    return add_bias(matmul(x, weight), bias);
  }
};

struct Norm {
  Tensor gamma;
  Tensor beta;
  double eps = 1e-5;

  static Norm bind(const ParameterStore& s, const std::string& prefix,
                   double eps) {
    return {s.at(prefix + ".gamma"), s.at(prefix + ".beta"), eps};
  }

  Tensor operator()(const Tensor& x) const {
    return layer_norm(x, gamma, beta, eps);
  }
};

/// Attention weights seen by an observer: one N×N matrix per head.
struct AttentionTrace {
  std::size_t block = 0;
  std::size_t sequence_length = 0;
  std::vector<Tensor> weights;
};

using AttentionObserver = std::function<void(const AttentionTrace&)>;

/// Per-pass state: train/eval mode, dropout randomness, instrumentation.
///
/// Dropout masks come from a counter-based generator keyed by the context key
/// and the call-site index, so a pass is reproducible from its key alone.
class ForwardContext {
 public:
  ForwardContext() = default;

  static ForwardContext training(double dropout, std::uint64_t key) {
    ForwardContext ctx;
    ctx.training_ = true;
    ctx.dropout_ = dropout;
    ctx.key_ = key;
    return ctx;
  }

  bool is_training() const { return training_; }

  Tensor dropout(const Tensor& x) {
    const std::uint64_t site = site_++;
    if (!training_ || dropout_ <= 0.0) return x;
    const std::uint64_t key = hash_key({key_, site});
    const double keep_scale = 1.0 / (1.0 - dropout_);
    std::vector<double> mask(x.numel());
    for (std::size_t i = 0; i < mask.size(); ++i) {
      mask[i] = counter_uniform(key, i) < dropout_ ? 0.0 : keep_scale;
    }
    return mul(x, Tensor(x.shape(), std::move(mask)));
  }

  void set_observer(AttentionObserver observer) { observer_ = std::move(observer); }
  bool observed() const { return static_cast<bool>(observer_); }
  void notify(const AttentionTrace& trace) const {
    if (observer_) observer_(trace);
  }

  std::size_t block_index = 0;

 private:
  bool training_ = false;
  double dropout_ = 0.0;
  std::uint64_t key_ = 0;
  std::uint64_t site_ = 0;
  AttentionObserver observer_;
};

struct MhsaWeights {
  Linear query;
  Linear key;
  Linear value;
  Linear output;

  static MhsaWeights bind(const ParameterStore& s, const std::string& prefix) {
    return {Linear::bind(s, prefix + ".query"), Linear::bind(s, prefix + ".key"),
            Linear::bind(s, prefix + ".value"),
            Linear::bind(s, prefix + ".output")};
  }
};

/// Multi-head self-attention over the rows of x[N×D]:
/// Concat(head_1..head_H) W^O with head_i = softmax(Q_i K_i^T / sqrt(d)) V_i,
/// where Q_i, K_i, V_i are the i-th d-column blocks of x W^Q, x W^K, x W^V.
inline Tensor multi_head_attention(const Tensor& x, const MhsaWeights& w,
                                   std::size_t heads, ForwardContext& ctx) {
  const std::size_t n = x.dim(0);
  const std::size_t d_model = x.dim(1);
  if (heads == 0 || d_model % heads != 0) {
    throw ConfigError("attention: D=" + std::to_string(d_model) +
                      " not divisible by H=" + std::to_string(heads));
  }
  const std::size_t d = d_model / heads;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  const Tensor q = w.query(x);
  const Tensor k = w.key(x);
  const Tensor v = w.value(x);
  std::vector<Tensor> outputs;
  outputs.reserve(heads);
  AttentionTrace trace{ctx.block_index, n, {}};
  for (std::size_t h = 0; h < heads; ++h) {
    const Tensor qh = slice(q, 1, h * d, (h + 1) * d);
    const Tensor kh = slice(k, 1, h * d, (h + 1) * d);
    const Tensor vh = slice(v, 1, h * d, (h + 1) * d);
    const Tensor weights =
        softmax_rows(scale(matmul(qh, transpose(kh)), inv_sqrt_d));
    if (ctx.observed()) trace.weights.push_back(weights);
    outputs.push_back(matmul(weights, vh));
  }
  ctx.notify(trace);
  return w.output(heads == 1 ? outputs[0] : concat(outputs, 1));
}

}  // namespace tcm
