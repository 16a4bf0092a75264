// include/tcm/train/adam.hpp

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
#include <span>
#include <vector>

#include "tcm/model/parameters.hpp"

namespace tcm {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// First and second moment estimates of one tensor.
struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
};

/// One Adam update of `params` in place. Weight decay is L2 folded into the
/// gradient (g <- g + wd * theta), not decoupled. `step` is the 1-based
/// update count used for bias correction. An empty grad span means zero.
inline void adam_update(std::span<double> params, std::span<const double> grads,
                        AdamMoments& state, std::uint64_t step,
                        const AdamConfig& cfg) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = (grads.empty() ? 0.0 : grads[i]) + cfg.weight_decay * params[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

/// Adam over every tensor of a parameter store, using the gradients left by
/// the last backward pass.
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  void step(ParameterStore& params) {
    ++step_;
    if (moments_.size() != params.size()) moments_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor t = params.entries()[i].tensor;
      adam_update(t.mutable_data(), t.grad(), moments_[i], step_, cfg_);
    }
  }

  std::uint64_t step_count() const { return step_; }
  const std::vector<AdamMoments>& moments() const { return moments_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::uint64_t step_ = 0;
  std::vector<AdamMoments> moments_;
};

}  // namespace tcm
