// tests/gradcheck.hpp

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
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tcm/tensor.hpp"

namespace testing_util {

struct GradReport {
  double max_rel_error = 0.0;
  std::string worst;  // "<tensor index>[<element>]"
  std::size_t checked = 0;
};

/// Compares autodiff gradients of loss() w.r.t. every element of `inputs`
/// with central differences. Relative error is |a - n| / max(|a|, |n|, floor).
inline GradReport check_gradients(std::vector<tcm::Tensor> inputs,
                                  const std::function<tcm::Tensor()>& loss,
                                  double h = 1e-5, double floor = 1e-6) {
  std::vector<std::vector<double>> analytic;
  {
    tcm::Tape tape;
    tcm::TapeScope scope(tape);
    for (auto& t : inputs) t.zero_grad();
    tape.backward(loss());
    for (auto& t : inputs) {
      const auto g = t.grad();
      analytic.emplace_back(g.begin(), g.end());
      if (analytic.back().empty()) analytic.back().assign(t.numel(), 0.0);
      t.zero_grad();
    }
  }
  GradReport r;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto v = inputs[k].mutable_data();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + h;
      const double up = loss().item();
      v[i] = saved - h;
      const double down = loss().item();
      v[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k][i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++r.checked;
      if (rel > r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst = std::to_string(k) + "[" + std::to_string(i) + "]";
      }
    }
  }
  return r;
}

inline tcm::Tensor random_tensor(std::mt19937_64& rng, tcm::Shape shape,
                                 bool requires_grad = true, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(tcm::shape_numel(shape));
  for (double& x : v) x = n(rng);
  return tcm::Tensor(std::move(shape), std::move(v), requires_grad);
}

}  // namespace testing_util
