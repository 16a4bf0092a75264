// include/tcm/tensor.hpp

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
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcm/errors.hpp"

namespace tcm {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

class Tape;
class Tensor;

namespace detail {

struct Node;
using BackwardFn = std::function<void(Node&)>;

struct Node {
  Shape shape;
  std::vector<double> value;
  // Empty until the first gradient contribution arrives.
  std::vector<double> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  const Tape* tape = nullptr;
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;

  std::vector<double>& grad_buffer() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

inline thread_local Tape* active_tape = nullptr;

}  // namespace detail

/// Dense row-major tensor of doubles with an optional gradient slot.
///
/// A Tensor is a cheap handle: copies share the underlying buffer. Values
/// produced by operations are never modified afterwards, so handles can be
/// read concurrently. Leaves (parameters, inputs) may be updated in place
/// through mutable_data() by the optimizer.
class Tensor {
 public:
  Tensor() = default;

  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false)
      : node_(std::make_shared<detail::Node>()) {
    if (shape_numel(shape) != values.size()) {
      throw DimensionError("tensor of shape " + shape_str(shape) + " needs " +
                           std::to_string(shape_numel(shape)) +
                           " values, got " + std::to_string(values.size()));
    }
    node_->shape = std::move(shape);
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
  }

  static Tensor full(Shape shape, double v, bool requires_grad = false) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, v), requires_grad);
  }

  static Tensor scalar(double v, bool requires_grad = false) {
    return Tensor({}, {v}, requires_grad);
  }

  static Tensor vector(std::vector<double> values, bool requires_grad = false) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values), requires_grad);
  }

  static Tensor matrix(
      std::initializer_list<std::initializer_list<double>> rows,
      bool requires_grad = false) {
    const std::size_t m = rows.size();
    const std::size_t n = m ? rows.begin()->size() : 0;
    std::vector<double> values;
    values.reserve(m * n);
    for (const auto& r : rows) {
      if (r.size() != n) throw DimensionError("ragged matrix literal");
      values.insert(values.end(), r.begin(), r.end());
    }
    return Tensor({m, n}, std::move(values), requires_grad);
  }

  static Tensor identity(std::size_t n, bool requires_grad = false) {
    Tensor t = zeros({n, n}, requires_grad);
    for (std::size_t i = 0; i < n; ++i) t.node_->value[i * n + i] = 1.0;
    return t;
  }

  bool defined() const { return static_cast<bool>(node_); }

  const Shape& shape() const { return node().shape; }
  std::size_t rank() const { return node().shape.size(); }
  std::size_t numel() const { return node().value.size(); }
  std::size_t dim(std::size_t i) const { return node().shape.at(i); }
  std::size_t rows() const {
    require_rank2("rows");
    return dim(0);
  }
  std::size_t cols() const {
    require_rank2("cols");
    return dim(1);
  }

  std::span<const double> data() const { return node().value; }
  /// In-place access for leaves; used by optimizers and initializers.
  std::span<double> mutable_data() { return node().value; }

  double operator[](std::size_t i) const { return node().value[i]; }
  double operator()(std::size_t r, std::size_t c) const {
    return node().value[r * node().shape.back() + c];
  }
  double item() const {
    if (numel() != 1) {
      throw RankError("item() on tensor of shape " + shape_str(shape()));
    }
    return node().value[0];
  }

  bool requires_grad() const { return node().requires_grad; }
  void set_requires_grad(bool on) { node().requires_grad = on; }
  bool is_leaf() const { return node().is_leaf; }

  bool has_grad() const { return !node().grad.empty(); }
  /// Gradient buffer; empty span when nothing has been accumulated yet.
  std::span<const double> grad() const { return node().grad; }
  void zero_grad() { node().grad.clear(); }

  /// Fresh leaf with copied values and no history.
  Tensor detach(bool requires_grad = false) const {
    return Tensor(shape(), node().value, requires_grad);
  }

  bool same_storage(const Tensor& other) const { return node_ == other.node_; }

  // Internal: operation implementations build results through this handle.
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  detail::Node& node() const {
    if (!node_) throw Error("use of an undefined tensor");
    return *node_;
  }
  void require_rank2(const char* what) const {
    if (rank() != 2) {
      throw RankError(std::string(what) + "() on tensor of shape " +
                      shape_str(shape()));
    }
  }

  std::shared_ptr<detail::Node> node_;
};

/// Ordered record of differentiable operations.
///
/// Operations record themselves on the tape made active by a TapeScope, but
/// only when at least one operand requires a gradient. backward() walks the
/// record in exact reverse order. Gradients of leaves accumulate across calls
/// until zero_grad(); intermediate gradients are reset on every call.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  void record(std::shared_ptr<detail::Node> node) {
    node->tape = this;
    nodes_.push_back(std::move(node));
  }

  /// Optional hook called with the index of each node as it is visited.
  void set_visit_hook(std::function<void(std::size_t)> hook) {
    visit_hook_ = std::move(hook);
  }

  void backward(const Tensor& output) {
    if (output.numel() != 1) {
      throw RankError("backward needs a scalar output, got shape " +
                      shape_str(output.shape()));
    }
    const auto& out = output.node_ptr();
    if (out->tape != this) {
      throw Error("backward on a tensor that was not recorded on this tape");
    }
    for (auto& n : nodes_) n->grad.clear();
    out->grad_buffer()[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      detail::Node& n = *nodes_[i];
      if (n.grad.empty() || !n.backward) continue;
      if (visit_hook_) visit_hook_(i);
      n.backward(n);
    }
  }

 private:
  std::vector<std::shared_ptr<detail::Node>> nodes_;
  std::function<void(std::size_t)> visit_hook_;
};

/// Makes a tape active on the current thread for the scope's lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape) : previous_(detail::active_tape) {
    detail::active_tape = &tape;
  }
  ~TapeScope() { detail::active_tape = previous_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

inline Tape* active_tape() { return detail::active_tape; }

/// Backpropagates from a scalar recorded on the active tape.
inline void backward(const Tensor& output) {
  Tape* tape = detail::active_tape;
  if (!tape) throw Error("backward called with no active tape");
  tape->backward(output);
}

namespace detail {

inline Tensor make_result(Shape shape, std::vector<double> value,
                          const std::vector<Tensor>& inputs, BackwardFn fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  Tape* tape = active_tape;
  const bool needs_grad =
      tape && std::any_of(inputs.begin(), inputs.end(),
                          [](const Tensor& t) { return t.requires_grad(); });
  if (needs_grad) {
    node->requires_grad = true;
    node->is_leaf = false;
    for (const auto& t : inputs) node->inputs.push_back(t.node_ptr());
    node->backward = std::move(fn);
    tape->record(node);
  }
  return Tensor(std::move(node));
}

inline Tensor make_result(Shape shape, std::vector<double> value,
                          std::initializer_list<Tensor> inputs,
                          BackwardFn fn) {
  return make_result(std::move(shape), std::move(value),
                     std::vector<Tensor>(inputs), std::move(fn));
}

// Gradient buffer of input i, or nullptr when that input takes no gradient.
inline double* grad_of(Node& out, std::size_t i) {
  Node& in = *out.inputs[i];
  return in.requires_grad ? in.grad_buffer().data() : nullptr;
}

}  // namespace detail

}  // namespace tcm
