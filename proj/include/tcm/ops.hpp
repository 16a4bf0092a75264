// include/tcm/ops.hpp

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

#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "tcm/tensor.hpp"

// Differentiable primitives. Every function records a backward rule on the
// active tape when one of its operands requires a gradient; with no active
// tape it is a plain forward evaluation.

namespace tcm {

namespace detail {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;

inline void require_same_shape(const char* op, const Tensor& a,
                               const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

inline void require_rank(const char* op, const Tensor& a, std::size_t rank) {
  if (a.rank() != rank) {
    throw RankError(std::string(op) + ": expected rank " +
                    std::to_string(rank) + ", got shape " +
                    shape_str(a.shape()));
  }
}

// Rows of length shape.back(); a scalar counts as one row of one.
inline std::size_t row_length(const Tensor& t) {
  return t.rank() == 0 ? 1 : t.shape().back();
}

template <typename Forward, typename Derivative>
Tensor unary(const Tensor& x, Forward f, Derivative df) {
  std::vector<double> out(x.numel());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(x.shape(), std::move(out), {x}, [df](Node& n) {
    double* gx = grad_of(n, 0);
    if (!gx) return;
    const auto& xv = n.inputs[0]->value;
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      gx[i] += n.grad[i] * df(xv[i], n.value[i]);
    }
  });
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::require_same_shape("add", a, b);
  std::vector<double> out(a.numel());
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return detail::make_result(a.shape(), std::move(out), {a, b},
                             [](detail::Node& n) {
                               for (std::size_t k = 0; k < 2; ++k) {
                                 if (double* g = detail::grad_of(n, k)) {
                                   for (std::size_t i = 0; i < n.grad.size(); ++i)
                                     g[i] += n.grad[i];
                                 }
                               }
                             });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  detail::require_same_shape("sub", a, b);
  std::vector<double> out(a.numel());
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return detail::make_result(a.shape(), std::move(out), {a, b},
                             [](detail::Node& n) {
                               if (double* g = detail::grad_of(n, 0)) {
                                 for (std::size_t i = 0; i < n.grad.size(); ++i)
                                   g[i] += n.grad[i];
                               }
                               if (double* g = detail::grad_of(n, 1)) {
                                 for (std::size_t i = 0; i < n.grad.size(); ++i)
                                   g[i] -= n.grad[i];
                               }
                             });
}

/// Elementwise (Hadamard) product.
inline Tensor mul(const Tensor& a, const Tensor& b) {
  detail::require_same_shape("mul", a, b);
  std::vector<double> out(a.numel());
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return detail::make_result(
      a.shape(), std::move(out), {a, b}, [](detail::Node& n) {
        const auto& av = n.inputs[0]->value;
        const auto& bv = n.inputs[1]->value;
        if (double* g = detail::grad_of(n, 0)) {
          for (std::size_t i = 0; i < n.grad.size(); ++i) g[i] += n.grad[i] * bv[i];
        }
        if (double* g = detail::grad_of(n, 1)) {
          for (std::size_t i = 0; i < n.grad.size(); ++i) g[i] += n.grad[i] * av[i];
        }
      });
}

inline Tensor scale(const Tensor& x, double s) {
  std::vector<double> out(x.numel());
  const auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * xv[i];
  return detail::make_result(x.shape(), std::move(out), {x},
                             [s](detail::Node& n) {
                               if (double* g = detail::grad_of(n, 0)) {
                                 for (std::size_t i = 0; i < n.grad.size(); ++i)
                                   g[i] += s * n.grad[i];
                               }
                             });
}

/// Adds a length-D vector to every row of x (rank 1 or 2, last dim D).
inline Tensor add_bias(const Tensor& x, const Tensor& bias) {
  detail::require_rank("add_bias", bias, 1);
  const std::size_t d = detail::row_length(x);
  if (x.rank() == 0 || bias.dim(0) != d) {
    throw DimensionError("add_bias: bias " + shape_str(bias.shape()) +
                         " does not match rows of " + shape_str(x.shape()));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  const auto bv = bias.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % d];
  return detail::make_result(x.shape(), std::move(out), {x, bias},
                             [d](detail::Node& n) {
                               if (double* g = detail::grad_of(n, 0)) {
                                 for (std::size_t i = 0; i < n.grad.size(); ++i)
                                   g[i] += n.grad[i];
                               }
                               if (double* g = detail::grad_of(n, 1)) {
                                 for (std::size_t i = 0; i < n.grad.size(); ++i)
                                   g[i % d] += n.grad[i];
                               }
                             });
}

/// Matrix product of a[m×k] and b[k×n].
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  detail::require_rank("matmul", a, 2);
  detail::require_rank("matmul", b, 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ, " +
                         shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  std::vector<double> out(m * n);
  detail::MatrixMap(out.data(), m, n).noalias() =
      detail::ConstMatrixMap(a.data().data(), m, k) *
      detail::ConstMatrixMap(b.data().data(), k, n);
  return detail::make_result(
      {m, n}, std::move(out), {a, b}, [m, k, n](detail::Node& node) {
        detail::ConstMatrixMap dc(node.grad.data(), m, n);
        if (double* g = detail::grad_of(node, 0)) {
          detail::ConstMatrixMap bm(node.inputs[1]->value.data(), k, n);
          detail::MatrixMap(g, m, k).noalias() += dc * bm.transpose();
        }
        if (double* g = detail::grad_of(node, 1)) {
          detail::ConstMatrixMap am(node.inputs[0]->value.data(), m, k);
          detail::MatrixMap(g, k, n).noalias() += am.transpose() * dc;
        }
      });
}

inline Tensor transpose(const Tensor& x) {
  detail::require_rank("transpose", x, 2);
  const std::size_t m = x.dim(0), n = x.dim(1);
  std::vector<double> out(m * n);
  const auto xv = x.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = xv[i * n + j];
  return detail::make_result({n, m}, std::move(out), {x},
                             [m, n](detail::Node& node) {
                               if (double* g = detail::grad_of(node, 0)) {
                                 for (std::size_t i = 0; i < m; ++i)
                                   for (std::size_t j = 0; j < n; ++j)
                                     g[i * n + j] += node.grad[j * m + i];
                               }
                             });
}

/// Same values under a new shape with equal element count.
inline Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) +
                         " as " + shape_str(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return detail::make_result(std::move(shape), std::move(out), {x},
                             [](detail::Node& n) {
                               if (double* g = detail::grad_of(n, 0)) {
                                 for (std::size_t i = 0; i < n.grad.size(); ++i)
                                   g[i] += n.grad[i];
                               }
                             });
}

/// Concatenates rank-2 tensors along axis 0 (rows) or 1 (columns).
inline Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw EmptyInputError("concat: no operands");
  if (axis > 1) throw DimensionError("concat: axis must be 0 or 1");
  for (const auto& p : parts) detail::require_rank("concat", p, 2);
  const std::size_t other = 1 - axis;
  const std::size_t fixed = parts[0].dim(other);
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.dim(other) != fixed) {
      throw DimensionError("concat: " + shape_str(parts[0].shape()) +
                           " and " + shape_str(p.shape()) +
                           " disagree off the concat axis");
    }
    total += p.dim(axis);
  }
  const std::size_t rows = axis == 0 ? total : fixed;
  const std::size_t cols = axis == 0 ? fixed : total;
  std::vector<double> out(rows * cols);
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    offsets.push_back(offset);
    const auto pv = p.data();
    const std::size_t pr = p.dim(0), pc = p.dim(1);
    for (std::size_t i = 0; i < pr; ++i)
      for (std::size_t j = 0; j < pc; ++j) {
        const std::size_t r = axis == 0 ? offset + i : i;
        const std::size_t c = axis == 0 ? j : offset + j;
        out[r * cols + c] = pv[i * pc + j];
      }
    offset += p.dim(axis);
  }
  return detail::make_result(
      {rows, cols}, std::move(out), parts,
      [axis, cols, offsets](detail::Node& n) {
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          double* g = detail::grad_of(n, k);
          if (!g) continue;
          const std::size_t pr = n.inputs[k]->shape[0];
          const std::size_t pc = n.inputs[k]->shape[1];
          for (std::size_t i = 0; i < pr; ++i)
            for (std::size_t j = 0; j < pc; ++j) {
              const std::size_t r = axis == 0 ? offsets[k] + i : i;
              const std::size_t c = axis == 0 ? j : offsets[k] + j;
              g[i * pc + j] += n.grad[r * cols + c];
            }
        }
      });
}

/// Half-open range [begin, end) of a rank-2 tensor along axis 0 or 1.
inline Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin,
                    std::size_t end) {
  detail::require_rank("slice", x, 2);
  if (axis > 1 || begin > end || end > x.dim(axis)) {
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " +
                         std::to_string(end) + ") on axis " +
                         std::to_string(axis) + " of " + shape_str(x.shape()));
  }
  const std::size_t cols = x.dim(1);
  const std::size_t out_rows = axis == 0 ? end - begin : x.dim(0);
  const std::size_t out_cols = axis == 0 ? cols : end - begin;
  const std::size_t r0 = axis == 0 ? begin : 0;
  const std::size_t c0 = axis == 0 ? 0 : begin;
  std::vector<double> out(out_rows * out_cols);
  const auto xv = x.data();
  for (std::size_t i = 0; i < out_rows; ++i)
    for (std::size_t j = 0; j < out_cols; ++j)
      out[i * out_cols + j] = xv[(r0 + i) * cols + c0 + j];
  return detail::make_result(
      {out_rows, out_cols}, std::move(out), {x},
      [=](detail::Node& n) {
        if (double* g = detail::grad_of(n, 0)) {
          for (std::size_t i = 0; i < out_rows; ++i)
            for (std::size_t j = 0; j < out_cols; ++j)
              g[(r0 + i) * cols + c0 + j] += n.grad[i * out_cols + j];
        }
      });
}

/// Row i of a rank-2 tensor as a rank-1 tensor.
inline Tensor row(const Tensor& x, std::size_t i) {
  const std::size_t d = x.dim(1);
  return reshape(slice(x, 0, i, i + 1), {d});
}

/// Sum of all elements, as a rank-0 tensor.
inline Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return detail::make_result({}, {s}, {x}, [](detail::Node& n) {
    if (double* g = detail::grad_of(n, 0)) {
      const double go = n.grad[0];
      const std::size_t len = n.inputs[0]->value.size();
      for (std::size_t i = 0; i < len; ++i) g[i] += go;
    }
  });
}

/// Row-wise softmax over the last axis with per-row max subtraction.
inline Tensor softmax_rows(const Tensor& x) {
  const std::size_t n = detail::row_length(x);
  const std::size_t m = n ? x.numel() / n : 0;
  std::vector<double> out(x.numel());
  const auto xv = x.data();
  for (std::size_t r = 0; r < m; ++r) {
    const double* in = xv.data() + r * n;
    double* o = out.data() + r * n;
    const double mx = *std::max_element(in, in + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += (o[j] = std::exp(in[j] - mx));
    for (std::size_t j = 0; j < n; ++j) o[j] /= z;
  }
  return detail::make_result(x.shape(), std::move(out), {x},
                             [m, n](detail::Node& node) {
                               double* g = detail::grad_of(node, 0);
                               if (!g) return;
                               for (std::size_t r = 0; r < m; ++r) {
                                 const double* y = node.value.data() + r * n;
                                 const double* dy = node.grad.data() + r * n;
                                 double dot = 0.0;
                                 for (std::size_t j = 0; j < n; ++j) dot += y[j] * dy[j];
                                 for (std::size_t j = 0; j < n; ++j)
                                   g[r * n + j] += y[j] * (dy[j] - dot);
                               }
                             });
}

/// Row-wise log-softmax over the last axis.
inline Tensor log_softmax_rows(const Tensor& x) {
  const std::size_t n = detail::row_length(x);
  const std::size_t m = n ? x.numel() / n : 0;
  std::vector<double> out(x.numel());
  const auto xv = x.data();
  for (std::size_t r = 0; r < m; ++r) {
    const double* in = xv.data() + r * n;
    double* o = out.data() + r * n;
    const double mx = *std::max_element(in, in + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(in[j] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < n; ++j) o[j] = in[j] - lse;
  }
  return detail::make_result(x.shape(), std::move(out), {x},
                             [m, n](detail::Node& node) {
                               double* g = detail::grad_of(node, 0);
                               if (!g) return;
                               for (std::size_t r = 0; r < m; ++r) {
                                 const double* y = node.value.data() + r * n;
                                 const double* dy = node.grad.data() + r * n;
                                 double total = 0.0;
                                 for (std::size_t j = 0; j < n; ++j) total += dy[j];
                                 for (std::size_t j = 0; j < n; ++j)
                                   g[r * n + j] += dy[j] - std::exp(y[j]) * total;
                               }
                             });
}

/// Normalizes each row of length D to zero mean and unit variance, then
/// applies gamma * x + beta. Variance is the biased (1/D) estimate.
inline Tensor layer_norm(const Tensor& x, const Tensor& gamma,
                         const Tensor& beta, double eps = 1e-5) {
  detail::require_rank("layer_norm gamma", gamma, 1);
  detail::require_rank("layer_norm beta", beta, 1);
  const std::size_t d = detail::row_length(x);
  if (x.rank() == 0 || d == 0 || gamma.dim(0) != d || beta.dim(0) != d) {
    throw DimensionError("layer_norm: input " + shape_str(x.shape()) +
                         " with gamma " + shape_str(gamma.shape()) +
                         " and beta " + shape_str(beta.shape()));
  }
  if (!(eps > 0.0)) throw ConfigError("layer_norm: eps must be positive");
  const std::size_t m = x.numel() / d;
  std::vector<double> out(x.numel());
  // Saved for backward: normalized input and per-row reciprocal std.
  auto xhat = std::make_shared<std::vector<double>>(x.numel());
  auto rstd = std::make_shared<std::vector<double>>(m);
  const auto xv = x.data();
  const auto gv = gamma.data();
  const auto bv = beta.data();
  for (std::size_t r = 0; r < m; ++r) {
    const double* in = xv.data() + r * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += in[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (in[j] - mean) * (in[j] - mean);
    var /= static_cast<double>(d);
    const double rs = 1.0 / std::sqrt(var + eps);
    (*rstd)[r] = rs;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (in[j] - mean) * rs;
      (*xhat)[r * d + j] = h;
      out[r * d + j] = h * gv[j] + bv[j];
    }
  }
  return detail::make_result(
      x.shape(), std::move(out), {x, gamma, beta},
      [m, d, xhat, rstd](detail::Node& n) {
        const auto& gv = n.inputs[1]->value;
        const double* dy = n.grad.data();
        if (double* gg = detail::grad_of(n, 1)) {
          for (std::size_t i = 0; i < m * d; ++i) gg[i % d] += dy[i] * (*xhat)[i];
        }
        if (double* gb = detail::grad_of(n, 2)) {
          for (std::size_t i = 0; i < m * d; ++i) gb[i % d] += dy[i];
        }
        if (double* gx = detail::grad_of(n, 0)) {
          for (std::size_t r = 0; r < m; ++r) {
            double mean_dh = 0.0, mean_dh_h = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const double dh = dy[r * d + j] * gv[j];
              mean_dh += dh;
              mean_dh_h += dh * (*xhat)[r * d + j];
            }
            mean_dh /= static_cast<double>(d);
            mean_dh_h /= static_cast<double>(d);
            for (std::size_t j = 0; j < d; ++j) {
              const double dh = dy[r * d + j] * gv[j];
              gx[r * d + j] += (*rstd)[r] *
                               (dh - mean_dh - (*xhat)[r * d + j] * mean_dh_h);
            }
          }
        }
      });
}

/// GeLU with the exact Gaussian CDF: x * Phi(x), Phi(x) = (1 + erf(x/sqrt2))/2.
/// The tanh approximation is not used anywhere in this library.
inline Tensor gelu(const Tensor& x) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return detail::unary(
      x, [](double v) { return v * 0.5 * (1.0 + std::erf(v * inv_sqrt2)); },
      [](double v, double) {
        const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
        const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
        return cdf + v * pdf;
      });
}

inline double sigmoid_value(double v) {
  return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                  : std::exp(v) / (1.0 + std::exp(v));
}

inline Tensor sigmoid(const Tensor& x) {
  return detail::unary(
      x, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

/// Swish / SiLU: x * sigmoid(x).
inline Tensor silu(const Tensor& x) {
  return detail::unary(
      x, [](double v) { return v * sigmoid_value(v); },
      [](double v, double) {
        const double s = sigmoid_value(v);
        return s * (1.0 + v * (1.0 - s));
      });
}

/// Gated linear unit over columns: first half * sigmoid(second half).
inline Tensor glu(const Tensor& x) {
  detail::require_rank("glu", x, 2);
  if (x.dim(1) % 2 != 0) {
    throw DimensionError("glu: odd column count in " + shape_str(x.shape()));
  }
  const std::size_t half = x.dim(1) / 2;
  return mul(slice(x, 1, 0, half), sigmoid(slice(x, 1, half, 2 * half)));
}

/// Per-channel 1-D cross-correlation of x[T×D] with kernel[K×D], zero
/// ("same") padding of K/2 frames on each side; K must be odd.
inline Tensor depthwise_conv1d(const Tensor& x, const Tensor& kernel) {
  detail::require_rank("depthwise_conv1d", x, 2);
  detail::require_rank("depthwise_conv1d kernel", kernel, 2);
  const std::size_t t_len = x.dim(0), d = x.dim(1), k = kernel.dim(0);
  if (k % 2 == 0) {
    throw ConfigError("depthwise_conv1d: kernel size must be odd, got " +
                      std::to_string(k));
  }
  if (kernel.dim(1) != d) {
    throw DimensionError("depthwise_conv1d: kernel " +
                         shape_str(kernel.shape()) + " vs input " +
                         shape_str(x.shape()));
  }
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  const auto tl = static_cast<std::ptrdiff_t>(t_len);
  std::vector<double> out(t_len * d, 0.0);
  const auto xv = x.data();
  const auto kv = kernel.data();
  for (std::ptrdiff_t t = 0; t < tl; ++t)
    for (std::size_t j = 0; j < k; ++j) {
      const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - pad;
      if (src < 0 || src >= tl) continue;
      const double* xr = xv.data() + src * d;
      const double* kr = kv.data() + j * d;
      double* o = out.data() + t * d;
      for (std::size_t c = 0; c < d; ++c) o[c] += kr[c] * xr[c];
    }
  return detail::make_result(
      {t_len, d}, std::move(out), {x, kernel},
      [tl, d, k, pad](detail::Node& n) {
        const auto& xv = n.inputs[0]->value;
        const auto& kv = n.inputs[1]->value;
        double* gx = detail::grad_of(n, 0);
        double* gk = detail::grad_of(n, 1);
        for (std::ptrdiff_t t = 0; t < tl; ++t)
          for (std::size_t j = 0; j < k; ++j) {
            const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - pad;
            if (src < 0 || src >= tl) continue;
            const double* dy = n.grad.data() + t * d;
            for (std::size_t c = 0; c < d; ++c) {
              if (gx) gx[src * d + c] += kv[j * d + c] * dy[c];
              if (gk) gk[j * d + c] += xv[src * d + c] * dy[c];
            }
          }
      });
}

/// Arithmetic mean of the rows of x[N×D]; N must be positive.
inline Tensor mean_over_time(const Tensor& x) {
  detail::require_rank("mean_over_time", x, 2);
  const std::size_t n = x.dim(0), d = x.dim(1);
  if (n == 0) throw EmptyInputError("mean_over_time: no tokens");
  std::vector<double> out(d, 0.0);
  const auto xv = x.data();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) out[c] += xv[r * d + c];
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= inv;
  return detail::make_result({d}, std::move(out), {x}, [n, d, inv](detail::Node& node) {
    if (double* g = detail::grad_of(node, 0)) {
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) g[r * d + c] += inv * node.grad[c];
    }
  });
}

}  // namespace tcm
