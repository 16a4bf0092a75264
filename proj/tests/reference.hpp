// tests/reference.hpp

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

// Straight-line forward pass used as an oracle by the tests. Plain loops
// over row-major buffers; no tape, no Eigen, no shared code with the
// library beyond reading parameter values by name.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tcm/model/model.hpp"

namespace ref {

struct Mat {
  std::size_t r = 0, c = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : r(rows), c(cols), v(rows * cols, fill) {}
  double& at(std::size_t i, std::size_t j) { return v[i * c + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * c + j]; }
};

inline Mat from(const tcm::Tensor& t) {
  Mat m;
  if (t.rank() == 1) {
    m = Mat(1, t.dim(0));
  } else {
    m = Mat(t.dim(0), t.dim(1));
  }
  for (std::size_t i = 0; i < t.numel(); ++i) m.v[i] = t[i];
  return m;
}

inline Mat param(const tcm::ParameterStore& s, const std::string& name) {
  return from(s.at(name));
}

inline Mat linear(const Mat& x, const tcm::ParameterStore& s, const std::string& p) {
  const Mat w = param(s, p + ".weight");
  const Mat b = param(s, p + ".bias");
  Mat y(x.r, w.c);
  for (std::size_t i = 0; i < x.r; ++i)
    for (std::size_t j = 0; j < w.c; ++j) {
      double acc = b.v[j];
      for (std::size_t k = 0; k < x.c; ++k) acc += x.at(i, k) * w.at(k, j);
      y.at(i, j) = acc;
    }
  return y;
}

inline Mat layer_norm(const Mat& x, const tcm::ParameterStore& s, const std::string& p,
                      double eps) {
  const Mat g = param(s, p + ".gamma");
  const Mat b = param(s, p + ".beta");
  Mat y(x.r, x.c);
  for (std::size_t i = 0; i < x.r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < x.c; ++j) mean += x.at(i, j);
    mean /= static_cast<double>(x.c);
    double var = 0.0;
    for (std::size_t j = 0; j < x.c; ++j) var += (x.at(i, j) - mean) * (x.at(i, j) - mean);
    var /= static_cast<double>(x.c);
    for (std::size_t j = 0; j < x.c; ++j) {
      y.at(i, j) = (x.at(i, j) - mean) / std::sqrt(var + eps) * g.v[j] + b.v[j];
    }
  }
  return y;
}

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double swish(double x) { return x * sigmoid(x); }

template <class F>
Mat map(Mat x, F f) {
  for (double& v : x.v) v = f(v);
  return x;
}

inline Mat plus(Mat a, const Mat& b) {
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
  return a;
}

inline Mat times(Mat a, double s) {
  for (double& v : a.v) v *= s;
  return a;
}

inline Mat rows(const Mat& x, std::size_t begin, std::size_t end) {
  Mat y(end - begin, x.c);
  std::copy(x.v.begin() + static_cast<std::ptrdiff_t>(begin * x.c),
            x.v.begin() + static_cast<std::ptrdiff_t>(end * x.c), y.v.begin());
  return y;
}

inline Mat stack(const Mat& a, const Mat& b) {
  Mat y(a.r + b.r, a.c);
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + static_cast<std::ptrdiff_t>(a.v.size()));
  return y;
}

inline std::vector<double> column_mean(const Mat& x, std::size_t begin, std::size_t end) {
  std::vector<double> m(x.c, 0.0);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < x.c; ++j) m[j] += x.at(i, j);
  for (double& v : m) v /= static_cast<double>(end - begin);
  return m;
}

/// Attention probabilities of every head, filled when non-null.
struct Probe {
  std::vector<std::vector<Mat>> weights;  // per call, per head
};

inline Mat mhsa(const Mat& x, const tcm::ParameterStore& s, const std::string& p,
                std::size_t heads, Probe* probe) {
  const Mat q = linear(x, s, p + ".query");
  const Mat k = linear(x, s, p + ".key");
  const Mat v = linear(x, s, p + ".value");
  const std::size_t n = x.r, d = x.c / heads;
  Mat concat(n, x.c);
  std::vector<Mat> seen;
  for (std::size_t h = 0; h < heads; ++h) {
    Mat a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -1e300;
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t e = 0; e < d; ++e) dot += q.at(i, h * d + e) * k.at(j, h * d + e);
        a.at(i, j) = dot / std::sqrt(static_cast<double>(d));
        mx = std::max(mx, a.at(i, j));
      }
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) z += (a.at(i, j) = std::exp(a.at(i, j) - mx));
      for (std::size_t j = 0; j < n; ++j) a.at(i, j) /= z;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t e = 0; e < d; ++e) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a.at(i, j) * v.at(j, h * d + e);
        concat.at(i, h * d + e) = acc;
      }
    seen.push_back(a);
  }
  if (probe) probe->weights.push_back(seen);
  return linear(concat, s, p + ".output");
}

/// The TCM attention body on a normalised (T+1)×D input.
inline Mat tcm_attention(const Mat& x, const tcm::ParameterStore& s, const std::string& p,
                         const tcm::ModelConfig& c, Probe* probe) {
  const auto& tg = c.toggles;
  const std::size_t n = x.r, dm = x.c, h = c.heads, d = dm / h;
  // Head tokens.
  const std::vector<double> pooled =
      column_mean(x, c.head_pool_includes_cls ? 0 : 1, n);
  Mat seg(h, d);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t e = 0; e < d; ++e) seg.at(i, e) = pooled[i * d + e];
  Mat ht = map(linear(seg, s, p + ".tcm.head_proj"), gelu);
  if (tg.ht_embedding) ht = plus(ht, param(s, p + ".tcm.head_embedding"));
  // Attention.
  Mat out, heads_out;
  if (tg.ht_in_mhsa) {
    const Mat joint = mhsa(stack(x, ht), s, p, h, probe);
    out = rows(joint, 0, n);
    heads_out = rows(joint, n, n + h);
  } else {
    out = mhsa(x, s, p, h, probe);
    heads_out = ht;
  }
  // CLS enrichment.
  if (tg.add_mean_ht_to_cls) {
    const auto m = column_mean(heads_out, 0, h);
    for (std::size_t j = 0; j < dm; ++j) out.at(0, j) += m[j];
  }
  if (tg.add_mean_tt_to_cls) {
    const std::size_t begin = c.mean_tt_includes_cls ? 0 : 1;
    if (n > begin) {
      const auto m = column_mean(out, begin, n);
      for (std::size_t j = 0; j < dm; ++j) out.at(0, j) += m[j];
    }
  }
  return out;
}

inline Mat attention(const Mat& x, const tcm::ParameterStore& s, const std::string& p,
                     const tcm::ModelConfig& c, Probe* probe) {
  return c.toggles.use_tcm ? tcm_attention(x, s, p, c, probe)
                           : mhsa(x, s, p, c.heads, probe);
}

inline Mat ffn(const Mat& x, const tcm::ParameterStore& s, const std::string& p,
               double eps, bool use_gelu) {
  Mat h = linear(layer_norm(x, s, p + ".norm", eps), s, p + ".up");
  h = use_gelu ? map(h, gelu) : map(h, swish);
  return linear(h, s, p + ".down");
}

inline Mat conv(const Mat& x, const tcm::ParameterStore& s, const std::string& p,
                double eps) {
  const Mat a = linear(layer_norm(x, s, p + ".norm", eps), s, p + ".pointwise_in");
  const std::size_t n = x.r, dm = x.c;
  Mat g(n, dm);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dm; ++j) g.at(i, j) = a.at(i, j) * sigmoid(a.at(i, dm + j));
  const Mat k = param(s, p + ".depthwise.kernel");
  const Mat kb = param(s, p + ".depthwise.bias");
  const std::size_t half = k.r / 2;
  Mat y(n, dm);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dm; ++j) {
      double acc = kb.v[j];
      for (std::size_t m = 0; m < k.r; ++m) {
        const long src = static_cast<long>(i + m) - static_cast<long>(half);
        if (src >= 0 && src < static_cast<long>(n)) acc += k.at(m, j) * g.at(src, j);
      }
      y.at(i, j) = acc;
    }
  y = map(layer_norm(y, s, p + ".depthwise_norm", eps), swish);
  return linear(y, s, p + ".pointwise_out");
}

inline Mat conformer_block(Mat x, const tcm::ParameterStore& s, std::size_t b,
                           const tcm::ModelConfig& c, Probe* probe) {
  const std::string p = "blocks." + std::to_string(b);
  const double eps = c.layer_norm_eps;
  x = plus(x, times(ffn(x, s, p + ".ffn_in", eps, false), 0.5));
  x = plus(x, attention(layer_norm(x, s, p + ".attention.norm", eps), s,
                        p + ".attention", c, probe));
  x = plus(x, conv(x, s, p + ".conv", eps));
  x = plus(x, times(ffn(x, s, p + ".ffn_out", eps, false), 0.5));
  return layer_norm(x, s, p + ".final_norm", eps);
}

inline Mat transformer_block(Mat x, const tcm::ParameterStore& s, std::size_t b,
                             const tcm::ModelConfig& c, Probe* probe) {
  const std::string p = "blocks." + std::to_string(b);
  const double eps = c.layer_norm_eps;
  x = plus(x, attention(layer_norm(x, s, p + ".attention.norm", eps), s,
                        p + ".attention", c, probe));
  return plus(x, ffn(x, s, p + ".ffn", eps, true));
}

inline Mat block(const Mat& x, const tcm::ParameterStore& s, std::size_t b,
                 const tcm::ModelConfig& c, Probe* probe = nullptr) {
  return c.block_kind == tcm::BlockKind::kConformer ? conformer_block(x, s, b, c, probe)
                                                    : transformer_block(x, s, b, c, probe);
}

/// Projection, optional sinusoidal positions and the CLS row.
inline Mat embed(const Mat& features, const tcm::ParameterStore& s,
                 const tcm::ModelConfig& c) {
  Mat x = linear(features, s, "projection");
  if (c.positional_encoding == tcm::PositionalEncoding::kSinusoidal) {
    for (std::size_t t = 0; t < x.r; ++t)
      for (std::size_t j = 0; j < x.c; ++j) {
        const double freq = std::pow(10000.0, static_cast<double>(j / 2 * 2) /
                                                  static_cast<double>(x.c));
        const double angle = static_cast<double>(t) / freq;
        x.at(t, j) += j % 2 == 0 ? std::sin(angle) : std::cos(angle);
      }
  }
  return stack(param(s, "cls"), x);
}

/// Logits {bona fide, spoof} in evaluation mode.
inline std::vector<double> forward(const tcm::ParameterStore& s, const tcm::ModelConfig& c,
                                   const Mat& features, Probe* probe = nullptr) {
  Mat x = embed(features, s, c);
  for (std::size_t b = 0; b < c.blocks; ++b) x = block(x, s, b, c, probe);
  const Mat logits = linear(rows(x, 0, 1), s, "classifier");
  return logits.v;
}

}  // namespace ref
