// include/tcm/data/corpus.hpp

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

// Synthetic bona fide / spoof feature corpus.
//
// Bona fide utterances are a stationary AR(1)-in-time Gaussian process whose
// innovations are correlated between neighbouring channels. A spoof utterance
// is a draw of the same process plus a fixed pseudo-random sign pattern of
// the configured amplitude, confined to one contiguous channel band and one
// temporal segment chosen per utterance. Band positions for the eval split
// come from a pool disjoint from the train/dev pool.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tcm/data/utterance.hpp"
#include "tcm/errors.hpp"
#include "tcm/json_fields.hpp"
#include "tcm/random.hpp"

namespace tcm {

enum class Split : std::uint8_t { kTrain = 0, kDev = 1, kEval = 2 };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kEval: return "eval";
  }
  return "?";
}

struct ArtifactSpec {
  std::size_t band_width = 8;   // channels
  std::size_t seg_len = 24;     // frames
  double amplitude = 2.75;
  std::uint64_t pattern_seed = 7;
};

struct BaseProcessSpec {
  double ar_coeff = 0.8;
  double noise_scale = 1.0;
};

struct CorpusSpec {
  std::size_t n_train = 2000;
  std::size_t n_dev = 500;
  std::size_t n_eval = 1000;
  std::size_t feature_dim = 64;
  std::size_t t_min = 150;
  std::size_t t_max = 250;
  ArtifactSpec artifact;
  BaseProcessSpec base_process;
  double spoof_fraction = 0.5;
  std::uint64_t seed = 1;
  // Band starts are grouped in blocks of eval_band_block; every
  // eval_band_period-th block is reserved for the eval split.
  std::size_t eval_band_block = 8;
  std::size_t eval_band_period = 4;

  void validate() const {
    if (n_train < 1) throw ConfigError("corpus.n_train must be >= 1");
    if (n_dev < 1) throw ConfigError("corpus.n_dev must be >= 1");
    if (n_eval < 1) throw ConfigError("corpus.n_eval must be >= 1");
    if (feature_dim < 1) throw ConfigError("corpus.F must be >= 1");
    if (t_min < 1 || t_min > t_max) {
      throw ConfigError("corpus.T_range must satisfy 1 <= T_min <= T_max");
    }
    if (artifact.band_width < 1 || artifact.band_width > feature_dim) {
      throw ConfigError("corpus.artifact.band_width must lie in [1, F]");
    }
    if (artifact.seg_len < 1 || artifact.seg_len > t_min) {
      throw ConfigError("corpus.artifact.seg_len must lie in [1, T_min]");
    }
    if (!(artifact.amplitude >= 0.0) || !std::isfinite(artifact.amplitude)) {
      throw ConfigError("corpus.artifact.amplitude must be finite and >= 0");
    }
    if (!(base_process.ar_coeff > 0.0 && base_process.ar_coeff < 1.0)) {
      throw ConfigError("corpus.base_process.ar_coeff must lie in (0, 1)");
    }
    if (!(base_process.noise_scale > 0.0)) {
      throw ConfigError("corpus.base_process.noise_scale must be positive");
    }
    if (!(spoof_fraction > 0.0 && spoof_fraction < 1.0)) {
      throw ConfigError("corpus.spoof_fraction must lie in (0, 1)");
    }
    if (eval_band_block < 1) throw ConfigError("corpus.eval_band_block must be >= 1");
    if (eval_band_period < 2) throw ConfigError("corpus.eval_band_period must be >= 2");
  }

  std::size_t count(Split s) const {
    return s == Split::kTrain ? n_train : s == Split::kDev ? n_dev : n_eval;
  }
};

inline Json to_json(const CorpusSpec& s) {
  return Json{
      {"n_train", s.n_train},
      {"n_dev", s.n_dev},
      {"n_eval", s.n_eval},
      {"F", s.feature_dim},
      {"T_range", {s.t_min, s.t_max}},
      {"artifact",
       {{"band_width", s.artifact.band_width},
        {"seg_len", s.artifact.seg_len},
        {"amplitude", s.artifact.amplitude},
        {"pattern_seed", s.artifact.pattern_seed}}},
      {"base_process",
       {{"ar_coeff", s.base_process.ar_coeff},
        {"noise_scale", s.base_process.noise_scale}}},
      {"spoof_fraction", s.spoof_fraction},
      {"seed", s.seed},
      {"eval_band_block", s.eval_band_block},
      {"eval_band_period", s.eval_band_period}};
}

inline void read_json(const Json& j, CorpusSpec& s, const std::string& path) {
  FieldReader r(j, path);
  r.get("n_train", s.n_train);
  r.get("n_dev", s.n_dev);
  r.get("n_eval", s.n_eval);
  r.get("F", s.feature_dim);
  std::vector<std::size_t> range{s.t_min, s.t_max};
  r.get("T_range", range);
  if (range.size() != 2) throw ConfigError("corpus.T_range must have two entries");
  s.t_min = range[0];
  s.t_max = range[1];
  if (const Json* a = r.child("artifact")) {
    FieldReader ar(*a, r.qualified("artifact"));
    ar.get("band_width", s.artifact.band_width);
    ar.get("seg_len", s.artifact.seg_len);
    ar.get("amplitude", s.artifact.amplitude);
    ar.get("pattern_seed", s.artifact.pattern_seed);
    ar.finish();
  }
  if (const Json* b = r.child("base_process")) {
    FieldReader br(*b, r.qualified("base_process"));
    br.get("ar_coeff", s.base_process.ar_coeff);
    br.get("noise_scale", s.base_process.noise_scale);
    br.finish();
  }
  r.get("spoof_fraction", s.spoof_fraction);
  r.get("seed", s.seed);
  r.get("eval_band_block", s.eval_band_block);
  r.get("eval_band_period", s.eval_band_period);
  r.finish();
}

struct ArtifactLocation {
  std::size_t channel_start = 0;
  std::size_t frame_start = 0;
};

/// The sign pattern [seg_len × band_width] shared by every spoof utterance.
inline std::vector<double> artifact_pattern(const ArtifactSpec& a) {
  Rng rng = make_rng({a.pattern_seed, 0x5167ULL});
  std::vector<double> p(a.seg_len * a.band_width);
  for (double& v : p) v = (rng() & 1U) ? 1.0 : -1.0;
  return p;
}

/// Band starts allowed for a split: start c is eval-only when
/// (c / block) % period == period - 1. Train and dev share the rest. Both
/// pools fall back to all starts when either would be empty.
inline std::vector<std::size_t> band_start_pool(const CorpusSpec& s, Split split) {
  const std::size_t n_starts = s.feature_dim - s.artifact.band_width + 1;
  std::vector<std::size_t> held, kept, all;
  for (std::size_t c = 0; c < n_starts; ++c) {
    all.push_back(c);
    const bool eval_only =
        (c / s.eval_band_block) % s.eval_band_period == s.eval_band_period - 1;
    (eval_only ? held : kept).push_back(c);
  }
  if (held.empty() || kept.empty()) return all;
  return split == Split::kEval ? held : kept;
}

/// One AR(1)-in-time draw [T×F], x_t = a x_{t-1} + sqrt(1-a^2) s e_t, where
/// e_t[c] = (z_c + (z_{c-1} + z_{c+1})/2) / sqrt(1.5) with z ~ N(0, 1).
inline std::vector<double> draw_base_process(Rng& rng, std::size_t t_len,
                                             std::size_t f,
                                             const BaseProcessSpec& bp) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - bp.ar_coeff * bp.ar_coeff);
  const double norm = 1.0 / std::sqrt(1.5);
  std::vector<double> x(t_len * f);
  std::vector<double> z(f);
  for (std::size_t t = 0; t < t_len; ++t) {
    for (double& v : z) v = normal(rng);
    for (std::size_t c = 0; c < f; ++c) {
      const double left = c > 0 ? z[c - 1] : 0.0;
      const double right = c + 1 < f ? z[c + 1] : 0.0;
      const double e = (z[c] + 0.5 * (left + right)) * norm * bp.noise_scale;
      x[t * f + c] = t == 0 ? e : bp.ar_coeff * x[(t - 1) * f + c] + innovation * e;
    }
  }
  return x;
}

/// Adds amplitude * pattern inside [frame_start, +seg_len) × [channel_start,
/// +band_width); every other cell is left untouched.
inline void plant_artifact(std::vector<double>& x, std::size_t f,
                           const ArtifactSpec& a, const std::vector<double>& pattern,
                           const ArtifactLocation& loc) {
  for (std::size_t t = 0; t < a.seg_len; ++t)
    for (std::size_t c = 0; c < a.band_width; ++c) {
      x[(loc.frame_start + t) * f + loc.channel_start + c] +=
          a.amplitude * pattern[t * a.band_width + c];
    }
}

inline std::string utterance_id(Split split, std::size_t index) {
  std::ostringstream os;
  os << to_string(split) << "_" << std::setw(6) << std::setfill('0') << index;
  return os.str();
}

/// A generated utterance together with the artifact-free draw it came from.
struct GeneratedUtterance {
  Utterance utterance;
  std::vector<double> base;  // before the artifact, rounded like features
  std::optional<ArtifactLocation> location;
};

/// Values are rounded to binary32 so that the in-memory corpus equals what
/// the feature files store.
inline GeneratedUtterance generate_utterance(const CorpusSpec& s, Split split,
                                             std::size_t index, Label label,
                                             const std::vector<double>& pattern) {
  Rng rng = make_rng({s.seed, static_cast<std::uint64_t>(split), index});
  std::uniform_int_distribution<std::size_t> length(s.t_min, s.t_max);
  const std::size_t t_len = length(rng);
  const std::size_t f = s.feature_dim;
  std::vector<double> x = draw_base_process(rng, t_len, f, s.base_process);
  for (double& v : x) v = static_cast<double>(static_cast<float>(v));
  GeneratedUtterance g;
  g.base = x;
  if (label == Label::kSpoof) {
    const auto pool = band_start_pool(s, split);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> frame(0, t_len - s.artifact.seg_len);
    ArtifactLocation loc{pool[pick(rng)], frame(rng)};
    plant_artifact(x, f, s.artifact, pattern, loc);
    for (double& v : x) v = static_cast<double>(static_cast<float>(v));
    g.location = loc;
  }
  g.utterance = Utterance{utterance_id(split, index),
                          Tensor({t_len, f}, std::move(x)), label};
  return g;
}

/// Labels of a split: round(n * spoof_fraction) spoofs in shuffled order.
inline std::vector<Label> split_labels(const CorpusSpec& s, Split split) {
  const std::size_t n = s.count(split);
  const auto n_spoof = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * s.spoof_fraction));
  std::vector<Label> labels(n, Label::kBonafide);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_spoof),
            Label::kSpoof);
  Rng rng = make_rng({s.seed, static_cast<std::uint64_t>(split), 0x1abe1ULL});
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

inline std::vector<Utterance> generate_split(const CorpusSpec& s, Split split) {
  s.validate();
  const auto pattern = artifact_pattern(s.artifact);
  const auto labels = split_labels(s, split);
  std::vector<Utterance> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.push_back(generate_utterance(s, split, i, labels[i], pattern).utterance);
  }
  return out;
}

inline Corpus generate_corpus(const CorpusSpec& s) {
  s.validate();
  return Corpus{generate_split(s, Split::kTrain), generate_split(s, Split::kDev),
                generate_split(s, Split::kEval)};
}

}  // namespace tcm
