// include/tcm/data/utterance.hpp

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

#include <cstdint>
#include <string>
#include <vector>

#include "tcm/tensor.hpp"

namespace tcm {

enum class Label : std::uint8_t { kBonafide = 0, kSpoof = 1 };

inline std::string to_string(Label l) {
  return l == Label::kBonafide ? "bonafide" : "spoof";
}

inline std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }

struct Utterance {
  std::string id;
  Tensor features;  // T×F
  Label label = Label::kBonafide;

  std::size_t frames() const { return features.dim(0); }
  std::size_t feature_dim() const { return features.dim(1); }
};

struct Corpus {
  std::vector<Utterance> train;
  std::vector<Utterance> dev;
  std::vector<Utterance> eval;
};

}  // namespace tcm
