// include/tcm/cli/run_config.hpp

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

// One JSON document configures every tcmdet command:
//
//   { "corpus": {...}, "model": {...}, "train": {...},
//     "costs": {"C0": .., "C1": .., "C2": ..},
//     "eval": {"mode": "fixed", "split": "eval", "jobs": 1},
//     "sweep": {"heads": [4, 6, 8]} }
//
// Every section is optional and falls back to the desk defaults, except
// "costs", which commands that report t-DCF require explicitly. Unknown keys
// anywhere are rejected.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tcm/data/corpus.hpp"
#include "tcm/metrics/metrics.hpp"
#include "tcm/model/config.hpp"
#include "tcm/train/trainer.hpp"

namespace tcm {

struct EvalOptions {
  LengthMode mode = LengthMode::kFixed;
  std::string split = "eval";
  std::size_t jobs = 1;
};

struct SweepOptions {
  std::vector<std::size_t> heads{4, 6, 8};
};

struct RunConfig {
  CorpusSpec corpus;
  ModelConfig model;
  TrainConfig train;
  std::optional<TdcfCosts> costs;
  EvalOptions eval;
  SweepOptions sweep;

  const TdcfCosts& require_costs() const {
    if (!costs) {
      throw ConfigError(
          "config key 'costs' is required: give C0, C1 and C2 explicitly (no defaults "
          "are shipped for the t-DCF coefficients)");
    }
    return *costs;
  }

  void validate() const {
    corpus.validate();
    model.validate();
    train.validate();
    if (costs) costs->validate();
    if (eval.split != "train" && eval.split != "dev" && eval.split != "eval") {
      throw ConfigError("eval.split must be one of train, dev, eval");
    }
    if (eval.jobs < 1) throw ConfigError("eval.jobs must be >= 1");
    if (sweep.heads.empty()) throw ConfigError("sweep.heads must not be empty");
  }
};

inline Json to_json(const RunConfig& c) {
  Json j{{"corpus", to_json(c.corpus)},
         {"model", to_json(c.model)},
         {"train", to_json(c.train)},
         {"eval", {{"mode", to_string(c.eval.mode)}, {"split", c.eval.split}, {"jobs", c.eval.jobs}}},
         {"sweep", {{"heads", c.sweep.heads}}}};
  if (c.costs) j["costs"] = to_json(*c.costs);
  return j;
}

inline void read_json(const Json& j, RunConfig& c) {
  FieldReader r(j, "");
  if (const Json* s = r.child("corpus")) read_json(*s, c.corpus, "corpus");
  if (const Json* s = r.child("model")) read_json(*s, c.model, "model");
  if (const Json* s = r.child("train")) read_json(*s, c.train, "train");
  if (const Json* s = r.child("costs")) {
    TdcfCosts costs;
    read_json(*s, costs, "costs");
    c.costs = costs;
  }
  if (const Json* s = r.child("eval")) {
    FieldReader er(*s, "eval");
    std::string mode = to_string(c.eval.mode);
    er.get("mode", mode);
    c.eval.mode = parse_length_mode(mode);
    er.get("split", c.eval.split);
    er.get("jobs", c.eval.jobs);
    er.finish();
  }
  if (const Json* s = r.child("sweep")) {
    FieldReader sr(*s, "sweep");
    sr.get("heads", c.sweep.heads);
    sr.finish();
  }
  r.finish();
}

/// Applies "a.b.c=value" to a JSON document. The value is read as JSON when
/// it parses (numbers, booleans, arrays, null), else as a plain string.
/// Missing intermediate objects are created; unknown leaves are caught later
/// by the section readers.
inline void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (!node->is_object()) {
      throw ConfigError("override key '" + key + "' descends into a non-object");
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

inline RunConfig run_config_from_json(Json doc, const std::vector<std::string>& overrides = {}) {
  if (doc.is_null()) doc = Json::object();
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig c;
  read_json(doc, c);
  c.validate();
  return c;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream text;
  text << in.rdbuf();
  try {
    return Json::parse(text.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline RunConfig load_run_config(const std::filesystem::path& path,
                                 const std::vector<std::string>& overrides = {}) {
  return run_config_from_json(read_json_file(path), overrides);
}

}  // namespace tcm
