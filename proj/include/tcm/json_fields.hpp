// include/tcm/json_fields.hpp

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

#include <nlohmann/json.hpp>
#include <set>
#include <string>

#include "tcm/errors.hpp"

namespace tcm {

using Json = nlohmann::json;

/// Reads optional fields out of a JSON object and rejects unknown keys.
///
///   FieldReader r(j, "model");
///   r.get("D", cfg.model_dim);
///   r.finish();   // throws ConfigError naming any key not consumed
class FieldReader {
 public:
  FieldReader(const Json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) {
      throw ConfigError("config key '" + path_ + "' must be a JSON object");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + qualified(key) +
                        "' has the wrong type: " + e.what());
    }
  }

  bool has(const std::string& key) const { return object_.contains(key); }

  /// Sub-object; the key counts as consumed.
  const Json* child(const std::string& key) {
    seen_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("unknown config key '" + qualified(it.key()) + "'");
      }
    }
  }

 private:
  const Json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace tcm
