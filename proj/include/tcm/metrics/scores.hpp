// include/tcm/metrics/scores.hpp

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

// Score file: one "<id> <score>" per line, score printed with six decimals.
// Higher scores mean more bona fide.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "tcm/errors.hpp"
#include "tcm/io/binary.hpp"

namespace tcm {

struct ScoreRecord {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoreRecord&) const = default;
};

inline std::string format_score(double score) {
  if (!std::isfinite(score)) throw InputError("cannot write a non-finite score");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", score);
  return buf;
}

inline std::string format_scores(const std::vector<ScoreRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    if (r.id.empty() || r.id.find_first_of(" \t\n\r") != std::string::npos) {
      throw InputError("score id '" + r.id + "' is empty or contains whitespace");
    }
    out += r.id + " " + format_score(r.score) + "\n";
  }
  return out;
}

inline std::vector<ScoreRecord> parse_scores(std::istream& in) {
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id, value, extra;
    if (!(fields >> id >> value) || (fields >> extra)) {
      throw ParseError("score line must be '<id> <score>'", line_no);
    }
    char* end = nullptr;
    const double score = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || !std::isfinite(score)) {
      throw ParseError("bad score '" + value + "'", line_no);
    }
    out.push_back({id, score});
  }
  return out;
}

inline void write_scores(const std::vector<ScoreRecord>& records,
                         const std::filesystem::path& path) {
  io::write_text_atomic(path, format_scores(records));
}

inline std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open score file '" + path.string() + "'");
  return parse_scores(in);
}

}  // namespace tcm
