// include/tcm/data/corpus_dir.hpp

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

// On-disk corpus layout:
//   <root>/manifest.json
//   <root>/{train,dev,eval}/protocol.txt
//   <root>/{train,dev,eval}/<id>.tcmf

#pragma once

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "tcm/data/corpus.hpp"
#include "tcm/data/files.hpp"

namespace tcm {

inline constexpr char kProtocolFile[] = "protocol.txt";
inline constexpr char kManifestFile[] = "manifest.json";

inline void write_split(const std::vector<Utterance>& utts,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& u : utts) write_features(u, dir / (u.id + ".tcmf"));
  write_protocol(protocol_of(utts), dir / kProtocolFile);
}

inline void write_corpus(const Corpus& corpus, const CorpusSpec& spec,
                         const std::filesystem::path& root) {
  write_split(corpus.train, root / "train");
  write_split(corpus.dev, root / "dev");
  write_split(corpus.eval, root / "eval");
  Json manifest{{"format", "tcmdet-corpus"},
                {"version", 1},
                {"splits",
                 {{"train", corpus.train.size()},
                  {"dev", corpus.dev.size()},
                  {"eval", corpus.eval.size()}}},
                {"spec", to_json(spec)}};
  io::write_text_atomic(root / kManifestFile, manifest.dump(2) + "\n");
}

/// Loads the utterances listed in <dir>/protocol.txt, in protocol order.
/// Labels in feature files must agree with the protocol.
inline std::vector<Utterance> load_split(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("split directory '" + dir.string() + "' does not exist");
  }
  const auto entries = read_protocol(dir / kProtocolFile);
  std::vector<Utterance> out;
  out.reserve(entries.size());
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.id).second) {
      throw ConsistencyError("duplicate id '" + e.id + "' in " + dir.string());
    }
    Utterance u = read_features(dir / (e.id + ".tcmf"));
    if (u.id != e.id || u.label != e.label) {
      throw ConsistencyError("feature file for '" + e.id +
                             "' disagrees with the protocol");
    }
    out.push_back(std::move(u));
  }
  return out;
}

inline Corpus load_corpus(const std::filesystem::path& root) {
  return Corpus{load_split(root / "train"), load_split(root / "dev"),
                load_split(root / "eval")};
}

/// FNV-1a over the manifest, protocols and feature files in sorted order.
inline std::uint64_t corpus_fingerprint(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : files) {
    const std::string rel = std::filesystem::relative(f, root).generic_string();
    h = io::fnv1a(io::Bytes(rel.begin(), rel.end()), h);
    h = io::fnv1a(io::read_file(f), h);
  }
  return h;
}

}  // namespace tcm
