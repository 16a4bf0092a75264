// include/tcm/data/files.hpp

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

// Feature files and protocol files.
//
// Feature file (.tcmf), all integers little-endian:
//   "TCMF" | u32 version = 1 | u8 label (0 bonafide, 1 spoof)
//   | u16 id length | id bytes (UTF-8) | u32 T | u32 F
//   | T*F binary32 values, row-major
// Values are widened to double on load.
//
// Protocol file: UTF-8 text, one "<id> <label>" line per utterance, LF
// terminated, label in {bonafide, spoof}.

#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "tcm/data/utterance.hpp"
#include "tcm/io/binary.hpp"

namespace tcm {

inline constexpr char kFeatureMagic[] = "TCMF";
inline constexpr std::uint32_t kFeatureVersion = 1;

inline io::Bytes encode_features(const Utterance& utt) {
  if (utt.id.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw FormatError("utterance id longer than 65535 bytes");
  }
  io::ByteWriter w;
  w.raw(std::string_view(kFeatureMagic, 4));
  w.u32(kFeatureVersion);
  w.u8(static_cast<std::uint8_t>(utt.label));
  w.u16(static_cast<std::uint16_t>(utt.id.size()));
  w.raw(utt.id);
  w.u32(static_cast<std::uint32_t>(utt.frames()));
  w.u32(static_cast<std::uint32_t>(utt.feature_dim()));
  for (double v : utt.features.data()) w.f32(static_cast<float>(v));
  return w.take();
}

inline Utterance decode_features(const io::Bytes& bytes,
                                 const std::string& source = "<memory>") {
  io::ByteReader r(bytes, source);
  if (r.raw(4, "magic") != std::string_view(kFeatureMagic, 4)) {
    r.fail_at(0, "bad magic, expected \"TCMF\"");
  }
  const std::size_t version_at = r.offset();
  if (const auto v = r.u32("version"); v != kFeatureVersion) {
    r.fail_at(version_at, "unsupported version " + std::to_string(v));
  }
  const std::size_t label_at = r.offset();
  const std::uint8_t label = r.u8("label");
  if (label > 1) r.fail_at(label_at, "label byte must be 0 or 1");
  const std::uint16_t id_len = r.u16("id length");
  std::string id = r.raw(id_len, "id");
  const std::uint32_t t_len = r.u32("T");
  const std::uint32_t f = r.u32("F");
  const std::uint64_t count = static_cast<std::uint64_t>(t_len) * f;
  r.need(count * 4, "feature values");
  std::vector<double> values(count);
  for (auto& v : values) v = static_cast<double>(r.f32("feature value"));
  if (!r.at_end()) r.fail("trailing bytes after feature values");
  return Utterance{std::move(id), Tensor({t_len, f}, std::move(values)),
                   static_cast<Label>(label)};
}

inline void write_features(const Utterance& utt, const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_features(utt));
}

inline Utterance read_features(const std::filesystem::path& path) {
  return decode_features(io::read_file(path), path.string());
}

struct ProtocolEntry {
  std::string id;
  Label label = Label::kBonafide;

  bool operator==(const ProtocolEntry&) const = default;
};

inline std::string format_protocol(const std::vector<ProtocolEntry>& entries) {
  std::string out;
  for (const auto& e : entries) out += e.id + " " + to_string(e.label) + "\n";
  return out;
}

inline std::vector<ProtocolEntry> parse_protocol(std::istream& in) {
  std::vector<ProtocolEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id, label, extra;
    if (!(fields >> id >> label) || (fields >> extra)) {
      throw ParseError("protocol line must be '<id> <label>'", line_no);
    }
    if (label == "bonafide") {
      out.push_back({id, Label::kBonafide});
    } else if (label == "spoof") {
      out.push_back({id, Label::kSpoof});
    } else {
      throw ParseError("unknown label '" + label + "'", line_no);
    }
  }
  return out;
}

inline void write_protocol(const std::vector<ProtocolEntry>& entries,
                           const std::filesystem::path& path) {
  io::write_text_atomic(path, format_protocol(entries));
}

inline std::vector<ProtocolEntry> read_protocol(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open protocol '" + path.string() + "'");
  return parse_protocol(in);
}

inline std::vector<ProtocolEntry> protocol_of(const std::vector<Utterance>& utts) {
  std::vector<ProtocolEntry> out;
  out.reserve(utts.size());
  for (const auto& u : utts) out.push_back({u.id, u.label});
  return out;
}

}  // namespace tcm
