// Copyright 2026 The amrperturb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Lexical resources consumed by the perturbation engine. Both are plain TSV
// files so they can be regenerated offline and reviewed by hand.
//
//   antonyms:  concept<TAB>relation<TAB>replacement
//   modality:  concept<TAB>stronger_concept   (empty = drop the wrapper node)

#ifndef AMRPERTURB_LEXICON_HPP
#define AMRPERTURB_LEXICON_HPP

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "amrperturb/error.hpp"
#include "amrperturb/text.hpp"

namespace amrperturb {

enum class AntonymRelation { kAntonym, kNotDesires, kNotCapableOf, kNotHasProperty };

inline std::string_view ToString(AntonymRelation relation) {
  switch (relation) {
    case AntonymRelation::kAntonym: return "Antonym";
    case AntonymRelation::kNotDesires: return "NotDesires";
    case AntonymRelation::kNotCapableOf: return "NotCapableOf";
    case AntonymRelation::kNotHasProperty: return "NotHasProperty";
  }
  return "";
}

inline std::optional<AntonymRelation> ParseAntonymRelation(std::string_view name) {
  for (auto r : {AntonymRelation::kAntonym, AntonymRelation::kNotDesires,
                 AntonymRelation::kNotCapableOf, AntonymRelation::kNotHasProperty}) {
    if (ToString(r) == name) return r;
  }
  return std::nullopt;
}

namespace detail {

inline std::string ReadFileOrThrow(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string("cannot read ") + what + " '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Calls `row(line_number, columns)` for each non-blank, non-comment line.
inline void ForEachTsvRow(std::string_view text,
                          const std::function<void(std::size_t, std::vector<std::string>&)>& row) {
  std::size_t line_number = 0;
  for (std::string line : text::Split(text, '\n')) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::Trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> columns = text::Split(line, '\t');
    row(line_number, columns);
  }
}

}  // namespace detail

struct AntonymEntry {
  AntonymRelation relation;
  std::string replacement;
};

class AntonymLexicon {
 public:
  void Add(const std::string& concept_name, AntonymRelation relation, const std::string& replacement) {
    auto& entries = entries_[concept_name];
    for (const auto& e : entries) {
      if (e.replacement == replacement) return;
    }
    entries.push_back({relation, replacement});
  }

  // Entries for `concept` in file order, or nullptr.
  const std::vector<AntonymEntry>* Find(std::string_view concept_name) const {
    auto it = entries_.find(concept_name);
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  static AntonymLexicon ParseTsv(std::string_view text) {
    AntonymLexicon lexicon;
    detail::ForEachTsvRow(text, [&](std::size_t line, std::vector<std::string>& cols) {
      if (cols.size() != 3) {
        throw DataError("antonym lexicon line " + std::to_string(line) + ": expected 3 columns");
      }
      auto relation = ParseAntonymRelation(text::Trim(cols[1]));
      if (!relation) {
        throw DataError("antonym lexicon line " + std::to_string(line) + ": unknown relation '" +
                        cols[1] + "'");
      }
      const std::string concept_name(text::Trim(cols[0]));
      const std::string replacement(text::Trim(cols[2]));
      if (concept_name.empty() || replacement.empty()) {
        throw DataError("antonym lexicon line " + std::to_string(line) + ": empty concept");
      }
      lexicon.Add(concept_name, *relation, replacement);
    });
    return lexicon;
  }

  static AntonymLexicon Load(const std::string& path) {
    return ParseTsv(detail::ReadFileOrThrow(path, "antonym lexicon"));
  }

 private:
  std::map<std::string, std::vector<AntonymEntry>, std::less<>> entries_;
};

// One step up the modality scale per concept. An empty replacement means the
// node is a modal wrapper that is removed outright.
class ModalityMap {
 public:
  void Set(const std::string& concept_name, const std::string& stronger) { steps_[concept_name] = stronger; }

  std::optional<std::string> Stronger(std::string_view concept_name) const {
    auto it = steps_.find(concept_name);
    if (it == steps_.end()) return std::nullopt;
    return it->second;
  }

  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }

  // possible-01 < likely-01 < recommend-01 ~ permit-01 < obligate-01
  static ModalityMap Defaults() {
    ModalityMap map;
    map.Set("possible-01", "likely-01");
    map.Set("likely-01", "recommend-01");
    map.Set("recommend-01", "obligate-01");
    map.Set("permit-01", "obligate-01");
    return map;
  }

  static ModalityMap ParseTsv(std::string_view text) {
    ModalityMap map;
    detail::ForEachTsvRow(text, [&](std::size_t line, std::vector<std::string>& cols) {
      if (cols.size() == 1) cols.emplace_back();
      if (cols.size() != 2) {
        throw DataError("modality map line " + std::to_string(line) + ": expected 2 columns");
      }
      const std::string concept_name(text::Trim(cols[0]));
      if (concept_name.empty()) {
        throw DataError("modality map line " + std::to_string(line) + ": empty concept");
      }
      map.Set(concept_name, std::string(text::Trim(cols[1])));
    });
    return map;
  }

  static ModalityMap Load(const std::string& path) {
    return ParseTsv(detail::ReadFileOrThrow(path, "modality map"));
  }

 private:
  std::map<std::string, std::string, std::less<>> steps_;
};

}  // namespace amrperturb

#endif  // AMRPERTURB_LEXICON_HPP
