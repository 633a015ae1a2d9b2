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

#ifndef AMRPERTURB_TEXT_HPP
#define AMRPERTURB_TEXT_HPP

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace amrperturb::text {

// Drops a trailing PropBank sense tag ("-01", "-91") from a word.
inline std::string_view StripSenseSuffix(std::string_view word) {
  const std::size_t n = word.size();
  if (n > 3 && word[n - 3] == '-' && std::isdigit(static_cast<unsigned char>(word[n - 2])) &&
      std::isdigit(static_cast<unsigned char>(word[n - 1]))) {
    return word.substr(0, n - 3);
  }
  return word;
}

// Lower-cased alphanumeric runs. Sense tags on whitespace-delimited words are
// removed first so that a linearized "go-02" and the word "go" agree.
inline std::vector<std::string> Tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < input.size()) {
    while (i < input.size() && std::isspace(static_cast<unsigned char>(input[i]))) ++i;
    std::size_t j = i;
    while (j < input.size() && !std::isspace(static_cast<unsigned char>(input[j]))) ++j;
    std::string_view word = StripSenseSuffix(input.substr(i, j - i));
    std::string current;
    for (char ch : word) {
      const auto c = static_cast<unsigned char>(ch);
      if (std::isalnum(c) || c >= 0x80) {
        current.push_back(static_cast<char>(std::tolower(c)));
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    i = j;
  }
  return tokens;
}

inline std::set<std::string> TokenSet(std::string_view input) {
  auto tokens = Tokenize(input);
  return {tokens.begin(), tokens.end()};
}

// Fraction of the distinct tokens of `part` that also occur in `whole`.
// An empty `part` is vacuously contained.
inline double Containment(const std::set<std::string>& part,
                          const std::set<std::string>& whole) {
  if (part.empty()) return 1.0;
  std::size_t hits = 0;
  for (const auto& token : part) hits += whole.count(token);
  return static_cast<double>(hits) / static_cast<double>(part.size());
}

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> Split(std::string_view s, char delimiter) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(delimiter, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      return parts;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace amrperturb::text

#endif  // AMRPERTURB_TEXT_HPP
