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

// Validity filter for perturbed summaries.
//
// A candidate is kept iff
//
//   entailment(S+, S-) < tau1   and   relevance(D, S-) > tau2
//
// with strict inequalities on both sides. The first condition rejects
// perturbations that did not change the meaning; the second rejects ones that
// drifted away from the source document.

#ifndef AMRPERTURB_NEGFILTER_HPP
#define AMRPERTURB_NEGFILTER_HPP

#include <cmath>
#include <concepts>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "amrperturb/adapter.hpp"
#include "amrperturb/error.hpp"
#include "amrperturb/text.hpp"
#include "json.hpp"

namespace amrperturb {

struct ScoreRecord {
  std::string candidate_id;
  double entailment = 0.0;  // P(S- entailed by S+), in [0, 1]
  double relevance = 0.0;   // log-likelihood scale, usually negative

  bool operator==(const ScoreRecord&) const = default;
};

inline void ValidateScore(const ScoreRecord& score) {
  if (!(score.entailment >= 0.0 && score.entailment <= 1.0)) {
    throw DataError("entailment score of " + score.candidate_id + " is outside [0, 1]");
  }
  if (!std::isfinite(score.relevance)) {
    throw DataError("relevance score of " + score.candidate_id + " is not finite");
  }
}

struct FilterConfig {
  double tau1 = 0.9;   // entailment ceiling
  double tau2 = -1.8;  // relevance floor

  void Validate() const {
    if (!(tau1 > 0.0 && tau1 <= 1.0)) throw DataError("tau1 must lie in (0, 1]");
    if (!std::isfinite(tau2)) throw DataError("tau2 must be finite");
  }
};

inline bool Decide(const ScoreRecord& score, const FilterConfig& config) {
  return score.entailment < config.tau1 && score.relevance > config.tau2;
}

enum class RejectReason { kEntailmentTooHigh, kRelevanceTooLow, kBoth };

inline std::string_view ToString(RejectReason reason) {
  switch (reason) {
    case RejectReason::kEntailmentTooHigh: return "entailment-too-high";
    case RejectReason::kRelevanceTooLow: return "relevance-too-low";
    case RejectReason::kBoth: return "both";
  }
  return "";
}

inline std::optional<RejectReason> RejectionOf(const ScoreRecord& score, const FilterConfig& config) {
  const bool entailed = !(score.entailment < config.tau1);
  const bool off_topic = !(score.relevance > config.tau2);
  if (entailed && off_topic) return RejectReason::kBoth;
  if (entailed) return RejectReason::kEntailmentTooHigh;
  if (off_topic) return RejectReason::kRelevanceTooLow;
  return std::nullopt;
}

template <typename T>
concept HasCandidateId = requires(const T& t) {
  { t.candidate_id } -> std::convertible_to<std::string>;
};

template <HasCandidateId Candidate>
struct Rejection {
  Candidate candidate;
  RejectReason reason;
  ScoreRecord score;
};

template <HasCandidateId Candidate>
struct FilterResult {
  std::vector<Candidate> valid;
  std::vector<Rejection<Candidate>> rejected;
};

// Partitions `candidates` by Decide, preserving input order in both parts.
// Every candidate needs exactly one score with its id; scores for unknown
// ids are ignored.
template <HasCandidateId Candidate>
FilterResult<Candidate> FilterBatch(std::span<const Candidate> candidates,
                                    std::span<const ScoreRecord> scores,
                                    const FilterConfig& config) {
  config.Validate();
  std::map<std::string, const ScoreRecord*, std::less<>> by_id;
  std::map<std::string, std::size_t, std::less<>> wanted;
  for (const Candidate& c : candidates) ++wanted[c.candidate_id];
  for (const auto& [id, count] : wanted) {
    if (count > 1) throw JoinError(id, "candidate id appears more than once");
  }
  for (const ScoreRecord& s : scores) {
    if (!wanted.count(s.candidate_id)) continue;
    if (!by_id.emplace(s.candidate_id, &s).second) {
      throw JoinError(s.candidate_id, "duplicate score for candidate");
    }
  }
  FilterResult<Candidate> result;
  for (const Candidate& c : candidates) {
    auto it = by_id.find(c.candidate_id);
    if (it == by_id.end()) throw JoinError(c.candidate_id, "no score for candidate");
    ValidateScore(*it->second);
    if (auto reason = RejectionOf(*it->second, config)) {
      result.rejected.push_back({c, *reason, *it->second});
    } else {
      result.valid.push_back(c);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Scorers

// The three texts a candidate is scored on.
struct ScoringItem {
  std::string id;
  std::string document;   // D
  std::string positive;   // S+
  std::string perturbed;  // S-
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<ScoreRecord> Score(std::span<const ScoringItem> items) const = 0;
};

// Offline, non-neural stand-in so the toolchain runs without models.
//   entailment = share of S- tokens that occur in S+
//   relevance  = -(1 - share of S- tokens that occur in D) * 5
class BuiltinScorer : public Scorer {
 public:
  static constexpr double kRelevanceScale = 5.0;

  std::vector<ScoreRecord> Score(std::span<const ScoringItem> items) const override {
    std::vector<ScoreRecord> out;
    out.reserve(items.size());
    for (const ScoringItem& item : items) {
      const auto hypothesis = text::TokenSet(item.perturbed);
      ScoreRecord r;
      r.candidate_id = item.id;
      r.entailment = text::Containment(hypothesis, text::TokenSet(item.positive));
      r.relevance = -(1.0 - text::Containment(hypothesis, text::TokenSet(item.document))) *
                    kRelevanceScale;
      out.push_back(std::move(r));
    }
    return out;
  }
};

inline ScoreRecord ParseScoreLine(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("candidate_id") ||
      !j["candidate_id"].is_string() || !j.contains("entailment") || !j["entailment"].is_number() ||
      !j.contains("relevance") || !j["relevance"].is_number()) {
    throw DataError("malformed score line: " + std::string(line));
  }
  ScoreRecord r{j["candidate_id"].get<std::string>(), j["entailment"].get<double>(),
                j["relevance"].get<double>()};
  ValidateScore(r);
  return r;
}

inline std::string FormatScoreLine(const ScoreRecord& r) {
  nlohmann::ordered_json j;
  j["candidate_id"] = r.candidate_id;
  j["entailment"] = r.entailment;
  j["relevance"] = r.relevance;
  return j.dump();
}

inline std::vector<ScoreRecord> ReadScoreFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read score file '" + path + "'");
  std::vector<ScoreRecord> scores;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (text::Trim(line).empty()) continue;
    try {
      scores.push_back(ParseScoreLine(line));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return scores;
}

// Precomputed scores, joined on candidate id.
class FileScorer : public Scorer {
 public:
  explicit FileScorer(std::vector<ScoreRecord> scores) {
    for (auto& s : scores) {
      std::string id = s.candidate_id;
      if (!scores_.emplace(id, std::move(s)).second) throw JoinError(id, "duplicate score in file");
    }
  }

  static FileScorer Load(const std::string& path) { return FileScorer(ReadScoreFile(path)); }

  std::vector<ScoreRecord> Score(std::span<const ScoringItem> items) const override {
    std::vector<ScoreRecord> out;
    out.reserve(items.size());
    for (const ScoringItem& item : items) {
      auto it = scores_.find(item.id);
      if (it == scores_.end()) throw JoinError(item.id, "score file has no entry for candidate");
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::map<std::string, ScoreRecord, std::less<>> scores_;
};

// Scores through external adapter processes. With `streams` > 1 the items
// are split into contiguous chunks, one adapter process per chunk.
class ExecScorer : public Scorer {
 public:
  explicit ExecScorer(std::string command, std::size_t streams = 1,
                      std::chrono::milliseconds timeout = adapter::kDefaultTimeout)
      : command_(std::move(command)), streams_(streams == 0 ? 1 : streams), timeout_(timeout) {}

  std::vector<ScoreRecord> Score(std::span<const ScoringItem> items) const override {
    std::vector<ScoreRecord> out(items.size());
    if (items.empty()) return out;
    const std::size_t streams = std::min(streams_, items.size());
    const std::size_t chunk = (items.size() + streams - 1) / streams;
    std::vector<std::exception_ptr> errors(streams);
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < streams; ++s) {
      workers.emplace_back([&, s] {
        try {
          const std::size_t begin = s * chunk;
          const std::size_t end = std::min(items.size(), begin + chunk);
          if (begin >= end) return;
          ScoreChunk(items.subspan(begin, end - begin), std::span(out).subspan(begin, end - begin));
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return out;
  }

 private:
  void ScoreChunk(std::span<const ScoringItem> items, std::span<ScoreRecord> out) const {
    std::vector<nlohmann::json> requests;
    requests.reserve(items.size() * 2);
    for (const ScoringItem& item : items) {
      requests.push_back({{"id", item.id + "/entailment"},
                          {"task", "entailment"},
                          {"premise", item.positive},
                          {"hypothesis", item.perturbed}});
      requests.push_back({{"id", item.id + "/relevance"},
                          {"task", "relevance"},
                          {"premise", item.document},
                          {"hypothesis", item.perturbed}});
    }
    const auto responses = adapter::RunBatch(command_, requests, timeout_);
    auto score_of = [&](const std::string& id) {
      const nlohmann::json& r = responses.at(id);
      if (!r.contains("score") || !r["score"].is_number()) {
        throw ProtocolError("adapter response without numeric score for " + id);
      }
      return r["score"].get<double>();
    };
    for (std::size_t i = 0; i < items.size(); ++i) {
      ScoreRecord r{items[i].id, score_of(items[i].id + "/entailment"),
                    score_of(items[i].id + "/relevance")};
      try {
        ValidateScore(r);
      } catch (const DataError& e) {
        throw ProtocolError(std::string("adapter returned an invalid score: ") + e.what());
      }
      out[i] = std::move(r);
    }
  }

  std::string command_;
  std::size_t streams_;
  std::chrono::milliseconds timeout_;
};

// "builtin", "file:PATH" or "exec:CMD".
inline std::unique_ptr<Scorer> MakeScorer(std::string_view spec, std::size_t streams = 1) {
  if (spec == "builtin") return std::make_unique<BuiltinScorer>();
  if (spec.substr(0, 5) == "file:") {
    return std::make_unique<FileScorer>(FileScorer::Load(std::string(spec.substr(5))));
  }
  if (spec.substr(0, 5) == "exec:") {
    return std::make_unique<ExecScorer>(std::string(spec.substr(5)), streams);
  }
  throw DataError("unknown scorer '" + std::string(spec) + "' (builtin | file:PATH | exec:CMD)");
}

// One validated score per item, in item order.
inline std::vector<ScoreRecord> ScoreCandidates(std::span<const ScoringItem> items,
                                                const Scorer& scorer) {
  std::vector<ScoreRecord> scores = scorer.Score(items);
  if (scores.size() != items.size()) {
    throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(items.size()) + " candidates");
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (scores[i].candidate_id != items[i].id) {
      throw JoinError(items[i].id, "scorer returned scores out of order");
    }
    ValidateScore(scores[i]);
  }
  return scores;
}

}  // namespace amrperturb

#endif  // AMRPERTURB_NEGFILTER_HPP
