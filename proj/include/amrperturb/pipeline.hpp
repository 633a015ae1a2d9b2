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

// Dataset construction: corpus ingestion, candidate generation, realization,
// filtering, class balancing and statistics.
//
// Everything here is deterministic given (corpus, lexicons, config, seed).
// Worker counts only change how fast things run.

#ifndef AMRPERTURB_PIPELINE_HPP
#define AMRPERTURB_PIPELINE_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "amrperturb/adapter.hpp"
#include "amrperturb/amr.hpp"
#include "amrperturb/error.hpp"
#include "amrperturb/lexicon.hpp"
#include "amrperturb/negfilter.hpp"
#include "amrperturb/perturb.hpp"
#include "amrperturb/random.hpp"
#include "amrperturb/text.hpp"
#include "json.hpp"

namespace amrperturb::pipeline {

using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Records

struct SummarySentence {
  std::string text;
  std::string penman;
  amr::Graph graph;
};

struct DocumentRecord {
  std::string doc_id;
  std::string document_text;
  std::vector<SummarySentence> summary_sentences;
};

struct NegativeCandidate {
  std::string candidate_id;
  std::string doc_id;
  std::string positive_text;
  std::string perturbed_penman;
  std::optional<std::string> perturbed_text;
  std::string realization;  // "linearized" or "adapter" once realized
  Family family = Family::kPredicate;
  Variant variant = Variant::kPolarityAdd;
  std::string site;
};

inline constexpr std::string_view kEntailment = "entailment";
inline constexpr std::string_view kContradiction = "contradiction";
inline constexpr std::string_view kReference = "reference";

struct LabeledExample {
  std::string id;  // ordering key only, not emitted
  std::string doc_id;
  std::string document;
  std::string summary;
  std::string label;
  std::string provenance;
};

// ---------------------------------------------------------------------------
// Ingestion

struct IngestSkip {
  std::size_t line = 0;
  std::string reason;
};

struct IngestResult {
  std::vector<DocumentRecord> records;
  std::vector<IngestSkip> skipped;
};

// Parses one corpus line. Throws DataError or GraphError.
inline DocumentRecord ParseDocumentLine(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("not a JSON object");
  if (!j.contains("doc_id") || !j["doc_id"].is_string() || j["doc_id"].get<std::string>().empty()) {
    throw DataError("missing doc_id");
  }
  if (!j.contains("document_text") || !j["document_text"].is_string()) {
    throw DataError("missing document_text");
  }
  if (!j.contains("summary_sentences") || !j["summary_sentences"].is_array() ||
      j["summary_sentences"].empty()) {
    throw DataError("summary_sentences must be a nonempty array");
  }
  DocumentRecord record;
  record.doc_id = j["doc_id"].get<std::string>();
  record.document_text = j["document_text"].get<std::string>();
  std::size_t k = 0;
  for (const auto& s : j["summary_sentences"]) {
    if (!s.is_object() || !s.contains("text") || !s["text"].is_string() || !s.contains("penman") ||
        !s["penman"].is_string()) {
      throw DataError("summary sentence " + std::to_string(k) + " needs text and penman");
    }
    SummarySentence sentence;
    sentence.text = s["text"].get<std::string>();
    sentence.penman = s["penman"].get<std::string>();
    try {
      sentence.graph = amr::ParsePenman(sentence.penman);
    } catch (const GraphError& e) {
      throw DataError("summary sentence " + std::to_string(k) + ": " + e.what());
    }
    record.summary_sentences.push_back(std::move(sentence));
    ++k;
  }
  return record;
}

// Keeps every valid line; malformed lines and repeated doc_ids are reported.
inline IngestResult IngestStream(std::istream& in) {
  IngestResult result;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (text::Trim(line).empty()) continue;
    try {
      DocumentRecord record = ParseDocumentLine(line);
      if (!seen.insert(record.doc_id).second) {
        result.skipped.push_back({number, "duplicate doc_id '" + record.doc_id + "'"});
        continue;
      }
      result.records.push_back(std::move(record));
    } catch (const Error& e) {
      result.skipped.push_back({number, e.what()});
    }
  }
  if (result.records.empty()) throw DataError("corpus has no valid records");
  return result;
}

inline IngestResult Ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read corpus '" + path + "'");
  try {
    return IngestStream(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Generation

struct GenerateOptions {
  AntonymLexicon antonyms;
  ModalityMap modality = ModalityMap::Defaults();
  PerturbConfig perturb;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

// Runs `work(i)` for i in [0, n) on up to `jobs` threads; the first exception
// is rethrown after all workers finish.
template <typename Work>
void ParallelFor(std::size_t n, std::size_t jobs, Work work) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (std::size_t j = 0; j < jobs; ++j) {
    workers.emplace_back([&, j] {
      try {
        for (std::size_t i = next++; i < n; i = next++) work(i);
      } catch (...) {
        errors[j] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Candidates for one document. Sentence k is keyed "<doc_id>.<k>" and its
// j-th candidate gets the id "<doc_id>:<k>:<j>".
inline std::vector<NegativeCandidate> GenerateForDocument(const DocumentRecord& record,
                                                          const ValuePools& global_pool,
                                                          const GenerateOptions& options) {
  PerturbationContext ctx;
  ctx.global_pool = global_pool;
  ctx.doc_vocabulary = text::TokenSet(record.document_text);
  ctx.antonyms = options.antonyms;
  ctx.modality = options.modality;
  ctx.rng_seed = options.seed;
  for (const auto& s : record.summary_sentences) HarvestPools(s.graph, ctx.same_doc_pools);

  std::vector<NegativeCandidate> out;
  for (std::size_t k = 0; k < record.summary_sentences.size(); ++k) {
    const SummarySentence& sentence = record.summary_sentences[k];
    amr::Graph graph = sentence.graph;
    const std::string key = record.doc_id + "." + std::to_string(k);
    std::erase_if(graph.metadata, [](const auto& kv) { return kv.first == "id"; });
    graph.metadata.insert(graph.metadata.begin(), {"id", key});

    std::size_t j = 0;
    for (PerturbedGraph& result : ApplyAll(graph, ctx, options.perturb)) {
      NegativeCandidate c;
      c.candidate_id = record.doc_id + ":" + std::to_string(k) + ":" + std::to_string(j++);
      c.doc_id = record.doc_id;
      c.positive_text = sentence.text;
      c.perturbed_penman = amr::SerializePenman(result.graph);
      c.family = result.site.family;
      c.variant = result.site.variant;
      c.site = result.site.Describe();
      out.push_back(std::move(c));
    }
  }
  return out;
}

// Candidates for all documents, in corpus order.
inline std::vector<NegativeCandidate> Generate(std::span<const DocumentRecord> records,
                                               const GenerateOptions& options) {
  ValuePools global_pool;
  for (const auto& r : records) {
    for (const auto& s : r.summary_sentences) HarvestPools(s.graph, global_pool);
  }
  std::vector<std::vector<NegativeCandidate>> per_doc(records.size());
  ParallelFor(records.size(), options.jobs, [&](std::size_t i) {
    per_doc[i] = GenerateForDocument(records[i], global_pool, options);
  });
  std::vector<NegativeCandidate> all;
  for (auto& v : per_doc) {
    for (auto& c : v) all.push_back(std::move(c));
  }
  return all;
}

// ---------------------------------------------------------------------------
// Realization

namespace detail {

struct Linearizer {
  std::vector<std::string> tokens;
  void Open(std::string_view, const std::string&, const std::string& concept_name) {
    tokens.push_back(concept_name);
  }
  void Close() {}
  void Reference(std::string_view, const std::string&) {}
  void Attribute(std::string_view role, const amr::EdgeTarget& constant) {
    if (constant.kind() == amr::EdgeTarget::Kind::kSymbol) {
      tokens.push_back(std::string(role) + ":" + constant.text());
    } else {
      tokens.push_back(constant.text());
    }
  }
};

}  // namespace detail

// Depth-first concept and constant sequence. Symbols keep their role
// ("polarity:-"), strings and numbers are emitted bare.
inline std::string Linearize(const amr::Graph& graph) {
  detail::Linearizer visitor;
  amr::TraverseCanonical(graph, visitor);
  std::string out;
  for (const auto& t : visitor.tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

inline constexpr std::string_view kPassthrough = "passthrough";

// realizer: "passthrough" or "exec:CMD" (amr2text task).
inline void Realize(std::vector<NegativeCandidate>& candidates, std::string_view realizer,
                    std::size_t streams = 1,
                    std::chrono::milliseconds timeout = adapter::kDefaultTimeout) {
  for (const auto& c : candidates) {
    if (text::Trim(c.perturbed_penman).empty()) {
      throw DataError("candidate " + c.candidate_id + " has no perturbed graph to realize");
    }
  }
  if (realizer == kPassthrough) {
    for (auto& c : candidates) {
      c.perturbed_text = Linearize(amr::ParsePenman(c.perturbed_penman));
      c.realization = "linearized";
    }
    return;
  }
  if (realizer.substr(0, 5) != "exec:") {
    throw DataError("unknown realizer '" + std::string(realizer) + "' (passthrough | exec:CMD)");
  }
  const std::string command(realizer.substr(5));
  if (candidates.empty()) return;
  streams = std::max<std::size_t>(1, std::min(streams, candidates.size()));
  const std::size_t chunk = (candidates.size() + streams - 1) / streams;
  ParallelFor(streams, streams, [&](std::size_t s) {
    const std::size_t begin = s * chunk;
    const std::size_t end = std::min(candidates.size(), begin + chunk);
    if (begin >= end) return;
    std::vector<nlohmann::json> requests;
    for (std::size_t i = begin; i < end; ++i) {
      requests.push_back({{"id", candidates[i].candidate_id},
                          {"task", "amr2text"},
                          {"input", candidates[i].perturbed_penman}});
    }
    const auto responses = adapter::RunBatch(command, requests, timeout);
    for (std::size_t i = begin; i < end; ++i) {
      const nlohmann::json& r = responses.at(candidates[i].candidate_id);
      if (!r.contains("output") || !r["output"].is_string()) {
        throw ProtocolError("adapter response without output text for " + candidates[i].candidate_id);
      }
      candidates[i].perturbed_text = r["output"].get<std::string>();
      candidates[i].realization = "adapter";
    }
  });
}

// ---------------------------------------------------------------------------
// Filtering

inline std::vector<ScoringItem> ScoringItems(std::span<const NegativeCandidate> candidates,
                                             const std::map<std::string, std::string>& documents) {
  std::vector<ScoringItem> items;
  items.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (!c.perturbed_text) throw DataError("candidate " + c.candidate_id + " is not realized");
    auto it = documents.find(c.doc_id);
    if (it == documents.end()) throw JoinError(c.candidate_id, "candidate refers to unknown document");
    items.push_back({c.candidate_id, it->second, c.positive_text, *c.perturbed_text});
  }
  return items;
}

inline std::map<std::string, std::string> DocumentTexts(std::span<const DocumentRecord> records) {
  std::map<std::string, std::string> texts;
  for (const auto& r : records) texts[r.doc_id] = r.document_text;
  return texts;
}

// ---------------------------------------------------------------------------
// Balancing and emission

inline std::vector<LabeledExample> Positives(std::span<const DocumentRecord> records) {
  std::vector<LabeledExample> out;
  for (const auto& r : records) {
    for (std::size_t k = 0; k < r.summary_sentences.size(); ++k) {
      out.push_back({r.doc_id + ":" + std::to_string(k), r.doc_id, r.document_text,
                     r.summary_sentences[k].text, std::string(kEntailment), std::string(kReference)});
    }
  }
  return out;
}

inline std::vector<LabeledExample> Negatives(std::span<const NegativeCandidate> candidates,
                                             const std::map<std::string, std::string>& documents) {
  std::vector<LabeledExample> out;
  for (const auto& c : candidates) {
    if (!c.perturbed_text) throw DataError("candidate " + c.candidate_id + " is not realized");
    auto it = documents.find(c.doc_id);
    if (it == documents.end()) throw JoinError(c.candidate_id, "candidate refers to unknown document");
    out.push_back({c.candidate_id, c.doc_id, it->second, *c.perturbed_text,
                   std::string(kContradiction), std::string(ToString(c.family))});
  }
  return out;
}

inline bool ExampleLess(const LabeledExample& a, const LabeledExample& b) {
  return std::tie(a.doc_id, a.id) < std::tie(b.doc_id, b.id);
}

inline std::string FormatExample(const LabeledExample& e) {
  OrderedJson j;
  j["doc_id"] = e.doc_id;
  j["document"] = e.document;
  j["summary"] = e.summary;
  j["label"] = e.label;
  j["provenance"] = e.provenance;
  return j.dump();
}

// Downsamples the larger class to the size of the smaller one. Both inputs
// are put in (doc_id, id) order first so the draw does not depend on input
// order. Returns the union, sorted.
inline std::vector<LabeledExample> Balance(std::vector<LabeledExample> positives,
                                           std::vector<LabeledExample> negatives,
                                           std::uint64_t seed, std::string_view key) {
  std::sort(positives.begin(), positives.end(), ExampleLess);
  std::sort(negatives.begin(), negatives.end(), ExampleLess);
  const std::size_t n = std::min(positives.size(), negatives.size());
  auto& larger = positives.size() > n ? positives : negatives;
  if (larger.size() > n) {
    KeyedRng rng(seed, std::string("balance:") + std::string(key), 0);
    std::vector<LabeledExample> kept;
    for (std::size_t i : rng.Sample(larger.size(), n)) kept.push_back(std::move(larger[i]));
    larger = std::move(kept);
  }
  std::vector<LabeledExample> all = std::move(positives);
  for (auto& e : negatives) all.push_back(std::move(e));
  std::sort(all.begin(), all.end(), ExampleLess);
  return all;
}

struct SplitAssignment {
  std::set<std::string> train;
  std::set<std::string> validation;
};

// Seeded shuffle of the sorted doc ids; the first round(ratio * n) go to
// train. Both splits keep at least one document when n >= 2 and 0 < ratio < 1.
inline SplitAssignment SplitDocuments(std::set<std::string> doc_ids, double ratio,
                                      std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw DataError("split ratio must lie in (0, 1]");
  std::vector<std::string> ids(doc_ids.begin(), doc_ids.end());
  KeyedRng rng(seed, "split", 0);
  rng.Shuffle(ids);
  std::size_t n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ids.size())));
  if (ratio < 1.0 && ids.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, ids.size() - 1);
  SplitAssignment split;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (i < n_train ? split.train : split.validation).insert(ids[i]);
  }
  return split;
}

struct SplitOutput {
  std::string name;
  std::vector<LabeledExample> examples;
};

struct BalanceOptions {
  std::uint64_t seed = 0;
  // Share of documents in the train split; 1.0 writes a single dataset file.
  double split_ratio = 0.874;
};

// Splits by document, then balances within each split.
inline std::vector<SplitOutput> BalanceAndSplit(const std::vector<LabeledExample>& positives,
                                                const std::vector<LabeledExample>& negatives,
                                                const BalanceOptions& options) {
  if (positives.empty()) throw DataError("no positive examples to balance");
  if (negatives.empty()) throw DataError("no negative examples to balance");
  if (options.split_ratio >= 1.0) {
    if (options.split_ratio > 1.0) throw DataError("split ratio must lie in (0, 1]");
    return {{"dataset", Balance(positives, negatives, options.seed, "dataset")}};
  }
  std::set<std::string> doc_ids;
  for (const auto& e : positives) doc_ids.insert(e.doc_id);
  for (const auto& e : negatives) doc_ids.insert(e.doc_id);
  const SplitAssignment split = SplitDocuments(doc_ids, options.split_ratio, options.seed);

  std::vector<SplitOutput> out;
  for (const auto& [name, members] :
       {std::pair<std::string, const std::set<std::string>*>{"train", &split.train},
        std::pair<std::string, const std::set<std::string>*>{"validation", &split.validation}}) {
    std::vector<LabeledExample> pos, neg;
    for (const auto& e : positives) {
      if (members->count(e.doc_id)) pos.push_back(e);
    }
    for (const auto& e : negatives) {
      if (members->count(e.doc_id)) neg.push_back(e);
    }
    out.push_back({name, Balance(std::move(pos), std::move(neg), options.seed, name)});
  }
  return out;
}

inline void WriteTextFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

inline std::string FormatExamples(std::span<const LabeledExample> examples) {
  std::string out;
  for (const auto& e : examples) {
    out += FormatExample(e);
    out.push_back('\n');
  }
  return out;
}

inline OrderedJson FamilyHistogram(std::span<const LabeledExample> examples) {
  OrderedJson h;
  for (Family f : kAllFamilies) {
    h[std::string(ToString(f))] = std::count_if(examples.begin(), examples.end(), [&](const auto& e) {
      return e.provenance == ToString(f);
    });
  }
  return h;
}

// ---------------------------------------------------------------------------
// Statistics

struct StatsItem {
  std::string doc_id;
  Family family = Family::kPredicate;
  std::optional<bool> accepted;
};

struct StatsReport {
  std::size_t total = 0;
  std::array<std::size_t, 5> counts{};
  std::array<std::int64_t, 5> hundredths{};  // percent * 100, rounded half up
  std::size_t scored = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> per_document;

  std::optional<double> AcceptanceRate() const {
    if (scored == 0) return std::nullopt;
    return static_cast<double>(accepted) / static_cast<double>(scored);
  }
};

// round_half_up(count / total * 100, 2), as an integer number of hundredths.
inline std::int64_t PercentHundredths(std::size_t count, std::size_t total) {
  if (total == 0) throw DataError("percentage of an empty total");
  const auto c = static_cast<std::uint64_t>(count);
  const auto t = static_cast<std::uint64_t>(total);
  return static_cast<std::int64_t>((2 * c * 10000 + t) / (2 * t));
}

inline std::string FormatHundredths(std::int64_t hundredths) {
  std::ostringstream out;
  out << hundredths / 100 << '.' << std::setw(2) << std::setfill('0') << hundredths % 100;
  return out.str();
}

inline StatsReport ComputeStats(std::span<const StatsItem> items) {
  if (items.empty()) throw DataError("no candidates to report on");
  StatsReport report;
  report.total = items.size();
  for (const auto& item : items) {
    ++report.counts[static_cast<std::size_t>(item.family)];
    ++report.per_document[item.doc_id];
    if (item.accepted) {
      ++report.scored;
      report.accepted += *item.accepted;
    }
  }
  for (std::size_t f = 0; f < 5; ++f) report.hundredths[f] = PercentHundredths(report.counts[f], report.total);
  return report;
}

inline OrderedJson ToJson(const StatsReport& report) {
  OrderedJson j;
  j["total"] = report.total;
  OrderedJson families = OrderedJson::array();
  for (Family f : kAllFamilies) {
    const std::size_t i = static_cast<std::size_t>(f);
    families.push_back({{"family", ToString(f)},
                        {"count", report.counts[i]},
                        {"percent", FormatHundredths(report.hundredths[i])}});
  }
  j["families"] = families;
  if (auto rate = report.AcceptanceRate()) {
    j["scored"] = report.scored;
    j["accepted"] = report.accepted;
    j["acceptance_rate"] = *rate;
  } else {
    j["acceptance_rate"] = nullptr;
  }
  j["per_document"] = report.per_document;
  return j;
}

inline std::string FormatStats(const StatsReport& report) {
  std::ostringstream out;
  out << "candidates: " << report.total << "\n";
  for (Family f : kAllFamilies) {
    const std::size_t i = static_cast<std::size_t>(f);
    std::string name(ToString(f));
    name.resize(std::max<std::size_t>(name.size(), 16), ' ');
    out << "  " << name << std::setw(8) << report.counts[i] << "  "
        << std::setw(6) << FormatHundredths(report.hundredths[i]) << "%\n";
  }
  if (auto rate = report.AcceptanceRate()) {
    out << "acceptance: " << report.accepted << "/" << report.scored << " ("
        << FormatHundredths(PercentHundredths(report.accepted, report.scored)) << "%)\n";
  }
  out << "documents: " << report.per_document.size() << "\n";
  for (const auto& [doc, n] : report.per_document) out << "  " << doc << "  " << n << "\n";
  return out.str();
}

// Reads a candidates file (has "family") or a dataset file (has "label" and
// "provenance"; only contradiction rows count).
inline std::vector<StatsItem> ReadStatsInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::vector<StatsItem> items;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (text::Trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(number) + ": ";
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("doc_id") || !j["doc_id"].is_string()) {
      throw DataError(where + "expected a JSON object with doc_id");
    }
    StatsItem item;
    item.doc_id = j["doc_id"].get<std::string>();
    std::string family;
    if (j.contains("family") && j["family"].is_string()) {
      family = j["family"].get<std::string>();
      if (j.contains("accepted") && j["accepted"].is_boolean()) item.accepted = j["accepted"].get<bool>();
    } else if (j.contains("label") && j["label"].is_string() && j.contains("provenance") &&
               j["provenance"].is_string()) {
      if (j["label"] != kContradiction) continue;
      family = j["provenance"].get<std::string>();
    } else {
      throw DataError(where + "neither a candidate nor a dataset row");
    }
    auto parsed = ParseFamily(family);
    if (!parsed) throw DataError(where + "unknown family '" + family + "'");
    item.family = *parsed;
    items.push_back(std::move(item));
  }
  return items;
}

// ---------------------------------------------------------------------------
// End to end

struct BuildOptions {
  GenerateOptions generate;
  FilterConfig filter;
  bool apply_filter = true;
  std::string scorer = "builtin";
  std::string realizer = std::string(kPassthrough);
  BalanceOptions balance;
  std::size_t jobs = 1;
  // Content hashes of the lexicon files; part of the config hash.
  std::string lexicon_digest;
  std::string modality_digest;
};

struct ScoredCandidate {
  NegativeCandidate candidate;
  std::optional<ScoreRecord> score;
  std::optional<RejectReason> reject_reason;
};

struct BuildResult {
  std::vector<ScoredCandidate> candidates;
  std::vector<SplitOutput> splits;
  OrderedJson manifest;
};

inline std::string HexDigest(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

inline OrderedJson ConfigJson(const BuildOptions& options) {
  OrderedJson config;
  config["seed"] = options.generate.seed;
  config["tau1"] = options.filter.tau1;
  config["tau2"] = options.filter.tau2;
  config["filter"] = options.apply_filter;
  config["scorer"] = options.scorer;
  config["realizer"] = options.realizer;
  OrderedJson families = OrderedJson::array();
  OrderedJson caps;
  for (Family f : kAllFamilies) {
    if (options.generate.perturb.IsEnabled(f)) families.push_back(ToString(f));
    caps[std::string(ToString(f))] = options.generate.perturb.MaxSites(f);
  }
  config["families"] = families;
  config["max_sites"] = caps;
  config["exhaustive"] = options.generate.perturb.exhaustive;
  config["split_ratio"] = options.balance.split_ratio;
  config["lexicon"] = options.lexicon_digest;
  config["modality_map"] = options.modality_digest;
  return config;
}

inline std::string ConfigHash(const BuildOptions& options) {
  return HexDigest(Fnv1a64(ConfigJson(options).dump()));
}

inline OrderedJson CandidateJson(const ScoredCandidate& s) {
  const NegativeCandidate& c = s.candidate;
  OrderedJson j;
  j["candidate_id"] = c.candidate_id;
  j["doc_id"] = c.doc_id;
  j["family"] = ToString(c.family);
  j["variant"] = ToString(c.variant);
  j["site"] = c.site;
  j["positive_text"] = c.positive_text;
  j["perturbed_penman"] = c.perturbed_penman;
  j["perturbed_text"] = c.perturbed_text ? OrderedJson(*c.perturbed_text) : OrderedJson(nullptr);
  j["realization"] = c.realization;
  if (s.score) {
    j["entailment"] = s.score->entailment;
    j["relevance"] = s.score->relevance;
    j["accepted"] = !s.reject_reason.has_value();
    j["reject_reason"] = s.reject_reason ? OrderedJson(ToString(*s.reject_reason)) : OrderedJson(nullptr);
  }
  return j;
}

// ingest -> generate -> realize -> score/filter -> balance. Nothing is
// written; see WriteBuild.
inline BuildResult BuildDataset(const IngestResult& corpus, const BuildOptions& options) {
  const auto& records = corpus.records;
  std::vector<NegativeCandidate> candidates = Generate(records, options.generate);
  Realize(candidates, options.realizer, options.jobs);
  const auto documents = DocumentTexts(records);

  BuildResult result;
  std::vector<NegativeCandidate> valid;
  std::size_t rejected = 0;
  if (options.apply_filter) {
    const auto items = ScoringItems(candidates, documents);
    std::vector<ScoreRecord> scores;
    if (!items.empty()) scores = ScoreCandidates(items, *MakeScorer(options.scorer, options.jobs));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      auto reason = RejectionOf(scores[i], options.filter);
      result.candidates.push_back({candidates[i], scores[i], reason});
      if (reason) ++rejected; else valid.push_back(candidates[i]);
    }
  } else {
    for (const auto& c : candidates) result.candidates.push_back({c, std::nullopt, std::nullopt});
    valid = candidates;
  }

  const auto positives = Positives(records);
  const auto negatives = Negatives(valid, documents);
  result.splits = BalanceAndSplit(positives, negatives, options.balance);

  OrderedJson& m = result.manifest;
  m["seed"] = options.generate.seed;
  m["config_hash"] = ConfigHash(options);
  m["config"] = ConfigJson(options);
  OrderedJson counts;
  counts["documents"] = records.size();
  counts["skipped_lines"] = corpus.skipped.size();
  counts["positives"] = positives.size();
  counts["candidates"] = candidates.size();
  counts["filtered_out"] = rejected;
  counts["valid_negatives"] = negatives.size();
  m["counts"] = counts;

  std::vector<LabeledExample> raw_examples;
  for (const auto& c : candidates) {
    raw_examples.push_back({c.candidate_id, c.doc_id, "", "", std::string(kContradiction),
                            std::string(ToString(c.family))});
  }
  OrderedJson families;
  families["generated"] = FamilyHistogram(raw_examples);
  families["valid"] = FamilyHistogram(negatives);
  OrderedJson emitted_families;
  OrderedJson splits;
  for (const auto& split : result.splits) {
    const auto n_pos = std::count_if(split.examples.begin(), split.examples.end(),
                                     [](const auto& e) { return e.label == kEntailment; });
    splits[split.name] = {{"file", split.name + ".jsonl"},
                          {"entailment", n_pos},
                          {"contradiction", split.examples.size() - static_cast<std::size_t>(n_pos)},
                          {"documents", [&] {
                             std::set<std::string> docs;
                             for (const auto& e : split.examples) docs.insert(e.doc_id);
                             return docs.size();
                           }()}};
    emitted_families[split.name] = FamilyHistogram(split.examples);
  }
  families["emitted"] = emitted_families;
  m["splits"] = splits;
  m["families"] = families;
  return result;
}

// Writes <split>.jsonl files, candidates.jsonl and manifest.json to `dir`.
inline void WriteBuild(const BuildResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
  for (const auto& split : result.splits) {
    WriteTextFile(dir / (split.name + ".jsonl"), FormatExamples(split.examples));
  }
  std::vector<const ScoredCandidate*> ordered;
  for (const auto& c : result.candidates) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return std::tie(a->candidate.doc_id, a->candidate.candidate_id) <
           std::tie(b->candidate.doc_id, b->candidate.candidate_id);
  });
  std::string lines;
  for (const auto* c : ordered) {
    lines += CandidateJson(*c).dump();
    lines.push_back('\n');
  }
  WriteTextFile(dir / "candidates.jsonl", lines);
  WriteTextFile(dir / "manifest.json", result.manifest.dump(2) + "\n");
}

}  // namespace amrperturb::pipeline

#endif  // AMRPERTURB_PIPELINE_HPP
