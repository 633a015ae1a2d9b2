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

// Command line front end. Run() is the whole program minus main(), so the
// tests can drive it with in-memory streams.
//
// Exit codes: 0 success, 1 data or validation error, 2 usage error.

#ifndef AMRPERTURB_CLI_HPP
#define AMRPERTURB_CLI_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amrperturb/amr.hpp"
#include "amrperturb/error.hpp"
#include "amrperturb/eval.hpp"
#include "amrperturb/lexicon.hpp"
#include "amrperturb/negfilter.hpp"
#include "amrperturb/perturb.hpp"
#include "amrperturb/pipeline.hpp"
#include "json.hpp"

#ifndef AMRPERTURB_DATA_DIR
#define AMRPERTURB_DATA_DIR "data"
#endif

namespace amrperturb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

inline std::string DefaultLexiconPath() { return std::string(AMRPERTURB_DATA_DIR) + "/antonyms.tsv"; }
inline std::string DefaultModalityPath() { return std::string(AMRPERTURB_DATA_DIR) + "/modality.tsv"; }

namespace detail {

inline std::string ReadInput(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  return amrperturb::detail::ReadFileOrThrow(path, "input");
}

inline void WriteOutput(const std::string& path, const std::string& content) {
  pipeline::WriteTextFile(path, content);
}

inline PerturbConfig MakePerturbConfig(const std::vector<std::string>& families,
                                       const std::vector<std::string>& max_sites, bool sample) {
  PerturbConfig config;
  if (!families.empty()) {
    config.enabled.fill(false);
    for (const auto& name : families) {
      auto family = ParseFamily(name);
      if (!family) throw CLI::ValidationError("--families", "unknown family '" + name + "'");
      config.SetEnabled(*family, true);
    }
  }
  for (const auto& entry : max_sites) {
    const auto eq = entry.find('=');
    auto family = eq == std::string::npos ? std::nullopt : ParseFamily(entry.substr(0, eq));
    if (!family) throw CLI::ValidationError("--max-sites", "expected FAMILY=N, got '" + entry + "'");
    try {
      config.SetMaxSites(*family, std::stoul(entry.substr(eq + 1)));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--max-sites", "expected FAMILY=N, got '" + entry + "'");
    }
  }
  config.exhaustive = !sample;
  return config;
}

inline std::string FamilyList() {
  std::string out;
  for (Family f : kAllFamilies) {
    if (!out.empty()) out += ",";
    out += ToString(f);
  }
  return out;
}

inline nlohmann::ordered_json GraphJson(const amr::Graph& g) {
  nlohmann::ordered_json j;
  j["top"] = g.top;
  j["nodes"] = nlohmann::ordered_json::object();
  for (const auto& [var, concept_name] : g.nodes) j["nodes"][var] = concept_name;
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    nlohmann::ordered_json edge;
    edge["source"] = e.source;
    edge["role"] = e.role;
    if (e.target.is_variable()) {
      edge["target"] = e.target.text();
    } else {
      edge["constant"] = e.target.text();
      switch (e.target.kind()) {
        case amr::EdgeTarget::Kind::kString: edge["type"] = "string"; break;
        case amr::EdgeTarget::Kind::kNumber: edge["type"] = "number"; break;
        default: edge["type"] = "symbol"; break;
      }
    }
    j["edges"].push_back(edge);
  }
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : g.metadata) j["metadata"][k] = v;
  j["penman"] = amr::SerializePenman(g);
  return j;
}

// Digest of a lexicon file for the manifest; files are hashed by content so
// the same resources in another directory give the same config hash.
inline std::string FileDigest(const std::string& path) {
  return pipeline::HexDigest(Fnv1a64(amrperturb::detail::ReadFileOrThrow(path, "file")));
}

inline void AddFormatOption(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// parse

struct ParseArgs {
  std::string in = "-";
  std::string format = "text";
  bool keep_metadata = false;
};

inline int RunParse(const ParseArgs& args, std::ostream& out) {
  const auto graphs = amr::ParsePenmanBlocks(detail::ReadInput(args.in));
  if (graphs.empty()) throw DataError("no PENMAN graph in input");
  if (args.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& g : graphs) j.push_back(detail::GraphJson(g));
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& g : graphs) {
    if (args.keep_metadata) {
      out << amr::FormatBlock(g) << "\n";
    } else {
      out << amr::SerializePenman(g) << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// perturb

struct PerturbArgs {
  std::string in = "-";
  std::string lexicon = DefaultLexiconPath();
  std::string modality_map = DefaultModalityPath();
  std::string document;
  std::vector<std::string> families;
  std::vector<std::string> max_sites;
  bool sample = false;
  std::uint64_t seed = 0;
  std::string format = "text";
};

// All graphs of the input are treated as one document: they share value
// pools. The document text for the out-of-article check comes from
// --document (empty when absent).
inline int RunPerturb(const PerturbArgs& args, std::ostream& out) {
  const auto graphs = amr::ParsePenmanBlocks(detail::ReadInput(args.in));
  if (graphs.empty()) throw DataError("no PENMAN graph in input");
  const PerturbConfig config = detail::MakePerturbConfig(args.families, args.max_sites, args.sample);

  PerturbationContext ctx;
  ctx.antonyms = AntonymLexicon::Load(args.lexicon);
  ctx.modality = ModalityMap::Load(args.modality_map);
  ctx.rng_seed = args.seed;
  ctx.same_doc_pools = HarvestPools(graphs);
  ctx.global_pool = ctx.same_doc_pools;
  if (!args.document.empty()) {
    ctx.doc_vocabulary = text::TokenSet(amrperturb::detail::ReadFileOrThrow(args.document, "document"));
  }

  nlohmann::ordered_json json = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const std::string* id = amr::MetadataValue(graphs[k], "id");
    const std::string label = id ? *id : "g" + std::to_string(k);
    std::size_t j = 0;
    for (const PerturbedGraph& result : ApplyAll(graphs[k], ctx, config)) {
      if (args.format == "json") {
        nlohmann::ordered_json item;
        item["source"] = k;
        item["family"] = ToString(result.site.family);
        item["variant"] = ToString(result.site.variant);
        item["site"] = result.site.Describe();
        item["penman"] = amr::SerializePenman(result.graph);
        json.push_back(item);
      } else {
        amr::Graph block = result.graph;
        block.metadata = {{"id", label + ":" + std::to_string(j)},
                          {"family", std::string(ToString(result.site.family))},
                          {"variant", std::string(ToString(result.site.variant))},
                          {"site", result.site.Describe()}};
        out << amr::FormatBlock(block) << "\n";
      }
      ++j;
    }
  }
  if (args.format == "json") out << json.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// filter

struct FilterArgs {
  std::string candidates;
  std::string corpus;
  std::string scorer = "builtin";
  std::string scores;
  double tau1 = 0.9;
  double tau2 = -1.8;
  std::string out;
  std::string rejected;
  std::size_t jobs = 1;
  std::string format = "text";
};

struct CandidateLine {
  std::string candidate_id;
  nlohmann::ordered_json row;
};

inline int RunFilter(const FilterArgs& args, std::ostream& out) {
  const std::string scorer_spec = args.scores.empty() ? args.scorer : "file:" + args.scores;
  const bool needs_text = scorer_spec.substr(0, 5) != "file:";
  std::map<std::string, std::string> documents;
  if (!args.corpus.empty()) documents = pipeline::DocumentTexts(pipeline::Ingest(args.corpus).records);

  std::vector<CandidateLine> candidates;
  std::vector<ScoringItem> items;
  {
    std::istringstream in(detail::ReadInput(args.candidates));
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (text::Trim(line).empty()) continue;
      const std::string where = args.candidates + ":" + std::to_string(number) + ": ";
      auto row = nlohmann::ordered_json::parse(line, nullptr, false);
      if (row.is_discarded() || !row.is_object() || !row.contains("candidate_id") ||
          !row["candidate_id"].is_string()) {
        throw DataError(where + "expected a JSON object with candidate_id");
      }
      auto field = [&](const char* name) -> std::string {
        if (row.contains(name) && row[name].is_string()) return row[name].get<std::string>();
        if (needs_text) throw DataError(where + "missing " + name);
        return "";
      };
      ScoringItem item;
      item.id = row["candidate_id"].get<std::string>();
      if (row.contains("document") && row["document"].is_string()) {
        item.document = row["document"].get<std::string>();
      } else if (row.contains("doc_id") && row["doc_id"].is_string() &&
                 documents.count(row["doc_id"].get<std::string>())) {
        item.document = documents.at(row["doc_id"].get<std::string>());
      } else if (needs_text) {
        throw DataError(where + "no document text (add \"document\" or pass --corpus)");
      }
      item.positive = field("positive_text");
      item.perturbed = field("perturbed_text");
      candidates.push_back({item.id, std::move(row)});
      items.push_back(std::move(item));
    }
  }
  if (candidates.empty()) throw DataError("no candidates in '" + args.candidates + "'");

  FilterConfig config{args.tau1, args.tau2};
  config.Validate();
  std::vector<ScoreRecord> scores;
  if (scorer_spec.substr(0, 5) == "file:") {
    scores = ReadScoreFile(scorer_spec.substr(5));
  } else {
    scores = ScoreCandidates(items, *MakeScorer(scorer_spec, args.jobs));
  }
  const auto result = FilterBatch<CandidateLine>(candidates, scores, config);

  std::map<std::string, const ScoreRecord*> score_of;
  for (const auto& s : scores) score_of.emplace(s.candidate_id, &s);
  std::string valid_lines;
  for (const auto& c : result.valid) {
    auto row = c.row;
    row["entailment"] = score_of.at(c.candidate_id)->entailment;
    row["relevance"] = score_of.at(c.candidate_id)->relevance;
    valid_lines += row.dump() + "\n";
  }
  std::string rejected_lines;
  std::map<std::string, std::size_t> reasons;
  for (const auto& r : result.rejected) {
    auto row = r.candidate.row;
    row["entailment"] = r.score.entailment;
    row["relevance"] = r.score.relevance;
    row["reject_reason"] = ToString(r.reason);
    rejected_lines += row.dump() + "\n";
    ++reasons[std::string(ToString(r.reason))];
  }
  detail::WriteOutput(args.out, valid_lines);
  if (!args.rejected.empty()) detail::WriteOutput(args.rejected, rejected_lines);

  if (args.format == "json") {
    nlohmann::ordered_json j;
    j["candidates"] = candidates.size();
    j["valid"] = result.valid.size();
    j["rejected"] = result.rejected.size();
    j["reasons"] = reasons;
    j["tau1"] = config.tau1;
    j["tau2"] = config.tau2;
    out << j.dump(2) << "\n";
  } else {
    out << "candidates: " << candidates.size() << "\nvalid: " << result.valid.size()
        << "\nrejected: " << result.rejected.size() << "\n";
    for (const auto& [reason, n] : reasons) out << "  " << reason << ": " << n << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// build-dataset

struct BuildArgs {
  std::string corpus;
  std::string lexicon = DefaultLexiconPath();
  std::string modality_map = DefaultModalityPath();
  double tau1 = 0.9;
  double tau2 = -1.8;
  std::uint64_t seed = 0;
  std::string scorer = "builtin";
  std::string realizer = std::string(pipeline::kPassthrough);
  std::string out;
  std::size_t jobs = 1;
  std::vector<std::string> families;
  std::vector<std::string> max_sites;
  bool sample = false;
  double split_ratio = 0.874;
  bool no_filter = false;
  std::string format = "text";
};

inline int RunBuildDataset(const BuildArgs& args, std::ostream& out, std::ostream& err) {
  pipeline::BuildOptions options;
  options.generate.antonyms = AntonymLexicon::Load(args.lexicon);
  options.generate.modality = ModalityMap::Load(args.modality_map);
  options.generate.perturb = detail::MakePerturbConfig(args.families, args.max_sites, args.sample);
  options.generate.seed = args.seed;
  options.generate.jobs = args.jobs;
  options.filter = {args.tau1, args.tau2};
  options.filter.Validate();
  options.apply_filter = !args.no_filter;
  options.scorer = args.scorer;
  options.realizer = args.realizer;
  options.balance = {args.seed, args.split_ratio};
  options.jobs = args.jobs;
  options.lexicon_digest = detail::FileDigest(args.lexicon);
  options.modality_digest = detail::FileDigest(args.modality_map);

  const auto corpus = pipeline::Ingest(args.corpus);
  for (const auto& skip : corpus.skipped) {
    err << args.corpus << ":" << skip.line << ": skipped: " << skip.reason << "\n";
  }
  const auto result = pipeline::BuildDataset(corpus, options);
  pipeline::WriteBuild(result, args.out);

  if (args.format == "json") {
    out << result.manifest.dump(2) << "\n";
    return kExitOk;
  }
  const auto& counts = result.manifest["counts"];
  out << "documents: " << counts["documents"] << " (" << counts["skipped_lines"] << " skipped lines)\n"
      << "positives: " << counts["positives"] << "\n"
      << "candidates: " << counts["candidates"] << "\n"
      << "filtered out: " << counts["filtered_out"] << "\n"
      << "valid negatives: " << counts["valid_negatives"] << "\n";
  for (const auto& [name, split] : result.manifest["splits"].items()) {
    out << name << ": " << split["entailment"] << " entailment + " << split["contradiction"]
        << " contradiction -> " << (std::filesystem::path(args.out) / split["file"].get<std::string>()).string()
        << "\n";
  }
  out << "config hash: " << result.manifest["config_hash"].get<std::string>() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string val;
  std::string test;
  std::size_t ci_resamples = 1000;
  std::uint64_t seed = 0;
  bool invert_scores = false;
  double level = 0.95;
  std::size_t jobs = 1;
  std::string out;
  std::vector<std::string> compare;
  std::string format = "text";
};

inline int RunEvaluate(const EvaluateArgs& args, std::ostream& out) {
  if (!args.compare.empty()) {
    std::vector<std::pair<std::string, eval::EvalReport>> rows;
    for (const auto& entry : args.compare) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw CLI::ValidationError("--compare", "expected NAME=REPORT, got '" + entry + "'");
      }
      const std::string text = amrperturb::detail::ReadFileOrThrow(entry.substr(eq + 1), "report");
      auto j = nlohmann::json::parse(text, nullptr, false);
      if (j.is_discarded()) throw DataError("report '" + entry.substr(eq + 1) + "' is not JSON");
      rows.emplace_back(entry.substr(0, eq), eval::ReportFromJson(j));
    }
    if (args.format == "json") {
      nlohmann::ordered_json j = nlohmann::ordered_json::array();
      for (const auto& [name, report] : rows) {
        nlohmann::ordered_json row;
        row["name"] = name;
        row["average"] = report.average;
        row["delta"] = report.average - rows.front().second.average;
        row["report"] = eval::ToJson(report);
        j.push_back(row);
      }
      out << j.dump(2) << "\n";
    } else {
      out << eval::FormatComparison(rows);
    }
    return kExitOk;
  }
  if (args.val.empty() || args.test.empty()) {
    throw CLI::ValidationError("evaluate", "--val and --test are required unless --compare is given");
  }
  const auto val = eval::ReadEvalFile(args.val, args.invert_scores);
  const auto test = eval::ReadEvalFile(args.test, args.invert_scores);
  const auto report =
      eval::RunEvaluation(val, test, {args.ci_resamples, args.seed, args.level, args.jobs});
  const auto json = eval::ToJson(report);
  if (!args.out.empty()) detail::WriteOutput(args.out, json.dump(2) + "\n");
  if (args.format == "json") {
    out << json.dump(2) << "\n";
  } else {
    out << eval::FormatReport(report);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string in;
  std::string format = "text";
};

inline int RunStats(const StatsArgs& args, std::ostream& out) {
  const auto report = pipeline::ComputeStats(pipeline::ReadStatsInput(args.in));
  if (args.format == "json") {
    out << pipeline::ToJson(report).dump(2) << "\n";
  } else {
    out << pipeline::FormatStats(report);
  }
  return kExitOk;
}

namespace detail {

// Index of the value of "--config" in args[from..], or npos. Also accepts
// "--config=PATH", in which case the index of that token is returned.
inline std::size_t FindConfigArg(const std::vector<std::string>& args, std::size_t from) {
  for (std::size_t i = from; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return i + 1;
    if (args[i].rfind("--config=", 0) == 0) return i;
  }
  return std::string::npos;
}

inline bool GivenOnCommandLine(const std::vector<std::string>& args, std::size_t from,
                               const std::string& flag) {
  for (std::size_t i = from; i < args.size(); ++i) {
    if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

// CLI11 only reads config files for the root app, so subcommand configs are
// expanded here: every key the command line does not set becomes a flag
// inserted right after the subcommand name. Keys may sit at top level or in
// a section named after the subcommand.
inline void ApplyConfigFile(CLI::App& app, std::vector<std::string>& args) {
  std::size_t sub_index = std::string::npos;
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (auto* candidate = app.get_subcommand_no_throw(args[i])) {
      sub_index = i;
      sub = candidate;
      break;
    }
  }
  if (!sub) return;
  const std::size_t at = FindConfigArg(args, sub_index + 1);
  if (at == std::string::npos) return;
  std::string path = args[at];
  if (path.rfind("--config=", 0) == 0) path = path.substr(9);
  if (!std::filesystem::is_regular_file(path)) throw CLI::FileError::Missing(path);

  std::vector<std::string> extra;
  for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub->get_name())) {
      continue;
    }
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") continue;
    const std::string flag = "--" + name;
    const CLI::Option* option = sub->get_option_no_throw(flag);
    if (!option) {
      throw CLI::ConfigError("unknown key '" + item.name + "' for " + sub->get_name() + " in " + path);
    }
    if (GivenOnCommandLine(args, sub_index + 1, flag)) continue;
    if (option->get_type_size() == 0) {
      if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "1")) extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    for (const auto& v : item.inputs) extra.push_back(v);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_index) + 1, extra.begin(), extra.end());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry point

// `args` excludes the program name.
inline int Run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AMR-based factual error perturbation and factuality evaluation toolkit",
               "amrperturb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");
  const std::string family_help = "Comma-separated families (" + detail::FamilyList() + ")";

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse PENMAN graphs and print their canonical form");
  parse->add_option("--in", parse_args.in, "PENMAN file, '-' for stdin")->capture_default_str();
  parse->add_flag("--keep-metadata", parse_args.keep_metadata, "Print metadata lines too");
  detail::AddFormatOption(parse, parse_args.format);

  PerturbArgs perturb_args;
  auto* perturb = app.add_subcommand("perturb", "Print every valid perturbation of the input graphs");
  perturb->add_option("--in", perturb_args.in, "PENMAN file, '-' for stdin")->capture_default_str();
  perturb->add_option("--lexicon", perturb_args.lexicon, "Antonym lexicon TSV")
      ->check(CLI::ExistingFile)->capture_default_str();
  perturb->add_option("--modality-map", perturb_args.modality_map, "Modality map TSV")
      ->check(CLI::ExistingFile)->capture_default_str();
  perturb->add_option("--document", perturb_args.document,
                      "Source document text file for the out-of-article check")
      ->check(CLI::ExistingFile);
  perturb->add_option("--families", perturb_args.families, family_help)->delimiter(',');
  perturb->add_option("--max-sites", perturb_args.max_sites, "Per-family cap, FAMILY=N (repeatable)");
  perturb->add_flag("--sample", perturb_args.sample, "Keep one seeded site per variant");
  perturb->add_option("--seed", perturb_args.seed, "Seed for payload choices")->capture_default_str();
  detail::AddFormatOption(perturb, perturb_args.format);

  FilterArgs filter_args;
  auto* filter = app.add_subcommand("filter", "Apply the validity filter to realized candidates");
  filter->add_option("--candidates", filter_args.candidates, "Candidates JSONL")->required();
  filter->add_option("--corpus", filter_args.corpus, "Corpus JSONL to look up documents by doc_id")
      ->check(CLI::ExistingFile);
  filter->add_option("--scorer", filter_args.scorer, "builtin | file:PATH | exec:CMD")
      ->capture_default_str();
  filter->add_option("--scores", filter_args.scores, "Score JSONL (same as --scorer file:PATH)")
      ->check(CLI::ExistingFile);
  filter->add_option("--tau1", filter_args.tau1, "Reject when entailment >= tau1")->capture_default_str();
  filter->add_option("--tau2", filter_args.tau2, "Reject when relevance <= tau2")->capture_default_str();
  filter->add_option("--out", filter_args.out, "Output JSONL for valid candidates")->required();
  filter->add_option("--rejected", filter_args.rejected, "Output JSONL for rejected candidates");
  filter->add_option("--jobs", filter_args.jobs, "Adapter processes for exec scorers")
      ->check(CLI::PositiveNumber)->capture_default_str();
  detail::AddFormatOption(filter, filter_args.format);

  BuildArgs build_args;
  auto* build = app.add_subcommand("build-dataset", "Build a balanced labeled dataset from a corpus");
  build->add_option("--corpus", build_args.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  build->add_option("--lexicon", build_args.lexicon, "Antonym lexicon TSV")
      ->check(CLI::ExistingFile)->capture_default_str();
  build->add_option("--modality-map", build_args.modality_map, "Modality map TSV")
      ->check(CLI::ExistingFile)->capture_default_str();
  build->add_option("--tau1", build_args.tau1, "Reject when entailment >= tau1")->capture_default_str();
  build->add_option("--tau2", build_args.tau2, "Reject when relevance <= tau2")->capture_default_str();
  build->add_option("--seed", build_args.seed, "Seed for every random choice")->required();
  build->add_option("--scorer", build_args.scorer, "builtin | file:PATH | exec:CMD")->capture_default_str();
  build->add_option("--realizer", build_args.realizer, "passthrough | exec:CMD")->capture_default_str();
  build->add_option("--out", build_args.out, "Output directory")->required();
  build->add_option("--jobs", build_args.jobs, "Worker threads / adapter processes")
      ->check(CLI::PositiveNumber)->capture_default_str();
  build->add_option("--families", build_args.families, family_help)->delimiter(',');
  build->add_option("--max-sites", build_args.max_sites, "Per-family cap, FAMILY=N (repeatable)");
  build->add_flag("--sample", build_args.sample, "Keep one seeded site per variant");
  build->add_option("--split-ratio", build_args.split_ratio,
                    "Share of documents in train; 1 writes a single dataset file")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  build->add_flag("--no-filter", build_args.no_filter, "Keep every candidate (filter ablation)");
  detail::AddFormatOption(build, build_args.format);

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Balanced accuracy with per-origin tuned thresholds");
  evaluate->add_option("--val", eval_args.val, "Validation JSONL (threshold tuning)")->check(CLI::ExistingFile);
  evaluate->add_option("--test", eval_args.test, "Test JSONL")->check(CLI::ExistingFile);
  evaluate->add_option("--ci-resamples", eval_args.ci_resamples, "Bootstrap resamples, 0 disables")
      ->capture_default_str();
  evaluate->add_option("--seed", eval_args.seed, "Bootstrap seed")->capture_default_str();
  evaluate->add_flag("--invert-scores", eval_args.invert_scores, "Scores are higher = more faithful");
  evaluate->add_option("--level", eval_args.level, "Confidence level")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  evaluate->add_option("--jobs", eval_args.jobs, "Bootstrap threads")
      ->check(CLI::PositiveNumber)->capture_default_str();
  evaluate->add_option("--out", eval_args.out, "Write the JSON report here");
  evaluate->add_option("--compare", eval_args.compare,
                       "NAME=REPORT.json (repeatable); prints a comparison table instead");
  detail::AddFormatOption(evaluate, eval_args.format);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Family distribution of candidates or a dataset");
  stats->add_option("--in", stats_args.in, "candidates.jsonl or dataset JSONL")
      ->required()->check(CLI::ExistingFile);
  detail::AddFormatOption(stats, stats_args.format);

  std::string config_path;
  for (auto* cmd : {parse, perturb, filter, build, evaluate, stats}) {
    cmd->add_option("--config", config_path, "TOML file with option values; command-line flags win");
  }

  try {
    detail::ApplyConfigFile(app, args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*parse) return RunParse(parse_args, out);
    if (*perturb) return RunPerturb(perturb_args, out);
    if (*filter) return RunFilter(filter_args, out);
    if (*build) return RunBuildDataset(build_args, out, err);
    if (*evaluate) return RunEvaluate(eval_args, out);
    if (*stats) return RunStats(stats_args, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace amrperturb::cli

#endif  // AMRPERTURB_CLI_HPP
