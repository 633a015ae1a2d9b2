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

// Rule-based factual-error injection on AMR graphs.
//
// Five error families, each with a few variants:
//
//   predicate       polarity-add, polarity-remove, antonym
//   entity          agent-patient-swap, entity-substitute
//   circumstance    modality-strengthen, circumstance-substitute
//   discourse-link  temporal-flip, causality-reverse
//   out-of-article  foreign-substitute
//
// EnumerateSites lists every applicable edit of a graph; Apply performs one
// edit and returns a new graph. Exactly one edit is made per output graph.
//
// Substitutions operate on "value slots":
//
//   name        the :op strings of a name node (joined by spaces)
//   location    same, for a named entity reached through :location
//   quant       a constant :quant value
//   date:<role> a constant attribute of a date-entity (year, month, day, ...)
//   time        the :time attribute of a date-entity
//
// Replacement values come from pools keyed by slot name. Same-document pools
// feed entity/circumstance substitution; the corpus-wide pool feeds
// out-of-article substitution, restricted to values whose tokens do not
// occur in the source document.

#ifndef AMRPERTURB_PERTURB_HPP
#define AMRPERTURB_PERTURB_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amrperturb/amr.hpp"
#include "amrperturb/error.hpp"
#include "amrperturb/lexicon.hpp"
#include "amrperturb/random.hpp"
#include "amrperturb/text.hpp"

namespace amrperturb {

enum class Family { kPredicate, kEntity, kCircumstance, kDiscourseLink, kOutOfArticle };

inline constexpr std::array<Family, 5> kAllFamilies = {
    Family::kPredicate, Family::kEntity, Family::kCircumstance, Family::kDiscourseLink,
    Family::kOutOfArticle};

enum class Variant {
  kPolarityAdd,
  kPolarityRemove,
  kAntonym,
  kAgentPatientSwap,
  kEntitySubstitute,
  kModalityStrengthen,
  kCircumstanceSubstitute,
  kTemporalFlip,
  kCausalityReverse,
  kForeignSubstitute,
};

inline constexpr std::array<Variant, 10> kAllVariants = {
    Variant::kPolarityAdd,        Variant::kPolarityRemove,         Variant::kAntonym,
    Variant::kAgentPatientSwap,   Variant::kEntitySubstitute,       Variant::kModalityStrengthen,
    Variant::kCircumstanceSubstitute, Variant::kTemporalFlip,       Variant::kCausalityReverse,
    Variant::kForeignSubstitute};

inline Family FamilyOf(Variant variant) {
  switch (variant) {
    case Variant::kPolarityAdd:
    case Variant::kPolarityRemove:
    case Variant::kAntonym:
      return Family::kPredicate;
    case Variant::kAgentPatientSwap:
    case Variant::kEntitySubstitute:
      return Family::kEntity;
    case Variant::kModalityStrengthen:
    case Variant::kCircumstanceSubstitute:
      return Family::kCircumstance;
    case Variant::kTemporalFlip:
    case Variant::kCausalityReverse:
      return Family::kDiscourseLink;
    case Variant::kForeignSubstitute:
      return Family::kOutOfArticle;
  }
  return Family::kPredicate;
}

inline std::string_view ToString(Family family) {
  switch (family) {
    case Family::kPredicate: return "predicate";
    case Family::kEntity: return "entity";
    case Family::kCircumstance: return "circumstance";
    case Family::kDiscourseLink: return "discourse-link";
    case Family::kOutOfArticle: return "out-of-article";
  }
  return "";
}

inline std::string_view ToString(Variant variant) {
  switch (variant) {
    case Variant::kPolarityAdd: return "polarity-add";
    case Variant::kPolarityRemove: return "polarity-remove";
    case Variant::kAntonym: return "antonym";
    case Variant::kAgentPatientSwap: return "agent-patient-swap";
    case Variant::kEntitySubstitute: return "entity-substitute";
    case Variant::kModalityStrengthen: return "modality-strengthen";
    case Variant::kCircumstanceSubstitute: return "circumstance-substitute";
    case Variant::kTemporalFlip: return "temporal-flip";
    case Variant::kCausalityReverse: return "causality-reverse";
    case Variant::kForeignSubstitute: return "foreign-substitute";
  }
  return "";
}

inline std::optional<Family> ParseFamily(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (ToString(f) == name) return f;
  }
  if (name == "discourse") return Family::kDiscourseLink;
  return std::nullopt;
}

inline std::optional<Variant> ParseVariant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (ToString(v) == name) return v;
  }
  return std::nullopt;
}

// One applicable edit. `edge` indexes Graph::edges of the source graph for
// edge-level targets; `node` is always set.
struct PerturbationSite {
  Family family = Family::kPredicate;
  Variant variant = Variant::kPolarityAdd;
  std::string node;
  std::optional<std::size_t> edge;
  std::string slot;
  // Replacement concept or value. An empty string on modality-strengthen
  // means the modal wrapper node is removed.
  std::optional<std::string> payload;

  bool operator==(const PerturbationSite&) const = default;

  std::string Describe() const {
    std::string out(ToString(variant));
    out += " node=" + node;
    if (edge) out += " edge=" + std::to_string(*edge);
    if (!slot.empty()) out += " slot=" + slot;
    if (payload) out += " payload=\"" + *payload + "\"";
    return out;
  }
};

// ---------------------------------------------------------------------------
// Value slots and pools

using ValuePools = std::map<std::string, std::vector<std::string>>;

inline void AddPoolValue(ValuePools& pools, const std::string& slot, const std::string& value) {
  if (value.empty()) return;
  auto& values = pools[slot];
  if (std::find(values.begin(), values.end(), value) == values.end()) values.push_back(value);
}

struct ValueSlot {
  std::string slot;
  std::string node;
  std::optional<std::size_t> edge;  // unset for name-valued slots
  std::string value;
};

inline constexpr std::array<std::string_view, 7> kDateRoles = {
    "year", "month", "day", "decade", "century", "quarter", "era"};

namespace detail {

inline std::optional<int> OpIndex(std::string_view role) {
  if (role.size() < 3 || role.substr(0, 2) != "op") return std::nullopt;
  int index = 0;
  for (char c : role.substr(2)) {
    if (c < '0' || c > '9') return std::nullopt;
    index = index * 10 + (c - '0');
  }
  return index;
}

// :opN constant edges of a name node, sorted by N.
inline std::vector<std::size_t> NameOps(const amr::Graph& graph, const std::string& node) {
  std::vector<std::pair<int, std::size_t>> ops;
  for (std::size_t i : amr::OutgoingEdges(graph, node)) {
    const amr::Edge& e = graph.edges[i];
    if (auto index = OpIndex(e.role); index && e.target.is_constant()) ops.emplace_back(*index, i);
  }
  std::sort(ops.begin(), ops.end());
  std::vector<std::size_t> result;
  for (const auto& [_, i] : ops) result.push_back(i);
  return result;
}

inline std::string NameValue(const amr::Graph& graph, const std::string& node) {
  std::string value;
  for (std::size_t i : NameOps(graph, node)) {
    if (!value.empty()) value.push_back(' ');
    value += graph.edges[i].target.text();
  }
  return value;
}

}  // namespace detail

// All substitutable values of a graph in canonical node order.
inline std::vector<ValueSlot> FindValueSlots(const amr::Graph& graph) {
  std::vector<ValueSlot> slots;
  for (const std::string& node : amr::CanonicalOrder(graph)) {
    const auto owners = amr::IncomingEdges(graph, node, "name");
    if (!owners.empty()) {
      std::string value = detail::NameValue(graph, node);
      if (!value.empty()) {
        bool location = false;
        for (std::size_t i : owners) {
          if (!amr::IncomingEdges(graph, graph.edges[i].source, "location").empty()) location = true;
        }
        slots.push_back({location ? "location" : "name", node, std::nullopt, std::move(value)});
      }
    }
    const bool date = graph.nodes.at(node) == "date-entity";
    for (std::size_t i : amr::OutgoingEdges(graph, node)) {
      const amr::Edge& e = graph.edges[i];
      if (!e.target.is_constant()) continue;
      if (e.role == "quant") {
        slots.push_back({"quant", node, i, e.target.text()});
      } else if (date && e.role == "time") {
        slots.push_back({"time", node, i, e.target.text()});
      } else if (date && std::find(kDateRoles.begin(), kDateRoles.end(), e.role) != kDateRoles.end()) {
        slots.push_back({"date:" + e.role, node, i, e.target.text()});
      }
    }
  }
  return slots;
}

inline void HarvestPools(const amr::Graph& graph, ValuePools& pools) {
  for (const ValueSlot& slot : FindValueSlots(graph)) AddPoolValue(pools, slot.slot, slot.value);
}

inline ValuePools HarvestPools(std::span<const amr::Graph> graphs) {
  ValuePools pools;
  for (const amr::Graph& g : graphs) HarvestPools(g, pools);
  return pools;
}

// True when no token of `value` occurs in `vocabulary`.
inline bool IsForeign(std::string_view value, const std::set<std::string>& vocabulary) {
  const auto tokens = text::TokenSet(value);
  if (tokens.empty()) return false;
  return std::none_of(tokens.begin(), tokens.end(),
                      [&](const std::string& t) { return vocabulary.count(t) > 0; });
}

inline bool IsNameSlot(std::string_view slot) { return slot == "name" || slot == "location"; }
inline bool IsEntitySlot(std::string_view slot) { return slot == "name" || slot == "quant"; }
inline bool IsCircumstanceSlot(std::string_view slot) {
  return slot == "location" || slot == "time" || slot.substr(0, 5) == "date:";
}

// ---------------------------------------------------------------------------
// Context and configuration

struct PerturbationContext {
  ValuePools same_doc_pools;
  std::set<std::string> doc_vocabulary;
  ValuePools global_pool;
  AntonymLexicon antonyms;
  ModalityMap modality = ModalityMap::Defaults();
  std::uint64_t rng_seed = 0;
};

struct PerturbConfig {
  std::array<bool, 5> enabled = {true, true, true, true, true};
  // 0 = unlimited.
  std::array<std::size_t, 5> max_sites = {0, 0, 0, 0, 0};
  // When false, a single seeded site is kept per variant instead of all.
  bool exhaustive = true;

  bool IsEnabled(Family f) const { return enabled[static_cast<std::size_t>(f)]; }
  void SetEnabled(Family f, bool on) { enabled[static_cast<std::size_t>(f)] = on; }
  std::size_t MaxSites(Family f) const { return max_sites[static_cast<std::size_t>(f)]; }
  void SetMaxSites(Family f, std::size_t n) { max_sites[static_cast<std::size_t>(f)] = n; }
};

// Key for all seeded choices on `graph`: its `id` metadata when present.
inline std::string GraphKey(const amr::Graph& graph) {
  if (const std::string* id = amr::MetadataValue(graph, "id")) return *id;
  try {
    return amr::SerializePenman(graph);
  } catch (const GraphError&) {
    return graph.top;
  }
}

// ---------------------------------------------------------------------------
// Single edits

namespace detail {

[[noreturn]] inline void Inapplicable(const PerturbationSite& site, const std::string& why) {
  throw PerturbError(PerturbError::Kind::kInapplicableSite, site.Describe() + ": " + why);
}

[[noreturn]] inline void Degenerate(const PerturbationSite& site, const std::string& why) {
  throw PerturbError(PerturbError::Kind::kDegenerateEdit, site.Describe() + ": " + why);
}

inline void RequireNode(const amr::Graph& graph, const PerturbationSite& site) {
  if (!graph.nodes.count(site.node)) Inapplicable(site, "no such node");
}

inline void RequireFamily(const PerturbationSite& site, Family family) {
  if (site.family != family || FamilyOf(site.variant) != family) {
    Inapplicable(site, "site does not belong to the " + std::string(ToString(family)) + " family");
  }
}

inline std::optional<std::size_t> FirstOutgoing(const amr::Graph& graph, const std::string& node,
                                                std::string_view role) {
  auto edges = amr::OutgoingEdges(graph, node, role);
  if (edges.empty()) return std::nullopt;
  return edges.front();
}

// Current value of the slot the site points at.
inline std::string SlotValue(const amr::Graph& graph, const PerturbationSite& site) {
  if (IsNameSlot(site.slot)) {
    RequireNode(graph, site);
    std::string value = NameValue(graph, site.node);
    if (value.empty()) Inapplicable(site, "name node has no :op values");
    return value;
  }
  if (!site.edge || *site.edge >= graph.edges.size()) Inapplicable(site, "no such edge");
  const amr::Edge& e = graph.edges[*site.edge];
  if (e.source != site.node || !e.target.is_constant()) {
    Inapplicable(site, "edge is not a constant attribute of the node");
  }
  return e.target.text();
}

inline amr::Graph ReplaceSlotValue(const amr::Graph& graph, const PerturbationSite& site,
                                   const std::string& replacement) {
  const std::string current = SlotValue(graph, site);
  if (replacement == current) Degenerate(site, "replacement equals the current value");
  if (replacement.empty()) Inapplicable(site, "empty replacement");
  amr::Graph out = graph;
  if (IsNameSlot(site.slot)) {
    const auto ops = NameOps(graph, site.node);
    const std::size_t insert_at = ops.front();
    std::vector<amr::Edge> edges;
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
      if (i == insert_at) {
        int index = 1;
        for (const std::string& part : text::Split(replacement, ' ')) {
          if (part.empty()) continue;
          edges.push_back({site.node, "op" + std::to_string(index++), amr::EdgeTarget::String(part)});
        }
      }
      if (std::find(ops.begin(), ops.end(), i) == ops.end()) edges.push_back(graph.edges[i]);
    }
    out.edges = std::move(edges);
  } else {
    out.edges[*site.edge].target = amr::ConstantFromText(replacement);
  }
  return out;
}

inline amr::Graph SwapArguments(const amr::Graph& graph, const PerturbationSite& site) {
  const auto arg0 = FirstOutgoing(graph, site.node, "ARG0");
  const auto arg1 = FirstOutgoing(graph, site.node, "ARG1");
  if (!arg0 || !arg1) Inapplicable(site, "node needs both :ARG0 and :ARG1");
  if (graph.edges[*arg0].target == graph.edges[*arg1].target) {
    Degenerate(site, ":ARG0 and :ARG1 point at the same value");
  }
  amr::Graph out = graph;
  std::swap(out.edges[*arg0].target, out.edges[*arg1].target);
  return out;
}

// Replaces a modal wrapper node by its :ARG1 child.
inline amr::Graph RemoveWrapper(const amr::Graph& graph, const PerturbationSite& site) {
  const auto arg1 = FirstOutgoing(graph, site.node, "ARG1");
  if (!arg1 || !graph.edges[*arg1].target.is_variable()) {
    Inapplicable(site, "modal wrapper needs an :ARG1 node to promote");
  }
  const std::string child = graph.edges[*arg1].target.text();
  amr::Graph out;
  out.metadata = graph.metadata;
  out.top = graph.top == site.node ? child : graph.top;
  for (const amr::Edge& e : graph.edges) {
    if (e.source == site.node) continue;
    amr::Edge copy = e;
    if (copy.target.is_variable() && copy.target.text() == site.node) {
      copy.target = amr::EdgeTarget::Variable(child);
    }
    out.edges.push_back(std::move(copy));
  }
  out.nodes = graph.nodes;
  out.nodes.erase(site.node);

  // Drop whatever hung only off the removed node.
  std::map<std::string, std::vector<std::string>> neighbours;
  for (const amr::Edge& e : out.edges) {
    if (!e.target.is_variable()) continue;
    neighbours[e.source].push_back(e.target.text());
    neighbours[e.target.text()].push_back(e.source);
  }
  std::set<std::string> keep{out.top};
  std::vector<std::string> stack{out.top};
  while (!stack.empty()) {
    std::string v = std::move(stack.back());
    stack.pop_back();
    for (const auto& n : neighbours[v]) {
      if (keep.insert(n).second) stack.push_back(n);
    }
  }
  std::erase_if(out.nodes, [&](const auto& kv) { return !keep.count(kv.first); });
  std::erase_if(out.edges, [&](const amr::Edge& e) { return !keep.count(e.source); });
  return out;
}

}  // namespace detail

// polarity-add, polarity-remove, antonym. When `lexicon` is given the
// antonym payload is checked against it.
inline amr::Graph PerturbPredicate(const amr::Graph& graph, const PerturbationSite& site,
                                   const AntonymLexicon* lexicon = nullptr) {
  detail::RequireFamily(site, Family::kPredicate);
  detail::RequireNode(graph, site);
  amr::Graph out = graph;
  switch (site.variant) {
    case Variant::kPolarityAdd:
      if (amr::PolarityEdge(graph, site.node)) detail::Inapplicable(site, "already negated");
      out.edges.push_back({site.node, "polarity", amr::EdgeTarget::Symbol("-")});
      return out;
    case Variant::kPolarityRemove: {
      const auto edge = amr::PolarityEdge(graph, site.node);
      if (!edge) detail::Inapplicable(site, "node carries no :polarity -");
      out.edges.erase(out.edges.begin() + static_cast<std::ptrdiff_t>(*edge));
      return out;
    }
    case Variant::kAntonym: {
      const std::string& concept_name = graph.nodes.at(site.node);
      if (!site.payload || site.payload->empty()) detail::Inapplicable(site, "no antonym payload");
      if (lexicon) {
        const auto* entries = lexicon->Find(concept_name);
        const bool listed = entries && std::any_of(entries->begin(), entries->end(), [&](const auto& e) {
                              return e.replacement == *site.payload;
                            });
        if (!listed) detail::Inapplicable(site, "no lexicon entry for '" + concept_name + "'");
      }
      if (*site.payload == concept_name) detail::Degenerate(site, "antonym equals the concept");
      out.nodes[site.node] = *site.payload;
      return out;
    }
    default:
      detail::Inapplicable(site, "not a predicate variant");
  }
}

// agent-patient-swap and entity-substitute (name or quant slots).
inline amr::Graph PerturbEntity(const amr::Graph& graph, const PerturbationSite& site) {
  detail::RequireFamily(site, Family::kEntity);
  detail::RequireNode(graph, site);
  switch (site.variant) {
    case Variant::kAgentPatientSwap:
      return detail::SwapArguments(graph, site);
    case Variant::kEntitySubstitute:
      if (!IsEntitySlot(site.slot)) detail::Inapplicable(site, "slot is not a name or quantity");
      if (!site.payload) detail::Inapplicable(site, "no replacement value");
      return detail::ReplaceSlotValue(graph, site, *site.payload);
    default:
      detail::Inapplicable(site, "not an entity variant");
  }
}

// modality-strengthen and circumstance-substitute (location, date, time).
// Without a payload the modality step is looked up in `modality`.
inline amr::Graph PerturbCircumstance(const amr::Graph& graph, const PerturbationSite& site,
                                      const ModalityMap* modality = nullptr) {
  detail::RequireFamily(site, Family::kCircumstance);
  detail::RequireNode(graph, site);
  switch (site.variant) {
    case Variant::kModalityStrengthen: {
      const std::string& concept_name = graph.nodes.at(site.node);
      std::optional<std::string> stronger = site.payload;
      if (modality) {
        auto step = modality->Stronger(concept_name);
        if (!step) detail::Inapplicable(site, "'" + concept_name + "' is already at the top of the modality scale");
        if (!stronger) stronger = step;
      }
      if (!stronger) detail::Inapplicable(site, "no stronger modal for '" + concept_name + "'");
      if (stronger->empty()) return detail::RemoveWrapper(graph, site);
      if (*stronger == concept_name) detail::Degenerate(site, "modal unchanged");
      amr::Graph out = graph;
      out.nodes[site.node] = *stronger;
      return out;
    }
    case Variant::kCircumstanceSubstitute:
      if (!IsCircumstanceSlot(site.slot)) detail::Inapplicable(site, "slot is not a location, date or time");
      if (!site.payload) detail::Inapplicable(site, "no replacement value");
      return detail::ReplaceSlotValue(graph, site, *site.payload);
    default:
      detail::Inapplicable(site, "not a circumstance variant");
  }
}

// temporal-flip and causality-reverse.
inline amr::Graph PerturbDiscourse(const amr::Graph& graph, const PerturbationSite& site) {
  detail::RequireFamily(site, Family::kDiscourseLink);
  detail::RequireNode(graph, site);
  amr::Graph out = graph;
  switch (site.variant) {
    case Variant::kTemporalFlip: {
      const std::string& concept_name = graph.nodes.at(site.node);
      if (concept_name == "before") {
        out.nodes[site.node] = "after";
      } else if (concept_name == "after") {
        out.nodes[site.node] = "before";
      } else if (concept_name == "now") {
        if (!site.payload || (*site.payload != "before" && *site.payload != "after")) {
          detail::Inapplicable(site, "'now' needs a before/after payload");
        }
        out.nodes[site.node] = *site.payload;
      } else {
        detail::Inapplicable(site, "'" + concept_name + "' is not a temporal connective");
      }
      return out;
    }
    case Variant::kCausalityReverse: {
      if (site.edge) {
        if (*site.edge >= graph.edges.size()) detail::Inapplicable(site, "no such edge");
        amr::Edge& e = out.edges[*site.edge];
        if (e.role != "cause" || e.source != site.node || !e.target.is_variable()) {
          detail::Inapplicable(site, "edge is not a :cause relation of the node");
        }
        const std::string effect = e.source;
        const std::string cause = e.target.text();
        e.source = cause;
        e.target = amr::EdgeTarget::Variable(effect);
        if (out.top == effect) out.top = cause;
        return out;
      }
      if (graph.nodes.at(site.node) != "cause-01") {
        detail::Inapplicable(site, "causality reversal needs a cause-01 node or a :cause edge");
      }
      return detail::SwapArguments(graph, site);
    }
    default:
      detail::Inapplicable(site, "not a discourse-link variant");
  }
}

// Values from the corpus-wide pool whose tokens are absent from the
// document, excluding `current`.
inline std::vector<std::string> ForeignCandidates(const PerturbationContext& ctx,
                                                  const std::string& slot,
                                                  const std::string& current) {
  std::vector<std::string> result;
  auto it = ctx.global_pool.find(slot);
  if (it == ctx.global_pool.end()) return result;
  for (const std::string& value : it->second) {
    if (value != current && IsForeign(value, ctx.doc_vocabulary)) result.push_back(value);
  }
  return result;
}

// foreign-substitute. The payload is re-checked against the document
// vocabulary; without a payload one is drawn from the global pool.
inline amr::Graph PerturbOutOfArticle(const amr::Graph& graph, const PerturbationSite& site,
                                      const PerturbationContext& ctx) {
  detail::RequireFamily(site, Family::kOutOfArticle);
  detail::RequireNode(graph, site);
  if (!IsEntitySlot(site.slot) && !IsCircumstanceSlot(site.slot)) {
    detail::Inapplicable(site, "slot is not an entity, time or location value");
  }
  const std::string current = detail::SlotValue(graph, site);
  std::string payload;
  if (site.payload) {
    payload = *site.payload;
    if (!IsForeign(payload, ctx.doc_vocabulary)) {
      detail::Inapplicable(site, "'" + payload + "' occurs in the source document");
    }
  } else {
    const auto candidates = ForeignCandidates(ctx, site.slot, current);
    if (candidates.empty()) detail::Inapplicable(site, "global pool has no document-foreign value");
    KeyedRng rng(ctx.rng_seed, GraphKey(graph), Fnv1a64(site.Describe()));
    payload = candidates[rng.Index(candidates.size())];
  }
  return detail::ReplaceSlotValue(graph, site, payload);
}

inline amr::Graph Apply(const amr::Graph& graph, const PerturbationSite& site,
                        const PerturbationContext& ctx) {
  switch (site.family) {
    case Family::kPredicate: return PerturbPredicate(graph, site, &ctx.antonyms);
    case Family::kEntity: return PerturbEntity(graph, site);
    case Family::kCircumstance: return PerturbCircumstance(graph, site, &ctx.modality);
    case Family::kDiscourseLink: return PerturbDiscourse(graph, site);
    case Family::kOutOfArticle: return PerturbOutOfArticle(graph, site, ctx);
  }
  detail::Inapplicable(site, "unknown family");
}

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

// Every site of every family, with payloads left unset. Order: family, then
// variant, then canonical node order.
inline std::vector<PerturbationSite> RawSites(const amr::Graph& graph,
                                              const PerturbationContext& ctx) {
  std::vector<PerturbationSite> sites;
  const std::vector<std::string> order = amr::CanonicalOrder(graph);
  const std::vector<ValueSlot> slots = FindValueSlots(graph);

  auto node_site = [](Variant v, const std::string& node) {
    PerturbationSite s;
    s.family = FamilyOf(v);
    s.variant = v;
    s.node = node;
    return s;
  };
  auto slot_site = [](Variant v, const ValueSlot& slot) {
    PerturbationSite s;
    s.family = FamilyOf(v);
    s.variant = v;
    s.node = slot.node;
    s.edge = slot.edge;
    s.slot = slot.slot;
    return s;
  };
  auto has_args = [&](const std::string& node) {
    return FirstOutgoing(graph, node, "ARG0") && FirstOutgoing(graph, node, "ARG1");
  };

  // Predicate
  for (const auto& v : order) {
    if (amr::IsFrameConcept(graph.nodes.at(v)) && !amr::PolarityEdge(graph, v)) {
      sites.push_back(node_site(Variant::kPolarityAdd, v));
    }
  }
  for (const auto& v : order) {
    if (amr::PolarityEdge(graph, v)) sites.push_back(node_site(Variant::kPolarityRemove, v));
  }
  for (const auto& v : order) {
    if (ctx.antonyms.Find(graph.nodes.at(v))) sites.push_back(node_site(Variant::kAntonym, v));
  }
  // Entity. cause-01 argument swaps belong to the discourse family.
  for (const auto& v : order) {
    const std::string& concept_name = graph.nodes.at(v);
    if (amr::IsFrameConcept(concept_name) && concept_name != "cause-01" && has_args(v)) {
      sites.push_back(node_site(Variant::kAgentPatientSwap, v));
    }
  }
  for (const auto& slot : slots) {
    if (IsEntitySlot(slot.slot)) sites.push_back(slot_site(Variant::kEntitySubstitute, slot));
  }
  // Circumstance
  for (const auto& v : order) {
    if (ctx.modality.Stronger(graph.nodes.at(v))) {
      sites.push_back(node_site(Variant::kModalityStrengthen, v));
    }
  }
  for (const auto& slot : slots) {
    if (IsCircumstanceSlot(slot.slot)) {
      sites.push_back(slot_site(Variant::kCircumstanceSubstitute, slot));
    }
  }
  // Discourse link
  for (const auto& v : order) {
    const std::string& concept_name = graph.nodes.at(v);
    if (concept_name == "before" || concept_name == "after" || concept_name == "now") {
      sites.push_back(node_site(Variant::kTemporalFlip, v));
    }
  }
  for (const auto& v : order) {
    if (graph.nodes.at(v) == "cause-01" && has_args(v)) {
      sites.push_back(node_site(Variant::kCausalityReverse, v));
    }
    for (std::size_t i : amr::OutgoingEdges(graph, v, "cause")) {
      if (!graph.edges[i].target.is_variable()) continue;
      PerturbationSite s = node_site(Variant::kCausalityReverse, v);
      s.edge = i;
      sites.push_back(std::move(s));
    }
  }
  // Out of article
  for (const auto& slot : slots) sites.push_back(slot_site(Variant::kForeignSubstitute, slot));
  return sites;
}

inline std::vector<std::string> Without(const std::vector<std::string>* values,
                                        const std::string& current) {
  std::vector<std::string> result;
  if (!values) return result;
  for (const auto& v : *values) {
    if (v != current) result.push_back(v);
  }
  return result;
}

inline const std::vector<std::string>* PoolFor(const ValuePools& pools, const std::string& slot) {
  auto it = pools.find(slot);
  return it == pools.end() ? nullptr : &it->second;
}

// Fills the payload of a raw site. Returns false when nothing can be chosen.
inline bool ChoosePayload(const amr::Graph& graph, const PerturbationContext& ctx,
                          const std::string& key, std::size_t index, PerturbationSite& site) {
  KeyedRng rng(ctx.rng_seed, key, index);
  auto pick = [&](const std::vector<std::string>& options) -> bool {
    if (options.empty()) return false;
    site.payload = options[rng.Index(options.size())];
    return true;
  };
  switch (site.variant) {
    case Variant::kPolarityAdd:
    case Variant::kPolarityRemove:
    case Variant::kAgentPatientSwap:
    case Variant::kCausalityReverse:
      return true;
    case Variant::kAntonym: {
      const std::string& concept_name = graph.nodes.at(site.node);
      std::vector<std::string> options;
      for (const auto& e : *ctx.antonyms.Find(concept_name)) {
        if (e.replacement != concept_name) options.push_back(e.replacement);
      }
      return pick(options);
    }
    case Variant::kModalityStrengthen:
      site.payload = ctx.modality.Stronger(graph.nodes.at(site.node));
      return site.payload.has_value();
    case Variant::kTemporalFlip: {
      const std::string& concept_name = graph.nodes.at(site.node);
      if (concept_name == "now") return pick({"before", "after"});
      site.payload = concept_name == "before" ? "after" : "before";
      return true;
    }
    case Variant::kEntitySubstitute:
    case Variant::kCircumstanceSubstitute:
      return pick(Without(PoolFor(ctx.same_doc_pools, site.slot), SlotValue(graph, site)));
    case Variant::kForeignSubstitute:
      return pick(ForeignCandidates(ctx, site.slot, SlotValue(graph, site)));
  }
  return false;
}

}  // namespace detail

// Every applicable site across the enabled families. Payload choices are
// keyed on (ctx.rng_seed, graph key, site index) where the index counts
// sites over all families, so toggling a family never changes the choices
// made for the others.
inline std::vector<PerturbationSite> EnumerateSites(const amr::Graph& graph,
                                                    const PerturbationContext& ctx,
                                                    const PerturbConfig& config = {}) {
  const std::string key = GraphKey(graph);
  std::vector<PerturbationSite> raw = detail::RawSites(graph, ctx);

  std::array<std::vector<PerturbationSite>, 5> by_family;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    PerturbationSite& site = raw[i];
    if (!config.IsEnabled(site.family)) continue;
    if (!detail::ChoosePayload(graph, ctx, key, i, site)) continue;
    by_family[static_cast<std::size_t>(site.family)].push_back(std::move(site));
  }

  std::vector<PerturbationSite> sites;
  for (Family family : kAllFamilies) {
    const std::size_t f = static_cast<std::size_t>(family);
    std::vector<PerturbationSite>& group = by_family[f];
    if (!config.exhaustive) {
      std::vector<PerturbationSite> one_per_variant;
      for (Variant v : kAllVariants) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < group.size(); ++i) {
          if (group[i].variant == v) members.push_back(i);
        }
        if (members.empty()) continue;
        KeyedRng rng(ctx.rng_seed, key + "#variant", static_cast<std::uint64_t>(v));
        one_per_variant.push_back(group[members[rng.Index(members.size())]]);
      }
      group = std::move(one_per_variant);
    }
    const std::size_t cap = config.MaxSites(family);
    if (cap > 0 && group.size() > cap) {
      KeyedRng rng(ctx.rng_seed, key + "#cap", f);
      std::vector<PerturbationSite> kept;
      for (std::size_t i : rng.Sample(group.size(), cap)) kept.push_back(group[i]);
      group = std::move(kept);
    }
    for (auto& site : group) sites.push_back(std::move(site));
  }
  return sites;
}

struct PerturbedGraph {
  PerturbationSite site;
  amr::Graph graph;
};

// Applies every enumerated site, dropping edits that turn out inapplicable,
// degenerate, or that would break a graph invariant (e.g. a causal re-hang
// closing a cycle).
inline std::vector<PerturbedGraph> ApplyAll(const amr::Graph& graph,
                                            const PerturbationContext& ctx,
                                            const PerturbConfig& config = {}) {
  std::vector<PerturbedGraph> results;
  for (const PerturbationSite& site : EnumerateSites(graph, ctx, config)) {
    try {
      amr::Graph perturbed = Apply(graph, site, ctx);
      amr::Validate(perturbed);
      if (!amr::AllReachable(perturbed)) continue;
      results.push_back({site, std::move(perturbed)});
    } catch (const PerturbError&) {
    } catch (const GraphError&) {
    }
  }
  return results;
}

}  // namespace amrperturb

#endif  // AMRPERTURB_PERTURB_HPP
