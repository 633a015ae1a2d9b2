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

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "amrperturb/amr.hpp"
#include "amrperturb/lexicon.hpp"
#include "amrperturb/perturb.hpp"
#include "test_util.hpp"

namespace amrperturb {
namespace {

using amr::Graph;
using amr::ParsePenman;

// Graph as a multiset of facts; the diff of two of these is the edit.
std::multiset<std::string> Facts(const Graph& g) {
  std::multiset<std::string> facts;
  facts.insert("top " + g.top);
  for (const auto& [v, c] : g.nodes) facts.insert("node " + v + " " + c);
  for (const auto& e : g.edges) {
    facts.insert("edge " + e.source + " " + e.role + " " + std::to_string(static_cast<int>(e.target.kind())) +
                 " " + e.target.text());
  }
  return facts;
}

struct Diff {
  std::vector<std::string> removed;
  std::vector<std::string> added;
};

Diff Compare(const Graph& before, const Graph& after) {
  const auto a = Facts(before), b = Facts(after);
  Diff d;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d.removed));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(d.added));
  return d;
}

using Lines = std::vector<std::string>;

PerturbationSite Site(Variant v, std::string node, std::optional<std::string> payload = std::nullopt) {
  PerturbationSite s;
  s.family = FamilyOf(v);
  s.variant = v;
  s.node = std::move(node);
  s.payload = std::move(payload);
  return s;
}

PerturbationContext FixtureContext() {
  PerturbationContext ctx;
  ctx.antonyms = AntonymLexicon::Load(std::string(AMRPERTURB_DATA_DIR) + "/antonyms.tsv");
  ctx.modality = ModalityMap::Load(std::string(AMRPERTURB_DATA_DIR) + "/modality.tsv");
  ctx.rng_seed = 11;
  return ctx;
}

PerturbError::Kind ErrorKind(const std::function<void()>& f) {
  try {
    f();
  } catch (const PerturbError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no PerturbError";
  return PerturbError::Kind::kDegenerateEdit;
}

const char* kWork = "(w / work-01 :ARG0 (p / person :name (n / name :op1 \"Ann\" :op2 \"Lee\")) :location (c / city :name (n2 / name :op1 \"Oslo\")))";

TEST(Predicate, PolarityAddIsOneEdge) {
  const Graph g = ParsePenman(kWork);
  const Graph out = PerturbPredicate(g, Site(Variant::kPolarityAdd, "w"));
  const Diff d = Compare(g, out);
  EXPECT_TRUE(d.removed.empty());
  EXPECT_EQ(d.added, Lines{"edge w polarity 3 -"});
}

TEST(Predicate, PolarityAddThenRemoveIsIdentity) {
  const Graph g = ParsePenman(kWork);
  const Graph neg = PerturbPredicate(g, Site(Variant::kPolarityAdd, "w"));
  const Graph back = PerturbPredicate(neg, Site(Variant::kPolarityRemove, "w"));
  EXPECT_TRUE(amr::Equivalent(g, back));
  EXPECT_EQ(ErrorKind([&] { PerturbPredicate(neg, Site(Variant::kPolarityAdd, "w")); }),
            PerturbError::Kind::kInapplicableSite);
  EXPECT_EQ(ErrorKind([&] { PerturbPredicate(g, Site(Variant::kPolarityRemove, "w")); }),
            PerturbError::Kind::kInapplicableSite);
}

TEST(Predicate, AntonymReplacesOneConcept) {
  const PerturbationContext ctx = FixtureContext();
  const Graph g = ParsePenman(kWork);
  const Graph out = PerturbPredicate(g, Site(Variant::kAntonym, "w", "leisure-01"), &ctx.antonyms);
  const Diff d = Compare(g, out);
  EXPECT_EQ(d.removed, Lines{"node w work-01"});
  EXPECT_EQ(d.added, Lines{"node w leisure-01"});
  EXPECT_EQ(ErrorKind([&] { PerturbPredicate(g, Site(Variant::kAntonym, "w", "eat-01"), &ctx.antonyms); }),
            PerturbError::Kind::kInapplicableSite);
  EXPECT_EQ(ErrorKind([&] { PerturbPredicate(g, Site(Variant::kAntonym, "w", "work-01")); }),
            PerturbError::Kind::kDegenerateEdit);
}

TEST(Entity, SwapExchangesArgumentsAndIsAnInvolution) {
  const Graph g = ParsePenman("(s / sell-01 :ARG0 (m / man) :ARG1 (h / house) :ARG2 (w / woman))");
  const Graph out = PerturbEntity(g, Site(Variant::kAgentPatientSwap, "s"));
  const Diff d = Compare(g, out);
  EXPECT_EQ(d.removed, (Lines{"edge s ARG0 0 m", "edge s ARG1 0 h"}));
  EXPECT_EQ(d.added, (Lines{"edge s ARG0 0 h", "edge s ARG1 0 m"}));
  EXPECT_TRUE(amr::Equivalent(PerturbEntity(out, Site(Variant::kAgentPatientSwap, "s")), g));
  EXPECT_EQ(ErrorKind([&] { PerturbEntity(g, Site(Variant::kAgentPatientSwap, "m")); }),
            PerturbError::Kind::kInapplicableSite);
}

TEST(Entity, SwapOfSharedArgumentIsDegenerate) {
  const Graph g = ParsePenman("(h / hurt-01 :ARG0 (b / boy) :ARG1 b)");
  EXPECT_EQ(ErrorKind([&] { PerturbEntity(g, Site(Variant::kAgentPatientSwap, "h")); }),
            PerturbError::Kind::kDegenerateEdit);
}

TEST(Entity, NameSubstitution) {
  const Graph g = ParsePenman(kWork);
  const auto slots = FindValueSlots(g);
  ASSERT_EQ(slots.size(), 2u);
  EXPECT_EQ(slots[0].slot, "name");
  EXPECT_EQ(slots[0].value, "Ann Lee");
  EXPECT_EQ(slots[1].slot, "location");
  EXPECT_EQ(slots[1].value, "Oslo");

  PerturbationSite s = Site(Variant::kEntitySubstitute, "n", "Bo Ek Li");
  s.slot = "name";
  const Graph out = PerturbEntity(g, s);
  EXPECT_EQ(FindValueSlots(out)[0].value, "Bo Ek Li");
  EXPECT_EQ(FindValueSlots(out)[1].value, "Oslo");
  const Diff d = Compare(g, out);
  EXPECT_EQ(d.removed, (Lines{"edge n op1 1 Ann", "edge n op2 1 Lee"}));
  EXPECT_EQ(d.added, (Lines{"edge n op1 1 Bo", "edge n op2 1 Ek", "edge n op3 1 Li"}));

  s.payload = "Ann Lee";
  EXPECT_EQ(ErrorKind([&] { PerturbEntity(g, s); }), PerturbError::Kind::kDegenerateEdit);
}

TEST(Entity, QuantitySubstitution) {
  const Graph g = ParsePenman("(s / sell-01 :ARG1 (h / house :quant 12))");
  const auto slots = FindValueSlots(g);
  ASSERT_EQ(slots.size(), 1u);
  PerturbationSite s = Site(Variant::kEntitySubstitute, "h", "30");
  s.slot = "quant";
  s.edge = slots[0].edge;
  const Diff d = Compare(g, PerturbEntity(g, s));
  EXPECT_EQ(d.removed, Lines{"edge h quant 2 12"});
  EXPECT_EQ(d.added, Lines{"edge h quant 2 30"});
}

TEST(Circumstance, ModalityStepsUpTheScale) {
  const PerturbationContext ctx = FixtureContext();
  const Graph g = ParsePenman("(p / possible-01 :ARG1 (w / win-01 :ARG0 (t / team)))");
  const Diff d = Compare(g, PerturbCircumstance(g, Site(Variant::kModalityStrengthen, "p"), &ctx.modality));
  EXPECT_EQ(d.removed, Lines{"node p possible-01"});
  EXPECT_EQ(d.added, Lines{"node p likely-01"});
  const Graph top = ParsePenman("(o / obligate-01 :ARG2 (g / go-02))");
  EXPECT_EQ(ErrorKind([&] { PerturbCircumstance(top, Site(Variant::kModalityStrengthen, "o"), &ctx.modality); }),
            PerturbError::Kind::kInapplicableSite);
}

TEST(Circumstance, HedgeRemovalDropsTheWrapper) {
  const PerturbationContext ctx = FixtureContext();
  const Graph g = ParsePenman("(c / consider-02 :ARG0 (p / person) :ARG1 (w / win-01 :ARG0 p))");
  const Graph out = PerturbCircumstance(g, Site(Variant::kModalityStrengthen, "c"), &ctx.modality);
  EXPECT_TRUE(amr::Equivalent(out, ParsePenman("(w / win-01 :ARG0 (p / person))")))
      << amr::SerializePenman(out);

  // Nested wrapper: the parent now points at the wrapped clause.
  const Graph nested = ParsePenman("(s / say-01 :ARG1 (b / believe-01 :ARG1 (r / rain-01)))");
  const Graph out2 = PerturbCircumstance(nested, Site(Variant::kModalityStrengthen, "b"), &ctx.modality);
  EXPECT_TRUE(amr::Equivalent(out2, ParsePenman("(s / say-01 :ARG1 (r / rain-01))")))
      << amr::SerializePenman(out2);
}

TEST(Circumstance, DateSubstitution) {
  const Graph g = ParsePenman("(w / work-01 :time (d / date-entity :year 2019 :month 5))");
  const auto slots = FindValueSlots(g);
  ASSERT_EQ(slots.size(), 2u);
  EXPECT_EQ(slots[0].slot, "date:year");
  PerturbationSite s = Site(Variant::kCircumstanceSubstitute, "d", "2021");
  s.slot = slots[0].slot;
  s.edge = slots[0].edge;
  const Diff d = Compare(g, PerturbCircumstance(g, s));
  EXPECT_EQ(d.removed, Lines{"edge d year 2 2019"});
  EXPECT_EQ(d.added, Lines{"edge d year 2 2021"});
  s.slot = "quant";
  EXPECT_EQ(ErrorKind([&] { PerturbCircumstance(g, s); }), PerturbError::Kind::kInapplicableSite);
}

TEST(Discourse, TemporalFlip) {
  const Graph g = ParsePenman("(l / leave-11 :ARG0 (h / he) :time (a / after :op1 (m / meet-03)))");
  const Diff d = Compare(g, PerturbDiscourse(g, Site(Variant::kTemporalFlip, "a")));
  EXPECT_EQ(d.removed, Lines{"node a after"});
  EXPECT_EQ(d.added, Lines{"node a before"});
  EXPECT_EQ(ErrorKind([&] { PerturbDiscourse(g, Site(Variant::kTemporalFlip, "m")); }),
            PerturbError::Kind::kInapplicableSite);
}

TEST(Discourse, CauseEdgeIsRehung) {
  const Graph g = ParsePenman("(f / fall-01 :ARG1 (p / price) :cause (d / drop-01 :ARG1 (o / oil)))");
  PerturbationSite s = Site(Variant::kCausalityReverse, "f");
  s.edge = amr::OutgoingEdges(g, "f", "cause").at(0);
  const Graph out = PerturbDiscourse(g, s);
  EXPECT_TRUE(amr::Equivalent(
      out, ParsePenman("(d / drop-01 :ARG1 (o / oil) :cause (f / fall-01 :ARG1 (p / price)))")))
      << amr::SerializePenman(out);
  EXPECT_TRUE(amr::IsValid(out));
  EXPECT_TRUE(amr::Equivalent(PerturbDiscourse(out, [&] {
                                PerturbationSite back = Site(Variant::kCausalityReverse, "d");
                                back.edge = amr::OutgoingEdges(out, "d", "cause").at(0);
                                return back;
                              }()),
                              g));
}

TEST(Discourse, CauseFrameSwapsArguments) {
  const Graph g = ParsePenman("(c / cause-01 :ARG0 (r / rain-01) :ARG1 (d / delay-01))");
  const Diff d = Compare(g, PerturbDiscourse(g, Site(Variant::kCausalityReverse, "c")));
  EXPECT_EQ(d.removed, (Lines{"edge c ARG0 0 r", "edge c ARG1 0 d"}));
  EXPECT_EQ(d.added, (Lines{"edge c ARG0 0 d", "edge c ARG1 0 r"}));
}

TEST(Discourse, RehangThatClosesACycleIsDropped) {
  // d is reachable from f twice; reversing one :cause edge creates d -> f -> d.
  PerturbationContext ctx;
  const Graph g = ParsePenman("(f / fall-01 :cause (d / drop-01) :ARG1 (x / thing :mod d))");
  const auto sites = EnumerateSites(g, ctx);
  ASSERT_TRUE(std::any_of(sites.begin(), sites.end(),
                          [](const auto& s) { return s.variant == Variant::kCausalityReverse; }));
  for (const auto& r : ApplyAll(g, ctx)) EXPECT_TRUE(amr::IsValid(r.graph));
}

TEST(OutOfArticle, ForeignCheckIsTokenBased) {
  const std::set<std::string> vocab = text::TokenSet("Ann Lee worked in Oslo in 2019.");
  EXPECT_FALSE(IsForeign("Oslo", vocab));
  EXPECT_FALSE(IsForeign("Lee Park", vocab));
  EXPECT_TRUE(IsForeign("Bergen", vocab));
  EXPECT_FALSE(IsForeign("", vocab));
}

TEST(OutOfArticle, PayloadMustBeForeign) {
  const Graph g = ParsePenman(kWork);
  PerturbationContext ctx;
  ctx.doc_vocabulary = text::TokenSet("Ann Lee worked in Oslo. Bergen is mentioned.");
  ctx.global_pool["location"] = {"Oslo", "Bergen", "Paris", "Rome"};
  PerturbationSite s = Site(Variant::kForeignSubstitute, "n2", "Bergen");
  s.slot = "location";
  EXPECT_EQ(ErrorKind([&] { PerturbOutOfArticle(g, s, ctx); }), PerturbError::Kind::kInapplicableSite);
  s.payload.reset();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ctx.rng_seed = seed;
    const Graph out = PerturbOutOfArticle(g, s, ctx);
    const std::string v = FindValueSlots(out)[1].value;
    EXPECT_TRUE(v == "Paris" || v == "Rome") << v;
  }
  ctx.global_pool["location"] = {"Oslo", "Bergen"};
  EXPECT_EQ(ErrorKind([&] { PerturbOutOfArticle(g, s, ctx); }), PerturbError::Kind::kInapplicableSite);
}

TEST(Apply, RejectsWrongFamily) {
  const Graph g = ParsePenman(kWork);
  PerturbationSite s = Site(Variant::kPolarityAdd, "w");
  s.family = Family::kEntity;
  EXPECT_EQ(ErrorKind([&] { Apply(g, s, PerturbationContext{}); }), PerturbError::Kind::kInapplicableSite);
  EXPECT_EQ(ErrorKind([&] { Apply(g, Site(Variant::kPolarityAdd, "zz"), PerturbationContext{}); }),
            PerturbError::Kind::kInapplicableSite);
}

std::vector<Graph> Fixtures() {
  return amr::ParsePenmanBlocks(testing::ReadFile(testing::DataPath("graphs.penman")));
}

PerturbationContext CorpusContext(const std::vector<Graph>& graphs) {
  PerturbationContext ctx = FixtureContext();
  ctx.same_doc_pools = HarvestPools(graphs);
  ctx.global_pool = ctx.same_doc_pools;
  ctx.global_pool["name"].push_back("Zed Quill");
  ctx.global_pool["location"].push_back("Xanadu");
  ctx.global_pool["quant"].push_back("987654");
  ctx.doc_vocabulary = text::TokenSet("the boy went home");
  return ctx;
}

TEST(ApplyAll, EveryOutputIsAValidDistinctSingleEdit) {
  const auto graphs = Fixtures();
  const PerturbationContext ctx = CorpusContext(graphs);
  std::set<Variant> seen;
  for (const Graph& g : graphs) {
    for (const auto& r : ApplyAll(g, ctx)) {
      seen.insert(r.site.variant);
      EXPECT_EQ(r.site.family, FamilyOf(r.site.variant));
      ASSERT_TRUE(amr::IsValid(r.graph));
      EXPECT_FALSE(amr::Equivalent(r.graph, g)) << r.site.Describe();
      const std::string text = amr::SerializePenman(r.graph);
      EXPECT_TRUE(amr::Equivalent(ParsePenman(text), r.graph));
      const Diff d = Compare(g, r.graph);
      if (r.site.variant == Variant::kPolarityAdd) {
        EXPECT_EQ(d.added.size(), 1u);
        EXPECT_TRUE(d.removed.empty());
      } else if (r.site.variant == Variant::kPolarityRemove) {
        EXPECT_EQ(d.removed.size(), 1u);
        EXPECT_TRUE(d.added.empty());
      } else if (r.site.variant == Variant::kAntonym || r.site.variant == Variant::kTemporalFlip) {
        EXPECT_EQ(d.removed.size(), 1u);
        EXPECT_EQ(d.added.size(), 1u);
      } else if (r.site.variant == Variant::kAgentPatientSwap) {
        EXPECT_EQ(d.removed.size(), 2u);
        EXPECT_EQ(d.added.size(), 2u);
      }
    }
  }
  // All ten variants occur somewhere in the fixture set.
  EXPECT_EQ(seen.size(), kAllVariants.size());
}

TEST(Enumerate, DeterministicForFixedSeed) {
  const auto graphs = Fixtures();
  const PerturbationContext ctx = CorpusContext(graphs);
  PerturbationContext other = ctx;
  other.rng_seed = ctx.rng_seed + 1;
  bool any_difference = false;
  for (const Graph& g : graphs) {
    const auto a = EnumerateSites(g, ctx);
    EXPECT_EQ(a, EnumerateSites(g, ctx));
    if (a != EnumerateSites(g, other)) any_difference = true;
  }
  EXPECT_TRUE(any_difference);
}

TEST(Enumerate, FamilyTogglesDoNotShiftOtherChoices) {
  const auto graphs = Fixtures();
  const PerturbationContext ctx = CorpusContext(graphs);
  for (const Graph& g : graphs) {
    const auto all = EnumerateSites(g, ctx);
    for (Family f : kAllFamilies) {
      PerturbConfig only;
      for (Family h : kAllFamilies) only.SetEnabled(h, h == f);
      std::vector<PerturbationSite> expected;
      std::copy_if(all.begin(), all.end(), std::back_inserter(expected),
                   [&](const auto& s) { return s.family == f; });
      EXPECT_EQ(EnumerateSites(g, ctx, only), expected);
    }
  }
}

TEST(Enumerate, CapsAndSampling) {
  const auto graphs = Fixtures();
  const PerturbationContext ctx = CorpusContext(graphs);
  PerturbConfig capped;
  for (Family f : kAllFamilies) capped.SetMaxSites(f, 1);
  PerturbConfig sampled;
  sampled.exhaustive = false;
  for (const Graph& g : graphs) {
    const auto all = EnumerateSites(g, ctx);
    std::map<Family, int> per_family;
    for (const auto& s : EnumerateSites(g, ctx, capped)) {
      ++per_family[s.family];
      EXPECT_NE(std::find(all.begin(), all.end(), s), all.end());
    }
    for (const auto& [f, n] : per_family) EXPECT_EQ(n, 1);
    std::map<Variant, int> per_variant;
    for (const auto& s : EnumerateSites(g, ctx, sampled)) {
      ++per_variant[s.variant];
      EXPECT_NE(std::find(all.begin(), all.end(), s), all.end());
    }
    for (const auto& [v, n] : per_variant) EXPECT_EQ(n, 1);
  }
}

TEST(Enumerate, PredicateSitesOnNegatedClause) {
  PerturbationContext ctx = FixtureContext();
  const Graph g = ParsePenman("(g / go-02 :ARG0 (b / boy) :ARG4 (h / home) :polarity -)");
  PerturbConfig only;
  for (Family h : kAllFamilies) only.SetEnabled(h, h == Family::kPredicate);
  const auto sites = EnumerateSites(g, ctx, only);
  ASSERT_FALSE(sites.empty());
  EXPECT_EQ(sites[0].variant, Variant::kPolarityRemove);
  EXPECT_EQ(sites[0].node, "g");
  for (const auto& s : sites) EXPECT_NE(s.variant, Variant::kPolarityAdd);
}

}  // namespace
}  // namespace amrperturb
