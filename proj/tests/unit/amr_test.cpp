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
#include <random>
#include <set>
#include <string>
#include <vector>

#include "amrperturb/amr.hpp"
#include "test_util.hpp"

namespace amrperturb::amr {
namespace {

using testing::DataPath;
using testing::ReadFile;

Edge E(std::string s, std::string r, std::string t) {
  return {std::move(s), std::move(r), EdgeTarget::Variable(std::move(t))};
}

GraphError::Kind ParseErrorKind(const std::string& text) {
  try {
    ParsePenman(text);
  } catch (const GraphError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return GraphError::Kind::kInvalid;
}

TEST(Parse, MinimalGraph) {
  Graph g = ParsePenman("(g / go-02 :ARG0 (b / boy))");
  EXPECT_EQ(g.top, "g");
  EXPECT_EQ(g.nodes, (std::map<std::string, std::string>{{"g", "go-02"}, {"b", "boy"}}));
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0], E("g", "ARG0", "b"));
}

TEST(Parse, ReentrantVariableIsTargetOfTwoEdges) {
  Graph g = ParsePenman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
  EXPECT_EQ(g.nodes.size(), 3u);
  EXPECT_EQ(IncomingEdges(g, "b").size(), 2u);
  EXPECT_TRUE(std::find(g.edges.begin(), g.edges.end(), E("g", "ARG0", "b")) != g.edges.end());
}

TEST(Parse, CycleIsRejected) {
  EXPECT_EQ(ParseErrorKind("(a / x :R (b / y :R a))"), GraphError::Kind::kCycle);
}

TEST(Parse, CycleThroughInverseRoleIsRejected) {
  // a -R-> b, then b -S-> a from the inverse role.
  EXPECT_EQ(ParseErrorKind("(a / x :R (b / y) :S-of b)"), GraphError::Kind::kCycle);
  // Both edges point b -> a, so this one is fine.
  EXPECT_NO_THROW(ParsePenman("(a / x :R-of (b / y :R a))"));
}

TEST(Parse, InverseRolesAreNormalized) {
  Graph g = ParsePenman("(p / person :ARG0-of (t / teach-01 :ARG1 (m / math)))");
  EXPECT_EQ(g.top, "p");
  EXPECT_EQ(g.edges[0], E("t", "ARG0", "p"));
  for (const Edge& e : g.edges) EXPECT_FALSE(IsInverseRole(e.role)) << e.role;
}

TEST(Parse, OfSuffixedRolesThatAreNotInverses) {
  Graph g = ParsePenman("(g / group :consist-of (r / rebel))");
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0], E("g", "consist-of", "r"));
  EXPECT_FALSE(IsInverseRole("prep-on-behalf-of"));
  EXPECT_FALSE(IsInverseRole("prep-out-of"));
  EXPECT_TRUE(IsInverseRole("quant-of"));
}

TEST(Parse, Constants) {
  Graph g = ParsePenman(R"((x / thing :a "two words" :b 12 :c -3.5 :d expressive :e "esc \"q\" \\ b" :polarity -))");
  auto target = [&](const std::string& role) { return g.edges[OutgoingEdges(g, "x", role).at(0)].target; };
  EXPECT_EQ(target("a"), EdgeTarget::String("two words"));
  EXPECT_EQ(target("b"), EdgeTarget::Number("12"));
  EXPECT_EQ(target("c"), EdgeTarget::Number("-3.5"));
  EXPECT_EQ(target("d"), EdgeTarget::Symbol("expressive"));
  EXPECT_EQ(target("e"), EdgeTarget::String("esc \"q\" \\ b"));
  EXPECT_EQ(target("polarity"), EdgeTarget::Symbol("-"));
}

TEST(Parse, Metadata) {
  auto graphs = ParsePenmanBlocks("# ::id a1 ::snt The boy went.\n# plain comment\n(g / go-02)\n\n# ::id a2\n(b / boy)\n");
  ASSERT_EQ(graphs.size(), 2u);
  ASSERT_NE(MetadataValue(graphs[0], "id"), nullptr);
  EXPECT_EQ(*MetadataValue(graphs[0], "id"), "a1");
  EXPECT_EQ(*MetadataValue(graphs[0], "snt"), "The boy went.");
  EXPECT_EQ(*MetadataValue(graphs[1], "id"), "a2");
  EXPECT_EQ(MetadataValue(graphs[1], "snt"), nullptr);
}

TEST(Parse, Errors) {
  using K = GraphError::Kind;
  EXPECT_EQ(ParseErrorKind("(a / x :R (a / y))"), K::kDuplicateVariable);
  EXPECT_EQ(ParseErrorKind("(a / x :R b2)"), K::kUndefinedVariable);
  EXPECT_EQ(ParseErrorKind("(a / x :R-of zz)"), K::kUndefinedVariable);
  EXPECT_EQ(ParseErrorKind("(a / x :R (b / y)"), K::kSyntax);
  EXPECT_EQ(ParseErrorKind("(a x)"), K::kSyntax);
  EXPECT_EQ(ParseErrorKind("(a / x :R \"open)"), K::kSyntax);
  EXPECT_EQ(ParseErrorKind("(a / x :polarity +)"), K::kInvalid);
  EXPECT_EQ(ParseErrorKind(""), K::kSyntax);
  EXPECT_EQ(ParseErrorKind("(a / x) (b / y)"), K::kSyntax);
}

TEST(Parse, SyntaxErrorsCarryPosition) {
  try {
    ParsePenman("(a / x\n   :R (b / y\n   :S ))");
    FAIL() << "expected a syntax error";
  } catch (const GraphError& e) {
    ASSERT_TRUE(e.position().has_value());
    EXPECT_EQ(e.position()->line, 3u);
    EXPECT_EQ(e.position()->column, 7u);
  }
}

TEST(Parse, BareSymbolsResolveToDefinedVariables) {
  // "boy" is not a variable of the graph, so it stays a constant symbol.
  Graph g = ParsePenman("(a / x :R boy :S (b / y) :T b)");
  EXPECT_EQ(g.edges[0].target, EdgeTarget::Symbol("boy"));
  EXPECT_EQ(g.edges[2].target, EdgeTarget::Variable("b"));
}

TEST(Serialize, Canonical) {
  EXPECT_EQ(SerializePenman(ParsePenman("(g / go-02\n   :ARG0 (b / boy)\n   :polarity -)")),
            "(g / go-02 :ARG0 (b / boy) :polarity -)");
  EXPECT_EQ(SerializePenman(ParsePenman("(p / person :ARG0-of (t / teach-01))")),
            "(p / person :ARG0-of (t / teach-01))");
}

TEST(Serialize, BuiltGraphWithIncomingEdgeToTop) {
  Graph g;
  g.top = "b";
  g.nodes = {{"b", "boy"}, {"w", "want-01"}};
  g.edges = {E("w", "ARG0", "b")};
  EXPECT_EQ(SerializePenman(g), "(b / boy :ARG0-of (w / want-01))");
}

TEST(Serialize, UnreachableNodeThrows) {
  Graph g;
  g.top = "a";
  g.nodes = {{"a", "x"}, {"b", "y"}};
  try {
    SerializePenman(g);
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_EQ(e.kind(), GraphError::Kind::kUnreachable);
  }
}

TEST(RoundTrip, FixtureGraphs) {
  const auto graphs = ParsePenmanBlocks(ReadFile(DataPath("graphs.penman")));
  ASSERT_GE(graphs.size(), 50u);
  for (const Graph& g : graphs) {
    const std::string text = SerializePenman(g);
    const Graph back = ParsePenman(text);
    EXPECT_TRUE(Equivalent(g, back)) << text;
    EXPECT_EQ(SerializePenman(back), text);
  }
}

TEST(RoundTrip, FormatBlockKeepsMetadata) {
  const auto graphs = ParsePenmanBlocks(ReadFile(DataPath("graphs.penman")));
  std::string all;
  for (const Graph& g : graphs) all += FormatBlock(g) + "\n";
  const auto again = ParsePenmanBlocks(all);
  ASSERT_EQ(again.size(), graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    EXPECT_EQ(again[i].metadata, graphs[i].metadata);
    EXPECT_TRUE(Equivalent(again[i], graphs[i]));
  }
}

// Random rooted DAG: node i > 0 gets a parent among 0..i-1, plus extra edges
// that only go from lower to higher index, so the graph is acyclic. Some
// edges point towards the top to force inverse roles in the output.
Graph RandomDag(std::mt19937_64& rng, std::size_t n, bool allow_upward) {
  std::vector<std::string> order;
  for (std::size_t i = 0; i < n; ++i) order.push_back("v" + std::to_string(i));
  std::shuffle(order.begin(), order.end(), rng);
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes[order[i]] = "c" + std::to_string(rng() % 7) + (rng() % 2 ? "-01" : "");
  const std::string roles[] = {"ARG0", "ARG1", "mod", "op1", "time", "location"};
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t parent = rng() % i;
    g.edges.push_back(E(order[parent], roles[rng() % 6], order[i]));
  }
  const std::size_t extra = rng() % (n + 1);
  for (std::size_t k = 0; k < extra && n > 1; ++k) {
    std::size_t a = rng() % n, b = rng() % n;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    g.edges.push_back(E(order[a], roles[rng() % 6], order[b]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rng() % 4 == 0) g.edges.push_back({order[i], "quant", EdgeTarget::Number(std::to_string(rng() % 100))});
    if (rng() % 5 == 0) g.edges.push_back({order[i], "polarity", EdgeTarget::Symbol("-")});
    if (rng() % 6 == 0) g.edges.push_back({order[i], "op1", EdgeTarget::String("s " + std::to_string(rng() % 9))});
  }
  // With upward edges allowed the top may be any node; connectivity is
  // undirected so every node is still reachable.
  g.top = allow_upward ? order[rng() % n] : order[0];
  std::shuffle(g.edges.begin(), g.edges.end(), rng);
  return g;
}

TEST(RoundTrip, RandomDags) {
  std::mt19937_64 rng(20260101);
  for (int trial = 0; trial < 500; ++trial) {
    const Graph g = RandomDag(rng, 1 + rng() % 12, trial % 2 == 1);
    ASSERT_TRUE(IsValid(g));
    const std::string text = SerializePenman(g);
    const Graph back = ParsePenman(text);
    ASSERT_TRUE(Equivalent(g, back)) << text;
    ASSERT_EQ(SerializePenman(back), text);
  }
}

TEST(Validate, BackEdgeCreatesCycle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Graph g = RandomDag(rng, 2 + rng() % 10, false);
    ASSERT_FALSE(HasCycle(g));
    // Walk down from the top along tree edges, then point back up.
    std::string v = g.top;
    std::vector<std::string> path{v};
    while (true) {
      auto out = OutgoingEdges(g, v);
      std::erase_if(out, [&](std::size_t i) { return !g.edges[i].target.is_variable(); });
      if (out.empty()) break;
      v = g.edges[out[rng() % out.size()]].target.text();
      path.push_back(v);
    }
    if (path.size() < 2) continue;
    g.edges.push_back(E(path.back(), "ARG0", path[rng() % (path.size() - 1)]));
    EXPECT_TRUE(HasCycle(g));
    try {
      Validate(g);
      ADD_FAILURE() << "cycle not rejected";
    } catch (const GraphError& e) {
      EXPECT_EQ(e.kind(), GraphError::Kind::kCycle);
    }
  }
}

TEST(Validate, Invariants) {
  Graph g = ParsePenman("(a / x :R (b / y))");
  g.edges.push_back({"a", "ARG0-of", EdgeTarget::Variable("b")});
  EXPECT_FALSE(IsValid(g));
  g = ParsePenman("(a / x :R (b / y))");
  g.edges.push_back(E("a", "R", "zz"));
  EXPECT_FALSE(IsValid(g));
  g = ParsePenman("(a / x)");
  g.top = "q";
  EXPECT_FALSE(IsValid(g));
}

TEST(Select, FindNodesInCanonicalOrder) {
  Graph g = ParsePenman(
      "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b :location (c / city :name (n / name :op1 \"Rome\"))))");
  EXPECT_EQ(FindNodes(g, NodeSelector::FrameConcept()), (std::vector<std::string>{"w", "g"}));
  EXPECT_EQ(FindNodes(g, NodeSelector::IncomingRole("ARG0")), (std::vector<std::string>{"b"}));
  EXPECT_EQ(FindNodes(g, NodeSelector::OutgoingRole("name")), (std::vector<std::string>{"c"}));
  EXPECT_EQ(FindNodes(g, NodeSelector::ConceptPattern("^c")), (std::vector<std::string>{"c"}));
  EXPECT_EQ(CanonicalOrder(g), (std::vector<std::string>{"w", "b", "g", "c", "n"}));
}

TEST(Equivalent, IgnoresEdgeOrderAndMetadata) {
  Graph a = ParsePenman("(a / x :R (b / y) :S (c / z))");
  Graph b = a;
  std::reverse(b.edges.begin(), b.edges.end());
  b.metadata.push_back({"id", "q"});
  EXPECT_TRUE(Equivalent(a, b));
  b.edges[0].role = "T";
  EXPECT_FALSE(Equivalent(a, b));
}

}  // namespace
}  // namespace amrperturb::amr
