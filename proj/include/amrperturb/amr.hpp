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

// AMR graphs in PENMAN notation.
//
// A Graph stores every relation in forward direction: an inverse role such as
// `:ARG0-of` is normalized on input, so `(g / go-02 :ARG0-of (b / boy))`
// becomes the edge (b, ARG0, g). The serializer reintroduces `-of` roles
// whenever a node can only be reached from `top` against edge direction.
//
// Supported grammar:
//
//   node     := '(' VAR '/' CONCEPT relation* ')'
//   relation := ':' ROLE (node | VAR | constant)
//   constant := '"' chars '"' | number | symbol
//
// Lines of the form `# ::key value` before a graph populate its metadata.
// Other `#` comments are skipped. Surface alignments and wiki links are not
// part of the grammar.

#ifndef AMRPERTURB_AMR_HPP
#define AMRPERTURB_AMR_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amrperturb/error.hpp"

namespace amrperturb::amr {

// Either a reference to a variable or a constant. Constants keep their
// surface text; strings are stored unquoted.
class EdgeTarget {
 public:
  enum class Kind { kVariable, kString, kNumber, kSymbol };

  EdgeTarget() = default;

  static EdgeTarget Variable(std::string id) { return {Kind::kVariable, std::move(id)}; }
  static EdgeTarget String(std::string value) { return {Kind::kString, std::move(value)}; }
  static EdgeTarget Number(std::string value) { return {Kind::kNumber, std::move(value)}; }
  static EdgeTarget Symbol(std::string value) { return {Kind::kSymbol, std::move(value)}; }

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; }
  bool is_variable() const { return kind_ == Kind::kVariable; }
  bool is_constant() const { return kind_ != Kind::kVariable; }

  auto operator<=>(const EdgeTarget&) const = default;

 private:
  EdgeTarget(Kind kind, std::string text) : kind_(kind), text_(std::move(text)) {}

  Kind kind_ = Kind::kSymbol;
  std::string text_;
};

struct Edge {
  std::string source;
  std::string role;
  EdgeTarget target;

  auto operator<=>(const Edge&) const = default;
};

struct Graph {
  std::string top;
  std::map<std::string, std::string> nodes;  // variable -> concept
  std::vector<Edge> edges;                   // insertion order
  std::vector<std::pair<std::string, std::string>> metadata;

  bool operator==(const Graph&) const = default;

  const std::string& concept_of(const std::string& variable) const {
    return nodes.at(variable);
  }
};

inline const std::string* MetadataValue(const Graph& graph, std::string_view key) {
  for (const auto& [k, v] : graph.metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

// Roles that end in "-of" but are not inverses.
inline constexpr std::array<std::string_view, 3> kOfSuffixedRoles = {
    "consist-of", "prep-out-of", "prep-on-behalf-of"};

inline bool IsInverseRole(std::string_view role) {
  if (role.size() <= 3 || role.substr(role.size() - 3) != "-of") return false;
  return std::find(kOfSuffixedRoles.begin(), kOfSuffixedRoles.end(), role) ==
         kOfSuffixedRoles.end();
}

inline std::string InvertRole(std::string_view role) {
  return std::string(role) + "-of";
}

// PropBank framesets end in a dash and two digits, e.g. "work-01".
inline bool IsFrameConcept(std::string_view concept_name) {
  const std::size_t n = concept_name.size();
  return n > 3 && concept_name[n - 3] == '-' &&
         std::isdigit(static_cast<unsigned char>(concept_name[n - 2])) &&
         std::isdigit(static_cast<unsigned char>(concept_name[n - 1]));
}

inline bool LooksLikeNumber(std::string_view s) {
  static const std::regex kNumber(R"([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)");
  return !s.empty() && std::regex_match(s.begin(), s.end(), kNumber);
}

// Bare symbols of this shape are treated as variable references, so a typo
// like `:ARG0 b2` with no `b2` defined is reported instead of silently
// becoming a constant.
inline bool LooksLikeVariable(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

inline EdgeTarget ConstantFromText(std::string text) {
  if (LooksLikeNumber(text)) return EdgeTarget::Number(std::move(text));
  return EdgeTarget::String(std::move(text));
}

// ---------------------------------------------------------------------------
// Queries

inline std::vector<std::size_t> OutgoingEdges(const Graph& graph, std::string_view variable,
                                              std::string_view role = {}) {
  std::vector<std::size_t> result;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const Edge& e = graph.edges[i];
    if (e.source == variable && (role.empty() || e.role == role)) result.push_back(i);
  }
  return result;
}

inline std::vector<std::size_t> IncomingEdges(const Graph& graph, std::string_view variable,
                                              std::string_view role = {}) {
  std::vector<std::size_t> result;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const Edge& e = graph.edges[i];
    if (e.target.is_variable() && e.target.text() == variable &&
        (role.empty() || e.role == role)) {
      result.push_back(i);
    }
  }
  return result;
}

inline std::optional<std::size_t> PolarityEdge(const Graph& graph, std::string_view variable) {
  for (std::size_t i : OutgoingEdges(graph, variable, "polarity")) {
    const EdgeTarget& t = graph.edges[i].target;
    if (t.kind() == EdgeTarget::Kind::kSymbol && t.text() == "-") return i;
  }
  return std::nullopt;
}

// Same top, nodes and edge multiset. Edge order and metadata are ignored.
inline bool Equivalent(const Graph& a, const Graph& b) {
  if (a.top != b.top || a.nodes != b.nodes || a.edges.size() != b.edges.size()) return false;
  std::vector<Edge> ea = a.edges;
  std::vector<Edge> eb = b.edges;
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  return ea == eb;
}

// ---------------------------------------------------------------------------
// Validation

inline bool HasCycle(const Graph& graph) {
  std::map<std::string, std::vector<std::string>> children;
  for (const Edge& e : graph.edges) {
    if (e.target.is_variable()) children[e.source].push_back(e.target.text());
  }
  enum class Color { kWhite, kGrey, kBlack };
  std::map<std::string, Color> color;
  for (const auto& [v, _] : graph.nodes) color[v] = Color::kWhite;

  // Iterative DFS; graphs from real corpora can be deep enough to matter.
  for (const auto& [start, _] : graph.nodes) {
    if (color[start] != Color::kWhite) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
    color[start] = Color::kGrey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& kids = children[v];
      if (next < kids.size()) {
        const std::string& child = kids[next++];
        auto it = color.find(child);
        if (it == color.end()) continue;
        if (it->second == Color::kGrey) return true;
        if (it->second == Color::kWhite) {
          it->second = Color::kGrey;
          stack.emplace_back(child, 0);
        }
      } else {
        color[v] = Color::kBlack;
        stack.pop_back();
      }
    }
  }
  return false;
}

// Throws GraphError if any invariant of Graph is violated.
inline void Validate(const Graph& graph) {
  using Kind = GraphError::Kind;
  if (graph.nodes.empty()) throw GraphError(Kind::kInvalid, "graph has no nodes");
  if (!graph.nodes.count(graph.top)) {
    throw GraphError(Kind::kInvalid, "top '" + graph.top + "' is not a node");
  }
  for (const auto& [variable, concept_name] : graph.nodes) {
    if (variable.empty()) throw GraphError(Kind::kInvalid, "empty variable id");
    if (concept_name.empty()) {
      throw GraphError(Kind::kInvalid, "empty concept for variable '" + variable + "'");
    }
  }
  for (const Edge& e : graph.edges) {
    if (!graph.nodes.count(e.source)) {
      throw GraphError(Kind::kUndefinedVariable, "edge source '" + e.source + "' is not a node");
    }
    if (e.role.empty()) throw GraphError(Kind::kInvalid, "empty role on '" + e.source + "'");
    if (IsInverseRole(e.role)) {
      throw GraphError(Kind::kInvalid, "inverse role ':" + e.role + "' stored unnormalized");
    }
    if (e.target.is_variable() && !graph.nodes.count(e.target.text())) {
      throw GraphError(Kind::kUndefinedVariable,
                       "edge target '" + e.target.text() + "' is not a node");
    }
    if (e.role == "polarity" &&
        (e.target.kind() != EdgeTarget::Kind::kSymbol || e.target.text() != "-")) {
      throw GraphError(Kind::kInvalid, "polarity of '" + e.source + "' must be '-'");
    }
  }
  if (HasCycle(graph)) throw GraphError(Kind::kCycle, "graph contains a cycle");
}

inline bool IsValid(const Graph& graph) {
  try {
    Validate(graph);
    return true;
  } catch (const GraphError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct Token {
  enum class Type { kLParen, kRParen, kSlash, kRole, kString, kSymbol, kEnd };
  Type type = Type::kEnd;
  std::string text;
  TextPosition position;
};

class Lexer {
 public:
  explicit Lexer(std::string_view input) : input_(input) {}

  const Token& Peek() {
    if (!peeked_) {
      peeked_ = Scan();
    }
    return *peeked_;
  }

  Token Next() {
    Token t = Peek();
    peeked_.reset();
    return t;
  }

  // `# ::key value` comment lines seen so far, in input order.
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

  TextPosition position() const { return position_; }

 private:
  bool AtEnd() const { return position_.offset >= input_.size(); }
  char Current() const { return input_[position_.offset]; }

  void Advance() {
    if (Current() == '\n') {
      ++position_.line;
      position_.column = 1;
    } else {
      ++position_.column;
    }
    ++position_.offset;
  }

  static bool IsDelimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"' ||
           c == '/';
  }

  void ReadComment() {
    std::string line;
    while (!AtEnd() && Current() != '\n') {
      line.push_back(Current());
      Advance();
    }
    // "# ::id a ::snt some text" carries two fields.
    std::size_t pos = line.find("::");
    while (pos != std::string::npos) {
      std::size_t end = line.find(" ::", pos + 2);
      std::string field = line.substr(pos + 2, end == std::string::npos ? std::string::npos
                                                                        : end - pos - 2);
      std::size_t space = field.find_first_of(" \t");
      std::string key = field.substr(0, space);
      std::string value;
      if (space != std::string::npos) {
        std::size_t first = field.find_first_not_of(" \t", space);
        std::size_t last = field.find_last_not_of(" \t\r");
        if (first != std::string::npos) value = field.substr(first, last - first + 1);
      }
      while (!key.empty() && (key.back() == '\r')) key.pop_back();
      if (!key.empty()) metadata_.emplace_back(std::move(key), std::move(value));
      pos = end == std::string::npos ? end : end + 1;
    }
  }

  Token Scan() {
    while (!AtEnd()) {
      if (std::isspace(static_cast<unsigned char>(Current()))) {
        Advance();
      } else if (Current() == '#') {
        ReadComment();
      } else {
        break;
      }
    }
    Token token;
    token.position = position_;
    if (AtEnd()) return token;

    const char c = Current();
    if (c == '(' || c == ')' || c == '/') {
      token.type = c == '(' ? Token::Type::kLParen
                 : c == ')' ? Token::Type::kRParen
                            : Token::Type::kSlash;
      token.text = std::string(1, c);
      Advance();
      return token;
    }
    if (c == '"') {
      token.type = Token::Type::kString;
      Advance();
      while (true) {
        if (AtEnd()) throw GraphError(GraphError::Kind::kSyntax, "unterminated string", token.position);
        char ch = Current();
        Advance();
        if (ch == '"') break;
        if (ch == '\\') {
          if (AtEnd()) throw GraphError(GraphError::Kind::kSyntax, "unterminated string", token.position);
          ch = Current();
          Advance();
        }
        token.text.push_back(ch);
      }
      return token;
    }
    token.type = c == ':' ? Token::Type::kRole : Token::Type::kSymbol;
    if (c == ':') Advance();
    while (!AtEnd() && !IsDelimiter(Current())) {
      token.text.push_back(Current());
      Advance();
    }
    return token;
  }

  std::string_view input_;
  TextPosition position_;
  std::optional<Token> peeked_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

class PenmanParser {
 public:
  explicit PenmanParser(std::string_view input) : lexer_(input) {}

  std::vector<Graph> ParseAll() {
    std::vector<Graph> graphs;
    std::size_t consumed_metadata = 0;
    while (lexer_.Peek().type != Token::Type::kEnd) {
      const auto& metadata = lexer_.metadata();
      Graph graph;
      graph.metadata.assign(metadata.begin() + static_cast<std::ptrdiff_t>(consumed_metadata),
                            metadata.end());
      ParseGraph(graph);
      consumed_metadata = lexer_.metadata().size();
      graphs.push_back(std::move(graph));
    }
    return graphs;
  }

 private:
  struct PendingSymbol {
    std::size_t edge;
    bool inverse;
    TextPosition position;
  };

  [[noreturn]] static void Fail(const std::string& message, const TextPosition& position) {
    throw GraphError(GraphError::Kind::kSyntax, message, position);
  }

  Token Expect(Token::Type type, const char* what) {
    Token t = lexer_.Next();
    if (t.type != type) {
      Fail(std::string("expected ") + what + (t.type == Token::Type::kEnd ? ", found end of input"
                                                                           : ", found '" + t.text + "'"),
           t.position);
    }
    return t;
  }

  void ParseGraph(Graph& graph) {
    graph_ = &graph;
    pending_.clear();
    definitions_.clear();
    graph.top = ParseNode();
    for (const PendingSymbol& p : pending_) {
      Edge& e = graph.edges[p.edge];
      // For inverse roles the symbol ended up as the edge source.
      const std::string symbol = p.inverse ? e.source : e.target.text();
      if (graph.nodes.count(symbol)) {
        if (!p.inverse) e.target = EdgeTarget::Variable(symbol);
      } else if (p.inverse || LooksLikeVariable(symbol)) {
        throw GraphError(GraphError::Kind::kUndefinedVariable,
                         "undefined variable '" + symbol + "'", p.position);
      }
    }
    if (HasCycle(graph)) {
      throw GraphError(GraphError::Kind::kCycle,
                       "graph rooted at '" + graph.top + "' contains a cycle", definitions_[graph.top]);
    }
    Validate(graph);
  }

  std::string ParseNode() {
    Expect(Token::Type::kLParen, "'('");
    Token var = Expect(Token::Type::kSymbol, "variable");
    Expect(Token::Type::kSlash, "'/'");
    Token concept_name = Expect(Token::Type::kSymbol, "concept");
    if (graph_->nodes.count(var.text)) {
      throw GraphError(GraphError::Kind::kDuplicateVariable,
                       "variable '" + var.text + "' defined twice", var.position);
    }
    graph_->nodes.emplace(var.text, concept_name.text);
    definitions_.emplace(var.text, var.position);
    while (lexer_.Peek().type == Token::Type::kRole) ParseRelation(var.text);
    Expect(Token::Type::kRParen, "')' or role");
    return var.text;
  }

  void ParseRelation(const std::string& source) {
    Token role = lexer_.Next();
    if (role.text.empty()) Fail("empty role", role.position);
    const bool inverse = IsInverseRole(role.text);
    const std::string base = inverse ? role.text.substr(0, role.text.size() - 3) : role.text;

    const Token& next = lexer_.Peek();
    switch (next.type) {
      case Token::Type::kLParen: {
        // Reserve the slot first so edges keep document order.
        const std::size_t slot = graph_->edges.size();
        graph_->edges.emplace_back();
        const std::string child = ParseNode();
        if (inverse) {
          graph_->edges[slot] = {child, base, EdgeTarget::Variable(source)};
        } else {
          graph_->edges[slot] = {source, base, EdgeTarget::Variable(child)};
        }
        return;
      }
      case Token::Type::kString: {
        Token value = lexer_.Next();
        if (inverse) Fail("inverse role ':" + role.text + "' needs a variable", value.position);
        graph_->edges.push_back({source, base, EdgeTarget::String(value.text)});
        return;
      }
      case Token::Type::kSymbol: {
        Token value = lexer_.Next();
        if (LooksLikeNumber(value.text)) {
          if (inverse) Fail("inverse role ':" + role.text + "' needs a variable", value.position);
          graph_->edges.push_back({source, base, EdgeTarget::Number(value.text)});
          return;
        }
        pending_.push_back({graph_->edges.size(), inverse, value.position});
        if (inverse) {
          graph_->edges.push_back({value.text, base, EdgeTarget::Variable(source)});
        } else {
          graph_->edges.push_back({source, base, EdgeTarget::Symbol(value.text)});
        }
        return;
      }
      default:
        Fail("expected node, variable or constant after ':" + role.text + "'", next.position);
    }
  }

  Lexer lexer_;
  Graph* graph_ = nullptr;
  std::vector<PendingSymbol> pending_;
  std::map<std::string, TextPosition> definitions_;
};

}  // namespace detail

// Parses every graph in `text`. Graphs are usually separated by blank lines,
// but any whitespace works.
inline std::vector<Graph> ParsePenmanBlocks(std::string_view text) {
  return detail::PenmanParser(text).ParseAll();
}

// Parses exactly one graph.
inline Graph ParsePenman(std::string_view text) {
  std::vector<Graph> graphs = ParsePenmanBlocks(text);
  if (graphs.size() != 1) {
    throw GraphError(GraphError::Kind::kSyntax,
                     "expected exactly one graph, found " + std::to_string(graphs.size()));
  }
  return std::move(graphs.front());
}

// ---------------------------------------------------------------------------
// Canonical traversal
//
// Depth-first from `top`. At each node the incident edges are visited in
// insertion order: outgoing edges inline their target on first mention and
// print a bare reference afterwards. An incoming edge is emitted from this
// side with an inverse role only when its source cannot be reached from top
// along edge direction and has not been placed yet.

inline bool AllReachable(const Graph& graph) {
  if (!graph.nodes.count(graph.top)) return false;
  std::map<std::string, std::vector<std::string>> neighbours;
  for (const Edge& e : graph.edges) {
    if (!e.target.is_variable()) continue;
    neighbours[e.source].push_back(e.target.text());
    neighbours[e.target.text()].push_back(e.source);
  }
  std::set<std::string> seen{graph.top};
  std::vector<std::string> stack{graph.top};
  while (!stack.empty()) {
    std::string v = std::move(stack.back());
    stack.pop_back();
    for (const auto& n : neighbours[v]) {
      if (seen.insert(n).second) stack.push_back(n);
    }
  }
  return seen.size() == graph.nodes.size();
}

// Visitor needs:
//   void Open(std::string_view role, const std::string& variable, const std::string& concept);
//   void Close();
//   void Reference(std::string_view role, const std::string& variable);
//   void Attribute(std::string_view role, const EdgeTarget& constant);
// `role` is empty for the root and carries "-of" for inverted edges.
template <typename Visitor>
void TraverseCanonical(const Graph& graph, Visitor& visitor) {
  if (!AllReachable(graph)) {
    throw GraphError(GraphError::Kind::kUnreachable, "some nodes are unreachable from top '" +
                                                         graph.top + "'");
  }
  std::map<std::string, std::vector<std::size_t>> incident;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const Edge& e = graph.edges[i];
    incident[e.source].push_back(i);
    if (e.target.is_variable() && e.target.text() != e.source) {
      incident[e.target.text()].push_back(i);
    }
  }
  std::set<std::string> forward{graph.top};
  {
    std::vector<std::string> stack{graph.top};
    while (!stack.empty()) {
      const std::string v = std::move(stack.back());
      stack.pop_back();
      for (std::size_t i : incident[v]) {
        const Edge& e = graph.edges[i];
        if (e.source == v && e.target.is_variable() && forward.insert(e.target.text()).second) {
          stack.push_back(e.target.text());
        }
      }
    }
  }
  std::set<std::string> placed;
  std::vector<bool> emitted(graph.edges.size(), false);

  std::function<void(std::string_view, const std::string&)> visit =
      [&](std::string_view role, const std::string& variable) {
        placed.insert(variable);
        visitor.Open(role, variable, graph.nodes.at(variable));
        for (std::size_t i : incident[variable]) {
          if (emitted[i]) continue;
          const Edge& e = graph.edges[i];
          if (e.source == variable) {
            emitted[i] = true;
            if (!e.target.is_variable()) {
              visitor.Attribute(e.role, e.target);
            } else if (placed.count(e.target.text())) {
              visitor.Reference(e.role, e.target.text());
            } else {
              visit(e.role, e.target.text());
            }
          } else if (!forward.count(e.source) && !placed.count(e.source)) {
            emitted[i] = true;
            visit(InvertRole(e.role), e.source);
          }
          // Otherwise the source emits the edge itself.
        }
        visitor.Close();
      };
  visit({}, graph.top);
}

namespace detail {

inline void AppendConstant(std::string& out, const EdgeTarget& target) {
  if (target.kind() != EdgeTarget::Kind::kString) {
    out += target.text();
    return;
  }
  out.push_back('"');
  for (char c : target.text()) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
}

struct PenmanWriter {
  std::string out;

  void Open(std::string_view role, const std::string& variable, const std::string& concept_name) {
    if (!role.empty()) {
      out += " :";
      out += role;
      out.push_back(' ');
    }
    out += "(" + variable + " / " + concept_name;
  }
  void Close() { out.push_back(')'); }
  void Reference(std::string_view role, const std::string& variable) {
    out += " :";
    out += role;
    out += " " + variable;
  }
  void Attribute(std::string_view role, const EdgeTarget& constant) {
    out += " :";
    out += role;
    out.push_back(' ');
    AppendConstant(out, constant);
  }
};

struct OrderCollector {
  std::vector<std::string> order;
  void Open(std::string_view, const std::string& variable, const std::string&) {
    order.push_back(variable);
  }
  void Close() {}
  void Reference(std::string_view, const std::string&) {}
  void Attribute(std::string_view, const EdgeTarget&) {}
};

}  // namespace detail

// Single-line canonical PENMAN, e.g. `(w / want-01 :ARG0 (b / boy))`.
// Throws GraphError(kUnreachable) if a node cannot be reached from top.
inline std::string SerializePenman(const Graph& graph) {
  detail::PenmanWriter writer;
  TraverseCanonical(graph, writer);
  return std::move(writer.out);
}

// Metadata comment lines followed by the serialized graph.
inline std::string FormatBlock(const Graph& graph) {
  std::string out;
  for (const auto& [key, value] : graph.metadata) {
    out += "# ::" + key;
    if (!value.empty()) out += " " + value;
    out.push_back('\n');
  }
  out += SerializePenman(graph);
  out.push_back('\n');
  return out;
}

// Variables in order of definition in the canonical serialization. Nodes the
// traversal cannot reach are appended in id order.
inline std::vector<std::string> CanonicalOrder(const Graph& graph) {
  detail::OrderCollector collector;
  if (AllReachable(graph)) {
    TraverseCanonical(graph, collector);
  } else if (graph.nodes.count(graph.top)) {
    collector.order.push_back(graph.top);
  }
  std::set<std::string> seen(collector.order.begin(), collector.order.end());
  for (const auto& [variable, _] : graph.nodes) {
    if (!seen.count(variable)) collector.order.push_back(variable);
  }
  return std::move(collector.order);
}

// ---------------------------------------------------------------------------
// Node selection

class NodeSelector {
 public:
  enum class Kind { kConceptPattern, kIncomingRole, kOutgoingRole };

  // ECMAScript regex searched within the concept label.
  static NodeSelector ConceptPattern(std::string pattern) {
    return {Kind::kConceptPattern, std::move(pattern)};
  }
  static NodeSelector FrameConcept() { return ConceptPattern("-[0-9][0-9]$"); }
  static NodeSelector IncomingRole(std::string role) {
    return {Kind::kIncomingRole, std::move(role)};
  }
  static NodeSelector OutgoingRole(std::string role) {
    return {Kind::kOutgoingRole, std::move(role)};
  }

  Kind kind() const { return kind_; }
  const std::string& argument() const { return argument_; }

 private:
  NodeSelector(Kind kind, std::string argument) : kind_(kind), argument_(std::move(argument)) {}

  Kind kind_;
  std::string argument_;
};

inline std::vector<std::string> FindNodes(const Graph& graph, const NodeSelector& selector) {
  std::vector<std::string> result;
  std::optional<std::regex> pattern;
  if (selector.kind() == NodeSelector::Kind::kConceptPattern) pattern.emplace(selector.argument());
  for (const std::string& variable : CanonicalOrder(graph)) {
    bool match = false;
    switch (selector.kind()) {
      case NodeSelector::Kind::kConceptPattern:
        match = std::regex_search(graph.nodes.at(variable), *pattern);
        break;
      case NodeSelector::Kind::kIncomingRole:
        match = !IncomingEdges(graph, variable, selector.argument()).empty();
        break;
      case NodeSelector::Kind::kOutgoingRole:
        match = !OutgoingEdges(graph, variable, selector.argument()).empty();
        break;
    }
    if (match) result.push_back(variable);
  }
  return result;
}

}  // namespace amrperturb::amr

#endif  // AMRPERTURB_AMR_HPP
