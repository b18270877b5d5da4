#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qforge/errors.hpp"
#include "qforge/problem.hpp"

namespace qforge {

// ---------------------------------------------------------------------------
// JSON specification path
// ---------------------------------------------------------------------------

/// Case-insensitive problem-type aliases. Long and short names both appear
/// in the wild, so we accept both.
inline ProblemTag tag_from_name(std::string name) {
  for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::map<std::string, ProblemTag> aliases = {
      {"maxcut", ProblemTag::MaxCut},
      {"max_cut", ProblemTag::MaxCut},
      {"mis", ProblemTag::MIS},
      {"maximumindependentset", ProblemTag::MIS},
      {"independentset", ProblemTag::MIS},
      {"tsp", ProblemTag::TSP},
      {"travelingsalesman", ProblemTag::TSP},
      {"travellingsalesman", ProblemTag::TSP},
      {"clique", ProblemTag::Clique},
      {"kcolor", ProblemTag::KColor},
      {"k_color", ProblemTag::KColor},
      {"kcoloring", ProblemTag::KColor},
      {"vc", ProblemTag::VertexCover},
      {"vertexcover", ProblemTag::VertexCover},
      {"vertex_cover", ProblemTag::VertexCover},
      {"factor", ProblemTag::Factorization},
      {"factorization", ProblemTag::Factorization},
      {"factorisation", ProblemTag::Factorization},
      {"add", ProblemTag::Add},
      {"addition", ProblemTag::Add},
      {"mul", ProblemTag::Mul},
      {"multiplication", ProblemTag::Mul},
      {"sub", ProblemTag::Sub},
      {"subtraction", ProblemTag::Sub},
  };
  std::string squashed;
  for (char c : name)
    if (c != '_' && c != '-' && c != ' ') squashed.push_back(c);
  auto it = aliases.find(name);
  if (it == aliases.end()) it = aliases.find(squashed);
  return it == aliases.end() ? ProblemTag::Unknown : it->second;
}

namespace detail {

inline GraphData graph_from_edge_json(const nlohmann::json& edges) {
  GraphData g;
  int max_node = -1;
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3)
      throw MissingDataField("edge entries must be [u,v] or [u,v,w]");
    Edge edge;
    edge.u = e[0].get<int>();
    edge.v = e[1].get<int>();
    edge.w = e.size() == 3 ? e[2].get<double>() : 1.0;
    max_node = std::max({max_node, edge.u, edge.v});
    g.edges.push_back(edge);
  }
  g.node_count = max_node + 1;
  return canonical_graph(g);
}

/// Square symmetric zero-diagonal matrix -> edge list; entry (i,j) != 0
/// becomes an edge of that weight.
inline GraphData graph_from_matrix_json(const nlohmann::json& m, bool require_symmetric = true) {
  const int n = static_cast<int>(m.size());
  GraphData g;
  g.node_count = n;
  for (int i = 0; i < n; ++i) {
    if (!m[i].is_array() || static_cast<int>(m[i].size()) != n)
      throw MissingDataField("matrix must be square");
    for (int j = 0; j < n; ++j) {
      double w = m[i][j].get<double>();
      if (i == j && w != 0.0) throw MalformedGraph("matrix diagonal must be zero");
      if (require_symmetric && w != m[j][i].get<double>())
        throw MalformedGraph("matrix must be symmetric");
      if (i < j && w != 0.0) g.edges.push_back({i, j, w});
    }
  }
  return g;
}

}  // namespace detail

/// Parses a JSON problem specification:
///   {"problem_type": <name>, "data": {...}}
/// The data object carries exactly the fields the problem type requires
/// (edges/matrix for graph problems, distance_matrix for TSP, a/b for
/// arithmetic, N for factorization, k where applicable).
inline ProblemInstance parse_json_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw JsonSyntaxError(e.what());
  }
  if (!j.contains("problem_type")) throw MissingDataField("problem_type");
  ProblemTag tag = tag_from_name(j["problem_type"].get<std::string>());
  if (tag == ProblemTag::Unknown)
    throw UnknownProblemType(j["problem_type"].get<std::string>());
  if (!j.contains("data") || !j["data"].is_object()) throw MissingDataField("data");
  const auto& d = j["data"];

  ProblemInstance inst;
  inst.tag = tag;
  try {
    if (is_graph_tag(tag)) {
      GraphData g;
      if (tag == ProblemTag::TSP && d.contains("distance_matrix"))
        g = detail::graph_from_matrix_json(d["distance_matrix"]);
      else if (d.contains("edges"))
        g = detail::graph_from_edge_json(d["edges"]);
      else if (d.contains("matrix"))
        g = detail::graph_from_matrix_json(d["matrix"]);
      else
        throw MissingDataField(tag == ProblemTag::TSP ? "distance_matrix or edges" : "edges or matrix");
      if (d.contains("nodes") && d["nodes"].is_number_integer())
        g.node_count = std::max(g.node_count, d["nodes"].get<int>());
      if (d.contains("k")) g.k = d["k"].get<int>();
      else if (tag == ProblemTag::Clique || tag == ProblemTag::KColor)
        throw MissingDataField("k");
      inst.data = std::move(g);
    } else if (is_arithmetic_tag(tag)) {
      if (!d.contains("a") || !d.contains("b")) throw MissingDataField("a and b");
      ArithmeticOperands o;
      o.a = d["a"].get<std::uint64_t>();
      o.b = d["b"].get<std::uint64_t>();
      auto bits_for = [](std::uint64_t v) {
        int w = 1;
        while (v >> w) ++w;
        return w;
      };
      o.width_a = d.contains("width_a") ? d["width_a"].get<int>() : bits_for(o.a);
      o.width_b = d.contains("width_b") ? d["width_b"].get<int>() : bits_for(o.b);
      if (d.contains("width_c")) o.width_c = d["width_c"].get<int>();
      inst.data = o;
    } else {  // Factorization
      if (!d.contains("N")) throw MissingDataField("N");
      inst.data = d["N"].get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw MissingDataField(e.what());
  }
  return validate_instance(inst);
}

/// Inverse of parse_json_spec. parse(serialize(inst)) == inst for every
/// validated instance.
inline std::string serialize_instance(const ProblemInstance& inst) {
  nlohmann::ordered_json j;
  j["problem_type"] = tag_name(inst.tag);
  nlohmann::ordered_json d;
  if (is_graph_tag(inst.tag)) {
    const auto& g = inst.graph();
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) edges.push_back({e.u, e.v, e.w});
    d["edges"] = edges;
    d["nodes"] = g.node_count;
    if (g.k) d["k"] = *g.k;
  } else if (is_arithmetic_tag(inst.tag)) {
    const auto& o = inst.operands();
    d["a"] = o.a;
    d["b"] = o.b;
    d["width_a"] = o.width_a;
    d["width_b"] = o.width_b;
    if (o.width_c) d["width_c"] = *o.width_c;
  } else {
    d["N"] = inst.factor_target();
  }
  j["data"] = d;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Structured-snippet path
// ---------------------------------------------------------------------------
//
// The snippet subset accepts one statement per line:
//   blank | comment (#...) | def name(...): | name = <literal> | return name
// where <literal> is an integer, a list of integers, a list of pairs or
// triples, or a rectangular list of lists. Anything else makes the snippet
// fall outside the subset and it classifies as Unknown.

struct SnippetSource {
  std::string text;
};

namespace snippet {

struct Literal {
  enum Kind { Int, IntList, PairList, Matrix } kind;
  std::int64_t int_value = 0;
  std::vector<std::int64_t> ints;
  std::vector<std::array<double, 3>> pairs;  // [u, v, w]; w defaults to 1
  std::vector<std::vector<double>> matrix;
};

struct Parsed {
  bool well_formed = false;
  std::map<std::string, Literal> assignments;  // last assignment wins
  std::vector<std::string> tokens;             // identifiers + comment words, lowercased
};

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Recursive-descent parse of one literal. Grammar (after whitespace strip):
///   int | '[' items ']' where items are ints, (u,v[,w]) tuples or [..] rows.
class LiteralParser {
 public:
  explicit LiteralParser(std::string_view s) : s_(s) {}

  std::optional<Literal> parse() {
    skip();
    auto lit = value();
    skip();
    if (!lit || pos_ != s_.size()) return std::nullopt;
    return lit;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::optional<double> number() {
    skip();
    size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    bool digits = false, dot = false;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits = true;
        ++pos_;
      } else if (c == '.' && !dot) {
        dot = true;
        ++pos_;
      } else {
        break;
      }
    }
    if (!digits) {
      pos_ = start;
      return std::nullopt;
    }
    return std::stod(std::string(s_.substr(start, pos_ - start)));
  }

  std::optional<Literal> value() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '[') return list();
    auto n = number();
    if (!n || *n != std::floor(*n)) return std::nullopt;
    Literal lit;
    lit.kind = Literal::Int;
    lit.int_value = static_cast<std::int64_t>(*n);
    return lit;
  }

  // One tuple "(u, v[, w])" of numbers.
  std::optional<std::array<double, 3>> tuple() {
    if (!eat('(')) return std::nullopt;
    auto u = number();
    if (!u || !eat(',')) return std::nullopt;
    auto v = number();
    if (!v) return std::nullopt;
    std::array<double, 3> t{*u, *v, 1.0};
    if (eat(',')) {
      auto w = number();
      if (!w) return std::nullopt;
      t[2] = *w;
    }
    if (!eat(')')) return std::nullopt;
    return t;
  }

  // Inner "[a, b, ...]" row of plain numbers.
  std::optional<std::vector<double>> row() {
    if (!eat('[')) return std::nullopt;
    std::vector<double> out;
    if (eat(']')) return out;
    while (true) {
      auto n = number();
      if (!n) return std::nullopt;
      out.push_back(*n);
      if (eat(']')) return out;
      if (!eat(',')) return std::nullopt;
    }
  }

  std::optional<Literal> list() {
    if (!eat('[')) return std::nullopt;
    Literal lit;
    skip();
    if (eat(']')) {
      lit.kind = Literal::IntList;
      return lit;
    }
    // Decide element shape from the first element.
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      lit.kind = Literal::PairList;
      while (true) {
        auto t = tuple();
        if (!t) return std::nullopt;
        lit.pairs.push_back(*t);
        if (eat(']')) return lit;
        if (!eat(',')) return std::nullopt;
      }
    }
    if (pos_ < s_.size() && s_[pos_] == '[') {
      lit.kind = Literal::Matrix;
      size_t width = 0;
      while (true) {
        auto r = row();
        if (!r) return std::nullopt;
        if (lit.matrix.empty()) width = r->size();
        if (r->size() != width) return std::nullopt;  // must be rectangular
        lit.matrix.push_back(*r);
        if (eat(']')) {
          // A list of pairs written with brackets is a pair list, not a
          // matrix, when rows have width 2 or 3 and the shape is ragged-free
          // non-square. Keep it a matrix; extraction decides by shape.
          return lit;
        }
        if (!eat(',')) return std::nullopt;
      }
    }
    lit.kind = Literal::IntList;
    while (true) {
      auto n = number();
      if (!n || *n != std::floor(*n)) return std::nullopt;
      lit.ints.push_back(static_cast<std::int64_t>(*n));
      if (eat(']')) return lit;
      if (!eat(',')) return std::nullopt;
    }
  }
};

inline void collect_word_tokens(const std::string& text, std::vector<std::string>& out) {
  std::string cur;
  for (char c : text) {
    if (ident_char(c)) {
      cur.push_back(c);
    } else {
      if (!cur.empty()) out.push_back(lower(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(lower(cur));
}

/// Splits into lines, validates each against the subset grammar, and
/// records assignments and cue tokens. well_formed is false as soon as a
/// single line falls outside the subset.
inline Parsed parse_snippet(const std::string& text) {
  Parsed p;
  p.well_formed = true;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    std::string line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    start = end == std::string::npos ? text.size() + 1 : end + 1;

    // strip leading/trailing whitespace
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;  // blank
    size_t e2 = line.find_last_not_of(" \t\r");
    line = line.substr(b, e2 - b + 1);

    if (line[0] == '#') {
      collect_word_tokens(line, p.tokens);
      continue;
    }
    if (line.rfind("def ", 0) == 0) {
      size_t paren = line.find('(');
      if (paren == std::string::npos || line.back() != ':') {
        p.well_formed = false;
        continue;
      }
      collect_word_tokens(line.substr(0, paren), p.tokens);
      continue;
    }
    if (line.rfind("return", 0) == 0) {
      std::string rest = line.substr(6);
      for (char c : rest)
        if (!ident_char(c) && !std::isspace(static_cast<unsigned char>(c))) {
          p.well_formed = false;
          break;
        }
      continue;
    }
    // assignment: name = literal
    size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      p.well_formed = false;
      continue;
    }
    std::string name = line.substr(0, eq);
    size_t ne = name.find_last_not_of(" \t");
    name = name.substr(0, ne == std::string::npos ? 0 : ne + 1);
    if (name.empty() || !std::all_of(name.begin(), name.end(), ident_char) ||
        std::isdigit(static_cast<unsigned char>(name[0]))) {
      p.well_formed = false;
      continue;
    }
    LiteralParser lp(std::string_view(line).substr(eq + 1));
    auto lit = lp.parse();
    if (!lit) {
      p.well_formed = false;
      continue;
    }
    p.tokens.push_back(lower(name));
    p.assignments[lower(name)] = *lit;
  }
  return p;
}

struct Cue {
  std::string_view token;
  ProblemTag tag;
};

/// Cue lexicon: one token, one tag. Multi-tag conflicts in a snippet
/// classify as Unknown rather than guessing.
inline const std::vector<Cue>& cue_lexicon() {
  static const std::vector<Cue> lex = {
      {"maxcut", ProblemTag::MaxCut},
      {"max_cut", ProblemTag::MaxCut},
      {"cut", ProblemTag::MaxCut},
      {"mis", ProblemTag::MIS},
      {"independent_set", ProblemTag::MIS},
      {"independent", ProblemTag::MIS},
      {"tsp", ProblemTag::TSP},
      {"tour", ProblemTag::TSP},
      {"salesman", ProblemTag::TSP},
      {"traveling_salesman", ProblemTag::TSP},
      {"clique", ProblemTag::Clique},
      {"kcolor", ProblemTag::KColor},
      {"k_color", ProblemTag::KColor},
      {"coloring", ProblemTag::KColor},
      {"colouring", ProblemTag::KColor},
      {"chromatic", ProblemTag::KColor},
      {"vertex_cover", ProblemTag::VertexCover},
      {"cover", ProblemTag::VertexCover},
      {"factor", ProblemTag::Factorization},
      {"factorial", ProblemTag::Unknown},  // guards the "factor" prefix
      {"factorize", ProblemTag::Factorization},
      {"factorization", ProblemTag::Factorization},
      {"semiprime", ProblemTag::Factorization},
      {"add", ProblemTag::Add},
      {"addition", ProblemTag::Add},
      {"sum", ProblemTag::Add},
      {"plus", ProblemTag::Add},
      {"mul", ProblemTag::Mul},
      {"multiply", ProblemTag::Mul},
      {"multiplication", ProblemTag::Mul},
      {"product", ProblemTag::Mul},
      {"times", ProblemTag::Mul},
      {"sub", ProblemTag::Sub},
      {"subtract", ProblemTag::Sub},
      {"subtraction", ProblemTag::Sub},
      {"minus", ProblemTag::Sub},
      {"difference", ProblemTag::Sub},
  };
  return lex;
}

/// Multi-word cues match against underscore-joined token windows, so both
/// "independent_set" and "independent set" (two comment words) fire.
inline std::vector<ProblemTag> matched_tags(const std::vector<std::string>& tokens) {
  std::vector<ProblemTag> hits;
  auto consider = [&](const std::string& word) {
    for (const auto& cue : cue_lexicon())
      if (word == cue.token) hits.push_back(cue.tag);
  };
  for (size_t i = 0; i < tokens.size(); ++i) {
    consider(tokens[i]);
    if (i + 1 < tokens.size()) consider(tokens[i] + "_" + tokens[i + 1]);
  }
  // Identifiers such as "solve_maxcut" or "find_independent_set": split on
  // underscores and retry the windows.
  std::vector<std::string> parts;
  for (const auto& t : tokens) {
    parts.clear();
    std::string cur;
    for (char c : t) {
      if (c == '_') {
        if (!cur.empty()) parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) parts.push_back(cur);
    if (parts.size() < 2) continue;
    for (size_t i = 0; i < parts.size(); ++i) {
      consider(parts[i]);
      if (i + 1 < parts.size()) consider(parts[i] + "_" + parts[i + 1]);
    }
  }
  return hits;
}

}  // namespace snippet

/// Rule-based replacement for the neural snippet classifier. Deterministic;
/// Unknown is the total fallback (grammar violation, no cue, or cue
/// conflict).
inline ProblemTag classify_snippet(const SnippetSource& src) {
  auto parsed = snippet::parse_snippet(src.text);
  if (!parsed.well_formed) return ProblemTag::Unknown;
  auto hits = snippet::matched_tags(parsed.tokens);
  ProblemTag tag = ProblemTag::Unknown;
  for (ProblemTag h : hits) {
    if (h == ProblemTag::Unknown) return ProblemTag::Unknown;  // guard cue
    if (tag == ProblemTag::Unknown) tag = h;
    else if (tag != h) return ProblemTag::Unknown;  // conflicting cues
  }
  return tag;
}

namespace snippet {

inline bool looks_like_adjacency(const Literal& lit) {
  if (lit.kind != Literal::Matrix) return false;
  const auto& m = lit.matrix;
  const size_t n = m.size();
  if (n == 0 || m[0].size() != n) return false;
  for (size_t i = 0; i < n; ++i) {
    if (m[i][i] != 0.0) return false;
    for (size_t j = 0; j < n; ++j)
      if (m[i][j] != m[j][i]) return false;
  }
  return true;
}

inline GraphData graph_from_literal(const Literal& lit) {
  GraphData g;
  if (lit.kind == Literal::PairList) {
    int max_node = -1;
    for (const auto& t : lit.pairs) {
      Edge e{static_cast<int>(t[0]), static_cast<int>(t[1]), t[2]};
      max_node = std::max({max_node, e.u, e.v});
      g.edges.push_back(e);
    }
    g.node_count = max_node + 1;
    return canonical_graph(g);
  }
  if (looks_like_adjacency(lit)) {
    const auto& m = lit.matrix;
    const int n = static_cast<int>(m.size());
    g.node_count = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (m[i][j] != 0.0) g.edges.push_back({i, j, m[i][j]});
    return g;
  }
  throw ExtractionFailed("no edge list or adjacency matrix literal");
}

}  // namespace snippet

/// Recovers the problem data for a classified snippet. Only literal data is
/// recovered; dynamic constructs (file reads, helper calls) are reported as
/// ExtractionFailed rather than guessed at.
inline ProblemInstance extract_snippet_data(const SnippetSource& src, ProblemTag tag) {
  if (tag == ProblemTag::Unknown) throw ExtractionFailed("cannot extract data for Unknown");
  auto parsed = snippet::parse_snippet(src.text);
  if (!parsed.well_formed) throw ExtractionFailed("snippet outside the structured subset");

  using snippet::Literal;
  ProblemInstance inst;
  inst.tag = tag;

  auto find_graph = [&]() -> GraphData {
    // Prefer conventional names, then fall back to any literal of the
    // right shape.
    for (const char* name : {"edges", "edge_list", "graph", "matrix", "adjacency",
                             "adjacency_matrix", "adj", "distance_matrix", "distances"}) {
      auto it = parsed.assignments.find(name);
      if (it == parsed.assignments.end()) continue;
      if (it->second.kind == Literal::PairList || it->second.kind == Literal::Matrix)
        return snippet::graph_from_literal(it->second);
    }
    for (const auto& [name, lit] : parsed.assignments) {
      if (lit.kind == Literal::PairList) return snippet::graph_from_literal(lit);
      if (lit.kind == Literal::Matrix && snippet::looks_like_adjacency(lit))
        return snippet::graph_from_literal(lit);
    }
    throw ExtractionFailed("no edge list or adjacency matrix literal found");
  };

  auto find_int = [&](std::initializer_list<const char*> names) -> std::optional<std::int64_t> {
    for (const char* name : names) {
      auto it = parsed.assignments.find(name);
      if (it != parsed.assignments.end() && it->second.kind == Literal::Int)
        return it->second.int_value;
    }
    return std::nullopt;
  };

  if (is_graph_tag(tag)) {
    GraphData g = find_graph();
    if (auto k = find_int({"k", "size", "colors", "num_colors"})) g.k = static_cast<int>(*k);
    if (auto n = find_int({"nodes", "n", "num_nodes", "vertices"}))
      g.node_count = std::max<int>(g.node_count, static_cast<int>(*n));
    inst.data = std::move(g);
  } else if (is_arithmetic_tag(tag)) {
    auto a = find_int({"a", "x", "lhs", "first"});
    auto b = find_int({"b", "y", "rhs", "second"});
    if (!a || !b) {
      // fall back: the first two integer assignments in order of name
      std::vector<std::int64_t> ints;
      for (const auto& [name, lit] : parsed.assignments)
        if (lit.kind == Literal::Int) ints.push_back(lit.int_value);
      if (ints.size() < 2) throw ExtractionFailed("need two integer operands");
      a = ints[0];
      b = ints[1];
    }
    if (*a < 0 || *b < 0) throw ExtractionFailed("operands must be non-negative");
    ArithmeticOperands o;
    o.a = static_cast<std::uint64_t>(*a);
    o.b = static_cast<std::uint64_t>(*b);
    auto bits_for = [](std::uint64_t v) {
      int w = 1;
      while (v >> w) ++w;
      return w;
    };
    o.width_a = bits_for(o.a);
    o.width_b = bits_for(o.b);
    inst.data = o;
  } else {  // Factorization
    auto n = find_int({"n", "number", "target"});
    if (!n) {
      for (const auto& [name, lit] : parsed.assignments)
        if (lit.kind == Literal::Int && lit.int_value >= 4) {
          n = lit.int_value;
          break;
        }
    }
    if (!n || *n < 0) throw ExtractionFailed("no integer N literal found");
    inst.data = static_cast<std::uint64_t>(*n);
  }
  try {
    return validate_instance(inst);
  } catch (const Error& e) {
    throw ExtractionFailed(std::string("extracted data failed validation: ") + e.what());
  }
}

}  // namespace qforge
