#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qforge/errors.hpp"

namespace qforge {

/// Problem taxonomy. Integer codes are part of the external contract
/// (reports carry them), so the values are fixed.
enum class ProblemTag : int {
  MaxCut = 0,
  MIS = 1,
  TSP = 2,
  Clique = 3,
  KColor = 4,
  VertexCover = 5,
  Factorization = 6,
  Add = 7,
  Mul = 8,
  Sub = 9,
  Unknown = 10,
};

inline const char* tag_name(ProblemTag t) {
  switch (t) {
    case ProblemTag::MaxCut: return "MaxCut";
    case ProblemTag::MIS: return "MIS";
    case ProblemTag::TSP: return "TSP";
    case ProblemTag::Clique: return "Clique";
    case ProblemTag::KColor: return "KColor";
    case ProblemTag::VertexCover: return "VertexCover";
    case ProblemTag::Factorization: return "Factorization";
    case ProblemTag::Add: return "Add";
    case ProblemTag::Mul: return "Mul";
    case ProblemTag::Sub: return "Sub";
    case ProblemTag::Unknown: return "Unknown";
  }
  return "Unknown";
}

inline bool is_graph_tag(ProblemTag t) {
  switch (t) {
    case ProblemTag::MaxCut:
    case ProblemTag::MIS:
    case ProblemTag::TSP:
    case ProblemTag::Clique:
    case ProblemTag::KColor:
    case ProblemTag::VertexCover:
      return true;
    default:
      return false;
  }
}

inline bool is_arithmetic_tag(ProblemTag t) {
  return t == ProblemTag::Add || t == ProblemTag::Mul || t == ProblemTag::Sub;
}

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

/// Simple undirected graph. Edges are stored canonically with u < v.
/// node_count may exceed the highest endpoint: isolated vertices are legal.
struct GraphData {
  int node_count = 0;
  std::vector<Edge> edges;
  std::optional<int> k;  // clique size / cover size / color count

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (const auto& e : edges)
      if (e.u == a && e.v == b) return true;
    return false;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (const auto& e : edges) {
      if (e.u == v) out.push_back(e.v);
      if (e.v == v) out.push_back(e.u);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
};

struct ArithmeticOperands {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  int width_a = 1;
  int width_b = 1;
  std::optional<int> width_c;  // defaults to width_a + width_b for Mul

  int product_width() const { return width_c ? *width_c : width_a + width_b; }
};

struct ProblemInstance {
  ProblemTag tag = ProblemTag::Unknown;
  std::variant<std::monostate, GraphData, ArithmeticOperands, std::uint64_t> data;

  const GraphData& graph() const { return std::get<GraphData>(data); }
  const ArithmeticOperands& operands() const { return std::get<ArithmeticOperands>(data); }
  std::uint64_t factor_target() const { return std::get<std::uint64_t>(data); }
};

/// Deterministic Miller-Rabin, exact for all 64-bit inputs with this
/// witness set.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  auto mulmod = [](std::uint64_t a, std::uint64_t b, std::uint64_t m) -> std::uint64_t {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
  };
  auto powmod = [&](std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1;
    a %= m;
    while (e) {
      if (e & 1) r = mulmod(r, a, m);
      a = mulmod(a, a, m);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

namespace detail {

inline void check_graph(const GraphData& g) {
  if (g.node_count < 0) throw MalformedGraph("negative node count");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= g.node_count || e.v >= g.node_count)
      throw MalformedGraph("edge endpoint out of range: (" + std::to_string(e.u) + "," +
                           std::to_string(e.v) + ") with " + std::to_string(g.node_count) + " nodes");
    if (e.u == e.v) throw MalformedGraph("self-loop on vertex " + std::to_string(e.u));
    if (e.u > e.v) throw MalformedGraph("edge not canonicalized (u > v)");
    if (!std::isfinite(e.w)) throw MalformedGraph("non-finite edge weight");
    if (!seen.insert({e.u, e.v}).second)
      throw MalformedGraph("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
  }
}

inline void check_operands(const ArithmeticOperands& o) {
  if (o.width_a < 1 || o.width_b < 1 || (o.width_c && *o.width_c < 1))
    throw OperandOverflow("operand widths must be at least 1");
  if (o.width_a < 64 && o.a >= (1ULL << o.width_a))
    throw OperandOverflow("a = " + std::to_string(o.a) + " does not fit in " +
                          std::to_string(o.width_a) + " bits");
  if (o.width_b < 64 && o.b >= (1ULL << o.width_b))
    throw OperandOverflow("b = " + std::to_string(o.b) + " does not fit in " +
                          std::to_string(o.width_b) + " bits");
}

}  // namespace detail

/// Canonicalizes edge direction to (min, max). Input convenience only;
/// duplicates after canonicalization are still rejected.
inline GraphData canonical_graph(GraphData g) {
  for (auto& e : g.edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::sort(g.edges.begin(), g.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return g;
}

/// Checks all type invariants and returns the instance unchanged.
/// Idempotent: a validated instance validates to an identical value.
inline ProblemInstance validate_instance(ProblemInstance inst) {
  switch (inst.tag) {
    case ProblemTag::Unknown:
      throw TagDataMismatch("Unknown instances are rejected");
    case ProblemTag::MaxCut:
    case ProblemTag::MIS:
    case ProblemTag::TSP:
    case ProblemTag::Clique:
    case ProblemTag::KColor:
    case ProblemTag::VertexCover: {
      if (!std::holds_alternative<GraphData>(inst.data))
        throw TagDataMismatch(std::string(tag_name(inst.tag)) + " requires graph data");
      detail::check_graph(inst.graph());
      const auto& g = inst.graph();
      if (inst.tag == ProblemTag::Clique || inst.tag == ProblemTag::VertexCover ||
          inst.tag == ProblemTag::KColor) {
        if (g.k && (*g.k < 1 || *g.k > std::max(1, g.node_count)))
          throw MalformedGraph("parameter k out of range");
      }
      break;
    }
    case ProblemTag::Factorization: {
      if (!std::holds_alternative<std::uint64_t>(inst.data))
        throw TagDataMismatch("Factorization requires an integer N");
      std::uint64_t n = inst.factor_target();
      if (n < 4) throw TagDataMismatch("N must be at least 4");
      if (is_prime_u64(n)) throw TagDataMismatch("N = " + std::to_string(n) + " is prime");
      break;
    }
    case ProblemTag::Add:
    case ProblemTag::Mul:
    case ProblemTag::Sub: {
      if (!std::holds_alternative<ArithmeticOperands>(inst.data))
        throw TagDataMismatch(std::string(tag_name(inst.tag)) + " requires integer operands");
      detail::check_operands(inst.operands());
      break;
    }
  }
  return inst;
}

}  // namespace qforge
