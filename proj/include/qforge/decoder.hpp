#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qforge/errors.hpp"
#include "qforge/problem.hpp"
#include "qforge/qcf.hpp"
#include "qforge/simulator.hpp"

namespace qforge {

/// Decoded classical answer. `value` holds a vertex set / partition side /
/// tour / assignment depending on the tag; factor pairs and integers use
/// the dedicated members.
struct Solution {
  ProblemTag tag = ProblemTag::Unknown;
  std::vector<int> value;                      // vertex ids, tour order, or colors
  std::optional<std::pair<std::uint64_t, std::uint64_t>> factors;
  std::optional<std::uint64_t> integer;
  double objective = 0.0;
  bool feasible = false;
  double confidence = 0.0;
  std::string bitstring;  // outcome the solution was decoded from, if any
};

// ---------------------------------------------------------------------------
// Classical feasibility / objective checks (shared by decode and brute
// force; the re-check makes decoder soundness a theorem, not a hope)
// ---------------------------------------------------------------------------

namespace classical {

inline bool independent(const GraphData& g, std::uint64_t set) {
  for (const auto& e : g.edges)
    if (((set >> e.u) & 1ULL) && ((set >> e.v) & 1ULL)) return false;
  return true;
}

inline bool covers(const GraphData& g, std::uint64_t set) {
  for (const auto& e : g.edges)
    if (!((set >> e.u) & 1ULL) && !((set >> e.v) & 1ULL)) return false;
  return true;
}

inline bool clique(const GraphData& g, std::uint64_t set) {
  for (int u = 0; u < g.node_count; ++u) {
    if (!((set >> u) & 1ULL)) continue;
    for (int v = u + 1; v < g.node_count; ++v) {
      if (!((set >> v) & 1ULL)) continue;
      if (!g.has_edge(u, v)) return false;
    }
  }
  return true;
}

inline double cut_weight(const GraphData& g, std::uint64_t side) {
  double w = 0.0;
  for (const auto& e : g.edges)
    if (((side >> e.u) & 1ULL) != ((side >> e.v) & 1ULL)) w += e.w;
  return w;
}

/// colors[v] in [0, k); returns false on a monochromatic edge.
inline bool proper_coloring(const GraphData& g, const std::vector<int>& colors) {
  for (const auto& e : g.edges)
    if (colors[e.u] == colors[e.v]) return false;
  return true;
}

/// One-hot TSP bitstring (variable c*n+p) -> order[p] = city, or nullopt
/// if the assignment is not a permutation.
inline std::optional<std::vector<int>> tour_from_bits(std::uint64_t bits, int n) {
  std::vector<int> order(n, -1);
  std::vector<int> seen(n, 0);
  for (int c = 0; c < n; ++c) {
    int pos = -1;
    for (int p = 0; p < n; ++p) {
      if (!((bits >> (c * n + p)) & 1ULL)) continue;
      if (pos >= 0) return std::nullopt;  // city at two positions
      pos = p;
    }
    if (pos < 0) return std::nullopt;
    if (order[pos] >= 0) return std::nullopt;  // two cities share a position
    order[pos] = c;
    seen[c] = 1;
  }
  return order;
}

inline std::optional<double> tour_length(const GraphData& g, const std::vector<int>& order) {
  auto d = detail::tsp_distance_matrix(g, -1.0);
  double total = 0.0;
  const int n = static_cast<int>(order.size());
  for (int p = 0; p < n; ++p) {
    double w = d[order[p]][order[(p + 1) % n]];
    if (w < 0.0) return std::nullopt;  // missing edge
    total += w;
  }
  return total;
}

/// KColor bitstring (variable v*k+c) -> colors, or nullopt unless exactly
/// one color per vertex.
inline std::optional<std::vector<int>> colors_from_bits(std::uint64_t bits, int n, int k) {
  std::vector<int> colors(n, -1);
  for (int v = 0; v < n; ++v) {
    for (int c = 0; c < k; ++c) {
      if (!((bits >> (v * k + c)) & 1ULL)) continue;
      if (colors[v] >= 0) return std::nullopt;
      colors[v] = c;
    }
    if (colors[v] < 0) return std::nullopt;
  }
  return colors;
}

inline std::vector<int> set_bits(std::uint64_t bits, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if ((bits >> i) & 1ULL) out.push_back(i);
  return out;
}

}  // namespace classical

// ---------------------------------------------------------------------------
// Decoding measured counts
// ---------------------------------------------------------------------------

namespace decode_detail {

struct Outcome {
  std::uint64_t bits = 0;
  long long count = 0;
  std::string key;
};

inline std::vector<Outcome> outcomes_of(const Counts& counts) {
  std::vector<Outcome> out;
  for (const auto& [key, count] : counts.histogram)
    out.push_back({key_to_bits(key), count, key});
  return out;
}

/// Candidate evaluation for QUBO-encoded combinatorial problems. feasible
/// plus an objective; better[a][b] says whether objective a beats b.
struct Scored {
  bool feasible = false;
  double objective = 0.0;
  Solution solution;
};

inline Scored score_outcome(std::uint64_t bits, const ProblemInstance& inst, const VarMap& vm) {
  Scored s;
  const GraphData& g = inst.graph();
  Solution& sol = s.solution;
  sol.tag = inst.tag;
  switch (inst.tag) {
    case ProblemTag::MaxCut: {
      s.feasible = true;
      s.objective = classical::cut_weight(g, bits);
      sol.value = classical::set_bits(bits, g.node_count);
      break;
    }
    case ProblemTag::MIS: {
      s.feasible = classical::independent(g, bits);
      s.objective = static_cast<double>(std::popcount(bits));
      sol.value = classical::set_bits(bits, g.node_count);
      break;
    }
    case ProblemTag::VertexCover: {
      s.feasible = classical::covers(g, bits);
      s.objective = static_cast<double>(std::popcount(bits));
      sol.value = classical::set_bits(bits, g.node_count);
      break;
    }
    case ProblemTag::Clique: {
      const int size = std::popcount(bits);
      s.feasible = classical::clique(g, bits) && (!g.k || size >= *g.k) && size > 0;
      s.objective = static_cast<double>(size);
      sol.value = classical::set_bits(bits, g.node_count);
      break;
    }
    case ProblemTag::TSP: {
      auto order = classical::tour_from_bits(bits, g.node_count);
      if (!order) {
        s.feasible = false;
        break;
      }
      auto len = classical::tour_length(g, *order);
      if (!len) {
        s.feasible = false;
        break;
      }
      s.feasible = true;
      s.objective = *len;
      sol.value = *order;
      break;
    }
    case ProblemTag::KColor: {
      auto colors = classical::colors_from_bits(bits, vm.n, vm.k);
      if (!colors || !classical::proper_coloring(g, *colors)) {
        s.feasible = false;
        break;
      }
      s.feasible = true;
      std::vector<int> used = *colors;
      std::sort(used.begin(), used.end());
      used.erase(std::unique(used.begin(), used.end()), used.end());
      s.objective = static_cast<double>(used.size());
      sol.value = *colors;
      break;
    }
    default:
      s.feasible = false;
  }
  s.solution.objective = s.objective;
  s.solution.feasible = s.feasible;
  return s;
}

/// Larger objective wins for MaxCut/MIS/Clique; smaller wins for TSP, VC
/// and KColor.
inline bool maximizing(ProblemTag tag) {
  return tag == ProblemTag::MaxCut || tag == ProblemTag::MIS || tag == ProblemTag::Clique;
}

}  // namespace decode_detail

/// The QCF the measured circuit came from, which fixes the decode path.
using DecodeQcf = std::variant<QuboQcf, OracleQcf, ArithmeticQcf>;

/// Maps measured counts back to a classical solution.
///   QUBO: feasible outcomes only, best objective, frequency tie-break.
///   Oracle: satisfying outcomes; MIS picks the largest set (the oracle
///   encodes maximality, not maximum), everything else the most frequent.
///   Arithmetic / factorization: read registers as integers.
inline Solution decode_solution(const Counts& counts, const ProblemInstance& inst,
                                const DecodeQcf& qcf) {
  if (counts.shots == 0) throw NoFeasibleOutcome("empty counts");
  auto outcomes = decode_detail::outcomes_of(counts);
  const double shots = static_cast<double>(counts.shots);

  if (const auto* qubo = std::get_if<QuboQcf>(&qcf)) {
    if (counts.width != qubo->n)
      throw LengthMismatch("counts width does not match the QUBO register");
    const bool maximize = decode_detail::maximizing(inst.tag);
    std::optional<decode_detail::Scored> best;
    long long best_count = 0;
    std::uint64_t best_bits = 0;
    std::string best_key;
    for (const auto& out : outcomes) {
      auto scored = decode_detail::score_outcome(out.bits, inst, qubo->var_map);
      if (!scored.feasible) continue;
      bool take = false;
      if (!best) {
        take = true;
      } else if (scored.objective != best->objective) {
        take = maximize ? scored.objective > best->objective : scored.objective < best->objective;
      } else if (out.count != best_count) {
        take = out.count > best_count;
      } else {
        take = out.bits < best_bits;
      }
      if (take) {
        best = scored;
        best_count = out.count;
        best_bits = out.bits;
        best_key = out.key;
      }
    }
    if (!best) throw NoFeasibleOutcome("all measured outcomes violate the problem constraints");
    Solution sol = best->solution;
    sol.confidence = static_cast<double>(best_count) / shots;
    sol.bitstring = best_key;
    return sol;
  }

  if (const auto* oracle = std::get_if<OracleQcf>(&qcf)) {
    if (counts.width != oracle->input_qubits)
      throw LengthMismatch("counts width does not match the oracle register");
    const decode_detail::Outcome* chosen = nullptr;
    auto better = [&](const decode_detail::Outcome& a, const decode_detail::Outcome* b) {
      if (b == nullptr) return true;
      if (inst.tag == ProblemTag::MIS) {
        const int sa = std::popcount(a.bits), sb = std::popcount(b->bits);
        if (sa != sb) return sa > sb;  // largest measured maximal set
      }
      if (a.count != b->count) return a.count > b->count;
      return a.bits < b->bits;
    };
    for (const auto& out : outcomes) {
      if (!oracle->formula.eval(out.bits)) continue;
      if (better(out, chosen)) chosen = &out;
    }
    if (!chosen) throw NoFeasibleOutcome("no satisfying outcome was measured");

    Solution sol;
    sol.tag = inst.tag;
    sol.feasible = true;
    sol.confidence = static_cast<double>(chosen->count) / shots;
    sol.bitstring = chosen->key;
    if (inst.tag == ProblemTag::Factorization) {
      const std::uint64_t d = chosen->bits;
      sol.factors = {d, inst.factor_target() / d};
      sol.objective = static_cast<double>(d);
    } else if (inst.tag == ProblemTag::KColor) {
      auto colors = classical::colors_from_bits(chosen->bits, inst.graph().node_count,
                                                *inst.graph().k);
      sol.value = *colors;
      sol.objective = static_cast<double>(*inst.graph().k);
    } else {
      sol.value = classical::set_bits(chosen->bits, inst.graph().node_count);
      sol.objective = static_cast<double>(sol.value.size());
    }
    return sol;
  }

  const auto& arith = std::get<ArithmeticQcf>(qcf);
  const decode_detail::Outcome* top = nullptr;
  for (const auto& out : outcomes)
    if (top == nullptr || out.count > top->count || (out.count == top->count && out.bits < top->bits))
      top = &out;
  Solution sol;
  sol.tag = inst.tag;
  sol.integer = top->bits;
  sol.objective = static_cast<double>(top->bits);
  sol.feasible = top->bits == arith.expected_result();
  sol.confidence = static_cast<double>(top->count) / shots;
  sol.bitstring = top->key;
  return sol;
}

// ---------------------------------------------------------------------------
// Brute force (verification oracle)
// ---------------------------------------------------------------------------

inline constexpr int kBruteForceVertexCap = 16;

struct BruteForceResult {
  Solution best;                          // lexicographically smallest optimum
  std::vector<std::uint64_t> optima;      // full optimal set (set problems)
  double optimum = 0.0;
};

namespace brute {

template <typename Feasible, typename Objective>
BruteForceResult sweep_sets(const ProblemInstance& inst, bool maximize, Feasible feasible,
                            Objective objective) {
  const GraphData& g = inst.graph();
  if (g.node_count > kBruteForceVertexCap) throw TooLarge("brute force capped at 16 vertices");
  BruteForceResult r;
  bool found = false;
  for (std::uint64_t bits = 0; bits < (1ULL << g.node_count); ++bits) {
    if (!feasible(bits)) continue;
    const double obj = objective(bits);
    if (!found || (maximize ? obj > r.optimum : obj < r.optimum)) {
      found = true;
      r.optimum = obj;
      r.optima.clear();
      r.optima.push_back(bits);
    } else if (obj == r.optimum) {
      r.optima.push_back(bits);
    }
  }
  if (!found) throw NoFeasibleOutcome("instance has no feasible solution");
  r.best.tag = inst.tag;
  r.best.value = classical::set_bits(r.optima.front(), g.node_count);
  r.best.objective = r.optimum;
  r.best.feasible = true;
  r.best.confidence = 1.0;
  return r;
}

}  // namespace brute

/// Exact optimum by exhaustive enumeration (combinatorial), direct
/// arithmetic, or trial division. Lexicographically smallest optimal
/// solution reported; the full optimal set rides along.
inline BruteForceResult brute_force_solve(const ProblemInstance& inst) {
  switch (inst.tag) {
    case ProblemTag::MaxCut: {
      const GraphData& g = inst.graph();
      return brute::sweep_sets(inst, true, [](std::uint64_t) { return true; },
                               [&](std::uint64_t bits) { return classical::cut_weight(g, bits); });
    }
    case ProblemTag::MIS: {
      const GraphData& g = inst.graph();
      return brute::sweep_sets(inst, true,
                               [&](std::uint64_t bits) { return classical::independent(g, bits); },
                               [](std::uint64_t bits) { return double(std::popcount(bits)); });
    }
    case ProblemTag::VertexCover: {
      const GraphData& g = inst.graph();
      return brute::sweep_sets(inst, false,
                               [&](std::uint64_t bits) { return classical::covers(g, bits); },
                               [](std::uint64_t bits) { return double(std::popcount(bits)); });
    }
    case ProblemTag::Clique: {
      const GraphData& g = inst.graph();
      return brute::sweep_sets(inst, true,
                               [&](std::uint64_t bits) { return classical::clique(g, bits); },
                               [](std::uint64_t bits) { return double(std::popcount(bits)); });
    }
    case ProblemTag::TSP: {
      const GraphData& g = inst.graph();
      const int n = g.node_count;
      if (n > 10) throw TooLarge("TSP brute force capped at 10 cities");
      if (n < 1) throw NoFeasibleOutcome("empty TSP");
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      BruteForceResult r;
      bool found = false;
      std::vector<int> best_order;
      do {
        if (n > 1 && order[0] != 0) break;  // fix the starting city; tours are cyclic
        auto len = classical::tour_length(g, order);
        if (!len) continue;
        if (!found || *len < r.optimum ||
            (*len == r.optimum && order < best_order)) {
          found = true;
          r.optimum = *len;
          best_order = order;
        }
      } while (std::next_permutation(order.begin(), order.end()));
      if (!found) throw NoFeasibleOutcome("no complete tour exists");
      r.best.tag = inst.tag;
      r.best.value = best_order;
      r.best.objective = r.optimum;
      r.best.feasible = true;
      r.best.confidence = 1.0;
      return r;
    }
    case ProblemTag::KColor: {
      const GraphData& g = inst.graph();
      if (!g.k) throw TooLarge("KColor brute force requires k");
      const int n = g.node_count, k = *g.k;
      if (std::pow(double(k), n) > 2e7) throw TooLarge("KColor brute force too big");
      BruteForceResult r;
      std::vector<int> colors(n, 0), best_colors;
      bool found = false;
      double best_used = 0.0;
      while (true) {
        if (classical::proper_coloring(g, colors)) {
          std::vector<int> used = colors;
          std::sort(used.begin(), used.end());
          used.erase(std::unique(used.begin(), used.end()), used.end());
          const double nu = static_cast<double>(used.size());
          if (!found || nu < best_used || (nu == best_used && colors < best_colors)) {
            found = true;
            best_used = nu;
            best_colors = colors;
          }
        }
        int i = n - 1;
        while (i >= 0 && colors[i] == k - 1) colors[i--] = 0;
        if (i < 0) break;
        ++colors[i];
      }
      if (!found) throw NoFeasibleOutcome("graph is not k-colorable");
      r.best.tag = inst.tag;
      r.best.value = best_colors;
      r.best.objective = best_used;
      r.best.feasible = true;
      r.best.confidence = 1.0;
      r.optimum = best_used;
      return r;
    }
    case ProblemTag::Factorization: {
      const std::uint64_t n = inst.factor_target();
      if (n > (1ULL << 20)) throw TooLarge("factorization brute force capped at 2^20");
      for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
          BruteForceResult r;
          r.best.tag = inst.tag;
          r.best.factors = {d, n / d};
          r.best.objective = static_cast<double>(d);
          r.best.feasible = true;
          r.best.confidence = 1.0;
          r.optimum = static_cast<double>(d);
          return r;
        }
      }
      throw NoFeasibleOutcome("no nontrivial divisor (prime N should not validate)");
    }
    case ProblemTag::Add:
    case ProblemTag::Sub:
    case ProblemTag::Mul: {
      const auto& o = inst.operands();
      if (o.a > (1ULL << 16) || o.b > (1ULL << 16)) throw TooLarge("operands capped at 2^16");
      ArithmeticQcf q{inst.tag, o, ArithmeticEncoding::QFT};
      BruteForceResult r;
      r.best.tag = inst.tag;
      r.best.integer = q.expected_result();
      r.best.objective = static_cast<double>(*r.best.integer);
      r.best.feasible = true;
      r.best.confidence = 1.0;
      r.optimum = r.best.objective;
      return r;
    }
    default:
      throw TooLarge("no brute-force path for this tag");
  }
}

}  // namespace qforge
