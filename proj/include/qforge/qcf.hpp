#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qforge/errors.hpp"
#include "qforge/problem.hpp"

namespace qforge {

// ---------------------------------------------------------------------------
// QUBO
// ---------------------------------------------------------------------------

/// What a QUBO variable means in the original problem. Graph problems use
/// one variable per vertex; TSP uses (city, position); KColor uses
/// (vertex, color).
struct VarMap {
  enum Kind { Vertex, CityPosition, VertexColor } kind = Vertex;
  int n = 0;  // vertices / cities
  int k = 0;  // positions or colors per vertex (CityPosition: k == n)

  int index(int a, int b = 0) const { return kind == Vertex ? a : a * k + b; }
};

/// Quadratic form over binary variables, upper-triangular storage.
/// Q[i][i] holds linear terms, Q[i][j] (i<j) quadratic couplings; entries
/// below the diagonal stay zero.
struct QuboQcf {
  int n = 0;
  std::vector<std::vector<double>> Q;
  VarMap var_map;

  static QuboQcf zeros(int n) {
    QuboQcf q;
    q.n = n;
    q.Q.assign(n, std::vector<double>(n, 0.0));
    q.var_map = {VarMap::Vertex, n, 0};
    return q;
  }

  void add(int i, int j, double v) {
    if (i > j) std::swap(i, j);
    Q[i][j] += v;
  }
};

/// Evaluates sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j. Bit i of x is
/// variable i.
inline double qubo_value(const QuboQcf& q, const std::vector<int>& x) {
  if (static_cast<int>(x.size()) != q.n)
    throw LengthMismatch("bitstring length " + std::to_string(x.size()) + " != " + std::to_string(q.n));
  double acc = 0.0;
  for (int i = 0; i < q.n; ++i) {
    if (!x[i]) continue;
    acc += q.Q[i][i];
    for (int j = i + 1; j < q.n; ++j)
      if (x[j]) acc += q.Q[i][j];
  }
  return acc;
}

inline double qubo_value(const QuboQcf& q, std::uint64_t bits) {
  std::vector<int> x(q.n);
  for (int i = 0; i < q.n; ++i) x[i] = static_cast<int>((bits >> i) & 1ULL);
  return qubo_value(q, x);
}

// ---------------------------------------------------------------------------
// Ising
// ---------------------------------------------------------------------------

/// Spin form of a QUBO under s_i = 2 x_i - 1:
///   x^T Q x = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i + offset.
struct IsingModel {
  int n = 0;
  std::map<std::pair<int, int>, double> J;  // keys i<j
  std::vector<double> h;
  double offset = 0.0;
};

inline double ising_energy(const IsingModel& m, const std::vector<int>& s) {
  if (static_cast<int>(s.size()) != m.n)
    throw LengthMismatch("spin vector length " + std::to_string(s.size()) + " != " + std::to_string(m.n));
  for (int v : s)
    if (v != 1 && v != -1) throw NonSpinValue("spin values must be +1 or -1");
  double e = m.offset;
  for (const auto& [ij, J] : m.J) e -= J * s[ij.first] * s[ij.second];
  for (int i = 0; i < m.n; ++i) e -= m.h[i] * s[i];
  return e;
}

/// Exact change of variables; no information is lost (the constant goes
/// into offset, so energies match bitwise-equivalent spins exactly).
inline IsingModel qubo_to_ising(const QuboQcf& q) {
  IsingModel m;
  m.n = q.n;
  m.h.assign(q.n, 0.0);
  double offset = 0.0;
  for (int i = 0; i < q.n; ++i) {
    offset += q.Q[i][i] / 2.0;
    m.h[i] -= q.Q[i][i] / 2.0;
    for (int j = i + 1; j < q.n; ++j) {
      double v = q.Q[i][j];
      if (v == 0.0) continue;
      m.J[{i, j}] = -v / 4.0;
      m.h[i] -= v / 4.0;
      m.h[j] -= v / 4.0;
      offset += v / 4.0;
    }
  }
  m.offset = offset;
  return m;
}

// ---------------------------------------------------------------------------
// CNF / oracle
// ---------------------------------------------------------------------------

/// Clauses hold signed 1-based literals (DIMACS convention): +k is variable
/// k, -k its negation. No empty clauses.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  bool eval(std::uint64_t assignment) const {
    for (const auto& clause : clauses) {
      bool sat = false;
      for (int lit : clause) {
        int var = std::abs(lit) - 1;
        bool val = (assignment >> var) & 1ULL;
        if ((lit > 0) == val) {
          sat = true;
          break;
        }
      }
      if (!sat) return false;
    }
    return true;
  }
};

inline std::string to_dimacs(const CnfFormula& f) {
  std::ostringstream os;
  os << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
  for (const auto& clause : f.clauses) {
    for (int lit : clause) os << lit << " ";
    os << "0\n";
  }
  return os.str();
}

/// Phase-flip oracle specification: the quantum oracle marks exactly the
/// satisfying assignments of the formula.
struct OracleQcf {
  CnfFormula formula;
  int input_qubits = 0;
};

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

enum class ArithmeticEncoding { QFT, Reversible };

struct ArithmeticQcf {
  ProblemTag op = ProblemTag::Add;  // Add | Sub | Mul
  ArithmeticOperands operands;
  ArithmeticEncoding encoding = ArithmeticEncoding::QFT;

  /// Modular result the circuit must produce.
  std::uint64_t expected_result() const {
    const auto& o = operands;
    switch (op) {
      case ProblemTag::Add:
        return (o.b + o.a) & ((o.width_b >= 64) ? ~0ULL : ((1ULL << o.width_b) - 1));
      case ProblemTag::Sub:
        return (o.b - o.a) & ((o.width_b >= 64) ? ~0ULL : ((1ULL << o.width_b) - 1));
      case ProblemTag::Mul: {
        int wc = o.product_width();
        return (o.a * o.b) & ((wc >= 64) ? ~0ULL : ((1ULL << wc) - 1));
      }
      default:
        throw UnsupportedTag("not an arithmetic op");
    }
  }
};

// ---------------------------------------------------------------------------
// Penalty weights
// ---------------------------------------------------------------------------

/// Constraint penalty A vs objective reward B; A = 2B by default so adding
/// a vertex is always beneficial when it keeps the solution feasible.
struct PenaltyWeights {
  double A = 2.0;
  double B = 1.0;
};

// ---------------------------------------------------------------------------
// QUBO builders
// ---------------------------------------------------------------------------

namespace detail {

inline QuboQcf qubo_maxcut(const GraphData& g) {
  // Cut weight is sum_(u,v) w (x_u + x_v - 2 x_u x_v); we minimize its
  // negation.
  QuboQcf q = QuboQcf::zeros(g.node_count);
  for (const auto& e : g.edges) {
    q.add(e.u, e.u, -e.w);
    q.add(e.v, e.v, -e.w);
    q.add(e.u, e.v, 2.0 * e.w);
  }
  return q;
}

inline QuboQcf qubo_mis(const GraphData& g, const PenaltyWeights& w) {
  // A * sum_(u,v) x_u x_v  -  B * sum_v x_v
  QuboQcf q = QuboQcf::zeros(g.node_count);
  for (const auto& e : g.edges) q.add(e.u, e.v, w.A);
  for (int v = 0; v < g.node_count; ++v) q.add(v, v, -w.B);
  return q;
}

inline QuboQcf qubo_vertex_cover(const GraphData& g, const PenaltyWeights& w) {
  // A * sum_(u,v) (1-x_u)(1-x_v) + B * sum_v x_v; the constant A per edge
  // is dropped (argmin unchanged).
  QuboQcf q = QuboQcf::zeros(g.node_count);
  for (const auto& e : g.edges) {
    q.add(e.u, e.u, -w.A);
    q.add(e.v, e.v, -w.A);
    q.add(e.u, e.v, w.A);
  }
  for (int v = 0; v < g.node_count; ++v) q.add(v, v, w.B);
  return q;
}

inline QuboQcf qubo_clique(const GraphData& g, const PenaltyWeights& w) {
  // Both terms are constraints: A (k - sum x)^2 + A * sum_{(u,v) not in E} x_u x_v.
  // Zero energy iff x is a clique of size exactly k (constant A k^2 dropped).
  if (!g.k) throw UnsupportedTag("Clique QUBO requires clique size k");
  const int k = *g.k;
  QuboQcf q = QuboQcf::zeros(g.node_count);
  for (int i = 0; i < g.node_count; ++i) {
    q.add(i, i, w.A * (1.0 - 2.0 * k));
    for (int j = i + 1; j < g.node_count; ++j) {
      q.add(i, j, 2.0 * w.A);
      if (!g.has_edge(i, j)) q.add(i, j, w.A);
    }
  }
  return q;
}

inline QuboQcf qubo_kcolor(const GraphData& g, const PenaltyWeights& w) {
  // One-hot per vertex plus same-color edge penalties; variable (v,c) is
  // index v*k + c. Feasible colorings reach the dropped constant -A*n.
  if (!g.k) throw UnsupportedTag("KColor QUBO requires color count k");
  const int n = g.node_count, k = *g.k;
  QuboQcf q = QuboQcf::zeros(n * k);
  q.var_map = {VarMap::VertexColor, n, k};
  for (int v = 0; v < n; ++v) {
    for (int c = 0; c < k; ++c) {
      q.add(v * k + c, v * k + c, -w.A);
      for (int c2 = c + 1; c2 < k; ++c2) q.add(v * k + c, v * k + c2, 2.0 * w.A);
    }
  }
  for (const auto& e : g.edges)
    for (int c = 0; c < k; ++c) q.add(e.u * k + c, e.v * k + c, w.A);
  return q;
}

inline std::vector<std::vector<double>> tsp_distance_matrix(const GraphData& g, double missing) {
  std::vector<std::vector<double>> d(g.node_count, std::vector<double>(g.node_count, missing));
  for (int i = 0; i < g.node_count; ++i) d[i][i] = 0.0;
  for (const auto& e : g.edges) d[e.u][e.v] = d[e.v][e.u] = e.w;
  return d;
}

inline QuboQcf qubo_tsp(const GraphData& g) {
  // One-hot n^2 encoding: x_{c,p} = city c visited at position p. Row and
  // column one-hot penalties use A = 2 * maxw * n, which dominates any
  // tour-cost saving a violation could buy. Missing edges cost A.
  const int n = g.node_count;
  double maxw = 1.0;
  for (const auto& e : g.edges) maxw = std::max(maxw, std::abs(e.w));
  const double A = 2.0 * maxw * n;
  auto dist = tsp_distance_matrix(g, A);

  QuboQcf q = QuboQcf::zeros(n * n);
  q.var_map = {VarMap::CityPosition, n, n};
  auto idx = [n](int c, int p) { return c * n + p; };

  // city one-hot: each city appears at exactly one position
  for (int c = 0; c < n; ++c)
    for (int p = 0; p < n; ++p) {
      q.add(idx(c, p), idx(c, p), -A);
      for (int p2 = p + 1; p2 < n; ++p2) q.add(idx(c, p), idx(c, p2), 2.0 * A);
    }
  // position one-hot: each position holds exactly one city
  for (int p = 0; p < n; ++p)
    for (int c = 0; c < n; ++c)
      for (int c2 = c + 1; c2 < n; ++c2) q.add(idx(c, p), idx(c2, p), 2.0 * A);
  // tour cost (cyclic)
  for (int c = 0; c < n; ++c)
    for (int c2 = 0; c2 < n; ++c2) {
      if (c == c2) continue;
      for (int p = 0; p < n; ++p) q.add(idx(c, p), idx(c2, (p + 1) % n), dist[c][c2]);
    }
  return q;
}

}  // namespace detail

/// Builds the QUBO QCF for a combinatorial instance. Minimizers of the
/// quadratic form decode (through var_map) to exactly the problem's optimal
/// solutions.
inline QuboQcf build_qubo(const ProblemInstance& inst, const PenaltyWeights& w = {}) {
  switch (inst.tag) {
    case ProblemTag::MaxCut: return detail::qubo_maxcut(inst.graph());
    case ProblemTag::MIS: return detail::qubo_mis(inst.graph(), w);
    case ProblemTag::TSP: return detail::qubo_tsp(inst.graph());
    case ProblemTag::Clique: return detail::qubo_clique(inst.graph(), w);
    case ProblemTag::KColor: return detail::qubo_kcolor(inst.graph(), w);
    case ProblemTag::VertexCover: return detail::qubo_vertex_cover(inst.graph(), w);
    default:
      throw UnsupportedTag(std::string(tag_name(inst.tag)) + " has no QUBO encoding");
  }
}

// ---------------------------------------------------------------------------
// CNF builders
// ---------------------------------------------------------------------------

namespace detail {

inline void at_most_k(CnfFormula& f, const std::vector<int>& vars, int k) {
  // every (k+1)-subset contains a false variable; exact and fine at desk
  // scale
  const int n = static_cast<int>(vars.size());
  if (k >= n) return;
  std::vector<int> pick(k + 1);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k + 1) {
      std::vector<int> clause;
      for (int idx : pick) clause.push_back(-vars[idx]);
      f.clauses.push_back(clause);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

inline void at_least_k(CnfFormula& f, const std::vector<int>& vars, int k) {
  // every (n-k+1)-subset contains a true variable
  const int n = static_cast<int>(vars.size());
  if (k <= 0) return;
  const int m = n - k + 1;
  std::vector<int> pick(m);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      std::vector<int> clause;
      for (int idx : pick) clause.push_back(vars[idx]);
      f.clauses.push_back(clause);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

inline CnfFormula cnf_mis(const GraphData& g) {
  // Independence: for each edge, not both endpoints. Maximality: each
  // vertex is in the set or has a neighbor that is.
  CnfFormula f;
  f.num_vars = g.node_count;
  for (const auto& e : g.edges) f.clauses.push_back({-(e.u + 1), -(e.v + 1)});
  for (int v = 0; v < g.node_count; ++v) {
    std::vector<int> clause{v + 1};
    for (int nb : g.neighbors(v)) clause.push_back(nb + 1);
    f.clauses.push_back(clause);
  }
  return f;
}

inline CnfFormula cnf_clique(const GraphData& g) {
  if (!g.k) throw UnsupportedTag("Clique CNF requires clique size k");
  CnfFormula f;
  f.num_vars = g.node_count;
  for (int u = 0; u < g.node_count; ++u)
    for (int v = u + 1; v < g.node_count; ++v)
      if (!g.has_edge(u, v)) f.clauses.push_back({-(u + 1), -(v + 1)});
  std::vector<int> all;
  for (int v = 0; v < g.node_count; ++v) all.push_back(v + 1);
  at_least_k(f, all, *g.k);
  return f;
}

inline CnfFormula cnf_kcolor(const GraphData& g) {
  if (!g.k) throw UnsupportedTag("KColor CNF requires color count k");
  const int n = g.node_count, k = *g.k;
  CnfFormula f;
  f.num_vars = n * k;
  auto var = [k](int v, int c) { return v * k + c + 1; };
  for (int v = 0; v < n; ++v) {
    std::vector<int> one;
    for (int c = 0; c < k; ++c) one.push_back(var(v, c));
    f.clauses.push_back(one);
    for (int c = 0; c < k; ++c)
      for (int c2 = c + 1; c2 < k; ++c2) f.clauses.push_back({-var(v, c), -var(v, c2)});
  }
  for (const auto& e : g.edges)
    for (int c = 0; c < k; ++c) f.clauses.push_back({-var(e.u, c), -var(e.v, c)});
  return f;
}

inline CnfFormula cnf_vertex_cover(const GraphData& g) {
  if (!g.k) throw UnsupportedTag("VertexCover CNF requires cover size k");
  CnfFormula f;
  f.num_vars = g.node_count;
  for (const auto& e : g.edges) f.clauses.push_back({e.u + 1, e.v + 1});
  std::vector<int> all;
  for (int v = 0; v < g.node_count; ++v) all.push_back(v + 1);
  at_most_k(f, all, *g.k);
  return f;
}

inline CnfFormula cnf_factorization(std::uint64_t N, int divisor_bits) {
  // Divisor register d; valid iff 2 <= d <= N/2 and d | N. Compiled as the
  // complement's blocking clauses: exact and testable at desk scale.
  if (N > (1ULL << 20)) throw TooManyVariables("factorization N capped at 2^20");
  CnfFormula f;
  f.num_vars = divisor_bits;
  for (std::uint64_t d = 0; d < (1ULL << divisor_bits); ++d) {
    bool valid = d >= 2 && d <= N / 2 && N % d == 0;
    if (valid) continue;
    std::vector<int> clause;
    for (int i = 0; i < divisor_bits; ++i)
      clause.push_back(((d >> i) & 1ULL) ? -(i + 1) : (i + 1));
    f.clauses.push_back(clause);
  }
  return f;
}

}  // namespace detail

inline int default_divisor_bits(std::uint64_t N) {
  int bits = 0;
  while ((1ULL << bits) < N) ++bits;  // ceil(log2 N)
  return std::max(1, bits - 1);
}

/// Builds the CNF-backed oracle QCF. Satisfying assignments are exactly the
/// feasible solutions (feasible-and-maximal for MIS).
inline OracleQcf build_cnf(const ProblemInstance& inst) {
  OracleQcf o;
  switch (inst.tag) {
    case ProblemTag::MIS: o.formula = detail::cnf_mis(inst.graph()); break;
    case ProblemTag::Clique: o.formula = detail::cnf_clique(inst.graph()); break;
    case ProblemTag::KColor: o.formula = detail::cnf_kcolor(inst.graph()); break;
    case ProblemTag::VertexCover: o.formula = detail::cnf_vertex_cover(inst.graph()); break;
    case ProblemTag::Factorization:
      o.formula = detail::cnf_factorization(inst.factor_target(),
                                            default_divisor_bits(inst.factor_target()));
      break;
    default:
      throw UnsupportedTag(std::string(tag_name(inst.tag)) + " has no oracle encoding");
  }
  o.input_qubits = o.formula.num_vars;
  return o;
}

}  // namespace qforge
