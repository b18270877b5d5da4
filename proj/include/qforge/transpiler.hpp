#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "qforge/circuit.hpp"
#include "qforge/errors.hpp"

namespace qforge {

/// Allowed two-qubit interaction graph of a device. all_to_all devices
/// (trapped ion) ignore the pair list.
struct CouplingMap {
  int num_qubits = 0;
  std::set<std::pair<int, int>> pairs;  // normalized u < v
  bool all_to_all = false;

  void add_pair(int u, int v) {
    if (u > v) std::swap(u, v);
    pairs.insert({u, v});
  }
  bool allowed(int u, int v) const {
    if (all_to_all) return true;
    if (u > v) std::swap(u, v);
    return pairs.count({u, v}) > 0;
  }
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(num_qubits);
    for (const auto& [u, v] : pairs) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
  }

  static CouplingMap fully_connected(int n) {
    CouplingMap cm;
    cm.num_qubits = n;
    cm.all_to_all = true;
    return cm;
  }
};

/// Native single-qubit basis is always {RZ, RY}; the two-qubit entangler is
/// either CNOT or CZ.
enum class TwoQubitBasis { CNOT, CZ };

struct TranspiledCircuit {
  Circuit circuit{0};          // over physical qubits, in the native basis
  std::vector<int> layout;     // initial logical -> physical
  std::vector<int> final_layout;
  ResourceMetrics metrics;
  int qubits_used = 0;         // distinct physical qubits touched
};

// ---------------------------------------------------------------------------
// Basis decomposition
// ---------------------------------------------------------------------------

namespace transpile_detail {

using mat2 = std::array<std::complex<double>, 4>;

inline mat2 matmul(const mat2& a, const mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline mat2 gate_matrix(const Gate& g) {
  const std::complex<double> I(0.0, 1.0);
  const double c = std::cos(g.angle / 2.0), s = std::sin(g.angle / 2.0);
  const double r = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::H: return {r, r, r, -r};
    case GateKind::X: return {0, 1, 1, 0};
    case GateKind::Y: return {0, -I, I, 0};
    case GateKind::Z: return {1, 0, 0, -1};
    case GateKind::RX: return {c, -I * s, -I * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::exp(-I * (g.angle / 2.0)), 0, 0, std::exp(I * (g.angle / 2.0))};
    case GateKind::Phase: return {1, 0, 0, std::exp(I * g.angle)};
    default:
      throw UnsupportedBasis("no 2x2 matrix for a multi-qubit gate");
  }
}

struct Zyz {
  double beta = 0, gamma = 0, delta = 0;  // U ~ RZ(beta) RY(gamma) RZ(delta)
};

/// ZYZ Euler angles of a single-qubit unitary, global phase dropped.
inline Zyz zyz_decompose(const mat2& u) {
  Zyz e;
  const double a00 = std::abs(u[0]);
  const double a10 = std::abs(u[2]);
  e.gamma = 2.0 * std::atan2(a10, a00);
  constexpr double eps = 1e-12;
  if (a10 < eps) {  // diagonal: only beta + delta matters
    e.delta = 0.0;
    e.beta = std::arg(u[3]) - std::arg(u[0]);
  } else if (a00 < eps) {  // anti-diagonal: only beta - delta matters
    e.delta = 0.0;
    e.beta = std::arg(u[2]) - std::arg(-u[1]);
  } else {
    const double sum = std::arg(u[3]) - std::arg(u[0]);        // beta + delta
    const double beta = std::arg(u[2]) - std::arg(u[0]);       // beta
    e.beta = beta;
    e.delta = sum - beta;
  }
  return e;
}

inline void emit_rz(Circuit& c, int q, double angle) {
  if (std::abs(std::remainder(angle, 4.0 * std::numbers::pi)) > 1e-12)
    c.push(GateKind::RZ, {q}, angle);
}
inline void emit_ry(Circuit& c, int q, double angle) {
  if (std::abs(std::remainder(angle, 4.0 * std::numbers::pi)) > 1e-12)
    c.push(GateKind::RY, {q}, angle);
}

/// H in {RZ, RY}: RZ(pi) then RY(pi/2), up to global phase.
inline void emit_h(Circuit& c, int q) {
  c.push(GateKind::RZ, {q}, std::numbers::pi);
  c.push(GateKind::RY, {q}, std::numbers::pi / 2.0);
}

inline void emit_cnot(Circuit& c, int a, int b, TwoQubitBasis basis) {
  if (basis == TwoQubitBasis::CNOT) {
    c.push(GateKind::CNOT, {a, b});
  } else {
    emit_h(c, b);
    c.push(GateKind::CZ, {a, b});
    emit_h(c, b);
  }
}

inline void emit_cz(Circuit& c, int a, int b, TwoQubitBasis basis) {
  if (basis == TwoQubitBasis::CZ) {
    c.push(GateKind::CZ, {a, b});
  } else {
    emit_h(c, b);
    c.push(GateKind::CNOT, {a, b});
    emit_h(c, b);
  }
}

}  // namespace transpile_detail

/// Rewrites every gate into {RZ, RY} plus the device entangler. Gates
/// already in the basis pass through unchanged (fixpoint). Statevector
/// equivalence holds up to global phase.
inline Circuit decompose_to_basis(const Circuit& c, TwoQubitBasis basis) {
  namespace td = transpile_detail;
  if (c.has_symbolic()) throw UnboundParameter("decompose requires a bound circuit");
  Circuit out(c.num_qubits());
  for (const auto& g : c.ops()) {
    switch (g.kind) {
      case GateKind::Measure:
      case GateKind::RZ:
      case GateKind::RY:
        out.push_gate(g);
        break;
      case GateKind::CNOT:
        td::emit_cnot(out, g.qubits[0], g.qubits[1], basis);
        break;
      case GateKind::CZ:
        td::emit_cz(out, g.qubits[0], g.qubits[1], basis);
        break;
      case GateKind::SWAP:
        td::emit_cnot(out, g.qubits[0], g.qubits[1], basis);
        td::emit_cnot(out, g.qubits[1], g.qubits[0], basis);
        td::emit_cnot(out, g.qubits[0], g.qubits[1], basis);
        break;
      case GateKind::CPhase: {
        // CP(t) = (RZ(t/2) x RZ(t/2)) CNOT (I x RZ(-t/2)) CNOT, up to phase
        const double t = g.angle;
        td::emit_rz(out, g.qubits[0], t / 2.0);
        td::emit_rz(out, g.qubits[1], t / 2.0);
        td::emit_cnot(out, g.qubits[0], g.qubits[1], basis);
        td::emit_rz(out, g.qubits[1], -t / 2.0);
        td::emit_cnot(out, g.qubits[0], g.qubits[1], basis);
        break;
      }
      default: {  // single-qubit
        const auto e = td::zyz_decompose(td::gate_matrix(g));
        td::emit_rz(out, g.qubits[0], e.delta);
        td::emit_ry(out, g.qubits[0], e.gamma);
        td::emit_rz(out, g.qubits[0], e.beta);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

namespace transpile_detail {

inline std::vector<std::vector<int>> all_pairs_bfs(const CouplingMap& cm) {
  auto adj = cm.adjacency();
  std::vector<std::vector<int>> dist(cm.num_qubits, std::vector<int>(cm.num_qubits, -1));
  for (int s = 0; s < cm.num_qubits; ++s) {
    std::deque<int> q{s};
    dist[s][s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v : adj[u])
        if (dist[s][v] < 0) {
          dist[s][v] = dist[s][u] + 1;
          q.push_back(v);
        }
    }
  }
  return dist;
}

/// Deterministic greedy placement: busiest logical qubits first, each
/// seated next to as many already-placed interaction partners as possible.
inline std::vector<int> initial_layout(const Circuit& c, const CouplingMap& cm,
                                       const std::vector<std::vector<int>>& dist) {
  const int n = c.num_qubits();
  auto adj = cm.adjacency();

  std::vector<int> weight(n, 0);
  std::vector<std::set<int>> partners(n);
  for (const auto& g : c.ops()) {
    if (g.qubits.size() != 2) continue;
    ++weight[g.qubits[0]];
    ++weight[g.qubits[1]];
    partners[g.qubits[0]].insert(g.qubits[1]);
    partners[g.qubits[1]].insert(g.qubits[0]);
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (weight[a] != weight[b]) return weight[a] > weight[b];
    return a < b;
  });

  std::vector<int> seat(n, -1);  // logical -> physical
  std::vector<bool> taken(cm.num_qubits, false);
  auto degree = [&](int p) { return static_cast<int>(adj[p].size()); };

  for (int l : order) {
    int best = -1;
    long best_score = -1;
    long best_tie = 0;
    for (int p = 0; p < cm.num_qubits; ++p) {
      if (taken[p]) continue;
      long adjacent = 0;
      long total_dist = 0;
      for (int partner : partners[l]) {
        if (seat[partner] < 0) continue;
        int d = dist[p][seat[partner]];
        if (d < 0) d = cm.num_qubits;  // disconnected
        if (d == 1) ++adjacent;
        total_dist += d;
      }
      // maximize satisfied adjacencies, then minimize distance to placed
      // partners, then prefer high degree, then low index
      long score = adjacent;
      long tie = -total_dist * 1000 + degree(p);
      if (score > best_score || (score == best_score && tie > best_tie)) {
        best = p;
        best_score = score;
        best_tie = tie;
      }
    }
    seat[l] = best;
    taken[best] = true;
  }
  return seat;
}

}  // namespace transpile_detail

/// Inserts SWAPs along BFS shortest paths so every two-qubit gate acts on
/// a coupled pair. Deterministic; ties resolved by lowest qubit index. On
/// all_to_all maps routing is the identity.
inline TranspiledCircuit route(const Circuit& c, const CouplingMap& cm) {
  namespace td = transpile_detail;
  if (c.num_qubits() > cm.num_qubits)
    throw CircuitTooLarge("circuit needs " + std::to_string(c.num_qubits()) +
                          " qubits, device has " + std::to_string(cm.num_qubits));

  TranspiledCircuit out;
  if (cm.all_to_all) {
    out.circuit = c;
    out.layout.resize(c.num_qubits());
    for (int i = 0; i < c.num_qubits(); ++i) out.layout[i] = i;
    out.final_layout = out.layout;
    out.qubits_used = c.num_qubits();
    return out;
  }

  const auto dist = td::all_pairs_bfs(cm);
  std::vector<int> seat = td::initial_layout(c, cm, dist);
  out.layout = seat;

  std::vector<int> occupant(cm.num_qubits, -1);  // physical -> logical
  for (int l = 0; l < c.num_qubits(); ++l) occupant[seat[l]] = l;

  auto adj = cm.adjacency();
  Circuit routed(cm.num_qubits);
  std::set<int> used;

  auto emit_swap = [&](int pa, int pb) {
    routed.push(GateKind::SWAP, {pa, pb});
    used.insert(pa);
    used.insert(pb);
    int la = occupant[pa], lb = occupant[pb];
    occupant[pa] = lb;
    occupant[pb] = la;
    if (la >= 0) seat[la] = pb;
    if (lb >= 0) seat[lb] = pa;
  };

  for (const auto& g : c.ops()) {
    if (g.qubits.size() == 1) {
      Gate h = g;
      h.qubits[0] = seat[g.qubits[0]];
      routed.push_gate(h);
      used.insert(h.qubits[0]);
      continue;
    }
    int pa = seat[g.qubits[0]], pb = seat[g.qubits[1]];
    while (!cm.allowed(pa, pb)) {
      // BFS shortest path pa -> pb; move pa one step along it
      std::vector<int> prev(cm.num_qubits, -1);
      std::deque<int> q{pa};
      prev[pa] = pa;
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        if (u == pb) break;
        for (int v : adj[u])
          if (prev[v] < 0) {
            prev[v] = u;
            q.push_back(v);
          }
      }
      if (prev[pb] < 0) throw CircuitTooLarge("coupling map is disconnected");
      int step = pb;
      while (prev[step] != pa) step = prev[step];
      emit_swap(pa, step);
      pa = seat[g.qubits[0]];
      pb = seat[g.qubits[1]];
    }
    Gate h = g;
    h.qubits = {pa, pb};
    routed.push_gate(h);
    used.insert(pa);
    used.insert(pb);
  }

  out.circuit = std::move(routed);
  out.final_layout = seat;
  out.qubits_used = static_cast<int>(used.size());
  return out;
}

/// decompose -> route -> re-decompose the inserted SWAPs, then extract
/// metrics from the final physical circuit.
inline TranspiledCircuit transpile_to(const Circuit& c, TwoQubitBasis basis, const CouplingMap& cm) {
  Circuit lowered = decompose_to_basis(c, basis);
  TranspiledCircuit routed = route(lowered, cm);
  routed.circuit = decompose_to_basis(routed.circuit, basis);
  routed.metrics = resource_metrics(routed.circuit);
  return routed;
}

}  // namespace qforge
