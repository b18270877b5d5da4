#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qforge/errors.hpp"

namespace qforge {

enum class GateKind {
  H, X, Y, Z,
  RX, RY, RZ, Phase,
  CNOT, CZ, CPhase, SWAP,
  Measure,
};

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::Phase: return "p";
    case GateKind::CNOT: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::CPhase: return "cp";
    case GateKind::SWAP: return "swap";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::CPhase:
    case GateKind::SWAP:
      return 2;
    case GateKind::Measure:
      return 1;
    default:
      return 1;
  }
}

inline bool gate_has_angle(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
         k == GateKind::Phase || k == GateKind::CPhase;
}

/// Angle is either a bound value or a slot into the circuit's parameter
/// table (symbolic circuits bind late).
struct Gate {
  GateKind kind;
  std::vector<int> qubits;
  double angle = 0.0;
  std::optional<int> param;  // symbolic parameter slot, if any
};

/// Gate-level IR. Measurements are terminal: every Measure comes after the
/// last unitary on its qubit. The i-th Measure writes classical bit i.
class Circuit {
 public:
  explicit Circuit(int num_qubits = 0) : num_qubits_(num_qubits) {}

  int num_qubits() const { return num_qubits_; }
  const std::vector<Gate>& ops() const { return ops_; }
  int num_parameters() const { return num_params_; }

  /// Registers a named symbolic parameter and returns its slot.
  int add_parameter(const std::string& name) {
    param_names_.push_back(name);
    return num_params_++;
  }
  const std::vector<std::string>& parameter_names() const { return param_names_; }

  void push(GateKind kind, std::initializer_list<int> qubits, double angle = 0.0) {
    push_gate({kind, std::vector<int>(qubits), angle, std::nullopt});
  }
  void push_symbolic(GateKind kind, std::initializer_list<int> qubits, int param_slot) {
    push_gate({kind, std::vector<int>(qubits), 0.0, param_slot});
  }
  void push_gate(Gate g) {
    check(g);
    ops_.push_back(std::move(g));
  }

  /// Appends another circuit's ops verbatim (qubit indices must already
  /// agree). Parameters are not merged; other must be fully bound.
  void append(const Circuit& other) {
    for (const auto& g : other.ops()) {
      if (g.param) throw UnboundParameter("cannot append a symbolic circuit");
      push_gate(g);
    }
  }

  bool has_symbolic() const {
    return std::any_of(ops_.begin(), ops_.end(), [](const Gate& g) { return g.param.has_value(); });
  }
  bool has_measure() const {
    return std::any_of(ops_.begin(), ops_.end(),
                       [](const Gate& g) { return g.kind == GateKind::Measure; });
  }

  /// Concrete copy with every parameter slot replaced by its value.
  Circuit bind(const std::vector<double>& values) const {
    if (static_cast<int>(values.size()) != num_params_)
      throw UnboundParameter("expected " + std::to_string(num_params_) + " parameter values, got " +
                             std::to_string(values.size()));
    Circuit out(num_qubits_);
    for (const auto& g : ops_) {
      Gate b = g;
      if (g.param) {
        b.angle = values[*g.param];
        b.param.reset();
      }
      out.ops_.push_back(std::move(b));
    }
    return out;
  }

  /// Qubits measured, in classical-bit order.
  std::vector<int> measured_qubits() const {
    std::vector<int> out;
    for (const auto& g : ops_)
      if (g.kind == GateKind::Measure) out.push_back(g.qubits[0]);
    return out;
  }

 private:
  void check(const Gate& g) const {
    if (static_cast<int>(g.qubits.size()) != gate_arity(g.kind))
      throw LengthMismatch("operand count mismatch for gate");
    for (int q : g.qubits)
      if (q < 0 || q >= num_qubits_)
        throw LengthMismatch("gate operand " + std::to_string(q) + " out of range");
    if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1])
      throw LengthMismatch("two-qubit gate operands must be distinct");
  }

  int num_qubits_;
  std::vector<Gate> ops_;
  int num_params_ = 0;
  std::vector<std::string> param_names_;
};

// ---------------------------------------------------------------------------
// Resource metrics
// ---------------------------------------------------------------------------

/// Counts and class-specific depths consumed by the error and time
/// estimators. D1Q and D2Q count only gates of their own arity class, since
/// the time model weights them by separate gate durations.
struct ResourceMetrics {
  long long n1 = 0;   // single-qubit gates
  long long n2 = 0;   // two-qubit gates
  long long nm = 0;   // measurements
  long long d1q = 0;  // single-qubit depth
  long long d2q = 0;  // two-qubit depth
};

inline ResourceMetrics resource_metrics(const Circuit& c) {
  if (c.has_symbolic()) throw UnboundParameter("metrics require a fully bound circuit");
  ResourceMetrics m;
  std::vector<long long> depth1(c.num_qubits(), 0), depth2(c.num_qubits(), 0);
  for (const auto& g : c.ops()) {
    if (g.kind == GateKind::Measure) {
      ++m.nm;
      continue;
    }
    if (g.qubits.size() == 1) {
      ++m.n1;
      long long d = ++depth1[g.qubits[0]];
      m.d1q = std::max(m.d1q, d);
    } else {
      ++m.n2;
      long long d = std::max(depth2[g.qubits[0]], depth2[g.qubits[1]]) + 1;
      depth2[g.qubits[0]] = depth2[g.qubits[1]] = d;
      m.d2q = std::max(m.d2q, d);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Adjoint
// ---------------------------------------------------------------------------

/// Gate-wise adjoint in reverse order. Composing c then invert_circuit(c)
/// is the identity on the statevector.
inline Circuit invert_circuit(const Circuit& c) {
  if (c.has_measure()) throw ContainsMeasurement("cannot invert a measured circuit");
  Circuit out(c.num_qubits());
  const auto& ops = c.ops();
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    Gate g = *it;
    if (gate_has_angle(g.kind)) {
      if (g.param) throw UnboundParameter("cannot invert a symbolic circuit");
      g.angle = -g.angle;
    }
    // H, X, Y, Z, CNOT, CZ, SWAP are self-inverse
    out.push_gate(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text dump (golden tests, `simulate` subcommand input)
// ---------------------------------------------------------------------------

inline std::string dump_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.num_qubits() << "\n";
  os << std::setprecision(17);
  for (const auto& g : c.ops()) {
    os << gate_name(g.kind);
    if (gate_has_angle(g.kind)) {
      if (g.param) throw UnboundParameter("cannot dump a symbolic circuit");
      os << "(" << g.angle << ")";
    }
    for (int q : g.qubits) os << " " << q;
    os << "\n";
  }
  return os.str();
}

inline Circuit parse_circuit(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::optional<Circuit> c;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "qubits") {
      int n = 0;
      ls >> n;
      c = Circuit(n);
      continue;
    }
    if (!c) throw LengthMismatch("circuit dump must start with a qubits line");
    double angle = 0.0;
    auto paren = head.find('(');
    std::string name = head.substr(0, paren);
    if (paren != std::string::npos) {
      auto close = head.find(')', paren);
      angle = std::stod(head.substr(paren + 1, close - paren - 1));
    }
    static const std::map<std::string, GateKind> kinds = {
        {"h", GateKind::H}, {"x", GateKind::X}, {"y", GateKind::Y}, {"z", GateKind::Z},
        {"rx", GateKind::RX}, {"ry", GateKind::RY}, {"rz", GateKind::RZ}, {"p", GateKind::Phase},
        {"cx", GateKind::CNOT}, {"cz", GateKind::CZ}, {"cp", GateKind::CPhase},
        {"swap", GateKind::SWAP}, {"measure", GateKind::Measure}};
    auto it = kinds.find(name);
    if (it == kinds.end()) throw LengthMismatch("unknown gate '" + name + "' in circuit dump");
    Gate g;
    g.kind = it->second;
    g.angle = angle;
    int q;
    while (ls >> q) g.qubits.push_back(q);
    c->push_gate(g);
  }
  if (!c) throw LengthMismatch("empty circuit dump");
  return *c;
}

}  // namespace qforge
