#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include "qforge/circuit.hpp"
#include "qforge/errors.hpp"
#include "qforge/qcf.hpp"
#include "qforge/rng.hpp"
#include "qforge/simulator.hpp"

namespace qforge {

// ---------------------------------------------------------------------------
// Parametric circuits
// ---------------------------------------------------------------------------

/// Parameter slots are plain symbols, so an angle like 2*gamma_k*J_ij gets
/// its own slot; slot_terms records which logical parameter feeds each slot
/// and with what scale. bind_logical expands logical values to slot values.
struct ParametricCircuit {
  Circuit circuit{0};
  struct Term {
    int logical = 0;
    double scale = 1.0;
  };
  std::vector<Term> slot_terms;
  int num_logical = 0;

  std::vector<double> expand(const std::vector<double>& logical_values) const {
    if (static_cast<int>(logical_values.size()) != num_logical)
      throw UnboundParameter("expected " + std::to_string(num_logical) + " logical parameters");
    std::vector<double> out(slot_terms.size());
    for (std::size_t i = 0; i < slot_terms.size(); ++i)
      out[i] = logical_values[slot_terms[i].logical] * slot_terms[i].scale;
    return out;
  }

  Circuit bind_logical(const std::vector<double>& logical_values) const {
    return circuit.bind(expand(logical_values));
  }
};

// ---------------------------------------------------------------------------
// QAOA
// ---------------------------------------------------------------------------

struct QaoaConfig {
  int p = 3;  // layer count
};

struct QaoaParams {
  std::vector<double> gammas;  // cost angles, [0, pi] at init
  std::vector<double> betas;   // mixer angles, [0, pi/2] at init

  std::vector<double> flat() const {
    std::vector<double> v = gammas;
    v.insert(v.end(), betas.begin(), betas.end());
    return v;
  }
};

/// Cost angles from [0, pi], mixer angles from [0, pi/2]; independent
/// draws, deterministic under a fixed seed.
inline QaoaParams init_qaoa_params(int p, Rng& rng) {
  QaoaParams params;
  for (int k = 0; k < p; ++k) {
    params.gammas.push_back(rng.uniform(0.0, std::numbers::pi));
    params.betas.push_back(rng.uniform(0.0, std::numbers::pi / 2.0));
  }
  return params;
}

/// H^n, then p repetitions of [cost layer: RZZ(2 gamma_k J_ij) per coupling
/// and RZ(2 gamma_k h_i) per field; mixer layer: RX(2 beta_k) on every
/// qubit], then full measurement. Logical parameters are gamma_0..gamma_{p-1}
/// followed by beta_0..beta_{p-1}.
inline ParametricCircuit build_qaoa(const IsingModel& ising, const QaoaConfig& cfg = {}) {
  const int n = ising.n;
  ParametricCircuit pc;
  pc.circuit = Circuit(n);
  pc.num_logical = 2 * cfg.p;
  auto slot = [&](int logical, double scale) {
    pc.slot_terms.push_back({logical, scale});
    return pc.circuit.add_parameter("s" + std::to_string(pc.slot_terms.size() - 1));
  };

  for (int q = 0; q < n; ++q) pc.circuit.push(GateKind::H, {q});
  for (int k = 0; k < cfg.p; ++k) {
    const int gamma = k, beta = cfg.p + k;
    for (const auto& [ij, J] : ising.J) {
      if (J == 0.0) continue;
      // RZZ(theta) compiled as CNOT - RZ(theta) - CNOT
      pc.circuit.push(GateKind::CNOT, {ij.first, ij.second});
      pc.circuit.push_symbolic(GateKind::RZ, {ij.second}, slot(gamma, 2.0 * J));
      pc.circuit.push(GateKind::CNOT, {ij.first, ij.second});
    }
    for (int q = 0; q < n; ++q)
      if (ising.h[q] != 0.0)
        pc.circuit.push_symbolic(GateKind::RZ, {q}, slot(gamma, 2.0 * ising.h[q]));
    for (int q = 0; q < n; ++q)
      pc.circuit.push_symbolic(GateKind::RX, {q}, slot(beta, 2.0));
  }
  for (int q = 0; q < n; ++q) pc.circuit.push(GateKind::Measure, {q});
  return pc;
}

// ---------------------------------------------------------------------------
// VQE ansatz
// ---------------------------------------------------------------------------

struct AnsatzParams {
  std::vector<double> thetas;
};

/// Small random angles around the reference product state.
inline AnsatzParams init_vqe_params(int n, int layers, Rng& rng) {
  AnsatzParams params;
  for (int i = 0; i < n * (layers + 1); ++i) params.thetas.push_back(rng.uniform(-0.1, 0.1));
  return params;
}

/// Two-local ansatz: RY on every qubit, CZ between every pair (full
/// entanglement), repeated `layers` times, closed by a final RY layer.
/// n*(layers+1) parameters; the caller appends measurement.
inline ParametricCircuit build_vqe_ansatz(int n, int layers = 3) {
  ParametricCircuit pc;
  pc.circuit = Circuit(n);
  pc.num_logical = n * (layers + 1);
  auto theta = [&](int logical) {
    pc.slot_terms.push_back({logical, 1.0});
    return pc.circuit.add_parameter("theta" + std::to_string(logical));
  };
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q)
      pc.circuit.push_symbolic(GateKind::RY, {q}, theta(l * n + q));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) pc.circuit.push(GateKind::CZ, {a, b});
  }
  for (int q = 0; q < n; ++q)
    pc.circuit.push_symbolic(GateKind::RY, {q}, theta(layers * n + q));
  return pc;
}

// ---------------------------------------------------------------------------
// Multi-controlled building blocks
// ---------------------------------------------------------------------------

namespace mc {

inline void t_gate(Circuit& c, int q, bool dagger = false) {
  c.push(GateKind::Phase, {q}, dagger ? -std::numbers::pi / 4.0 : std::numbers::pi / 4.0);
}

/// Textbook Toffoli over {H, CNOT, T, Tdg}.
inline void toffoli(Circuit& c, int a, int b, int t) {
  c.push(GateKind::H, {t});
  c.push(GateKind::CNOT, {b, t});
  t_gate(c, t, true);
  c.push(GateKind::CNOT, {a, t});
  t_gate(c, t);
  c.push(GateKind::CNOT, {b, t});
  t_gate(c, t, true);
  c.push(GateKind::CNOT, {a, t});
  t_gate(c, b);
  t_gate(c, t);
  c.push(GateKind::H, {t});
  c.push(GateKind::CNOT, {a, b});
  t_gate(c, a);
  t_gate(c, b, true);
  c.push(GateKind::CNOT, {a, b});
}

/// Simple bump allocator over a fixed range of clean workspace qubits.
class Pool {
 public:
  Pool(int first, int count) : next_(first), end_(first + count) {}
  int take() {
    if (next_ >= end_) throw TooManyVariables("oracle workspace exhausted");
    return next_++;
  }
  void put_back(int n = 1) { next_ -= n; }
  int available() const { return end_ - next_; }

 private:
  int next_, end_;
};

/// ANDs `inputs` into the clean qubit `out` with a balanced Toffoli tree.
/// Uses inputs.size() - 2 pool qubits; the emitted gates are recorded in
/// order so the caller can uncompute by inversion.
inline void compute_and(Circuit& c, const std::vector<int>& inputs, int out, Pool& pool) {
  const std::size_t k = inputs.size();
  if (k == 0) {
    c.push(GateKind::X, {out});
    return;
  }
  if (k == 1) {
    c.push(GateKind::CNOT, {inputs[0], out});
    return;
  }
  if (k == 2) {
    toffoli(c, inputs[0], inputs[1], out);
    return;
  }
  const std::size_t half = k / 2;
  std::vector<int> left(inputs.begin(), inputs.begin() + half);
  std::vector<int> right(inputs.begin() + half, inputs.end());
  int lq = left.size() == 1 ? left[0] : pool.take();
  int rq = right.size() == 1 ? right[0] : pool.take();
  if (left.size() > 1) compute_and(c, left, lq, pool);
  if (right.size() > 1) compute_and(c, right, rq, pool);
  toffoli(c, lq, rq, out);
}

/// Multi-controlled X via an AND tree over clean workspace. controls may be
/// empty (plain X).
inline void mcx(Circuit& c, const std::vector<int>& controls, int target, Pool& pool) {
  if (controls.empty()) {
    c.push(GateKind::X, {target});
    return;
  }
  if (controls.size() == 1) {
    c.push(GateKind::CNOT, {controls[0], target});
    return;
  }
  if (controls.size() == 2) {
    toffoli(c, controls[0], controls[1], target);
    return;
  }
  // AND the first k-1 controls into a workspace qubit, then Toffoli with
  // the last control; uncompute the workspace.
  std::vector<int> head(controls.begin(), controls.end() - 1);
  int acc = pool.take();
  Circuit sub(c.num_qubits());
  compute_and(sub, head, acc, pool);
  c.append(sub);
  toffoli(c, acc, controls.back(), target);
  c.append(invert_circuit(sub));
}

/// Ancilla-free multi-controlled Z through its phase-polynomial expansion:
/// pi * x1..xk = sum over nonempty subsets S of (-1)^{|S|+1} pi/2^{k-1}
/// times the parity of S. Exponential in k; meant for small standalone
/// circuits only.
inline void mcz_parity(Circuit& c, const std::vector<int>& qubits) {
  const int k = static_cast<int>(qubits.size());
  if (k == 1) {
    c.push(GateKind::Z, {qubits[0]});
    return;
  }
  if (k == 2) {
    c.push(GateKind::CZ, {qubits[0], qubits[1]});
    return;
  }
  if (k > 16) throw TooManyVariables("ancilla-free multi-controlled Z capped at 16 qubits");
  const double unit = std::numbers::pi / static_cast<double>(1LL << (k - 1));
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < k; ++i)
      if ((mask >> i) & 1u) subset.push_back(qubits[i]);
    const double theta = (subset.size() % 2 == 1 ? unit : -unit);
    for (std::size_t i = 0; i + 1 < subset.size(); ++i)
      c.push(GateKind::CNOT, {subset[i], subset.back()});
    c.push(GateKind::Phase, {subset.back()}, theta);
    for (std::size_t i = subset.size() - 1; i-- > 0;)
      c.push(GateKind::CNOT, {subset[i], subset.back()});
  }
}

/// Multi-controlled Z preferring the workspace route; falls back to the
/// parity expansion when no workspace exists.
inline void mcz(Circuit& c, const std::vector<int>& qubits, Pool* pool) {
  if (qubits.size() <= 2 || pool == nullptr || pool->available() < static_cast<int>(qubits.size()) - 1) {
    mcz_parity(c, qubits);
    return;
  }
  // AND everything into one workspace qubit and phase-kick a Z off it.
  int acc = pool->take();
  Circuit sub(c.num_qubits());
  compute_and(sub, qubits, acc, *pool);
  c.append(sub);
  c.push(GateKind::Z, {acc});
  c.append(invert_circuit(sub));
}

}  // namespace mc

// ---------------------------------------------------------------------------
// Oracle synthesis
// ---------------------------------------------------------------------------

/// Register layout of a synthesized oracle: inputs first, one ancilla per
/// clause, then shared workspace. Ancillas return to |0> on every basis
/// input.
struct OracleLayout {
  int inputs = 0;
  int clause_ancillas = 0;
  int workspace = 0;
  int total() const { return inputs + clause_ancillas + workspace; }
};

inline OracleLayout oracle_layout(const CnfFormula& f) {
  OracleLayout l;
  l.inputs = f.num_vars;
  l.clause_ancillas = static_cast<int>(f.clauses.size());
  int widest = 0;
  for (const auto& clause : f.clauses) widest = std::max<int>(widest, clause.size());
  // clause OR needs width-2 scratch; the final AND over m clause bits
  // needs m-1 (m-2 scratch plus the accumulator itself)
  l.workspace = std::max({widest - 2, l.clause_ancillas - 1, 0});
  return l;
}

inline constexpr int kOracleInputCap = 12;

/// Phase oracle |x> -> (-1)^{f(x)} |x> for CNF f. Each clause's OR is
/// evaluated into its ancilla (De Morgan: X-conjugate the positive
/// literals, multi-controlled X, X the ancilla), a Z is phase-kicked off
/// the conjunction of all clause ancillas, and everything uncomputes.
inline Circuit build_oracle(const OracleQcf& o, int input_cap = kOracleInputCap) {
  const CnfFormula& f = o.formula;
  if (f.clauses.empty()) throw UnsupportedTag("oracle requires a non-empty formula");
  if (f.num_vars > input_cap)
    throw TooManyVariables(std::to_string(f.num_vars) + " oracle inputs exceeds cap " +
                           std::to_string(input_cap));
  const OracleLayout layout = oracle_layout(f);
  if (layout.total() > kDefaultQubitCap)
    throw TooManyVariables("oracle needs " + std::to_string(layout.total()) +
                           " qubits, above the simulator cap");

  Circuit compute(layout.total());
  mc::Pool pool(layout.inputs + layout.clause_ancillas, layout.workspace);
  for (std::size_t ci = 0; ci < f.clauses.size(); ++ci) {
    const auto& clause = f.clauses[ci];
    const int anc = layout.inputs + static_cast<int>(ci);
    // OR(l1..lk) == NOT AND(!l1..!lk); a positive literal is false when its
    // qubit is 0, so conjugate positive literals with X.
    std::vector<int> controls;
    std::vector<int> conjugated;
    for (int lit : clause) {
      int q = std::abs(lit) - 1;
      controls.push_back(q);
      if (lit > 0) conjugated.push_back(q);
    }
    for (int q : conjugated) compute.push(GateKind::X, {q});
    mc::Pool clause_pool = pool;  // scratch resets per clause
    mc::mcx(compute, controls, anc, clause_pool);
    compute.push(GateKind::X, {anc});
    for (int q : conjugated) compute.push(GateKind::X, {q});
  }

  Circuit oracle(layout.total());
  oracle.append(compute);
  std::vector<int> clause_bits;
  for (int i = 0; i < layout.clause_ancillas; ++i) clause_bits.push_back(layout.inputs + i);
  mc::Pool phase_pool = pool;
  mc::mcz(oracle, clause_bits, &phase_pool);
  oracle.append(invert_circuit(compute));
  return oracle;
}

// ---------------------------------------------------------------------------
// Diffusion and Grover search
// ---------------------------------------------------------------------------

/// H^n (2|0><0| - I) H^n via X-conjugated multi-controlled Z (global phase
/// ignored). Ancilla-free; fine for the small registers it is used on.
inline Circuit build_diffusion(int n) {
  Circuit c(n);
  std::vector<int> all(n);
  for (int q = 0; q < n; ++q) all[q] = q;
  for (int q : all) c.push(GateKind::H, {q});
  for (int q : all) c.push(GateKind::X, {q});
  mc::mcz_parity(c, all);
  for (int q : all) c.push(GateKind::X, {q});
  for (int q : all) c.push(GateKind::H, {q});
  return c;
}

namespace detail {

/// Diffusion over the input register of an oracle-sized circuit, reusing
/// the oracle's (clean) ancilla region as workspace.
inline Circuit diffusion_with_workspace(const OracleLayout& layout) {
  Circuit c(layout.total());
  std::vector<int> inputs(layout.inputs);
  for (int q = 0; q < layout.inputs; ++q) inputs[q] = q;
  for (int q : inputs) c.push(GateKind::H, {q});
  for (int q : inputs) c.push(GateKind::X, {q});
  mc::Pool pool(layout.inputs, layout.clause_ancillas + layout.workspace);
  mc::mcz(c, inputs, &pool);
  for (int q : inputs) c.push(GateKind::X, {q});
  for (int q : inputs) c.push(GateKind::H, {q});
  return c;
}

}  // namespace detail

struct GroverRound {
  int iterations = 0;  // j drawn for this round
  Counts counts;
};

struct GroverResult {
  std::string outcome;  // satisfying bitstring, inputs only, qubit 0 rightmost
  std::vector<GroverRound> rounds;
  Counts aggregate;  // all measured outcomes across rounds

  int rounds_used() const { return static_cast<int>(rounds.size()); }
};

struct GroverSchedule {
  double lambda = 8.0 / 7.0;  // cutoff growth, 1 < lambda < 4/3
  int max_rounds = 64;
};

/// Adaptive-schedule search: m = 1; each round draws j uniform in [0, m),
/// prepares the uniform superposition, applies j Grover iterations (oracle
/// then diffusion), and measures. On failure m grows by lambda up to
/// ceil(sqrt(2^n)). Throws SearchExhausted after max_rounds.
inline GroverResult grover_search(const OracleQcf& o, long long shots_per_round, Rng& rng,
                                  const GroverSchedule& schedule = {}) {
  const OracleLayout layout = oracle_layout(o.formula);
  const Circuit oracle = build_oracle(o);
  const Circuit diffusion = detail::diffusion_with_workspace(layout);
  const int n = layout.inputs;

  const std::uint64_t space = 1ULL << n;
  const std::uint64_t cap = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(space))));

  GroverResult result;
  result.aggregate.width = n;
  std::vector<int> inputs(n);
  for (int q = 0; q < n; ++q) inputs[q] = q;

  std::uint64_t m = 1;
  for (int round = 0; round < schedule.max_rounds; ++round) {
    const int j = static_cast<int>(rng.below(m));
    StateVector s = StateVector::zero_state(layout.total());
    for (int q : inputs) apply_gate(s, {GateKind::H, {q}});
    for (int it = 0; it < j; ++it) {
      for (const auto& g : oracle.ops()) apply_gate(s, g);
      for (const auto& g : diffusion.ops()) apply_gate(s, g);
    }
    Counts counts = sample_counts(s, inputs, shots_per_round, rng);

    result.rounds.push_back({j, counts});
    std::string best;
    long long best_count = 0;
    for (const auto& [key, cnt] : counts.histogram) {
      result.aggregate.histogram[key] += cnt;
      result.aggregate.shots += cnt;
      if (o.formula.eval(key_to_bits(key)) && cnt > best_count) {
        best = key;
        best_count = cnt;
      }
    }
    if (!best.empty()) {
      result.outcome = best;
      return result;
    }
    m = std::min<std::uint64_t>(static_cast<std::uint64_t>(
                                    std::ceil(schedule.lambda * static_cast<double>(m))),
                                std::max<std::uint64_t>(cap, 1));
  }
  throw SearchExhausted("no satisfying outcome within " + std::to_string(schedule.max_rounds) +
                        " rounds");
}

// ---------------------------------------------------------------------------
// QFT and arithmetic
// ---------------------------------------------------------------------------

/// |x> -> (1/sqrt(2^n)) sum_y e^{2 pi i x y / 2^n} |y>, qubit 0 least
/// significant. Includes the closing swaps so bit order is preserved.
inline Circuit build_qft(int n) {
  Circuit c(n);
  for (int i = n - 1; i >= 0; --i) {
    c.push(GateKind::H, {i});
    for (int j = i - 1; j >= 0; --j)
      c.push(GateKind::CPhase, {j, i}, std::numbers::pi / static_cast<double>(1LL << (i - j)));
  }
  for (int k = 0; k < n / 2; ++k) c.push(GateKind::SWAP, {k, n - 1 - k});
  return c;
}

namespace detail {

/// QFT without the closing swaps: qubit k ends up holding the phase factor
/// e^{2 pi i x / 2^{k+1}} (bit-reversed output order). The Fourier-basis
/// adders work in this order and undo it with the matching inverse.
inline Circuit qft_noswap(int n, int first_qubit, int total_qubits) {
  Circuit c(total_qubits);
  for (int i = n - 1; i >= 0; --i) {
    c.push(GateKind::H, {first_qubit + i});
    for (int j = i - 1; j >= 0; --j)
      c.push(GateKind::CPhase, {first_qubit + j, first_qubit + i},
             std::numbers::pi / static_cast<double>(1LL << (i - j)));
  }
  return c;
}

/// Controlled-controlled phase from CPhase and CNOT.
inline void ccphase(Circuit& c, int a, int b, int t, double theta) {
  c.push(GateKind::CPhase, {b, t}, theta / 2.0);
  c.push(GateKind::CNOT, {a, b});
  c.push(GateKind::CPhase, {b, t}, -theta / 2.0);
  c.push(GateKind::CNOT, {a, b});
  c.push(GateKind::CPhase, {a, t}, theta / 2.0);
}

/// Phase ladder adding (sign *) the A register into the Fourier-basis B
/// register. After qft_noswap, B qubit k carries e^{2 pi i b / 2^{k+1}}, so
/// source bit j contributes 2 pi 2^j / 2^{k+1}; angles that are multiples
/// of 2 pi are identities and are skipped.
inline void fourier_add_register(Circuit& c, int a_first, int wa, int b_first, int wb, double sign) {
  for (int j = 0; j < wa; ++j) {
    for (int k = 0; k < wb; ++k) {
      const int denom = k + 1 - j;
      if (denom <= 0) continue;
      const double theta = sign * 2.0 * std::numbers::pi / static_cast<double>(1LL << denom);
      c.push(GateKind::CPhase, {a_first + j, b_first + k}, theta);
    }
  }
}

}  // namespace detail

/// Register layout of the arithmetic circuits: A at [0, wA), B at
/// [wA, wA+wB), product register (Mul only) after B, carry ancilla
/// (ripple adder only) last.
struct ArithmeticLayout {
  int wa = 0, wb = 0, wc = 0;
  int a_first = 0;
  int b_first = 0;
  int c_first = 0;   // product register (Mul)
  int ancilla = -1;  // ripple-adder carry
  int total = 0;
  int result_first = 0;
  int result_width = 0;
};

inline ArithmeticLayout arithmetic_layout(const ArithmeticQcf& qcf) {
  const auto& o = qcf.operands;
  ArithmeticLayout l;
  l.wa = o.width_a;
  l.wb = o.width_b;
  l.a_first = 0;
  l.b_first = l.wa;
  if (qcf.op == ProblemTag::Mul) {
    l.wc = o.product_width();
    l.c_first = l.wa + l.wb;
    l.total = l.wa + l.wb + l.wc;
    l.result_first = l.c_first;
    l.result_width = l.wc;
  } else {
    l.total = l.wa + l.wb;
    l.result_first = l.b_first;
    l.result_width = l.wb;
    if (qcf.encoding == ArithmeticEncoding::Reversible) {
      l.ancilla = l.total;
      l.total += 1;
    }
  }
  return l;
}

/// Draper adder: QFT on the target register, controlled-phase ladder from
/// the source register, inverse QFT. |a>|b> -> |a>|(b+a) mod 2^wB>.
inline Circuit build_qft_adder(const ArithmeticOperands& w) {
  Circuit c(w.width_a + w.width_b);
  Circuit qft = detail::qft_noswap(w.width_b, w.width_a, c.num_qubits());
  c.append(qft);
  detail::fourier_add_register(c, 0, w.width_a, w.width_a, w.width_b, +1.0);
  c.append(invert_circuit(qft));
  return c;
}

/// Two's-complement subtraction: the same ladder with negated phases.
/// |a>|b> -> |a>|(b-a) mod 2^wB>.
inline Circuit build_qft_subtractor(const ArithmeticOperands& w) {
  Circuit c(w.width_a + w.width_b);
  Circuit qft = detail::qft_noswap(w.width_b, w.width_a, c.num_qubits());
  c.append(qft);
  detail::fourier_add_register(c, 0, w.width_a, w.width_a, w.width_b, -1.0);
  c.append(invert_circuit(qft));
  return c;
}

/// Fourier multiplier composed of controlled additions: for each operand
/// bit pair (i, j) the product register accumulates 2^{i+j}.
/// |a>|b>|0> -> |a>|b>|(a*b) mod 2^wC>.
inline Circuit build_qft_multiplier(const ArithmeticOperands& w) {
  const int wc = w.product_width();
  Circuit c(w.width_a + w.width_b + wc);
  const int p_first = w.width_a + w.width_b;
  Circuit qft = detail::qft_noswap(wc, p_first, c.num_qubits());
  c.append(qft);
  for (int i = 0; i < w.width_a; ++i) {
    for (int j = 0; j < w.width_b; ++j) {
      for (int k = 0; k < wc; ++k) {
        const int denom = k + 1 - i - j;  // a_i b_j adds 2^{i+j}
        if (denom <= 0) continue;
        const double theta = 2.0 * std::numbers::pi / static_cast<double>(1LL << denom);
        detail::ccphase(c, i, w.width_a + j, p_first + k, theta);
      }
    }
  }
  c.append(invert_circuit(qft));
  return c;
}

/// Ripple-carry adder from MAJ/UMA cells with one carry ancilla, reset to
/// |0> at the end. Requires equal widths. |a>|b> -> |a>|(b+a) mod 2^w>.
inline Circuit build_ripple_adder(const ArithmeticOperands& w) {
  if (w.width_a != w.width_b)
    throw WidthMismatch("ripple adder requires equal operand widths");
  const int n = w.width_a;
  Circuit c(2 * n + 1);
  const int carry = 2 * n;
  auto a = [&](int i) { return i; };
  auto b = [&](int i) { return n + i; };

  auto maj = [&](int x, int y, int z) {
    c.push(GateKind::CNOT, {z, y});
    c.push(GateKind::CNOT, {z, x});
    mc::toffoli(c, x, y, z);
  };
  auto uma = [&](int x, int y, int z) {
    mc::toffoli(c, x, y, z);
    c.push(GateKind::CNOT, {z, x});
    c.push(GateKind::CNOT, {x, y});
  };

  maj(carry, b(0), a(0));
  for (int i = 1; i < n; ++i) maj(a(i - 1), b(i), a(i));
  // modular: the carry-out is dropped
  for (int i = n - 1; i >= 1; --i) uma(a(i - 1), b(i), a(i));
  uma(carry, b(0), a(0));
  return c;
}

/// X-gate preparation of the operand registers from |0...0>.
inline Circuit build_operand_prep(const ArithmeticQcf& qcf) {
  const ArithmeticLayout l = arithmetic_layout(qcf);
  Circuit c(l.total);
  for (int i = 0; i < l.wa; ++i)
    if ((qcf.operands.a >> i) & 1ULL) c.push(GateKind::X, {l.a_first + i});
  for (int i = 0; i < l.wb; ++i)
    if ((qcf.operands.b >> i) & 1ULL) c.push(GateKind::X, {l.b_first + i});
  return c;
}

/// Full program: operand prep, the arithmetic operator, measurement of the
/// result register.
inline Circuit build_arithmetic_program(const ArithmeticQcf& qcf) {
  const ArithmeticLayout l = arithmetic_layout(qcf);
  Circuit op(0);
  switch (qcf.op) {
    case ProblemTag::Add:
      op = qcf.encoding == ArithmeticEncoding::Reversible ? build_ripple_adder(qcf.operands)
                                                          : build_qft_adder(qcf.operands);
      break;
    case ProblemTag::Sub:
      if (qcf.encoding == ArithmeticEncoding::Reversible)
        throw UnsupportedTag("reversible subtractor not provided; use the QFT encoding");
      op = build_qft_subtractor(qcf.operands);
      break;
    case ProblemTag::Mul:
      op = build_qft_multiplier(qcf.operands);
      break;
    default:
      throw UnsupportedTag("not an arithmetic tag");
  }
  Circuit c(std::max(l.total, op.num_qubits()));
  Circuit prep = build_operand_prep(qcf);
  for (const auto& g : prep.ops()) c.push_gate(g);
  for (const auto& g : op.ops()) c.push_gate(g);
  for (int i = 0; i < l.result_width; ++i) c.push(GateKind::Measure, {l.result_first + i});
  return c;
}

}  // namespace qforge
