#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qforge/circuit.hpp"
#include "qforge/errors.hpp"
#include "qforge/qcf.hpp"
#include "qforge/rng.hpp"

namespace qforge {

using cplx = std::complex<double>;

/// Dense statevector over n qubits; amplitude index bit i is qubit i
/// (qubit 0 is the least significant bit, shown rightmost in bitstrings).
struct StateVector {
  int n = 0;
  std::vector<cplx> amps;

  static StateVector zero_state(int n) {
    StateVector s;
    s.n = n;
    s.amps.assign(std::size_t{1} << n, cplx(0.0, 0.0));
    s.amps[0] = 1.0;
    return s;
  }

  double norm_sq() const {
    double acc = 0.0;
    for (const auto& a : amps) acc += std::norm(a);
    return acc;
  }

  double prob_of(std::uint64_t basis) const { return std::norm(amps[basis]); }
};

namespace sim {

inline std::array<cplx, 4> single_qubit_matrix(const Gate& g) {
  const cplx I(0.0, 1.0);
  const double c = std::cos(g.angle / 2.0), s = std::sin(g.angle / 2.0);
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return {cplx(r), cplx(r), cplx(r), cplx(-r)};
    }
    case GateKind::X: return {cplx(0), cplx(1), cplx(1), cplx(0)};
    case GateKind::Y: return {cplx(0), -I, I, cplx(0)};
    case GateKind::Z: return {cplx(1), cplx(0), cplx(0), cplx(-1)};
    case GateKind::RX: return {cplx(c), -I * s, -I * s, cplx(c)};
    case GateKind::RY: return {cplx(c), cplx(-s), cplx(s), cplx(c)};
    case GateKind::RZ: return {std::exp(-I * (g.angle / 2.0)), cplx(0), cplx(0), std::exp(I * (g.angle / 2.0))};
    case GateKind::Phase: return {cplx(1), cplx(0), cplx(0), std::exp(I * g.angle)};
    default:
      throw LengthMismatch("not a single-qubit unitary");
  }
}

inline void apply_single(StateVector& s, const std::array<cplx, 4>& m, int q) {
  const std::uint64_t bit = 1ULL << q;
  const std::uint64_t size = s.amps.size();
  for (std::uint64_t i = 0; i < size; ++i) {
    if (i & bit) continue;
    const cplx a0 = s.amps[i];
    const cplx a1 = s.amps[i | bit];
    s.amps[i] = m[0] * a0 + m[1] * a1;
    s.amps[i | bit] = m[2] * a0 + m[3] * a1;
  }
}

inline void apply_two(StateVector& s, const Gate& g) {
  const std::uint64_t b0 = 1ULL << g.qubits[0];
  const std::uint64_t b1 = 1ULL << g.qubits[1];
  const std::uint64_t size = s.amps.size();
  switch (g.kind) {
    case GateKind::CNOT:
      for (std::uint64_t i = 0; i < size; ++i)
        if ((i & b0) && !(i & b1)) std::swap(s.amps[i], s.amps[i | b1]);
      break;
    case GateKind::CZ:
      for (std::uint64_t i = 0; i < size; ++i)
        if ((i & b0) && (i & b1)) s.amps[i] = -s.amps[i];
      break;
    case GateKind::CPhase: {
      const cplx f = std::exp(cplx(0.0, 1.0) * g.angle);
      for (std::uint64_t i = 0; i < size; ++i)
        if ((i & b0) && (i & b1)) s.amps[i] *= f;
      break;
    }
    case GateKind::SWAP:
      for (std::uint64_t i = 0; i < size; ++i)
        if ((i & b0) && !(i & b1)) std::swap(s.amps[i], s.amps[(i & ~b0) | b1]);
      break;
    default:
      throw LengthMismatch("not a two-qubit gate");
  }
}

}  // namespace sim

inline void apply_gate(StateVector& s, const Gate& g) {
  if (g.kind == GateKind::Measure) return;  // sampling happens separately
  if (g.qubits.size() == 1)
    sim::apply_single(s, sim::single_qubit_matrix(g), g.qubits[0]);
  else
    sim::apply_two(s, g);
}

inline constexpr int kDefaultQubitCap = 24;

/// Exact pre-measurement state of a bound circuit. Deterministic.
inline StateVector run_statevector(const Circuit& circuit,
                                   const std::vector<double>& bindings = {},
                                   int qubit_cap = kDefaultQubitCap) {
  const Circuit* c = &circuit;
  Circuit bound(0);
  if (circuit.num_parameters() > 0 || circuit.has_symbolic()) {
    bound = circuit.bind(bindings);
    c = &bound;
  } else if (!bindings.empty()) {
    throw UnboundParameter("bindings supplied for a circuit without parameters");
  }
  if (c->num_qubits() > qubit_cap)
    throw TooManyQubits(std::to_string(c->num_qubits()) + " qubits exceeds cap " +
                        std::to_string(qubit_cap));
  StateVector s = StateVector::zero_state(c->num_qubits());
  for (const auto& g : c->ops()) apply_gate(s, g);
  return s;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Aggregated shot outcomes. Keys are bitstrings over the measured qubits,
/// classical bit 0 rightmost.
struct Counts {
  std::map<std::string, long long> histogram;
  long long shots = 0;
  int width = 0;

  void add(const std::string& key) {
    ++histogram[key];
    ++shots;
  }
};

inline std::string bits_to_key(std::uint64_t value, int width) {
  std::string key(width, '0');
  for (int i = 0; i < width; ++i)
    if ((value >> i) & 1ULL) key[width - 1 - i] = '1';
  return key;
}

inline std::uint64_t key_to_bits(const std::string& key) {
  std::uint64_t v = 0;
  const int width = static_cast<int>(key.size());
  for (int i = 0; i < width; ++i)
    if (key[width - 1 - i] == '1') v |= 1ULL << i;
  return v;
}

/// i.i.d. samples from the Born distribution of the measured qubits.
/// measured[i] is the qubit recorded as classical bit i.
inline Counts sample_counts(const StateVector& s, const std::vector<int>& measured,
                            long long shots, Rng& rng) {
  const int m = static_cast<int>(measured.size());
  // marginal over the measured subset
  std::vector<double> probs(std::size_t{1} << m, 0.0);
  const std::uint64_t size = s.amps.size();
  for (std::uint64_t i = 0; i < size; ++i) {
    const double p = std::norm(s.amps[i]);
    if (p == 0.0) continue;
    std::uint64_t out = 0;
    for (int b = 0; b < m; ++b)
      if ((i >> measured[b]) & 1ULL) out |= 1ULL << b;
    probs[out] += p;
  }
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }

  Counts counts;
  counts.width = m;
  for (long long t = 0; t < shots; ++t) {
    const double u = rng.uniform(0.0, acc);
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::uint64_t out = static_cast<std::uint64_t>(it - cdf.begin());
    if (out >= probs.size()) out = probs.size() - 1;
    counts.add(bits_to_key(out, m));
  }
  return counts;
}

/// Convenience: simulate and sample a circuit's own Measure ops.
inline Counts execute_counts(const Circuit& c, const std::vector<double>& bindings,
                             long long shots, Rng& rng, int qubit_cap = kDefaultQubitCap) {
  StateVector s = run_statevector(c, bindings, qubit_cap);
  return sample_counts(s, c.measured_qubits(), shots, rng);
}

// ---------------------------------------------------------------------------
// Expectation
// ---------------------------------------------------------------------------

/// sum_x p(x) * ising_energy(m, s(x)) over the observed outcomes.
inline double expectation_ising(const Counts& counts, const IsingModel& m) {
  if (counts.width != m.n)
    throw LengthMismatch("counts width " + std::to_string(counts.width) + " != spins " +
                         std::to_string(m.n));
  double acc = 0.0;
  for (const auto& [key, c] : counts.histogram) {
    std::uint64_t bits = key_to_bits(key);
    std::vector<int> s(m.n);
    for (int i = 0; i < m.n; ++i) s[i] = ((bits >> i) & 1ULL) ? 1 : -1;
    acc += static_cast<double>(c) * ising_energy(m, s);
  }
  return acc / static_cast<double>(counts.shots);
}

/// Exact expectation from the statevector (no sampling noise); used for
/// cross-checking the sampled estimate.
inline double expectation_ising_exact(const StateVector& sv, const IsingModel& m) {
  double acc = 0.0;
  const std::uint64_t size = sv.amps.size();
  for (std::uint64_t x = 0; x < size; ++x) {
    const double p = std::norm(sv.amps[x]);
    if (p == 0.0) continue;
    std::vector<int> s(m.n);
    for (int i = 0; i < m.n; ++i) s[i] = ((x >> i) & 1ULL) ? 1 : -1;
    acc += p * ising_energy(m, s);
  }
  return acc;
}

}  // namespace qforge
