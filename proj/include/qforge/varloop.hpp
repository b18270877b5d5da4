#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "qforge/devices.hpp"
#include "qforge/generator.hpp"
#include "qforge/qcf.hpp"
#include "qforge/rng.hpp"
#include "qforge/simulator.hpp"

namespace qforge {

// ---------------------------------------------------------------------------
// SPSA
// ---------------------------------------------------------------------------

/// Gain-sequence constants. a <= 0 means "calibrate so the first step has
/// magnitude about 0.1". alpha/gamma are the canonical published defaults.
struct SpsaConfig {
  int max_iters = 500;
  double a = -1.0;
  double c = 0.1;
  double big_a = -1.0;  // <= 0 means 0.1 * max_iters
  double alpha = 0.602;
  double gamma = 0.101;
  std::uint64_t seed = 0;
};

struct SpsaResult {
  std::vector<double> best_params;
  double best_value = 0.0;
  std::vector<double> trace;  // best evaluation seen at each iteration
};

/// Objective: params and an evaluation tag (2k for the +perturbation of
/// iteration k, 2k+1 for the -side). Stochastic objectives can derive
/// their sampling stream from the tag so results do not depend on
/// evaluation order.
using SpsaObjective = std::function<double(const std::vector<double>&, std::uint64_t)>;

/// Standard SPSA minimization with Rademacher perturbations. Returns the
/// best-seen iterate; deterministic under a fixed seed.
inline SpsaResult spsa_minimize(const SpsaObjective& objective, std::vector<double> x,
                                const SpsaConfig& cfg) {
  const std::size_t dim = x.size();
  const double big_a = cfg.big_a > 0 ? cfg.big_a : 0.1 * cfg.max_iters;
  const double a = cfg.a > 0 ? cfg.a : 0.1 * std::pow(big_a + 1.0, cfg.alpha);

  Rng rng(cfg.seed);
  SpsaResult result;
  result.best_params = x;
  result.best_value = std::numeric_limits<double>::infinity();

  std::vector<double> delta(dim), xp(dim), xm(dim);
  for (int k = 0; k < cfg.max_iters; ++k) {
    const double ck = cfg.c / std::pow(k + 1.0, cfg.gamma);
    const double ak = a / std::pow(k + 1.0 + big_a, cfg.alpha);
    for (std::size_t i = 0; i < dim; ++i) delta[i] = rng.sign();
    for (std::size_t i = 0; i < dim; ++i) {
      xp[i] = x[i] + ck * delta[i];
      xm[i] = x[i] - ck * delta[i];
    }
    const double fp = objective(xp, 2ULL * k);
    const double fm = objective(xm, 2ULL * k + 1);
    if (fp < result.best_value) {
      result.best_value = fp;
      result.best_params = xp;
    }
    if (fm < result.best_value) {
      result.best_value = fm;
      result.best_params = xm;
    }
    result.trace.push_back(std::min(fp, fm));
    const double scale = (fp - fm) / (2.0 * ck);
    for (std::size_t i = 0; i < dim; ++i) x[i] -= ak * scale / delta[i];
  }
  return result;
}

// ---------------------------------------------------------------------------
// Variational run loop
// ---------------------------------------------------------------------------

struct QaoaAlgo {
  int p = 3;
};
struct VqeAlgo {
  int layers = 3;
};
using VariationalAlgo = std::variant<QaoaAlgo, VqeAlgo>;

struct VariationalResult {
  Counts counts;               // distribution at the best parameters
  std::vector<double> trace;   // optimizer trace
  std::vector<double> best_params;
  double best_value = 0.0;     // best sampled energy seen by the optimizer
  double final_energy = 0.0;   // energy of the returned counts
  IsingModel ising;
  int num_qubits = 0;
};

/// End-to-end variational loop: Ising model from the QUBO, circuit from the
/// generator, SPSA over the sampled energy, final distribution at the best
/// parameters. RNG substreams: 0 parameter init, 1 SPSA perturbations,
/// 2 final sampling, 3+k evaluation sampling for tag k.
inline VariationalResult run_variational(const QuboQcf& qubo, const VariationalAlgo& algo,
                                         const Workload& wl, std::uint64_t seed,
                                         int qubit_cap = kDefaultQubitCap) {
  VariationalResult out;
  out.ising = qubo_to_ising(qubo);
  out.num_qubits = qubo.n;

  Rng master(seed);
  ParametricCircuit pc;
  std::vector<double> x0;
  if (const auto* q = std::get_if<QaoaAlgo>(&algo)) {
    pc = build_qaoa(out.ising, {q->p});
    Rng init = master.substream(0);
    x0 = init_qaoa_params(q->p, init).flat();
  } else {
    const auto& v = std::get<VqeAlgo>(algo);
    pc = build_vqe_ansatz(qubo.n, v.layers);
    for (int q = 0; q < qubo.n; ++q) pc.circuit.push(GateKind::Measure, {q});
    Rng init = master.substream(0);
    x0 = init_vqe_params(qubo.n, v.layers, init).thetas;
  }

  const auto measured = pc.circuit.measured_qubits();
  auto energy_at = [&](const std::vector<double>& params, std::uint64_t stream) {
    Circuit bound = pc.bind_logical(params);
    StateVector sv = run_statevector(bound, {}, qubit_cap);
    Rng sampler(derive_seed(seed, 3 + stream));
    Counts counts = sample_counts(sv, measured, wl.shots, sampler);
    return expectation_ising(counts, out.ising);
  };

  SpsaConfig cfg;
  cfg.max_iters = static_cast<int>(wl.iterations);
  cfg.seed = derive_seed(seed, 1);
  SpsaResult spsa = spsa_minimize(energy_at, x0, cfg);

  out.trace = spsa.trace;
  out.best_params = spsa.best_params;
  out.best_value = spsa.best_value;

  Circuit bound = pc.bind_logical(spsa.best_params);
  StateVector sv = run_statevector(bound, {}, qubit_cap);
  Rng final_rng = master.substream(2);
  out.counts = sample_counts(sv, measured, wl.shots, final_rng);
  out.final_energy = expectation_ising(out.counts, out.ising);
  return out;
}

}  // namespace qforge
