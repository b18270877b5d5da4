#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qforge/devices.hpp"
#include "qforge/errors.hpp"

namespace qforge {

/// Scoring knobs. lambda1 weights error, lambda2 time, lambda3 price; they
/// must sum to 1. tau is the fidelity feasibility threshold; delta is the
/// soft trapped-ion bias.
struct RecommenderWeights {
  double lambda1 = 0.6;
  double lambda2 = 0.3;
  double lambda3 = 0.1;
  double tau = 0.5;
  double delta = 0.05;

  void validate() const {
    if (std::abs(lambda1 + lambda2 + lambda3 - 1.0) > 1e-9)
      throw SchemaError("recommender weights must sum to 1");
    if (lambda1 < 0 || lambda2 < 0 || lambda3 < 0) throw SchemaError("weights must be non-negative");
    if (tau < 0.0 || tau > 1.0) throw SchemaError("tau must lie in [0, 1]");
  }
};

/// One transpiled circuit variant tagged with its target device.
struct CandidatePair {
  std::string circuit_id;
  const DeviceRecord* device = nullptr;
  ResourceMetrics metrics;
  int qubits_required = 0;
  bool gate_set_incompatible = false;  // hook for externally imported circuits
};

struct RankedPair {
  std::string circuit_id;
  std::string device;
  MetricBundle bundle;
  double score = 0.0;
  bool bias_applied = false;
};

struct RejectedPair {
  std::string circuit_id;
  std::string device;
  std::string reason;
};

/// Ascending by score; ties broken lexicographically on (e_hat, p_hat,
/// t_hat). best() is the selected circuit-hardware pair.
struct Ranking {
  std::vector<RankedPair> entries;
  std::vector<RejectedPair> rejected;

  const RankedPair& best() const { return entries.front(); }
};

/// Feasibility filter, max-normalization, weighted score with the soft
/// trapped-ion bias, deterministic tie-break.
inline Ranking recommend(const std::vector<CandidatePair>& candidates,
                         const RecommenderWeights& weights, const Workload& wl) {
  weights.validate();
  if (candidates.empty()) throw NoCompatiblePair("no candidate circuit-device pairs supplied");

  struct Feasible {
    const CandidatePair* cand;
    MetricBundle bundle;
  };
  std::vector<Feasible> feasible;
  Ranking ranking;

  for (const auto& cand : candidates) {
    const DeviceRecord& dev = *cand.device;
    if (cand.qubits_required > dev.qubits) {
      ranking.rejected.push_back({cand.circuit_id, dev.name,
                                  "needs " + std::to_string(cand.qubits_required) +
                                      " qubits, device has " + std::to_string(dev.qubits)});
      continue;
    }
    if (cand.gate_set_incompatible) {
      ranking.rejected.push_back({cand.circuit_id, dev.name, "gate set incompatible"});
      continue;
    }
    MetricBundle b;
    b.error = estimate_error(cand.metrics, dev);
    b.time = estimate_time(cand.metrics, dev, wl);
    b.price = estimate_cost(cand.metrics, dev, wl, b.time);
    if (1.0 - b.error < weights.tau) {
      std::ostringstream os;
      os << "estimated fidelity " << (1.0 - b.error) << " below tau = " << weights.tau;
      ranking.rejected.push_back({cand.circuit_id, dev.name, os.str()});
      continue;
    }
    feasible.push_back({&cand, b});
  }

  if (feasible.empty()) {
    std::string msg = "no compatible circuit-device pair;";
    for (const auto& r : ranking.rejected)
      msg += "\n  " + r.circuit_id + " on " + r.device + ": " + r.reason;
    throw NoCompatiblePair(msg);
  }

  double e_max = 0.0, t_max = 0.0, p_max = 0.0;
  for (const auto& f : feasible) {
    e_max = std::max(e_max, f.bundle.error);
    t_max = std::max(t_max, f.bundle.time);
    p_max = std::max(p_max, f.bundle.price);
  }
  // A zero maximum means the metric is zero across the feasible set; the
  // normalized value is then 0 for everyone (no 0/0).
  auto norm = [](double v, double vmax) { return vmax > 0.0 ? v / vmax : 0.0; };

  for (auto& f : feasible) {
    f.bundle.e_hat = norm(f.bundle.error, e_max);
    f.bundle.t_hat = norm(f.bundle.time, t_max);
    f.bundle.p_hat = norm(f.bundle.price, p_max);
    RankedPair entry;
    entry.circuit_id = f.cand->circuit_id;
    entry.device = f.cand->device->name;
    entry.bundle = f.bundle;
    entry.score = weights.lambda1 * f.bundle.e_hat + weights.lambda2 * f.bundle.t_hat +
                  weights.lambda3 * f.bundle.p_hat;
    const bool bias_condition = weights.lambda1 >= 0.8 || f.cand->qubits_required > 10;
    if (bias_condition && f.cand->device->technology == Technology::TrappedIon) {
      entry.score -= weights.delta;  // soft bias, scores may go negative
      entry.bias_applied = true;
    }
    ranking.entries.push_back(std::move(entry));
  }

  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const RankedPair& a, const RankedPair& b) {
              if (a.score != b.score) return a.score < b.score;
              if (a.bundle.e_hat != b.bundle.e_hat) return a.bundle.e_hat < b.bundle.e_hat;
              if (a.bundle.p_hat != b.bundle.p_hat) return a.bundle.p_hat < b.bundle.p_hat;
              if (a.bundle.t_hat != b.bundle.t_hat) return a.bundle.t_hat < b.bundle.t_hat;
              return std::tie(a.device, a.circuit_id) < std::tie(b.device, b.circuit_id);
            });
  return ranking;
}

}  // namespace qforge
