#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qforge/circuit.hpp"
#include "qforge/errors.hpp"
#include "qforge/transpiler.hpp"

namespace qforge {

enum class Technology { Superconducting, TrappedIon };

inline const char* technology_name(Technology t) {
  return t == Technology::Superconducting ? "superconducting" : "trapped_ion";
}

// ---------------------------------------------------------------------------
// Pricing
// ---------------------------------------------------------------------------

struct TimeBased {
  double usd_per_second = 0.0;
};

struct PerShot {
  double usd_per_task = 0.0;
  double usd_per_shot = 0.0;
};

struct PerOperation {
  double usd_per_1q = 0.0;
  double usd_per_2q = 0.0;
  double usd_per_measure = 0.0;
  double min_charge = 0.0;
  // When set, the charge applies per optimizer iteration (each iteration
  // is one submitted task): price = I * max(min_charge, rate * S).
  bool per_task = true;
};

using PricingModel = std::variant<TimeBased, PerShot, PerOperation>;

// ---------------------------------------------------------------------------
// Device record
// ---------------------------------------------------------------------------

struct DeviceRecord {
  std::string name;
  Technology technology = Technology::Superconducting;
  int qubits = 0;
  double e1 = 0.0, e2 = 0.0, em = 0.0;  // error probabilities per op class
  double t1 = 0.0, t2 = 0.0;            // gate durations, seconds
  double coh_t1 = 0.0, coh_t2 = 0.0;    // coherence times, informational
  CouplingMap coupling;
  TwoQubitBasis basis = TwoQubitBasis::CNOT;
  PricingModel pricing = TimeBased{};
};

/// Shots and optimizer iterations of the planned execution; the time and
/// cost models scale with both.
struct Workload {
  long long shots = 1000;
  long long iterations = 1;
};

/// Raw and max-normalized metric values for a circuit-device pair.
struct MetricBundle {
  double error = 0.0;  // E, total error probability
  double time = 0.0;   // T, seconds
  double price = 0.0;  // P, USD
  double e_hat = 0.0, t_hat = 0.0, p_hat = 0.0;
};

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// Product-of-survivals error model:
///   E = 1 - (1-e1)^N1 (1-e2)^N2 (1-em)^Nm,
/// computed in log space so huge gate counts stay stable.
inline double estimate_error(const ResourceMetrics& m, const DeviceRecord& d) {
  const double log_survival = static_cast<double>(m.n1) * std::log1p(-d.e1) +
                              static_cast<double>(m.n2) * std::log1p(-d.e2) +
                              static_cast<double>(m.nm) * std::log1p(-d.em);
  return -std::expm1(log_survival);
}

/// T = (D1Q * t1 + D2Q * t2) * S * I.
inline double estimate_time(const ResourceMetrics& m, const DeviceRecord& d, const Workload& wl) {
  return (static_cast<double>(m.d1q) * d.t1 + static_cast<double>(m.d2q) * d.t2) *
         static_cast<double>(wl.shots) * static_cast<double>(wl.iterations);
}

/// Provider price under the device's pricing model. T must come from
/// estimate_time for time-based devices.
inline double estimate_cost(const ResourceMetrics& m, const DeviceRecord& d, const Workload& wl,
                            double T) {
  const double S = static_cast<double>(wl.shots);
  const double I = static_cast<double>(wl.iterations);
  if (const auto* tb = std::get_if<TimeBased>(&d.pricing)) {
    return tb->usd_per_second * T;
  }
  if (const auto* ps = std::get_if<PerShot>(&d.pricing)) {
    return ps->usd_per_task + ps->usd_per_shot * S * I;
  }
  const auto& po = std::get<PerOperation>(d.pricing);
  const double rate = po.usd_per_1q * static_cast<double>(m.n1) +
                      po.usd_per_2q * static_cast<double>(m.n2) +
                      po.usd_per_measure * static_cast<double>(m.nm);
  if (po.per_task) return I * std::max(po.min_charge, rate * S);
  return std::max(po.min_charge, rate * S * I);
}

/// Transpiles for a device and extracts metrics; the recommender consumes
/// the result.
inline TranspiledCircuit transpile(const Circuit& c, const DeviceRecord& d) {
  return transpile_to(c, d.basis, d.coupling);
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace registry_detail {

inline double require_number(const nlohmann::json& j, const std::string& device,
                             const std::string& field, double lo, double hi) {
  if (!j.contains(field) || !j[field].is_number())
    throw SchemaError(device + "." + field + ": missing or not a number");
  const double v = j[field].get<double>();
  if (v < lo || v > hi)
    throw SchemaError(device + "." + field + " = " + std::to_string(v) + " out of range");
  return v;
}

inline PricingModel parse_pricing(const nlohmann::json& j, const std::string& device) {
  if (!j.contains("pricing") || !j["pricing"].is_object())
    throw SchemaError(device + ".pricing: missing");
  const auto& p = j["pricing"];
  const std::string model = p.value("model", "");
  const double inf = 1e18;
  if (model == "time_based") {
    return TimeBased{require_number(p, device + ".pricing", "usd_per_second", 0, inf)};
  }
  if (model == "per_shot") {
    return PerShot{require_number(p, device + ".pricing", "usd_per_task", 0, inf),
                   require_number(p, device + ".pricing", "usd_per_shot", 0, inf)};
  }
  if (model == "per_operation") {
    PerOperation po;
    po.usd_per_1q = require_number(p, device + ".pricing", "usd_per_1q", 0, inf);
    po.usd_per_2q = require_number(p, device + ".pricing", "usd_per_2q", 0, inf);
    po.usd_per_measure = require_number(p, device + ".pricing", "usd_per_measure", 0, inf);
    po.min_charge = p.value("min_charge", 0.0);
    if (po.min_charge < 0) throw SchemaError(device + ".pricing.min_charge negative");
    po.per_task = p.value("per_task", true);
    return po;
  }
  throw SchemaError(device + ".pricing.model: expected time_based | per_shot | per_operation");
}

inline CouplingMap parse_coupling(const nlohmann::json& j, const std::string& device, int qubits) {
  CouplingMap cm;
  cm.num_qubits = qubits;
  if (!j.contains("coupling")) throw SchemaError(device + ".coupling: missing");
  const auto& c = j["coupling"];
  if (c.is_string() && c.get<std::string>() == "all_to_all") {
    cm.all_to_all = true;
    return cm;
  }
  if (!c.is_array()) throw SchemaError(device + ".coupling: expected pair list or \"all_to_all\"");
  for (const auto& pair : c) {
    if (!pair.is_array() || pair.size() != 2)
      throw SchemaError(device + ".coupling: entries must be [u, v]");
    int u = pair[0].get<int>(), v = pair[1].get<int>();
    if (u < 0 || v < 0 || u >= qubits || v >= qubits || u == v)
      throw SchemaError(device + ".coupling: invalid pair (" + std::to_string(u) + "," +
                        std::to_string(v) + ")");
    cm.add_pair(u, v);
  }
  return cm;
}

}  // namespace registry_detail

inline std::vector<DeviceRecord> parse_registry(const nlohmann::json& root) {
  namespace rd = registry_detail;
  if (!root.contains("devices") || !root["devices"].is_array())
    throw SchemaError("registry: top-level \"devices\" array missing");
  std::vector<DeviceRecord> out;
  for (const auto& j : root["devices"]) {
    DeviceRecord d;
    if (!j.contains("name") || !j["name"].is_string()) throw SchemaError("device.name: missing");
    d.name = j["name"].get<std::string>();
    const std::string tech = j.value("technology", "");
    if (tech == "superconducting")
      d.technology = Technology::Superconducting;
    else if (tech == "trapped_ion")
      d.technology = Technology::TrappedIon;
    else
      throw SchemaError(d.name + ".technology: expected superconducting | trapped_ion");
    d.qubits = static_cast<int>(rd::require_number(j, d.name, "qubits", 1, 1e6));
    d.e1 = rd::require_number(j, d.name, "e1", 0.0, 1.0 - 1e-12);
    d.e2 = rd::require_number(j, d.name, "e2", 0.0, 1.0 - 1e-12);
    d.em = rd::require_number(j, d.name, "em", 0.0, 1.0 - 1e-12);
    d.t1 = rd::require_number(j, d.name, "t1", 1e-15, 1.0);
    d.t2 = rd::require_number(j, d.name, "t2", 1e-15, 1.0);
    d.coh_t1 = rd::require_number(j, d.name, "T1", 0.0, 1e9);
    d.coh_t2 = rd::require_number(j, d.name, "T2", 0.0, 1e9);
    const std::string basis = j.value("basis", "cx");
    if (basis == "cx")
      d.basis = TwoQubitBasis::CNOT;
    else if (basis == "cz")
      d.basis = TwoQubitBasis::CZ;
    else
      throw SchemaError(d.name + ".basis: expected cx | cz");
    d.coupling = rd::parse_coupling(j, d.name, d.qubits);
    d.pricing = rd::parse_pricing(j, d.name);
    out.push_back(std::move(d));
  }
  return out;
}

/// Loads a device registry file. The bundled default mirrors the
/// calibration snapshot shipped under data/.
inline std::vector<DeviceRecord> load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open registry file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("registry JSON: ") + e.what());
  }
  return parse_registry(root);
}

}  // namespace qforge
