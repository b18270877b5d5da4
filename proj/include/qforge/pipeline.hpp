#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qforge/decoder.hpp"
#include "qforge/devices.hpp"
#include "qforge/errors.hpp"
#include "qforge/generator.hpp"
#include "qforge/ingest.hpp"
#include "qforge/qcf.hpp"
#include "qforge/recommender.hpp"
#include "qforge/transpiler.hpp"
#include "qforge/varloop.hpp"

namespace qforge {

using Json = nlohmann::ordered_json;

struct PipelineOptions {
  RecommenderWeights weights;
  long long shots = 1000;
  long long iterations = 500;
  int qaoa_p = 3;
  int vqe_layers = 3;
  std::string algo = "auto";  // auto | qaoa | vqe | grover
  std::uint64_t seed = 0;
  std::string devices_path;  // empty: bundled registry
  int qubit_cap = kDefaultQubitCap;
  bool execute = true;  // false: stop after the ranking (recommend subcommand)
};

inline std::string default_registry_path() {
#ifdef QFORGE_DATA_DIR
  return std::string(QFORGE_DATA_DIR) + "/devices.json";
#else
  return "data/devices.json";
#endif
}

/// The QCFs an instance translates to; which members are present depends on
/// the problem tag.
struct QcfBundle {
  std::optional<QuboQcf> qubo;
  std::optional<OracleQcf> oracle;
  std::optional<ArithmeticQcf> arithmetic;
};

inline QcfBundle translate_instance(const ProblemInstance& inst) {
  QcfBundle q;
  if (is_graph_tag(inst.tag)) {
    q.qubo = build_qubo(inst);
    const bool oracle_capable = inst.tag == ProblemTag::MIS || inst.tag == ProblemTag::Clique ||
                                inst.tag == ProblemTag::KColor ||
                                inst.tag == ProblemTag::VertexCover;
    // Clique/VC/KColor oracles need k; skip the oracle QCF when the
    // instance does not carry one.
    if (oracle_capable && (inst.tag == ProblemTag::MIS || inst.graph().k))
      q.oracle = build_cnf(inst);
  } else if (inst.tag == ProblemTag::Factorization) {
    q.oracle = build_cnf(inst);
  } else {
    q.arithmetic = ArithmeticQcf{inst.tag, inst.operands(), ArithmeticEncoding::QFT};
  }
  return q;
}

/// JSON spec or structured snippet -> validated instance. Text starting
/// with '{' takes the JSON path; everything else is treated as a snippet.
inline ProblemInstance ingest_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_spec(text);
  SnippetSource src{text};
  ProblemTag tag = classify_snippet(src);
  if (tag == ProblemTag::Unknown)
    throw UnknownProblemType("snippet did not classify to a supported problem");
  return extract_snippet_data(src, tag);
}

namespace pipeline_detail {

class StageClock {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  double stop() {
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline Json qubo_json(const QuboQcf& q) {
  Json j;
  j["n"] = q.n;
  switch (q.var_map.kind) {
    case VarMap::Vertex: j["var_map"] = "vertex"; break;
    case VarMap::CityPosition: j["var_map"] = "city_position"; break;
    case VarMap::VertexColor: j["var_map"] = "vertex_color"; break;
  }
  Json rows = Json::array();
  for (const auto& row : q.Q) rows.push_back(row);
  j["matrix"] = rows;
  return j;
}

inline Json cnf_json(const OracleQcf& o) {
  Json j;
  j["num_vars"] = o.formula.num_vars;
  j["num_clauses"] = o.formula.clauses.size();
  j["dimacs"] = to_dimacs(o.formula);
  return j;
}

inline Json counts_json(const Counts& counts, std::size_t top = 5) {
  std::vector<std::pair<std::string, long long>> items(counts.histogram.begin(),
                                                       counts.histogram.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Json arr = Json::array();
  for (std::size_t i = 0; i < items.size() && i < top; ++i)
    arr.push_back({{"bitstring", items[i].first}, {"count", items[i].second}});
  return arr;
}

inline Json solution_json(const Solution& sol) {
  Json j;
  j["tag"] = tag_name(sol.tag);
  if (sol.factors) {
    j["factors"] = {sol.factors->first, sol.factors->second};
  } else if (sol.integer) {
    j["value"] = *sol.integer;
  } else {
    j["value"] = sol.value;
  }
  j["objective"] = sol.objective;
  j["feasible"] = sol.feasible;
  j["confidence"] = sol.confidence;
  if (!sol.bitstring.empty()) j["bitstring"] = sol.bitstring;
  return j;
}

}  // namespace pipeline_detail

/// One run of the encoder-deployment-decoder pipeline, captured as a
/// machine-readable report.
class Pipeline {
 public:
  explicit Pipeline(PipelineOptions opts) : opts_(std::move(opts)) {
    report_["schema"] = 1;
  }

  /// Full pipeline over a JSON spec (or structured snippet) given as text.
  Json run_text(const std::string& text) {
    pipeline_detail::StageClock clock;
    Json timings;

    // INGEST
    clock.start();
    ProblemInstance inst = ingest_text(text);
    timings["ingest"] = clock.stop();
    report_["input"] = Json::parse(serialize_instance(inst));
    report_["problem"] = {{"tag", static_cast<int>(inst.tag)}, {"name", tag_name(inst.tag)}};

    // QCF
    clock.start();
    QcfBundle qcfs = translate_instance(inst);
    timings["qcf"] = clock.stop();
    Json qj;
    if (qcfs.qubo) qj["qubo"] = pipeline_detail::qubo_json(*qcfs.qubo);
    if (qcfs.oracle) qj["cnf"] = pipeline_detail::cnf_json(*qcfs.oracle);
    if (qcfs.arithmetic) {
      const auto& a = *qcfs.arithmetic;
      qj["arithmetic"] = {{"op", tag_name(a.op)},
                          {"a", a.operands.a},
                          {"b", a.operands.b},
                          {"width_a", a.operands.width_a},
                          {"width_b", a.operands.width_b},
                          {"width_c", a.op == ProblemTag::Mul ? Json(a.operands.product_width()) : Json()},
                          {"encoding", a.encoding == ArithmeticEncoding::QFT ? "qft" : "reversible"}};
    }
    report_["qcfs"] = qj;

    // GENERATE
    clock.start();
    const std::string algo = resolve_algo(inst);
    Circuit metrics_circuit = representative_circuit(inst, qcfs, algo);
    timings["generate"] = clock.stop();

    // TRANSPILE + RECOMMEND
    clock.start();
    auto devices = load_devices();
    auto candidates = fan_out(metrics_circuit, devices, algo);
    timings["transpile"] = clock.stop();

    clock.start();
    Workload wl{opts_.shots, opts_.iterations};
    Ranking ranking = recommend(candidates.pairs, opts_.weights, wl);
    timings["recommend"] = clock.stop();
    report_["devices"] = candidates.table;
    attach_ranking(ranking);

    if (opts_.execute) {
      // EXECUTE
      clock.start();
      Execution exec = execute(inst, qcfs, algo);
      timings["execute"] = clock.stop();
      report_["execution"] = exec.description;

      // DECODE
      clock.start();
      Solution sol = decode_solution(exec.counts, inst, exec.qcf);
      timings["decode"] = clock.stop();
      report_["solution"] = pipeline_detail::solution_json(sol);
    }

    report_["timings_ms"] = timings;
    return report_;
  }

  Json run_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Stage::Ingest, "FileError", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return run_text(ss.str());
  }

 private:
  struct FanOut {
    std::vector<CandidatePair> pairs;
    Json table = Json::array();
  };

  struct Execution {
    Counts counts;
    DecodeQcf qcf;
    Json description;
  };

  std::string resolve_algo(const ProblemInstance& inst) {
    if (opts_.algo != "auto") {
      if (opts_.algo == "grover" && is_graph_tag(inst.tag) && inst.tag != ProblemTag::MIS &&
          inst.tag != ProblemTag::Clique && inst.tag != ProblemTag::KColor &&
          inst.tag != ProblemTag::VertexCover)
        throw UnsupportedTag(std::string(tag_name(inst.tag)) + " has no oracle path");
      if ((opts_.algo == "qaoa" || opts_.algo == "vqe") && !is_graph_tag(inst.tag))
        throw UnsupportedTag(std::string(tag_name(inst.tag)) + " has no QUBO path");
      return opts_.algo;
    }
    if (is_graph_tag(inst.tag)) return "qaoa";  // QUBO problems default to QAOA
    if (inst.tag == ProblemTag::Factorization) return "grover";
    return "arithmetic";
  }

  /// The concrete circuit used for transpilation metrics: the execution
  /// circuit with seeded initial parameters (angles do not change counts).
  Circuit representative_circuit(const ProblemInstance& inst, const QcfBundle& qcfs,
                                 const std::string& algo) {
    Rng master(opts_.seed);
    if (algo == "qaoa") {
      IsingModel ising = qubo_to_ising(*qcfs.qubo);
      ParametricCircuit pc = build_qaoa(ising, {opts_.qaoa_p});
      Rng init = master.substream(0);
      return pc.bind_logical(init_qaoa_params(opts_.qaoa_p, init).flat());
    }
    if (algo == "vqe") {
      ParametricCircuit pc = build_vqe_ansatz(qcfs.qubo->n, opts_.vqe_layers);
      for (int q = 0; q < qcfs.qubo->n; ++q) pc.circuit.push(GateKind::Measure, {q});
      Rng init = master.substream(0);
      return pc.bind_logical(init_vqe_params(qcfs.qubo->n, opts_.vqe_layers, init).thetas);
    }
    if (algo == "grover") {
      // representative workload: state prep plus one Grover iteration
      const OracleLayout layout = oracle_layout(qcfs.oracle->formula);
      Circuit c(layout.total());
      for (int q = 0; q < layout.inputs; ++q) c.push(GateKind::H, {q});
      c.append(build_oracle(*qcfs.oracle));
      c.append(detail::diffusion_with_workspace(layout));
      for (int q = 0; q < layout.inputs; ++q) c.push(GateKind::Measure, {q});
      return c;
    }
    return build_arithmetic_program(*qcfs.arithmetic);
  }

  std::vector<DeviceRecord> load_devices() {
    const std::string path = opts_.devices_path.empty() ? default_registry_path() : opts_.devices_path;
    return load_registry(path);
  }

  FanOut fan_out(const Circuit& c, const std::vector<DeviceRecord>& devices,
                 const std::string& algo) {
    FanOut out;
    devices_ = devices;  // keep alive for CandidatePair pointers
    Workload wl{opts_.shots, opts_.iterations};
    for (const auto& dev : devices_) {
      CandidatePair cand;
      cand.circuit_id = algo;
      cand.device = &dev;
      Json row;
      row["name"] = dev.name;
      row["technology"] = technology_name(dev.technology);
      row["qubits"] = dev.qubits;
      if (c.num_qubits() > dev.qubits) {
        cand.qubits_required = c.num_qubits();
        row["transpiled"] = false;
        row["reason"] = "circuit exceeds device capacity";
      } else {
        TranspiledCircuit tc = transpile(c, dev);
        cand.metrics = tc.metrics;
        cand.qubits_required = tc.qubits_used;
        const double E = estimate_error(tc.metrics, dev);
        const double T = estimate_time(tc.metrics, dev, wl);
        const double P = estimate_cost(tc.metrics, dev, wl, T);
        row["transpiled"] = true;
        row["qubits_required"] = tc.qubits_used;
        row["metrics"] = {{"n1", tc.metrics.n1},
                          {"n2", tc.metrics.n2},
                          {"nm", tc.metrics.nm},
                          {"d1q", tc.metrics.d1q},
                          {"d2q", tc.metrics.d2q}};
        row["error"] = E;
        row["fidelity"] = 1.0 - E;
        row["time_s"] = T;
        row["price_usd"] = P;
      }
      out.table.push_back(row);
      out.pairs.push_back(cand);
    }
    return out;
  }

  void attach_ranking(const Ranking& ranking) {
    Json j;
    j["best"] = {{"circuit", ranking.best().circuit_id},
                 {"device", ranking.best().device},
                 {"score", ranking.best().score}};
    Json entries = Json::array();
    for (const auto& e : ranking.entries) {
      entries.push_back({{"circuit", e.circuit_id},
                         {"device", e.device},
                         {"score", e.score},
                         {"error", e.bundle.error},
                         {"time_s", e.bundle.time},
                         {"price_usd", e.bundle.price},
                         {"e_hat", e.bundle.e_hat},
                         {"t_hat", e.bundle.t_hat},
                         {"p_hat", e.bundle.p_hat},
                         {"trapped_ion_bias", e.bias_applied}});
    }
    j["ranking"] = entries;
    Json rejected = Json::array();
    for (const auto& r : ranking.rejected)
      rejected.push_back({{"circuit", r.circuit_id}, {"device", r.device}, {"reason", r.reason}});
    j["rejected"] = rejected;
    report_["recommendation"] = j;
  }

  Execution execute(const ProblemInstance& inst, const QcfBundle& qcfs, const std::string& algo) {
    Execution exec;
    Workload wl{opts_.shots, opts_.iterations};
    if (algo == "qaoa" || algo == "vqe") {
      VariationalAlgo va = algo == "qaoa" ? VariationalAlgo(QaoaAlgo{opts_.qaoa_p})
                                          : VariationalAlgo(VqeAlgo{opts_.vqe_layers});
      VariationalResult res = run_variational(*qcfs.qubo, va, wl, opts_.seed, opts_.qubit_cap);
      exec.counts = res.counts;
      exec.qcf = *qcfs.qubo;
      exec.description = {{"algo", algo},
                          {"shots", opts_.shots},
                          {"iterations", opts_.iterations},
                          {algo == "qaoa" ? "p" : "layers", algo == "qaoa" ? opts_.qaoa_p : opts_.vqe_layers},
                          {"seed", opts_.seed},
                          {"best_energy", res.best_value},
                          {"final_energy", res.final_energy},
                          {"trace", res.trace},
                          {"counts_top", pipeline_detail::counts_json(res.counts)}};
      return exec;
    }
    if (algo == "grover") {
      Rng rng(derive_seed(opts_.seed, 17));
      GroverResult res = grover_search(*qcfs.oracle, opts_.shots, rng);
      exec.counts = res.aggregate;
      exec.qcf = *qcfs.oracle;
      Json rounds = Json::array();
      for (const auto& r : res.rounds)
        rounds.push_back({{"iterations", r.iterations}, {"shots", r.counts.shots}});
      exec.description = {{"algo", "grover"},
                          {"shots", opts_.shots},
                          {"seed", opts_.seed},
                          {"rounds", rounds},
                          {"outcome", res.outcome},
                          {"counts_top", pipeline_detail::counts_json(res.aggregate)}};
      return exec;
    }
    // arithmetic
    Circuit program = build_arithmetic_program(*qcfs.arithmetic);
    Rng rng(derive_seed(opts_.seed, 23));
    exec.counts = execute_counts(program, {}, opts_.shots, rng, opts_.qubit_cap);
    exec.qcf = *qcfs.arithmetic;
    exec.description = {{"algo", "arithmetic"},
                        {"shots", opts_.shots},
                        {"seed", opts_.seed},
                        {"counts_top", pipeline_detail::counts_json(exec.counts)}};
    return exec;
  }

  PipelineOptions opts_;
  Json report_;
  std::vector<DeviceRecord> devices_;
};

/// Spec-file entry point used by the CLI `run` and `recommend` subcommands.
inline Json run_pipeline(const std::string& spec_path, const PipelineOptions& opts) {
  Pipeline p(opts);
  return p.run_file(spec_path);
}

}  // namespace qforge
