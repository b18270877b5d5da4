// Command-line front end: run the full pipeline on a problem spec, rank
// devices without executing, emit QCF translations, or simulate a circuit
// dump.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qforge/pipeline.hpp"

namespace {

using qforge::Json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qforge::Error(qforge::Stage::Ingest, "FileError", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw qforge::Error(qforge::Stage::Decode, "FileError", "cannot write " + out_path);
  out << j.dump(2) << "\n";
}

struct CommonFlags {
  std::string spec_path;
  std::string out_path;
  std::string weights = "0.6,0.3,0.1";
  double tau = 0.5;
  long long shots = 1000;
  long long iters = -1;  // default depends on the subcommand
  int p = -1;
  int layers = 3;
  std::string algo = "auto";
  std::uint64_t seed = 0;
  std::string devices;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool execution_flags) {
  cmd->add_option("spec", f.spec_path, "problem specification (JSON or snippet)")->required();
  cmd->add_option("--out", f.out_path, "write the report to a file instead of stdout");
  cmd->add_option("--weights", f.weights, "lambda1,lambda2,lambda3 (default 0.6,0.3,0.1)");
  cmd->add_option("--tau", f.tau, "fidelity feasibility threshold (default 0.5)");
  cmd->add_option("--shots", f.shots, "shots per execution (default 1000)");
  cmd->add_option("--iters", f.iters, "optimizer iterations (default 500 for run, 50 for recommend)");
  cmd->add_option("--p", f.p, "QAOA layers (default 3 for run, 1 for recommend)");
  cmd->add_option("--devices", f.devices, "device registry file (default: bundled registry)");
  cmd->add_option("--seed", f.seed, "RNG seed (default 0)");
  if (execution_flags) {
    cmd->add_option("--layers", f.layers, "VQE ansatz layers (default 3)");
    cmd->add_option("--algo", f.algo, "auto | qaoa | vqe | grover")
        ->check(CLI::IsMember({"auto", "qaoa", "vqe", "grover"}));
  }
}

qforge::PipelineOptions to_options(const CommonFlags& f, bool execute) {
  qforge::PipelineOptions opts;
  double l1, l2, l3;
  if (std::sscanf(f.weights.c_str(), "%lf,%lf,%lf", &l1, &l2, &l3) != 3)
    throw CLI::ValidationError("--weights expects lambda1,lambda2,lambda3");
  opts.weights.lambda1 = l1;
  opts.weights.lambda2 = l2;
  opts.weights.lambda3 = l3;
  opts.weights.tau = f.tau;
  opts.shots = f.shots;
  // recommend mirrors the low-depth deployment-evaluation profile
  opts.iterations = f.iters > 0 ? f.iters : (execute ? 500 : 50);
  opts.qaoa_p = f.p > 0 ? f.p : (execute ? 3 : 1);
  opts.vqe_layers = f.layers;
  opts.algo = f.algo;
  opts.seed = f.seed;
  opts.devices_path = f.devices;
  opts.execute = execute;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classical-to-quantum pipeline: translate, generate, rank devices, simulate, decode"};
  app.require_subcommand(1);

  CommonFlags run_flags, rec_flags;
  std::string translate_spec, translate_out;
  std::string sim_circuit, sim_out;
  long long sim_shots = 1000;
  std::uint64_t sim_seed = 0;

  CLI::App* run = app.add_subcommand("run", "full pipeline: ingest, translate, rank, execute, decode");
  add_common(run, run_flags, true);

  CLI::App* rec = app.add_subcommand("recommend", "stop after the device ranking (no execution)");
  add_common(rec, rec_flags, true);

  CLI::App* tr = app.add_subcommand("translate", "emit the QCF translations of a spec");
  tr->add_option("spec", translate_spec, "problem specification (JSON or snippet)")->required();
  tr->add_option("--out", translate_out, "write to file instead of stdout");

  CLI::App* sim = app.add_subcommand("simulate", "execute a circuit dump on the statevector simulator");
  sim->add_option("circuit", sim_circuit, "circuit dump file (one gate per line)")->required();
  sim->add_option("--shots", sim_shots, "shots (default 1000)");
  sim->add_option("--seed", sim_seed, "RNG seed (default 0)");
  sim->add_option("--out", sim_out, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      emit(qforge::run_pipeline(run_flags.spec_path, to_options(run_flags, true)), run_flags.out_path);
    } else if (rec->parsed()) {
      emit(qforge::run_pipeline(rec_flags.spec_path, to_options(rec_flags, false)), rec_flags.out_path);
    } else if (tr->parsed()) {
      qforge::ProblemInstance inst = qforge::ingest_text(read_file(translate_spec));
      qforge::QcfBundle qcfs = qforge::translate_instance(inst);
      Json j;
      j["schema"] = 1;
      j["problem"] = {{"tag", static_cast<int>(inst.tag)}, {"name", qforge::tag_name(inst.tag)}};
      if (qcfs.qubo) j["qubo"] = qforge::pipeline_detail::qubo_json(*qcfs.qubo);
      if (qcfs.oracle) j["cnf"] = qforge::pipeline_detail::cnf_json(*qcfs.oracle);
      if (qcfs.arithmetic)
        j["arithmetic"] = {{"op", qforge::tag_name(qcfs.arithmetic->op)},
                           {"a", qcfs.arithmetic->operands.a},
                           {"b", qcfs.arithmetic->operands.b}};
      emit(j, translate_out);
    } else if (sim->parsed()) {
      qforge::Circuit c = qforge::parse_circuit(read_file(sim_circuit));
      qforge::Rng rng(sim_seed);
      qforge::Counts counts = qforge::execute_counts(c, {}, sim_shots, rng);
      Json j;
      j["shots"] = counts.shots;
      Json hist;
      for (const auto& [key, count] : counts.histogram) hist[key] = count;
      j["counts"] = hist;
      emit(j, sim_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const qforge::Error& e) {
    std::cerr << qforge::stage_name(e.stage) << " error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
