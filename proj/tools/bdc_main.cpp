// bdc: batch-dynamic connectivity driver.
//
//   bdc run --n N [--graph G] --workload W [--report R] [--stats S] [--table]
//   bdc gen-workload --kind random|path-stress|star-stress|adaptive-cvp ...
//   bdc contraction-lab --graph-kind path|star|er --n N [--k K] ...
//
// Exit codes: 0 success, 2 parse or configuration error, 3 engine invariant
// violation.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "bdc/contraction_lab.hpp"
#include "bdc/workload.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitEngine = 3;

int exit_code_for(bdc::ErrorCode code) {
  switch (code) {
    case bdc::ErrorCode::kParseError:
    case bdc::ErrorCode::kVertexOutOfRange:
    case bdc::ErrorCode::kBadParams:
    case bdc::ErrorCode::kUnknownVertex:
    case bdc::ErrorCode::kSelfLoop:
    case bdc::ErrorCode::kEdgeAbsent:
    case bdc::ErrorCode::kBatchTooLarge:
    case bdc::ErrorCode::kNotTopologicallyOrdered:
      return kExitInput;
    default:
      return kExitEngine;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bdc::Error(bdc::ErrorCode::kParseError, "cannot write " + path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bdc::Error(bdc::ErrorCode::kParseError, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch-dynamic connectivity on a simulated MPC substrate"};
  app.require_subcommand(1);

  bdc::EngineConfig cfg;
  std::string graph_path;
  std::string workload_path;
  std::string report_path;
  std::string stats_path;
  bool table = false;
  auto* run = app.add_subcommand("run", "Execute a workload and write a report");
  run->add_option("--n", cfg.n, "Vertex count")->required()->check(CLI::PositiveNumber);
  run->add_option("--alpha", cfg.alpha, "Memory exponent, s = n^alpha polylog")->capture_default_str();
  run->add_option("--delta", cfg.delta, "Sketch exponent")->capture_default_str();
  run->add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
  run->add_option("--sketch-factor", cfg.sketch_factor, "Sketch bundle factor c_sk")->capture_default_str();
  run->add_option("--machines", cfg.machines, "Simulated machine count")->capture_default_str();
  run->add_option("--capacity-words", cfg.capacity_words, "Words per machine (0 = automatic)");
  run->add_option("--graph", graph_path, "Initial graph, one 'u v' per line");
  run->add_option("--workload", workload_path, "Workload JSONL")->required();
  run->add_option("--report", report_path, "Report JSON path (default: stdout)");
  run->add_option("--stats", stats_path, "Per-batch ledger records (JSONL)");
  run->add_flag("--table", table, "Print a summary table to stdout");

  bdc::workload::GenParams gen;
  std::string kind = "random";
  std::string circuit_path;
  std::string gen_out;
  std::string graph_out;
  auto* genc = app.add_subcommand("gen-workload", "Generate a synthetic workload");
  genc->add_option("--kind", kind, "random | path-stress | star-stress | adaptive-cvp")->capture_default_str();
  genc->add_option("--n", gen.n, "Vertex count")->capture_default_str();
  genc->add_option("--k", gen.k, "Batch size")->capture_default_str();
  genc->add_option("--batches", gen.batches, "Batch count (rounds for the stress kinds)")->capture_default_str();
  genc->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  genc->add_option("--initial-edges", gen.initial_edges, "random: initial edges (0 = 2n)");
  genc->add_option("--circuit", circuit_path, "adaptive-cvp: circuit file (default: random circuit)");
  genc->add_option("--inputs", gen.circuit_inputs, "adaptive-cvp: random circuit inputs")->capture_default_str();
  genc->add_option("--gates", gen.circuit_gates, "adaptive-cvp: random circuit gates")->capture_default_str();
  genc->add_option("--workload", gen_out, "Output workload JSONL (default: stdout)");
  genc->add_option("--graph-out", graph_out, "Output initial graph");

  std::string lab_kind = "er";
  std::size_t lab_n = 10000;
  std::size_t lab_m = 0;
  std::size_t lab_k = 0;
  double kappa = 1.0;
  std::uint64_t lab_seed = 1;
  std::string lab_graph;
  std::string lab_out;
  auto* lab = app.add_subcommand("contraction-lab", "Trace repeated contraction sampling");
  lab->add_option("--graph-kind", lab_kind, "path | star | er")->capture_default_str();
  lab->add_option("--graph", lab_graph, "Read the graph from a file instead (needs --n)");
  lab->add_option("--n", lab_n, "Vertex count")->capture_default_str();
  lab->add_option("--m", lab_m, "er: random pairs (0 = 5n)");
  lab->add_option("--k", lab_k, "Sampling parameter k (0 = ceil(n^(1/3)))");
  lab->add_option("--kappa", kappa, "Mass constant")->capture_default_str();
  lab->add_option("--seed", lab_seed, "Seed")->capture_default_str();
  lab->add_option("--out", lab_out, "Trace output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*run) {
      const auto graph = graph_path.empty() ? std::vector<bdc::Edge>{} : bdc::workload::ingest_graph(graph_path, cfg.n);
      const auto work = bdc::workload::read_workload(workload_path);
      std::vector<std::string> stats;
      const auto report = bdc::workload::run(cfg, graph, work, stats_path.empty() ? nullptr : &stats);
      if (report_path.empty()) {
        std::cout << report.to_json();
      } else {
        write_file(report_path, report.to_json());
      }
      if (!stats_path.empty()) {
        std::string text;
        for (const auto& line : stats) text += line + "\n";
        write_file(stats_path, text);
      }
      if (table) std::cout << report.to_table();
    } else if (*genc) {
      const auto parsed = bdc::workload::parse_gen_kind(kind);
      if (!parsed) throw bdc::Error(bdc::ErrorCode::kBadParams, "unknown workload kind '" + kind + "'");
      gen.kind = *parsed;
      if (!circuit_path.empty()) gen.circuit_text = read_file(circuit_path);
      const auto out = bdc::workload::gen_workload(gen);
      const std::string text = bdc::workload::write_workload(out.workload);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        write_file(gen_out, text);
      }
      if (!graph_out.empty()) write_file(graph_out, bdc::workload::write_graph(out.graph));
      std::cerr << "n=" << out.n << " initial_edges=" << out.graph.size() << " batches=" << out.workload.size()
                << '\n';
    } else if (*lab) {
      namespace lb = bdc::lab;
      lb::MultiGraph g;
      if (!lab_graph.empty()) {
        g = lb::MultiGraph::from_pairs(lab_n, bdc::workload::ingest_graph(lab_graph, lab_n));
      } else if (lab_kind == "path") {
        g = lb::path_graph(lab_n);
      } else if (lab_kind == "star") {
        g = lb::star_graph(lab_n);
      } else if (lab_kind == "er") {
        g = lb::random_multigraph(lab_n, lab_m != 0 ? lab_m : 5 * lab_n, lab_seed);
      } else {
        throw bdc::Error(bdc::ErrorCode::kBadParams, "unknown graph kind '" + lab_kind + "'");
      }
      if (lab_k == 0) {
        lab_k = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(lab_n)) - 1e-9));
      }
      std::ostringstream rows;
      rows << "round,edges,components\n";
      for (const auto& r : lb::run_contraction(g, lab_k, lab_seed, kappa)) {
        rows << r.round << ',' << r.edges << ',' << r.components << '\n';
      }
      if (lab_out.empty()) {
        std::cout << rows.str();
      } else {
        write_file(lab_out, rows.str());
      }
    }
  } catch (const bdc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitEngine;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEngine;
  }
  return 0;
}
