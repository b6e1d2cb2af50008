#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdc/adaptive.hpp"
#include "bdc/common.hpp"
#include "bdc/connectivity.hpp"

namespace bdc::workload {

// Whitespace-separated `u v` per line, 0-based; blank lines and lines whose
// first token starts with '#' are skipped. Throws ParseError (with the line
// number) or VertexOutOfRange when n > 0 and a vertex is >= n.
std::vector<Edge> parse_graph(std::istream& in, std::size_t n);
std::vector<Edge> ingest_graph(const std::string& path, std::size_t n);
std::string write_graph(const std::vector<Edge>& edges);

enum class OpKind : std::uint8_t { kInsert, kDelete, kQuery, kMixed, kAdaptive };

const char* op_name(OpKind op);

struct BatchRecord {
  OpKind op = OpKind::kQuery;
  std::vector<Edge> edges;  // insert, delete
  std::vector<VertexPair> pairs;  // query
  std::vector<Edge> inserts;  // mixed
  std::vector<Edge> deletes;  // mixed
  std::vector<adaptive::QueryUpdatePair> adaptive;

  // Number of operations in the batch.
  std::size_t size() const;
  friend bool operator==(const BatchRecord&, const BatchRecord&) = default;
};

using Workload = std::vector<BatchRecord>;

// One JSON object per line; blank lines are skipped. Throws ParseError with
// the line number.
Workload parse_workload(std::istream& in);
Workload read_workload(const std::string& path);
std::string write_workload(const Workload& w);

enum class GenKind : std::uint8_t { kRandom, kPathStress, kStarStress, kAdaptiveCvp };

std::optional<GenKind> parse_gen_kind(const std::string& name);

struct GenParams {
  GenKind kind = GenKind::kRandom;
  std::size_t n = 256;
  std::size_t k = 8;
  std::size_t batches = 1;
  std::uint64_t seed = 1;
  // random: initial edge count (0 selects 2n).
  std::size_t initial_edges = 0;
  // adaptive-cvp: circuit text; empty selects a random circuit.
  std::string circuit_text;
  std::size_t circuit_inputs = 8;
  std::size_t circuit_gates = 64;
};

struct Generated {
  std::size_t n = 0;
  std::vector<Edge> graph;
  Workload workload;
};

// Deterministic under params.seed. Throws BadParams on invalid parameters.
Generated gen_workload(const GenParams& params);

struct BatchReport {
  std::size_t index = 0;
  OpKind op = OpKind::kQuery;
  std::size_t k = 0;
  std::uint64_t rounds = 0;
  std::uint64_t comm_words = 0;
  std::vector<bool> answers;  // query answers or adaptive predicate values
  std::vector<bool> applied;  // adaptive only
  std::size_t replacements = 0;
  std::size_t iterations = 0;
  std::size_t reseeds = 0;
};

struct RunReport {
  EngineConfig config;
  std::size_t bundles = 0;
  std::size_t levels = 0;
  std::size_t key_words = 0;
  std::size_t k_max = 0;
  std::size_t max_iterations = 0;
  std::uint64_t capacity_words = 0;
  std::uint64_t sketch_seed = 0;
  std::size_t initial_edges = 0;
  std::vector<BatchReport> batches;
  std::uint64_t total_rounds = 0;
  std::uint64_t total_comm_words = 0;
  std::uint64_t peak_machine_words = 0;
  std::uint64_t final_state_digest = 0;

  // Stable key order, no timestamps: identical runs give identical bytes.
  std::string to_json() const;
  std::string to_table() const;
};

// Executes every batch in order. Engine errors are rethrown with the batch
// index prepended. When `stats` is given, one JSONL ledger record per batch
// is appended to it.
RunReport run(const EngineConfig& config, const std::vector<Edge>& graph, const Workload& workload,
              std::vector<std::string>* stats = nullptr);

}  // namespace bdc::workload
