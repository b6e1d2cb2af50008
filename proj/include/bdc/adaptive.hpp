#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bdc/common.hpp"
#include "bdc/connectivity.hpp"

namespace bdc::adaptive {

enum class Predicate : std::uint8_t { kConnected, kNotConnected };
enum class Update : std::uint8_t { kInsert, kDelete, kNoop };

// The update applies iff the predicate holds on the graph left by all
// earlier pairs.
struct QueryUpdatePair {
  Predicate pred = Predicate::kConnected;
  Vertex u = 0;
  Vertex v = 0;
  Update update = Update::kNoop;
  Edge edge;
  friend bool operator==(const QueryUpdatePair&, const QueryUpdatePair&) = default;
};

const char* predicate_name(Predicate p);
const char* update_name(Update u);

struct AdaptiveOptions {
  // Record state digests around the speculative delete and its undo.
  bool verify_undo = false;
};

struct AdaptiveOutcome {
  // Value of the last predicate.
  bool final_answer = false;
  std::vector<bool> predicate_values;
  std::vector<bool> applied;
  std::uint64_t rounds_used = 0;
  std::uint64_t comm_words = 0;
  std::vector<std::uint64_t> comm_per_round;
  std::size_t replacements_found = 0;
  std::uint64_t digest_before = 0;
  std::uint64_t digest_after_undo = 0;
  // Batches whose digest changed across the speculative delete and undo.
  std::size_t undo_mismatches = 0;
};

// One adaptive batch (k <= graph.k_max()): speculative deletion of every
// delete in the batch to collect replacement edges, undo, local sequential
// simulation on the coordinator, then the net change as one mixed batch.
AdaptiveOutcome run_adaptive_batch(DynGraph& graph, std::span<const QueryUpdatePair> pairs,
                                   const AdaptiveOptions& options = {});

// Splits `pairs` into consecutive batches of `batch_size` and concatenates
// the outcomes; final_answer is the last predicate of the whole sequence.
AdaptiveOutcome run_adaptive(DynGraph& graph, std::span<const QueryUpdatePair> pairs, std::size_t batch_size,
                             const AdaptiveOptions& options = {});

enum class GateOp : std::uint8_t { kAnd, kOr, kNot };

// Operands use the unified node index: input i is node i, gate j is node
// inputs.size() + j (both 0-based).
struct Gate {
  GateOp op = GateOp::kAnd;
  std::size_t a = 0;
  std::size_t b = 0;  // unused for NOT
  friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
  std::vector<bool> inputs;
  std::vector<Gate> gates;
  std::size_t output = 0;  // unified node index

  std::size_t node_count() const { return inputs.size() + gates.size(); }
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

// Throws NotTopologicallyOrdered when an operand does not precede its gate,
// BadParams for out-of-range nodes.
void check_circuit(const Circuit& c);

// Text format: header `n k`, then `x<i> 0|1` per input, `g<i> AND|OR|NOT a [b]`
// per gate with operands named x<i> or g<j> (1-based), and `out <name>`.
Circuit parse_circuit(std::istream& in);
Circuit parse_circuit_text(const std::string& text);
std::string write_circuit(const Circuit& c);

bool eval_circuit_direct(const Circuit& c);
std::vector<bool> eval_all_nodes(const Circuit& c);

Circuit random_circuit(std::size_t inputs, std::size_t gates, std::uint64_t seed);

struct CvpInstance {
  std::size_t vertex_count = 0;
  Vertex root = 0;
  std::vector<Edge> initial_edges;
  std::vector<QueryUpdatePair> pairs;
};

// Vertex of node i is i; the root is node_count(). Two pairs per gate plus
// the final (Connected(r, y), Noop).
CvpInstance cvp_to_adaptive(const Circuit& c);

}  // namespace bdc::adaptive
