#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "bdc/common.hpp"
#include "bdc/forest.hpp"
#include "bdc/mpc_sim.hpp"
#include "bdc/sketching.hpp"

namespace bdc {

struct EngineConfig {
  std::size_t n = 0;
  double alpha = 0.25;
  double delta = 0.25;
  std::size_t sketch_factor = 4;
  std::uint64_t seed = 1;
  std::size_t machines = 8;
  // 0 selects max(4 * estimated_total / machines, 32 * key_words * ceil(n^alpha) * ceil(log2 n)).
  std::uint64_t capacity_words = 0;
  // Used only to size the automatic capacity.
  std::size_t expected_edges = 0;
  // 0 selects floor(s / (key_words * ceil(n^alpha) * ceil(log2 n))).
  std::size_t k_max = 0;
  // 0 selects ceil(3 / delta) + 2.
  std::size_t max_iterations = 0;
  std::size_t max_height = 0;
  std::size_t block_cap = 0;
};

struct BatchOutcome {
  std::vector<bool> answers;
  std::uint64_t rounds_used = 0;
  std::uint64_t comm_words = 0;
  std::vector<std::uint64_t> comm_per_round;
  std::vector<Edge> replacements_added;
  std::size_t iterations = 0;
  std::size_t reseeds = 0;
};

// Observes a deletion batch for the adaptive algorithm: component ids of
// `watch` right after the cut (the "pieces"), and every replacement edge
// expressed as a pair of piece labels.
struct DeleteProbe {
  std::vector<Vertex> watch;
  std::vector<ComponentId> piece_of;
  std::vector<std::pair<ComponentId, ComponentId>> replacement_pieces;
};

// Batch-dynamic connectivity over a maximal spanning forest F of the
// multigraph G. Every vertex key is the XOR sketch of its incident edges;
// the registry is the source of truth for E.
class DynGraph {
 public:
  explicit DynGraph(const EngineConfig& config);

  const EngineConfig& config() const { return config_; }
  std::size_t n() const { return config_.n; }
  std::size_t k_max() const { return k_max_; }
  std::size_t max_iterations() const { return max_iterations_; }
  std::uint64_t capacity_words() const { return sim_->config().capacity_words; }
  const SketchConfig& sketch() const { return sketch_; }
  mpc::Simulator& sim() { return *sim_; }
  const mpc::Simulator& sim() const { return *sim_; }
  Forest& forest() { return *forest_; }
  const Forest& forest() const { return *forest_; }
  const EdgeRegistry& registry() const { return registry_; }
  std::uint64_t total_reseeds() const { return total_reseeds_; }

  BatchOutcome query(std::span<const VertexPair> pairs);
  BatchOutcome insert(std::span<const Edge> edges);
  BatchOutcome remove(std::span<const Edge> edges, DeleteProbe* probe = nullptr);
  BatchOutcome mixed(std::span<const Edge> deletions, std::span<const Edge> insertions);

  // Accounted registry read (two rounds): current multiplicity of each edge.
  std::vector<std::uint32_t> lookup_multiplicity(std::span<const Edge> edges);
  // Accounted forest id() call, exempt from the batch cap.
  std::vector<ComponentId> component_ids(std::span<const Vertex> vertices);

  // Loads an initial graph without recording rounds or traffic.
  void bulk_load(std::span<const Edge> edges);

  // Component label per vertex (the forest's component id), read directly.
  std::vector<std::uint32_t> component_labels() const;

  // Digest of registry contents, every sketch cell and the vertex partition.
  std::uint64_t state_digest() const;

  // Forest shape, F subset of E, maximality, and sketch cells recomputed from
  // the registry. Throws std::logic_error on the first violation.
  void validate() const;

 private:
  struct Snapshot {
    std::uint64_t rounds = 0;
    std::size_t comm_len = 0;
  };
  struct Tracked {
    Vertex rep = 0;
    AugKey sum;
    ComponentId piece;
  };

  Snapshot begin() const;
  void finish(const Snapshot& snap, BatchOutcome& out) const;
  void check_k(std::size_t k) const;
  void check_edge(const Edge& e) const;
  // Two rounds: edges to their registry shards and the shard replies.
  void charge_registry(std::span<const EdgeId> ids, std::size_t reply_words);
  void update_keys(std::span<const SketchEdge> toggled);
  void recompute_keys(bool accounted);
  void reseed();
  void contract(std::map<ComponentId, Tracked>& tracked, BatchOutcome& out, DeleteProbe* probe);

  EngineConfig config_;
  std::unique_ptr<mpc::Simulator> sim_;
  SketchConfig sketch_;
  EdgeRegistry registry_;
  std::unique_ptr<Forest> forest_;
  std::size_t k_max_ = 0;
  std::size_t max_iterations_ = 0;
  std::uint64_t sketch_generation_ = 0;
  std::uint64_t total_reseeds_ = 0;
};

// Automatic per-machine capacity for a configuration (see EngineConfig).
std::uint64_t auto_capacity(const EngineConfig& config, std::size_t key_words);

}  // namespace bdc
