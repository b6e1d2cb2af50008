#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "bdc/aug_key.hpp"
#include "bdc/common.hpp"

namespace bdc {

// Deterministic, symmetric edge identifier. Never zero, so an edge is always
// visible inside an XOR accumulator.
EdgeId edge_id(std::uint64_t seed, Vertex u, Vertex v);

// Sketch layout: `bundles` independent copies, each holding one XOR
// accumulator per sampling level j = 0..levels-1 with rate 2^-j.
struct SketchConfig {
  std::size_t n = 0;
  double delta = 0.25;
  std::size_t sketch_factor = 4;
  std::size_t bundles = 0;
  std::size_t levels = 0;
  std::uint64_t seed = 0;

  // bundles = c_sk * ceil(n^delta) * ceil(log2 n); levels = ceil(2 log2 n) + 1.
  static SketchConfig make(std::size_t n, double delta, std::size_t sketch_factor,
                           std::uint64_t seed);

  std::size_t key_words() const { return bundles * levels; }
  std::size_t cell(std::size_t bundle, std::size_t level) const { return bundle * levels + level; }
  bool member(std::size_t bundle, std::size_t level, EdgeId id) const;
  double rate(std::size_t level) const;
};

using SketchVector = AugKey;

struct SketchEdge {
  EdgeId id;
  Vertex u = 0;
  Vertex v = 0;
};

// Per-vertex deltas for toggling the given edges in or out of every sketch.
// Insert and delete are the same delta; applying it twice is the identity.
std::map<Vertex, SketchVector> sketch_delta(const SketchConfig& config,
                                            std::span<const SketchEdge> edges);

// XORs the cells of a single edge into `vector`.
void sketch_toggle(const SketchConfig& config, SketchVector& vector, EdgeId id);

// Distinct nonzero cell values of a component XOR, ascending.
std::vector<EdgeId> decode_candidates(const SketchVector& component_xor);

// Candidates restricted to one bundle.
std::vector<EdgeId> decode_bundle(const SketchConfig& config, const SketchVector& component_xor,
                                  std::size_t bundle);

struct RegistryEntry {
  Vertex u = 0;
  Vertex v = 0;
  std::uint32_t multiplicity = 0;
};

// Source of truth for the edge multiset, keyed by EdgeId and sharded across
// machines by a hash of the id.
class EdgeRegistry {
 public:
  explicit EdgeRegistry(std::uint64_t shard_seed = 0) : shard_seed_(shard_seed) {}

  // Returns the multiplicity after the insert. Throws EdgeIdCollision when
  // `id` is already registered to a different endpoint pair.
  std::uint32_t insert(EdgeId id, Vertex u, Vertex v);
  // Returns the multiplicity after the delete; removes the entry at zero.
  std::uint32_t erase(EdgeId id);

  bool contains(EdgeId id) const { return entries_.count(id) != 0; }
  const RegistryEntry* find(EdgeId id) const;
  std::uint32_t multiplicity(EdgeId id) const;

  std::size_t distinct_edges() const { return entries_.size(); }
  std::uint64_t total_multiplicity() const { return total_; }

  MachineId shard_of(EdgeId id, std::size_t machines) const;

  // Entries ordered by id.
  std::vector<std::pair<EdgeId, RegistryEntry>> sorted_entries() const;

 private:
  std::uint64_t shard_seed_;
  std::uint64_t total_ = 0;
  std::unordered_map<EdgeId, RegistryEntry> entries_;
};

struct ValidatedEdge {
  EdgeId id;
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const ValidatedEdge&, const ValidatedEdge&) = default;
};

// Keeps candidates present in the registry whose endpoints lie in different
// components; drops everything else.
template <typename ComponentOf>
std::vector<ValidatedEdge> validate_candidates(std::span<const EdgeId> ids,
                                               const EdgeRegistry& registry,
                                               ComponentOf&& comp_of) {
  std::vector<ValidatedEdge> out;
  for (EdgeId id : ids) {
    const RegistryEntry* entry = registry.find(id);
    if (entry == nullptr) continue;
    if (comp_of(entry->u) == comp_of(entry->v)) continue;
    out.push_back({id, entry->u, entry->v});
  }
  return out;
}

}  // namespace bdc
