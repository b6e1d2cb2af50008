#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bdc/aug_key.hpp"
#include "bdc/common.hpp"
#include "bdc/mpc_sim.hpp"
#include "bdc/skip_sequence.hpp"

namespace bdc {

struct ForestParams {
  std::size_t n = 0;
  double alpha = 0.25;
  std::size_t key_words = 0;
  std::uint64_t seed = 1;
  std::size_t max_height = 0;
  std::size_t block_cap = 0;
  // 0 selects floor(s / ((4 + key_words) * ceil(n^alpha) * ceil(log2 n))).
  std::size_t batch_cap = 0;
};

enum class LinkCheck {
  kVerify,   // query component ids first and reject cycle-closing batches
  kTrusted,  // caller guarantees the batch keeps F acyclic
};

// Batch-dynamic forest on Euler tours. Vertex v owns the visit element v;
// the tree edge stored in slot s owns the arcs n + 2s (min -> max) and
// n + 2s + 1 (max -> min). Around each vertex the tour follows a rotation of
// its incident arcs, with the visit element marking where the rotation
// starts.
class Forest {
 public:
  Forest(const ForestParams& params, mpc::Simulator& sim);

  std::size_t n() const { return n_; }
  std::size_t key_words() const { return seq_.key_words(); }
  std::size_t batch_cap() const { return batch_cap_; }

  void link(std::span<const Edge> edges, LinkCheck check = LinkCheck::kVerify);
  void cut(std::span<const Edge> edges);
  std::vector<ComponentId> id(std::span<const Vertex> vertices);
  void update_key(std::span<const std::pair<Vertex, AugKey>> pairs);
  std::vector<AugKey> get_key(std::span<const Vertex> vertices);
  std::vector<AugKey> component_sum(std::span<const Vertex> vertices);

  // Initial construction; no rounds or traffic are recorded.
  void bulk_link(std::span<const Edge> edges);
  void bulk_set_keys(std::span<const std::pair<Vertex, AugKey>> pairs);

  // Read-only inspection outside the simulated machines.
  ComponentId peek_id(Vertex v) const;
  AugKey peek_sum(Vertex v) const;
  const AugKey& peek_key(Vertex v) const;
  bool has_edge(Edge e) const;
  std::size_t edge_count() const { return slot_of_.size(); }
  std::vector<Edge> edges() const;
  std::vector<ElementId> tour(Vertex v) const;
  std::size_t levels_in_use() const { return seq_.levels_in_use(); }

  ElementId arc(Vertex from, Vertex to) const;
  // (from, to) of an arc element, nullopt for visit elements.
  std::optional<std::pair<Vertex, Vertex>> arc_endpoints(ElementId e) const;

  SequenceStore& sequences() { return seq_; }
  const SequenceStore& sequences() const { return seq_; }

  // Lifts the batch cap for internal multi-step operations.
  class CapBypass {
   public:
    explicit CapBypass(Forest& f) : f_(f), saved_(f.bypass_cap_) { f_.bypass_cap_ = true; }
    ~CapBypass() { f_.bypass_cap_ = saved_; }
    CapBypass(const CapBypass&) = delete;
    CapBypass& operator=(const CapBypass&) = delete;

   private:
    Forest& f_;
    bool saved_;
  };

  // Checks tour shape and the sequence store invariants; throws
  // std::logic_error on the first violation.
  void validate() const;

 private:
  void check_batch(std::size_t k) const;
  void check_vertex(Vertex v) const;
  MachineId home(ElementId e) const;
  void link_impl(std::span<const Edge> edges);
  // Charges the level-by-level walk of each query to its top cycle, ending
  // with the given reply to the coordinator.
  void charge_walk(const std::vector<SequenceStore::TopInfo>& tops,
                   const std::vector<std::vector<std::uint64_t>>& replies);

  std::size_t n_;
  std::size_t batch_cap_;
  bool bypass_cap_ = false;
  SequenceStore seq_;
  std::unordered_map<std::uint64_t, std::uint32_t> slot_of_;
  std::vector<Edge> slot_edge_;
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> free_slots_;
};

}  // namespace bdc
