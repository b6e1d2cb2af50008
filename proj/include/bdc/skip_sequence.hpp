#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bdc/aug_key.hpp"
#include "bdc/common.hpp"
#include "bdc/mpc_sim.hpp"

namespace bdc {

inline constexpr MachineId kUnplaced = ~MachineId{0};

struct SequenceParams {
  std::size_t element_capacity = 0;
  std::size_t n = 1;  // drives the promotion rate and the block cap
  double alpha = 0.25;
  std::size_t key_words = 0;
  std::uint64_t seed = 1;
  std::size_t max_height = 0;  // 0 selects max(8, ceil(4 / alpha))
  std::size_t block_cap = 0;   // 0 selects max(8, 8 n^alpha log2 n)
  MachineId coordinator = 0;
};

// Cyclic sequences over a fixed universe of element ids, stored as leveled
// skip lists. Every level is a cyclic doubly-linked list; an element of
// height h appears on levels 0..h-1. A block at level l starts at an element
// promoted past l+1 and runs up to the next such element; it lives wholly on
// one machine and its XOR aggregate becomes the head's value on level l+1.
// The topmost level of a sequence (no element promoted further) is one cycle
// whose minimum element id is the sequence's identifier.
//
// Callers change level 0 (relink, set_value, add/remove) and then call
// restructure(), which repairs the upper levels one level per simulated
// round, touching only blocks that contain a changed element.
class SequenceStore {
 public:
  struct Stats {
    std::uint64_t overflow_events = 0;
    std::uint64_t overflow_unresolved = 0;
    std::size_t max_block = 0;
    std::size_t last_levels = 0;
  };

  struct TopInfo {
    std::size_t level = 0;
    ElementId rep = kNoElement;      // some element of the top cycle
    std::vector<MachineId> path;     // owner of the walked entry per level
  };

  SequenceStore(const SequenceParams& params, mpc::Simulator* sim);

  std::size_t key_words() const { return key_words_; }
  std::size_t block_cap() const { return block_cap_; }
  std::size_t max_height() const { return max_height_; }
  double promotion_rate() const { return promotion_; }
  MachineId coordinator() const { return coordinator_; }
  mpc::Simulator& sim() { return *sim_; }
  const mpc::MachineConfig& machine_config() const { return sim_->config(); }

  // Rounds and traffic are only recorded while accounting is on; resident
  // words are tracked regardless.
  void set_accounting(bool on) { accounting_ = on; }
  bool accounting() const { return accounting_; }
  void send(const mpc::OutboxBuilder& out);

  void add_element(ElementId id);
  // The element must already be unlinked from its level-0 neighbours (or be
  // a singleton).
  void remove_element(ElementId id);
  bool alive(ElementId id) const { return id < elems_.size() && elems_[id].alive; }
  std::size_t height(ElementId id) const { return elems_[id].lv.size(); }
  ElementId next(ElementId id, std::size_t level = 0) const { return elems_[id].lv[level].next; }
  ElementId prev(ElementId id, std::size_t level = 0) const { return elems_[id].lv[level].prev; }
  MachineId owner(ElementId id, std::size_t level = 0) const;
  const AugKey& value(ElementId id) const { return elems_[id].lv[0].agg; }
  std::size_t entry_words(ElementId id, std::size_t level) const;
  MachineId place(ElementId id, std::size_t level) const;

  // Level-0 edits; each marks the affected element dirty.
  void relink(std::span<const std::pair<ElementId, ElementId>> links);
  void set_value(ElementId id, AugKey value);
  void mark_dirty(ElementId id) { pending_.push_back(id); }
  void restructure();

  TopInfo find_top(ElementId id) const;
  ElementId top_min(const TopInfo& top) const;
  AugKey top_sum(const TopInfo& top) const;
  ElementId sequence_id(ElementId id) const { return top_min(find_top(id)); }

  // Level-0 cycle starting at `id`, and the same cycle rotated to start at
  // its minimum element.
  std::vector<ElementId> cycle(ElementId id) const;
  std::vector<ElementId> canonical(ElementId id) const;

  // Sequence facade. A sequence reads its cycle from the minimum element.
  // join takes (last element of one sequence, first element of another).
  void join(std::span<const std::pair<ElementId, ElementId>> pairs);
  // Splits each sequence right after every listed element.
  void split(std::span<const ElementId> after);

  std::size_t levels_in_use() const;
  const Stats& stats() const { return stats_; }
  std::uint64_t tallied_words(MachineId machine) const { return tally_.at(machine); }

  // Full structural check; throws std::logic_error describing the first
  // violation.
  void validate() const;

 private:
  struct Entry {
    ElementId next = kNoElement;
    ElementId prev = kNoElement;
    MachineId owner = kUnplaced;
    AugKey agg;
  };
  struct Elem {
    bool alive = false;
    std::uint32_t salt = 0;
    std::vector<Entry> lv;
  };
  struct Overflow {
    ElementId rep = kNoElement;
    std::vector<ElementId> block;
  };

  std::size_t draw_height(ElementId id, std::uint32_t salt) const;
  void charge(ElementId id, std::size_t level, int sign);
  void move_entry(ElementId id, std::size_t level, MachineId dst, mpc::OutboxBuilder& out);
  void set_agg(ElementId id, std::size_t level, AugKey value);
  std::vector<std::uint64_t> serialize(ElementId id, std::size_t level) const;

  std::vector<Overflow> restructure_pass(std::vector<ElementId> dirty);
  void rebuild_block(ElementId head, std::size_t level, mpc::OutboxBuilder& out,
                     std::vector<Overflow>& overflows);
  void rebuild_top(ElementId start, std::size_t level, mpc::OutboxBuilder& out,
                   std::vector<Overflow>& overflows);
  std::vector<Overflow> rebuild_cycle(ElementId start);
  void resolve_overflows(std::vector<Overflow> overflows);

  mpc::Simulator* sim_;
  std::size_t key_words_;
  std::size_t max_height_;
  std::size_t block_cap_;
  double promotion_;
  std::uint64_t threshold_;
  std::uint64_t seed_;
  std::uint64_t place_seed_;
  MachineId coordinator_;
  bool accounting_ = true;

  std::vector<Elem> elems_;
  std::vector<ElementId> pending_;
  std::vector<std::uint64_t> tally_;
  // Scratch for head resolution, stamped per level pass.
  std::vector<std::uint64_t> stamp_;
  std::vector<ElementId> resolved_;
  std::uint64_t epoch_ = 0;
  Stats stats_;
};

}  // namespace bdc
