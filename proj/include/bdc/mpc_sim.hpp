#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bdc/common.hpp"

namespace bdc::mpc {

struct MachineConfig {
  std::size_t machine_count = 1;
  std::uint64_t capacity_words = 1;
  unsigned word_bits = 64;

  void validate() const;
};

struct Message {
  MachineId src = 0;
  MachineId dst = 0;
  std::uint64_t payload_words = 0;
  std::vector<std::byte> payload;
};

// Builds a message whose payload is the raw bytes of `words`, with
// `payload_words` derived from the configured word size.
Message make_message(const MachineConfig& config, MachineId src, MachineId dst,
                     std::span<const std::uint64_t> words);

using Inbox = std::vector<Message>;

// Collects the traffic of one round, coalescing everything a machine sends
// to the same destination into one message. Local (src == dst) data is
// dropped since it never crosses a machine boundary.
class OutboxBuilder {
 public:
  void add(MachineId src, MachineId dst, std::span<const std::uint64_t> words);
  void add(MachineId src, MachineId dst, std::initializer_list<std::uint64_t> words) {
    add(src, dst, std::span<const std::uint64_t>(words.begin(), words.size()));
  }
  bool empty() const { return by_pair_.empty(); }
  std::uint64_t pending_words() const;
  std::vector<Message> build(const MachineConfig& config) const;
  void clear() { by_pair_.clear(); }

 private:
  std::map<std::pair<MachineId, MachineId>, std::vector<std::uint64_t>> by_pair_;
};

struct RoundLedger {
  std::uint64_t rounds = 0;
  std::vector<std::uint64_t> per_round_comm;
  std::map<MachineId, std::uint64_t> per_machine_peak;

  std::uint64_t comm_total() const;
  std::uint64_t peak_machine_words() const;
};

// Line-delimited statistics record {rounds, comm_total, comm_per_round,
// peak_machine_words}; one JSON object without trailing newline.
std::string stats_record(const RoundLedger& ledger);

// In-process MPC substrate. Machines are logical partitions of state; data
// moves only through `run_round`/`exchange`, and every word that crosses a
// machine boundary is accounted in the ledger.
class Simulator {
 public:
  // A local step sees its machine id and the inbox delivered at the previous
  // round boundary, and returns its outbox.
  using LocalStep = std::function<std::vector<Message>(MachineId, const Inbox&)>;

  explicit Simulator(MachineConfig config);

  const MachineConfig& config() const { return config_; }
  std::size_t machine_count() const { return config_.machine_count; }

  // Runs `step` on every machine (in parallel when OpenMP is enabled; the
  // result is identical to sequential execution in MachineId order), then
  // delivers all outboxes. Returns the inboxes for the next round.
  const std::vector<Inbox>& run_round(const LocalStep& step);

  // Delivers a precomputed outbox as one round.
  const std::vector<Inbox>& exchange(std::vector<Message> outbox);

  const std::vector<Inbox>& inboxes() const { return inboxes_; }

  RoundLedger snapshot_stats() const { return ledger_; }
  const RoundLedger& ledger() const { return ledger_; }
  void reset_ledger();

  // Resident data accounting, maintained by whoever owns the state.
  void adjust_resident(MachineId machine, std::int64_t delta_words);
  std::uint64_t resident_words(MachineId machine) const;

 private:
  void deliver(std::vector<Message> outbox);
  void check_machine(MachineId machine) const;
  void note_peak(MachineId machine, std::uint64_t words);

  MachineConfig config_;
  RoundLedger ledger_;
  std::vector<std::uint64_t> resident_;
  std::vector<Inbox> inboxes_;
  std::vector<std::uint64_t> inbox_words_;
};

}  // namespace bdc::mpc
