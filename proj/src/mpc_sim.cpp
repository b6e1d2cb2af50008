#include "bdc/mpc_sim.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "json.hpp"

#ifdef BDC_HAVE_OPENMP
#include <omp.h>
#endif

namespace bdc::mpc {

void MachineConfig::validate() const {
  if (machine_count == 0) throw Error(ErrorCode::kBadParams, "machine_count must be >= 1");
  if (capacity_words == 0) throw Error(ErrorCode::kBadParams, "capacity_words must be >= 1");
  if (word_bits == 0 || word_bits % 8 != 0 || word_bits > 512) {
    throw Error(ErrorCode::kBadParams, "word_bits must be a positive multiple of 8");
  }
}

Message make_message(const MachineConfig& config, MachineId src, MachineId dst,
                     std::span<const std::uint64_t> words) {
  Message msg;
  msg.src = src;
  msg.dst = dst;
  msg.payload.resize(words.size_bytes());
  if (!words.empty()) std::memcpy(msg.payload.data(), words.data(), words.size_bytes());
  const std::uint64_t word_bytes = config.word_bits / 8;
  msg.payload_words = (msg.payload.size() + word_bytes - 1) / word_bytes;
  return msg;
}

void OutboxBuilder::add(MachineId src, MachineId dst, std::span<const std::uint64_t> words) {
  if (src == dst || words.empty()) return;
  auto& buf = by_pair_[{src, dst}];
  buf.insert(buf.end(), words.begin(), words.end());
}

std::uint64_t OutboxBuilder::pending_words() const {
  std::uint64_t total = 0;
  for (const auto& [key, words] : by_pair_) total += words.size();
  return total;
}

std::vector<Message> OutboxBuilder::build(const MachineConfig& config) const {
  std::vector<Message> out;
  out.reserve(by_pair_.size());
  for (const auto& [key, words] : by_pair_) {
    out.push_back(make_message(config, key.first, key.second, words));
  }
  return out;
}

std::uint64_t RoundLedger::comm_total() const {
  return std::accumulate(per_round_comm.begin(), per_round_comm.end(), std::uint64_t{0});
}

std::uint64_t RoundLedger::peak_machine_words() const {
  std::uint64_t peak = 0;
  for (const auto& [machine, words] : per_machine_peak) peak = std::max(peak, words);
  return peak;
}

std::string stats_record(const RoundLedger& ledger) {
  nlohmann::json j;
  j["rounds"] = ledger.rounds;
  j["comm_total"] = ledger.comm_total();
  j["comm_per_round"] = ledger.per_round_comm;
  j["peak_machine_words"] = ledger.peak_machine_words();
  return j.dump();
}

Simulator::Simulator(MachineConfig config)
    : config_(config),
      resident_(config.machine_count, 0),
      inboxes_(config.machine_count),
      inbox_words_(config.machine_count, 0) {
  config_.validate();
  for (MachineId m = 0; m < config_.machine_count; ++m) ledger_.per_machine_peak[m] = 0;
}

const std::vector<Inbox>& Simulator::run_round(const LocalStep& step) {
  const auto p = static_cast<std::int64_t>(config_.machine_count);
  std::vector<std::vector<Message>> outboxes(config_.machine_count);
  const std::vector<Inbox> current = std::move(inboxes_);
#ifdef BDC_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t m = 0; m < p; ++m) {
    outboxes[m] = step(static_cast<MachineId>(m), current[m]);
  }
  std::vector<Message> all;
  for (auto& box : outboxes) {
    for (auto& msg : box) all.push_back(std::move(msg));
  }
  deliver(std::move(all));
  return inboxes_;
}

const std::vector<Inbox>& Simulator::exchange(std::vector<Message> outbox) {
  deliver(std::move(outbox));
  return inboxes_;
}

void Simulator::deliver(std::vector<Message> outbox) {
  const std::uint64_t word_bytes = config_.word_bits / 8;
  inboxes_.assign(config_.machine_count, {});
  std::fill(inbox_words_.begin(), inbox_words_.end(), 0);
  std::uint64_t comm = 0;
  for (auto& msg : outbox) {
    if (msg.src >= config_.machine_count || msg.dst >= config_.machine_count) {
      throw Error(ErrorCode::kBadParams, "message addressed to unknown machine");
    }
    if (msg.payload_words != (msg.payload.size() + word_bytes - 1) / word_bytes) {
      throw Error(ErrorCode::kBadParams, "payload_words does not match payload length");
    }
    if (msg.src != msg.dst) comm += msg.payload_words;
    inbox_words_[msg.dst] += msg.payload_words;
    inboxes_[msg.dst].push_back(std::move(msg));
  }
  ledger_.rounds += 1;
  ledger_.per_round_comm.push_back(comm);
  for (MachineId m = 0; m < config_.machine_count; ++m) {
    check_machine(m);
    note_peak(m, resident_[m] + inbox_words_[m]);
  }
}

void Simulator::reset_ledger() {
  ledger_.rounds = 0;
  ledger_.per_round_comm.clear();
  for (MachineId m = 0; m < config_.machine_count; ++m) {
    ledger_.per_machine_peak[m] = resident_[m];
  }
}

void Simulator::adjust_resident(MachineId machine, std::int64_t delta_words) {
  if (machine >= config_.machine_count) {
    throw Error(ErrorCode::kBadParams, "resident adjustment on unknown machine");
  }
  const auto updated = static_cast<std::int64_t>(resident_[machine]) + delta_words;
  if (updated < 0) throw Error(ErrorCode::kBadParams, "resident words went negative");
  resident_[machine] = static_cast<std::uint64_t>(updated);
  // Data applied to resident state has left the inbox it arrived in.
  inbox_words_[machine] = 0;
  check_machine(machine);
  note_peak(machine, resident_[machine]);
}

std::uint64_t Simulator::resident_words(MachineId machine) const {
  return resident_.at(machine);
}

void Simulator::check_machine(MachineId machine) const {
  const std::uint64_t load = resident_[machine] + inbox_words_[machine];
  if (load > config_.capacity_words) {
    throw Error(ErrorCode::kCapacityExceeded,
                "machine " + std::to_string(machine) + " holds " + std::to_string(load) +
                    " words, capacity " + std::to_string(config_.capacity_words));
  }
}

void Simulator::note_peak(MachineId machine, std::uint64_t words) {
  auto& peak = ledger_.per_machine_peak[machine];
  peak = std::max(peak, words);
}

}  // namespace bdc::mpc
