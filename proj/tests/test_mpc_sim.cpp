#include <cstring>
#include <vector>

#include "bdc/mpc_sim.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bdc;
using namespace bdc::mpc;

TEST_CASE("simulator counts rounds and cross-machine words only") {
  Simulator sim({4, 1000, 64});
  const std::vector<std::uint64_t> three{1, 2, 3};
  std::vector<Message> out{make_message(sim.config(), 0, 1, three), make_message(sim.config(), 2, 2, three)};
  const auto& inbox = sim.exchange(std::move(out));
  CHECK(sim.ledger().rounds == 1);
  CHECK(sim.ledger().per_round_comm == std::vector<std::uint64_t>{3});
  REQUIRE(inbox[1].size() == 1);
  CHECK(inbox[2].size() == 1);
  std::uint64_t got[3];
  std::memcpy(got, inbox[1][0].payload.data(), sizeof(got));
  CHECK(got[2] == 3);
}

TEST_CASE("simulator run_round delivers to the next round") {
  Simulator sim({3, 1000, 64});
  sim.run_round([&](MachineId m, const Inbox&) {
    const std::vector<std::uint64_t> w{m};
    return std::vector<Message>{make_message(sim.config(), m, (m + 1) % 3, w)};
  });
  std::vector<std::uint64_t> seen(3, 99);
  sim.run_round([&](MachineId m, const Inbox& in) {
    std::uint64_t v = 0;
    std::memcpy(&v, in.at(0).payload.data(), sizeof(v));
    seen[m] = v;
    return std::vector<Message>{};
  });
  CHECK(seen == std::vector<std::uint64_t>{2, 0, 1});
  CHECK(sim.ledger().rounds == 2);
  CHECK(sim.ledger().comm_total() == 3);
}

TEST_CASE("simulator enforces capacity on resident and inbox words") {
  Simulator sim({2, 10, 64});
  sim.adjust_resident(0, 8);
  CHECK(sim.resident_words(0) == 8);
  const std::vector<std::uint64_t> three{1, 2, 3};
  try {
    sim.exchange({make_message(sim.config(), 1, 0, three)});
    FAIL("expected CapacityExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCapacityExceeded);
  }
  CHECK_THROWS_AS(sim.adjust_resident(1, 11), Error);
}

TEST_CASE("simulator message words follow the configured word size") {
  const MachineConfig wide{2, 100, 128};
  const std::vector<std::uint64_t> three{1, 2, 3};
  CHECK(make_message(wide, 0, 1, three).payload_words == 2);
  CHECK_THROWS_AS(MachineConfig({0, 1, 64}).validate(), Error);
}

TEST_CASE("outbox builder coalesces per pair and drops local data") {
  OutboxBuilder b;
  b.add(0, 1, {1, 2});
  b.add(0, 1, {3});
  b.add(2, 2, {4, 5});
  CHECK(b.pending_words() == 3);
  const auto msgs = b.build({3, 100, 64});
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].payload_words == 3);
}

TEST_CASE("stats record is one JSON object") {
  Simulator sim({2, 100, 64});
  sim.exchange({make_message(sim.config(), 0, 1, std::vector<std::uint64_t>{7, 8})});
  const auto j = nlohmann::json::parse(stats_record(sim.ledger()));
  CHECK(j["rounds"] == 1);
  CHECK(j["comm_total"] == 2);
  CHECK(j["comm_per_round"].size() == 1);
  CHECK(j["peak_machine_words"] == 2);
}
