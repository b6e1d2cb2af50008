#include <cmath>
#include <vector>

#include "bdc/kernels.hpp"
#include "doctest.h"

using namespace bdc;
using namespace bdc::kernels;

TEST_CASE("kernels xor_into serial and parallel agree") {
  SplitMix64 rng(1);
  for (std::size_t n : {0u, 1u, 1000u, 70000u}) {
    std::vector<std::uint64_t> a(n);
    std::vector<std::uint64_t> b(n);
    for (auto& x : a) x = rng();
    for (auto& x : b) x = rng();
    auto s = a;
    auto p = a;
    serial::xor_into(s, b);
    parallel::xor_into(p, b);
    CHECK(s == p);
    xor_into(s, b);
    CHECK(s == a);
  }
}

TEST_CASE("kernels sketch_accumulate serial and parallel agree") {
  for (std::uint64_t id : {1ULL, 0xdeadbeefULL, 0x123456789abcdefULL}) {
    std::vector<std::uint64_t> s(40 * 21, 0);
    std::vector<std::uint64_t> p(40 * 21, 0);
    serial::sketch_accumulate(s, 9, 40, 21, id);
    parallel::sketch_accumulate(p, 9, 40, 21, id);
    CHECK(s == p);
    // Level 0 always holds the edge.
    for (std::size_t b = 0; b < 40; ++b) CHECK(s[b * 21] == id);
  }
}

TEST_CASE("kernels sketch membership rate halves per level") {
  const int trials = 200000;
  for (std::size_t level : {1u, 2u, 4u}) {
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += sketch_member(5, 3, level, static_cast<std::uint64_t>(i)) ? 1 : 0;
    const double rate = std::ldexp(1.0, -static_cast<int>(level));
    const double sigma = std::sqrt(trials * rate * (1 - rate));
    CHECK(std::abs(hits - trials * rate) < 5 * sigma);
  }
}

TEST_CASE("kernels nonzero_values serial and parallel agree") {
  SplitMix64 rng(3);
  std::vector<std::uint64_t> cells(80000);
  for (auto& c : cells) c = rng() % 4 == 0 ? rng() % 500 : 0;
  CHECK(serial::nonzero_values(cells) == parallel::nonzero_values(cells));
  CHECK(serial::nonzero_values(std::vector<std::uint64_t>{0, 3, 3, 1}) == std::vector<std::uint64_t>{1, 3});
}

TEST_CASE("kernels sample_incident serial and parallel agree") {
  // Random CSR over 500 vertices and 2000 edges.
  SplitMix64 rng(8);
  const std::size_t n = 500;
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::uint32_t e = 0; e < 2000; ++e) {
    adj[rng() % n].push_back(e);
    adj[rng() % n].push_back(e);
  }
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> slots;
  for (const auto& a : adj) {
    slots.insert(slots.end(), a.begin(), a.end());
    offsets.push_back(slots.size());
  }
  std::vector<std::uint64_t> draws(n);
  for (auto& d : draws) d = rng() % 6;
  std::vector<std::uint8_t> s(2000, 0);
  std::vector<std::uint8_t> p(2000, 0);
  serial::sample_incident(offsets, slots, draws, 77, s);
  parallel::sample_incident(offsets, slots, draws, 77, p);
  CHECK(s == p);
}

TEST_CASE("kernels single-vertex draws match the closed-form inclusion") {
  // One vertex of degree 10 with 5 draws: each slot is hit with probability
  // 1 - (9/10)^5.
  const std::vector<std::size_t> offsets{0, 10};
  std::vector<std::uint32_t> slots(10);
  for (std::uint32_t i = 0; i < 10; ++i) slots[i] = i;
  const std::vector<std::uint64_t> draws{5};
  const int trials = 20000;
  std::vector<int> hits(10, 0);
  for (int t = 0; t < trials; ++t) {
    std::vector<std::uint8_t> marks(10, 0);
    serial::sample_incident(offsets, slots, draws, static_cast<std::uint64_t>(t), marks);
    for (int i = 0; i < 10; ++i) hits[i] += marks[i];
  }
  const double p = 1.0 - std::pow(0.9, 5);
  const double sigma = std::sqrt(trials * p * (1 - p));
  for (int h : hits) CHECK(std::abs(h - trials * p) < 5 * sigma);
}
