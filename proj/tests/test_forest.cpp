#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "bdc/forest.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bdc;

namespace {

struct Rig {
  mpc::Simulator sim;
  Forest forest;
  Rig(std::size_t n, std::size_t key_words = 2, std::uint64_t seed = 3, std::size_t machines = 4)
      : sim({machines, std::uint64_t{1} << 40, 64}),
        forest(
            [&] {
              ForestParams p;
              p.n = n;
              p.key_words = key_words;
              p.seed = seed;
              p.batch_cap = 1 << 20;
              return p;
            }(),
            sim) {}
};

std::vector<std::uint32_t> forest_labels(Forest& f) {
  std::vector<std::uint32_t> out;
  for (Vertex v = 0; v < f.n(); ++v) out.push_back(f.peek_id(v).value);
  return out;
}

// Random spanning tree over the given vertices (random attachment order).
std::vector<Edge> random_tree(std::size_t n, std::mt19937_64& rng) {
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.push_back({order[i], order[rng() % i]});
  return edges;
}

AugKey random_key(std::size_t words, std::mt19937_64& rng) {
  AugKey k(words);
  for (std::size_t i = 0; i < words; ++i) k.set_word(i, rng());
  return k;
}

}  // namespace

TEST_CASE("forest singleton id is its own visit element") {
  Rig r(8);
  const std::vector<Vertex> vs{0, 5};
  const auto ids = r.forest.id(vs);
  CHECK(ids[0].value == 0);
  CHECK(ids[1].value == 5);
}

TEST_CASE("forest link of one edge joins the ids") {
  Rig r(4);
  const std::vector<Edge> e{{1, 2}};
  r.forest.link(e);
  const std::vector<Vertex> vs{1, 2, 0};
  const auto ids = r.forest.id(vs);
  CHECK(ids[0] == ids[1]);
  CHECK(ids[0] != ids[2]);
  r.forest.validate();
}

TEST_CASE("forest link of disjoint edges forms pairs") {
  Rig r(16);
  std::vector<Edge> e;
  for (Vertex i = 0; i < 8; ++i) e.push_back({2 * i, 2 * i + 1});
  r.forest.link(e);
  std::set<ElementId> distinct;
  for (Vertex i = 0; i < 8; ++i) {
    CHECK(r.forest.peek_id(2 * i) == r.forest.peek_id(2 * i + 1));
    distinct.insert(r.forest.peek_id(2 * i).value);
  }
  CHECK(distinct.size() == 8);
  r.forest.validate();
}

TEST_CASE("forest star linked in one batch") {
  Rig r(9);
  std::vector<Edge> e;
  for (Vertex x = 1; x <= 8; ++x) e.push_back({0, x});
  r.forest.link(e);
  for (Vertex x = 1; x <= 8; ++x) CHECK(r.forest.peek_id(x) == r.forest.peek_id(0));
  CHECK(r.forest.tour(0).size() == 9 + 16);
  std::vector<Edge> all = e;
  CHECK(oracle::same_partition(forest_labels(r.forest), oracle::bfs_components(9, all)));
  r.forest.validate();
}

TEST_CASE("forest cut on a path separates the cut edge") {
  Rig r(3);
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  r.forest.link(path);
  const std::vector<Edge> c{{0, 1}};
  r.forest.cut(c);
  CHECK(r.forest.peek_id(0) != r.forest.peek_id(1));
  CHECK(r.forest.peek_id(1) == r.forest.peek_id(2));
  r.forest.validate();
}

TEST_CASE("forest cutting every star edge leaves singletons") {
  Rig r(9);
  std::vector<Edge> e;
  for (Vertex x = 1; x <= 8; ++x) e.push_back({0, x});
  r.forest.link(e);
  r.forest.cut(e);
  for (Vertex x = 0; x <= 8; ++x) CHECK(r.forest.peek_id(x).value == x);
  CHECK(r.forest.edge_count() == 0);
  r.forest.validate();
}

TEST_CASE("forest random tree cuts match a BFS oracle") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 10; ++trial) {
    Rig r(64, 1, 50 + trial);
    auto tree = random_tree(64, rng);
    r.forest.link(tree);
    std::shuffle(tree.begin(), tree.end(), rng);
    const std::vector<Edge> cut(tree.begin(), tree.begin() + 10);
    r.forest.cut(cut);
    const std::vector<Edge> rest(tree.begin() + 10, tree.end());
    CHECK(oracle::same_partition(forest_labels(r.forest), oracle::bfs_components(64, rest)));
    r.forest.validate();
  }
}

TEST_CASE("forest random link/cut sequence matches the oracle") {
  std::mt19937_64 rng(2024);
  const std::size_t n = 120;
  Rig r(n, 2, 77, 6);
  std::vector<Edge> current;
  for (int op = 0; op < 1000; ++op) {
    if (rng() % 2 == 0 || current.empty()) {
      // Link a batch of edges that keeps the forest acyclic.
      auto labels = oracle::bfs_components(n, current);
      std::vector<Edge> batch;
      std::vector<std::uint32_t> uf(n);
      std::iota(uf.begin(), uf.end(), 0);
      const auto find = [&](std::uint32_t x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
      };
      for (int t = 0; t < 6; ++t) {
        const auto u = static_cast<Vertex>(rng() % n);
        const auto v = static_cast<Vertex>(rng() % n);
        const auto a = find(labels[u]);
        const auto b = find(labels[v]);
        if (u == v || a == b) continue;
        uf[a] = b;
        batch.push_back({u, v});
      }
      r.forest.link(batch);
      current.insert(current.end(), batch.begin(), batch.end());
    } else {
      std::shuffle(current.begin(), current.end(), rng);
      const std::size_t k = std::min<std::size_t>(current.size(), 1 + rng() % 6);
      const std::vector<Edge> batch(current.begin(), current.begin() + k);
      r.forest.cut(batch);
      current.erase(current.begin(), current.begin() + k);
    }
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::uint32_t> ids;
    for (const auto& c : r.forest.id(all)) ids.push_back(c.value);
    REQUIRE(oracle::same_partition(ids, oracle::bfs_components(n, current)));
    if (op % 50 == 0) r.forest.validate();
  }
  r.forest.validate();
}

TEST_CASE("forest keys: set, get, last writer, zero contribution") {
  std::mt19937_64 rng(8);
  Rig r(5, 3);
  const std::vector<Vertex> v{2};
  CHECK(r.forest.get_key(v)[0] == AugKey(3));
  const AugKey a = random_key(3, rng);
  const AugKey b = random_key(3, rng);
  std::vector<std::pair<Vertex, AugKey>> upd{{2, a}};
  r.forest.update_key(upd);
  CHECK(r.forest.get_key(v)[0] == a);
  upd = {{2, a}, {2, b}};
  r.forest.update_key(upd);
  CHECK(r.forest.get_key(v)[0] == b);

  const std::vector<Edge> e{{2, 3}};
  r.forest.link(e);
  upd = {{3, a}};
  r.forest.update_key(upd);
  const auto before = r.forest.component_sum(v)[0];
  CHECK(before == (a ^ b));
  upd = {{2, AugKey(3)}};
  r.forest.update_key(upd);
  CHECK(r.forest.component_sum(v)[0] == a);
}

TEST_CASE("forest component sums equal a direct fold") {
  std::mt19937_64 rng(100);
  Rig r(100, 4, 9, 5);
  auto tree = random_tree(100, rng);
  r.forest.link(tree);
  std::vector<std::pair<Vertex, AugKey>> keys;
  for (Vertex x = 0; x < 100; ++x) keys.emplace_back(x, random_key(4, rng));
  r.forest.update_key(keys);
  AugKey fold(4);
  for (const auto& [x, k] : keys) fold ^= k;
  const std::vector<Vertex> q{0, 57, 99};
  for (const auto& s : r.forest.component_sum(q)) CHECK(s == fold);
  // Two equal keys on a two-vertex tree cancel.
  Rig t(2, 2);
  const AugKey x = random_key(2, rng);
  std::vector<std::pair<Vertex, AugKey>> same{{0, x}, {1, x}};
  t.forest.update_key(same);
  const std::vector<Edge> e{{0, 1}};
  t.forest.link(e);
  const std::vector<Vertex> zero{0};
  CHECK(t.forest.component_sum(zero)[0].is_zero());
  r.forest.validate();
}

TEST_CASE("forest singleton component sum is its own key") {
  std::mt19937_64 rng(1);
  Rig r(3, 2);
  const AugKey k = random_key(2, rng);
  std::vector<std::pair<Vertex, AugKey>> upd{{1, k}};
  r.forest.update_key(upd);
  const std::vector<Vertex> v{1};
  CHECK(r.forest.component_sum(v)[0] == k);
}

TEST_CASE("forest errors") {
  Rig r(4, 2);
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  r.forest.link(path);
  const std::vector<Edge> cycle{{0, 2}};
  CHECK_THROWS_AS(r.forest.link(cycle), Error);
  const std::vector<Edge> absent{{0, 3}};
  try {
    r.forest.cut(absent);
    FAIL("expected EdgeNotInForest");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEdgeNotInForest);
  }
  const std::vector<Vertex> bad{9};
  CHECK_THROWS_AS(r.forest.id(bad), Error);
  std::vector<std::pair<Vertex, AugKey>> wrong{{0, AugKey(5)}};
  try {
    r.forest.update_key(wrong);
    FAIL("expected KeyLengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kKeyLengthMismatch);
  }
  const std::vector<Edge> in_batch_cycle{{2, 3}, {3, 0}};
  CHECK_THROWS_AS(r.forest.link(in_batch_cycle), Error);
}

TEST_CASE("forest batch cap is enforced") {
  mpc::Simulator sim({2, 4096, 64});
  ForestParams p;
  p.n = 16;
  p.key_words = 2;
  p.batch_cap = 2;
  Forest f(p, sim);
  const std::vector<Vertex> vs{0, 1, 2};
  try {
    f.id(vs);
    FAIL("expected BatchTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBatchTooLarge);
  }
}

TEST_CASE("forest rounds per operation are bounded by levels") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {256u, 1024u, 4096u}) {
    Rig r(n, 1, 5, 8);
    auto tree = random_tree(n, rng);
    r.forest.bulk_link(tree);
    const std::size_t levels = r.forest.levels_in_use();
    std::shuffle(tree.begin(), tree.end(), rng);
    const std::vector<Edge> cut(tree.begin(), tree.begin() + 8);
    auto before = r.sim.snapshot_stats().rounds;
    r.forest.cut(cut);
    CHECK(r.sim.snapshot_stats().rounds - before <= 4 * (levels + 2));
    before = r.sim.snapshot_stats().rounds;
    r.forest.link(cut, LinkCheck::kTrusted);
    CHECK(r.sim.snapshot_stats().rounds - before <= 4 * (levels + 2));
    std::vector<Vertex> q;
    for (const Edge& e : cut) q.push_back(e.u);
    before = r.sim.snapshot_stats().rounds;
    r.forest.id(q);
    CHECK(r.sim.snapshot_stats().rounds - before <= levels + 2);
  }
}

TEST_CASE("forest resident words match entry sizes") {
  std::mt19937_64 rng(4);
  Rig r(50, 3, 8, 3);
  auto tree = random_tree(50, rng);
  r.forest.link(tree);
  std::vector<std::pair<Vertex, AugKey>> keys;
  for (Vertex x = 0; x < 50; x += 3) keys.emplace_back(x, random_key(3, rng));
  r.forest.update_key(keys);
  for (MachineId m = 0; m < 3; ++m) {
    CHECK(r.sim.resident_words(m) == r.forest.sequences().tallied_words(m));
  }
  r.forest.validate();
}
