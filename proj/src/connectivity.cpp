#include "bdc/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "bdc/union_find.hpp"

namespace bdc {

namespace {

constexpr std::uint64_t kEdgeSalt = 0x65646765ULL;
constexpr std::uint64_t kShardSalt = 0x7368617264ULL;
constexpr std::uint64_t kSketchSalt = 0x736b65746368ULL;
constexpr std::uint64_t kForestSalt = 0x666f72657374ULL;
constexpr std::uint64_t kRegistryEntryWords = 4;
constexpr std::size_t kKeyChunk = 1024;

std::size_t spread(std::size_t n, double alpha) {
  return static_cast<std::size_t>(
      std::ceil(std::pow(static_cast<double>(std::max<std::size_t>(n, 2)), alpha) - 1e-9));
}

std::uint64_t edge_seed(std::uint64_t seed) { return prf(seed, kEdgeSalt); }

SketchConfig make_sketch(const EngineConfig& c, std::uint64_t generation) {
  return SketchConfig::make(c.n, c.delta, c.sketch_factor, prf(c.seed, kSketchSalt, generation));
}

[[noreturn]] void fail(const std::string& what) { throw std::logic_error("engine: " + what); }

std::vector<SketchEdge> as_sketch_edges(std::uint64_t seed, std::span<const Edge> edges) {
  std::vector<SketchEdge> out;
  for (const Edge& e : edges) out.push_back({edge_id(seed, e.u, e.v), e.u, e.v});
  return out;
}

}  // namespace

std::uint64_t auto_capacity(const EngineConfig& c, std::size_t key_words) {
  const double n = static_cast<double>(c.n);
  const double p = std::min(std::pow(std::max(n, 2.0), -c.alpha), 0.5);
  const double upper = p / (1.0 - p);
  // Visit elements carry keys; arcs carry none; promoted entries carry
  // aggregates.
  const double forest = n * (4.0 + static_cast<double>(key_words)) + 2.0 * n * 4.0 +
                        3.0 * n * upper * (4.0 + static_cast<double>(key_words));
  const double registry = static_cast<double>(kRegistryEntryWords) * static_cast<double>(c.expected_edges);
  const double est = forest + registry;
  const double floor_words = 32.0 * static_cast<double>(key_words) * static_cast<double>(spread(c.n, c.alpha)) *
                             static_cast<double>(ceil_log2(n));
  return static_cast<std::uint64_t>(
      std::ceil(std::max(4.0 * est / static_cast<double>(c.machines), floor_words)));
}

DynGraph::DynGraph(const EngineConfig& config) : config_(config) {
  if (config_.n == 0) throw Error(ErrorCode::kBadParams, "n must be >= 1");
  if (!(config_.alpha > 0.0 && config_.alpha < 1.0)) throw Error(ErrorCode::kBadParams, "alpha must be in (0,1)");
  if (!(config_.delta > 0.0 && config_.delta < 1.0)) throw Error(ErrorCode::kBadParams, "delta must be in (0,1)");
  if (config_.machines == 0) throw Error(ErrorCode::kBadParams, "machines must be >= 1");
  sketch_ = make_sketch(config_, 0);
  registry_ = EdgeRegistry(prf(config_.seed, kShardSalt));
  const std::size_t key_words = sketch_.key_words();
  const std::uint64_t capacity =
      config_.capacity_words != 0 ? config_.capacity_words : auto_capacity(config_, key_words);
  sim_ = std::make_unique<mpc::Simulator>(mpc::MachineConfig{config_.machines, capacity, 64});
  const double denom = static_cast<double>(std::max<std::size_t>(key_words, 1)) *
                       static_cast<double>(spread(config_.n, config_.alpha)) *
                       static_cast<double>(ceil_log2(static_cast<double>(config_.n)));
  k_max_ = config_.k_max != 0
               ? config_.k_max
               : std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(capacity) / denom));
  max_iterations_ = config_.max_iterations != 0
                        ? config_.max_iterations
                        : static_cast<std::size_t>(std::ceil(3.0 / config_.delta - 1e-9)) + 2;
  ForestParams fp;
  fp.n = config_.n;
  fp.alpha = config_.alpha;
  fp.key_words = key_words;
  fp.seed = prf(config_.seed, kForestSalt);
  fp.max_height = config_.max_height;
  fp.block_cap = config_.block_cap;
  fp.batch_cap = k_max_;
  forest_ = std::make_unique<Forest>(fp, *sim_);
}

DynGraph::Snapshot DynGraph::begin() const {
  return {sim_->ledger().rounds, sim_->ledger().per_round_comm.size()};
}

void DynGraph::finish(const Snapshot& snap, BatchOutcome& out) const {
  const auto& ledger = sim_->ledger();
  out.rounds_used = ledger.rounds - snap.rounds;
  out.comm_per_round.assign(ledger.per_round_comm.begin() + static_cast<std::ptrdiff_t>(snap.comm_len),
                            ledger.per_round_comm.end());
  out.comm_words = 0;
  for (std::uint64_t w : out.comm_per_round) out.comm_words += w;
}

void DynGraph::check_k(std::size_t k) const {
  if (k > k_max_) {
    throw Error(ErrorCode::kBatchTooLarge,
                "batch of " + std::to_string(k) + " exceeds k_max " + std::to_string(k_max_));
  }
}

void DynGraph::check_edge(const Edge& e) const {
  if (e.u >= config_.n || e.v >= config_.n) {
    throw Error(ErrorCode::kUnknownVertex,
                "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") outside [0," +
                    std::to_string(config_.n) + ")");
  }
  if (e.u == e.v) throw Error(ErrorCode::kSelfLoop, "self-loop at " + std::to_string(e.u));
}

void DynGraph::charge_registry(std::span<const EdgeId> ids, std::size_t reply_words) {
  if (ids.empty()) return;
  const MachineId coord = forest_->sequences().coordinator();
  mpc::OutboxBuilder ask;
  mpc::OutboxBuilder reply;
  const std::vector<std::uint64_t> answer(reply_words, 0);
  for (EdgeId id : ids) {
    const MachineId shard = registry_.shard_of(id, sim_->machine_count());
    ask.add(coord, shard, {id.value});
    std::vector<std::uint64_t> words{id.value};
    if (const RegistryEntry* entry = registry_.find(id)) {
      words.push_back(entry->u);
      words.push_back(entry->v);
      words.push_back(entry->multiplicity);
    }
    words.resize(std::max(words.size(), reply_words), 0);
    reply.add(shard, coord, words);
  }
  sim_->exchange(ask.build(sim_->config()));
  sim_->exchange(reply.build(sim_->config()));
}

void DynGraph::update_keys(std::span<const SketchEdge> toggled) {
  if (toggled.empty()) return;
  std::map<Vertex, SketchVector> deltas = sketch_delta(sketch_, toggled);
  if (deltas.empty()) return;
  std::vector<Vertex> verts;
  for (const auto& [v, d] : deltas) verts.push_back(v);
  Forest::CapBypass bypass(*forest_);
  std::vector<AugKey> keys = forest_->get_key(verts);
  std::vector<std::pair<Vertex, AugKey>> updates;
  updates.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    keys[i] ^= deltas.at(verts[i]);
    updates.emplace_back(verts[i], std::move(keys[i]));
  }
  forest_->update_key(updates);
}

void DynGraph::recompute_keys(bool accounted) {
  const auto entries = registry_.sorted_entries();
  // Chunked by vertex range so only a slice of dense keys is alive at once.
  for (Vertex lo = 0; lo < config_.n; lo += kKeyChunk) {
    const Vertex hi = static_cast<Vertex>(std::min<std::size_t>(config_.n, lo + kKeyChunk));
    std::vector<AugKey> keys(hi - lo, AugKey(sketch_.key_words()));
    for (const auto& [id, entry] : entries) {
      for (Vertex x : {entry.u, entry.v}) {
        if (x >= lo && x < hi) sketch_toggle(sketch_, keys[x - lo], id);
      }
    }
    std::vector<std::pair<Vertex, AugKey>> updates;
    for (Vertex x = lo; x < hi; ++x) {
      AugKey& k = keys[x - lo];
      k.compact();
      if (k == forest_->peek_key(x)) continue;
      updates.emplace_back(x, std::move(k));
    }
    if (updates.empty()) continue;
    if (accounted) {
      Forest::CapBypass bypass(*forest_);
      forest_->update_key(updates);
    } else {
      forest_->bulk_set_keys(updates);
    }
  }
}

void DynGraph::reseed() {
  ++sketch_generation_;
  ++total_reseeds_;
  sketch_ = make_sketch(config_, sketch_generation_);
  recompute_keys(true);
}

BatchOutcome DynGraph::query(std::span<const VertexPair> pairs) {
  check_k(pairs.size());
  BatchOutcome out;
  const Snapshot snap = begin();
  std::vector<Vertex> verts;
  for (const VertexPair& p : pairs) {
    if (p.u >= config_.n || p.v >= config_.n) {
      throw Error(ErrorCode::kUnknownVertex, "query vertex outside [0," + std::to_string(config_.n) + ")");
    }
    verts.push_back(p.u);
    verts.push_back(p.v);
  }
  if (!verts.empty()) {
    Forest::CapBypass bypass(*forest_);
    const std::vector<ComponentId> ids = forest_->id(verts);
    for (std::size_t i = 0; i < pairs.size(); ++i) out.answers.push_back(ids[2 * i] == ids[2 * i + 1]);
  }
  finish(snap, out);
  return out;
}

BatchOutcome DynGraph::insert(std::span<const Edge> edges) {
  check_k(edges.size());
  for (const Edge& e : edges) check_edge(e);
  BatchOutcome out;
  const Snapshot snap = begin();
  if (edges.empty()) {
    finish(snap, out);
    return out;
  }
  const std::uint64_t eseed = edge_seed(config_.seed);
  const std::vector<SketchEdge> batch = as_sketch_edges(eseed, edges);
  // Reject id collisions before touching any state.
  std::unordered_map<EdgeId, std::uint64_t> seen;
  for (const SketchEdge& e : batch) {
    const std::uint64_t key = Edge{e.u, e.v}.key();
    auto [it, fresh] = seen.emplace(e.id, key);
    const RegistryEntry* entry = registry_.find(e.id);
    if ((!fresh && it->second != key) || (entry != nullptr && Edge{entry->u, entry->v}.key() != key)) {
      throw Error(ErrorCode::kEdgeIdCollision,
                  "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                      ") shares its id with another edge; rerun with a different seed");
    }
  }

  std::vector<EdgeId> ids;
  std::vector<SketchEdge> toggled;
  for (const SketchEdge& e : batch) {
    ids.push_back(e.id);
    if (registry_.insert(e.id, e.u, e.v) == 1) {
      toggled.push_back(e);
      sim_->adjust_resident(registry_.shard_of(e.id, sim_->machine_count()), kRegistryEntryWords);
    }
  }
  charge_registry(ids, 2);
  update_keys(toggled);

  std::vector<Vertex> ends;
  for (const SketchEdge& e : batch) {
    ends.push_back(e.u);
    ends.push_back(e.v);
  }
  std::vector<ComponentId> comp;
  {
    Forest::CapBypass bypass(*forest_);
    comp = forest_->id(ends);
  }
  // Spanning forest of the contracted batch graph, computed on one machine.
  std::map<ElementId, std::uint32_t> dense;
  for (const ComponentId& c : comp) dense.emplace(c.value, static_cast<std::uint32_t>(dense.size()));
  DisjointSets local(dense.size());
  std::vector<Edge> links;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (local.unite(dense.at(comp[2 * i].value), dense.at(comp[2 * i + 1].value))) {
      links.push_back(Edge{batch[i].u, batch[i].v});
    }
  }
  {
    Forest::CapBypass bypass(*forest_);
    forest_->link(links, LinkCheck::kTrusted);
  }
  finish(snap, out);
  return out;
}

BatchOutcome DynGraph::remove(std::span<const Edge> edges, DeleteProbe* probe) {
  check_k(edges.size());
  for (const Edge& e : edges) check_edge(e);
  BatchOutcome out;
  const Snapshot snap = begin();
  const std::uint64_t eseed = edge_seed(config_.seed);
  const std::vector<SketchEdge> batch = as_sketch_edges(eseed, edges);
  // Presence check for the whole batch (multiplicities respected) first.
  std::map<EdgeId, std::uint32_t> need;
  for (const SketchEdge& e : batch) {
    const RegistryEntry* entry = registry_.find(e.id);
    if (entry == nullptr || Edge{entry->u, entry->v}.key() != Edge{e.u, e.v}.key() ||
        entry->multiplicity < ++need[e.id]) {
      throw Error(ErrorCode::kEdgeAbsent,
                  "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ") not in the graph");
    }
  }

  std::vector<EdgeId> ids;
  std::vector<SketchEdge> toggled;
  for (const SketchEdge& e : batch) {
    ids.push_back(e.id);
    if (registry_.erase(e.id) == 0) {
      toggled.push_back(e);
      sim_->adjust_resident(registry_.shard_of(e.id, sim_->machine_count()),
                            -static_cast<std::int64_t>(kRegistryEntryWords));
    }
  }
  charge_registry(ids, 2);
  update_keys(toggled);

  std::vector<Edge> tree;
  for (const SketchEdge& e : toggled) {
    if (forest_->has_edge({e.u, e.v})) tree.push_back({e.u, e.v});
  }
  Forest::CapBypass bypass(*forest_);
  if (!tree.empty()) forest_->cut(tree);
  if (probe != nullptr) {
    probe->piece_of = probe->watch.empty() ? std::vector<ComponentId>{} : forest_->id(probe->watch);
    probe->replacement_pieces.clear();
  }
  if (tree.empty()) {
    finish(snap, out);
    return out;
  }

  std::vector<Vertex> ends;
  for (const Edge& e : tree) {
    ends.push_back(e.u);
    ends.push_back(e.v);
  }
  const std::vector<ComponentId> comp = forest_->id(ends);
  std::map<ComponentId, Tracked> tracked;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (tracked.count(comp[i]) == 0) tracked.emplace(comp[i], Tracked{ends[i], AugKey(), comp[i]});
  }
  std::vector<Vertex> reps;
  for (const auto& [c, t] : tracked) reps.push_back(t.rep);
  std::vector<AugKey> sums = forest_->component_sum(reps);
  std::size_t i = 0;
  for (auto& [c, t] : tracked) t.sum = std::move(sums[i++]);

  for (int attempt = 0;; ++attempt) {
    try {
      contract(tracked, out, probe);
      break;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kContractionStalled || attempt > 0) throw;
      reseed();
      ++out.reseeds;
      reps.clear();
      for (const auto& [c, t] : tracked) reps.push_back(t.rep);
      sums = forest_->component_sum(reps);
      i = 0;
      for (auto& [c, t] : tracked) t.sum = std::move(sums[i++]);
    }
  }
  finish(snap, out);
  return out;
}

void DynGraph::contract(std::map<ComponentId, Tracked>& tracked, BatchOutcome& out, DeleteProbe* probe) {
  const MachineId coord = forest_->sequences().coordinator();
  for (std::size_t iter = 0;; ++iter) {
    // (a) decode every tracked component's XOR into candidate ids.
    std::vector<EdgeId> candidates;
    for (const auto& [c, t] : tracked) {
      const std::vector<EdgeId> got = decode_candidates(t.sum);
      candidates.insert(candidates.end(), got.begin(), got.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty()) return;

    // (b) registry check drops ids that are not edges.
    charge_registry(candidates, 4);
    std::vector<ValidatedEdge> present;
    for (EdgeId id : candidates) {
      if (const RegistryEntry* entry = registry_.find(id)) present.push_back({id, entry->u, entry->v});
    }
    if (present.empty()) return;

    // (c) component ids of candidate endpoints keep cross-component edges.
    std::vector<Vertex> ends;
    for (const ValidatedEdge& e : present) {
      ends.push_back(e.u);
      ends.push_back(e.v);
    }
    const std::vector<ComponentId> comp = forest_->id(ends);
    std::map<std::pair<ComponentId, ComponentId>, std::pair<ValidatedEdge, std::size_t>> best;
    for (std::size_t i = 0; i < present.size(); ++i) {
      const ComponentId a = comp[2 * i];
      const ComponentId b = comp[2 * i + 1];
      if (a == b) continue;
      const auto key = std::minmax(a, b);
      auto it = best.find(key);
      if (it == best.end() || present[i].id < it->second.first.id) best[key] = {present[i], i};
    }
    if (best.empty()) return;
    if (iter >= max_iterations_) {
      throw Error(ErrorCode::kContractionStalled,
                  std::to_string(best.size()) + " replacement candidates left after " +
                      std::to_string(max_iterations_) + " iterations");
    }

    // (d) local spanning forest of the valid replacements, smallest id first.
    std::vector<std::pair<ValidatedEdge, std::size_t>> ordered;
    for (const auto& [key, v] : best) ordered.push_back(v);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& x, const auto& y) { return x.first.id < y.first.id; });
    std::map<ComponentId, std::uint32_t> dense;
    for (const auto& [v, i] : ordered) {
      dense.emplace(comp[2 * i], static_cast<std::uint32_t>(dense.size()));
      dense.emplace(comp[2 * i + 1], static_cast<std::uint32_t>(dense.size()));
    }
    // Components reached by a candidate but not yet tracked (possible only
    // through garbage cells that decode to a real edge) join the tracked set.
    std::vector<Vertex> fresh_reps;
    std::vector<ComponentId> fresh_ids;
    for (const auto& [v, i] : ordered) {
      for (std::size_t side = 0; side < 2; ++side) {
        const ComponentId c = comp[2 * i + side];
        if (tracked.count(c) == 0 &&
            std::find(fresh_ids.begin(), fresh_ids.end(), c) == fresh_ids.end()) {
          fresh_ids.push_back(c);
          fresh_reps.push_back(side == 0 ? v.u : v.v);
        }
      }
    }
    if (!fresh_reps.empty()) {
      std::vector<AugKey> sums = forest_->component_sum(fresh_reps);
      for (std::size_t j = 0; j < fresh_ids.size(); ++j) {
        tracked.emplace(fresh_ids[j], Tracked{fresh_reps[j], std::move(sums[j]), fresh_ids[j]});
      }
    }
    DisjointSets local(dense.size());
    std::vector<Edge> links;
    mpc::OutboxBuilder gather;
    for (const auto& [v, i] : ordered) {
      gather.add(registry_.shard_of(v.id, sim_->machine_count()), coord,
                 {v.id.value, v.u, v.v, comp[2 * i].value, comp[2 * i + 1].value});
      if (local.unite(dense.at(comp[2 * i]), dense.at(comp[2 * i + 1]))) {
        links.push_back({v.u, v.v});
        if (probe != nullptr) {
          probe->replacement_pieces.emplace_back(tracked.at(comp[2 * i]).piece,
                                                 tracked.at(comp[2 * i + 1]).piece);
        }
      }
    }
    sim_->exchange(gather.build(sim_->config()));
    forest_->link(links, LinkCheck::kTrusted);
    out.replacements_added.insert(out.replacements_added.end(), links.begin(), links.end());
    out.iterations = iter + 1;

    // (e) refresh representatives; merged XOR values combine locally.
    std::vector<Vertex> reps;
    for (const auto& [c, t] : tracked) reps.push_back(t.rep);
    const std::vector<ComponentId> now = forest_->id(reps);
    std::map<ComponentId, Tracked> merged;
    std::size_t j = 0;
    for (auto& [c, t] : tracked) {
      const ComponentId nc = now[j++];
      auto it = merged.find(nc);
      if (it == merged.end()) {
        merged.emplace(nc, std::move(t));
      } else {
        it->second.sum ^= t.sum;
      }
    }
    for (auto& [c, t] : merged) t.sum.compact();
    tracked = std::move(merged);
  }
}

BatchOutcome DynGraph::mixed(std::span<const Edge> deletions, std::span<const Edge> insertions) {
  check_k(deletions.size() + insertions.size());
  // An insert and a delete of the same edge cancel.
  std::map<std::uint64_t, std::size_t> pending_ins;
  for (const Edge& e : insertions) ++pending_ins[e.key()];
  std::vector<Edge> dels;
  std::map<std::uint64_t, std::size_t> cancelled;
  for (const Edge& e : deletions) {
    auto it = pending_ins.find(e.key());
    if (it != pending_ins.end() && it->second > 0) {
      --it->second;
      ++cancelled[e.key()];
    } else {
      dels.push_back(e);
    }
  }
  std::vector<Edge> ins;
  for (const Edge& e : insertions) {
    auto it = cancelled.find(e.key());
    if (it != cancelled.end() && it->second > 0) {
      --it->second;
    } else {
      ins.push_back(e);
    }
  }
  BatchOutcome out;
  const Snapshot snap = begin();
  if (!dels.empty()) {
    BatchOutcome d = remove(dels);
    out.replacements_added = std::move(d.replacements_added);
    out.iterations = d.iterations;
    out.reseeds = d.reseeds;
  }
  if (!ins.empty()) insert(ins);
  finish(snap, out);
  return out;
}

std::vector<std::uint32_t> DynGraph::lookup_multiplicity(std::span<const Edge> edges) {
  for (const Edge& e : edges) check_edge(e);
  const std::uint64_t eseed = edge_seed(config_.seed);
  std::vector<EdgeId> ids;
  std::vector<std::uint32_t> out;
  for (const Edge& e : edges) {
    const EdgeId id = edge_id(eseed, e.u, e.v);
    ids.push_back(id);
    const RegistryEntry* entry = registry_.find(id);
    out.push_back(entry != nullptr && Edge{entry->u, entry->v}.key() == e.key() ? entry->multiplicity : 0);
  }
  charge_registry(ids, 2);
  return out;
}

std::vector<ComponentId> DynGraph::component_ids(std::span<const Vertex> vertices) {
  if (vertices.empty()) return {};
  Forest::CapBypass bypass(*forest_);
  return forest_->id(vertices);
}

void DynGraph::bulk_load(std::span<const Edge> edges) {
  for (const Edge& e : edges) check_edge(e);
  const std::uint64_t eseed = edge_seed(config_.seed);
  for (const Edge& e : edges) {
    const EdgeId id = edge_id(eseed, e.u, e.v);
    if (registry_.insert(id, e.u, e.v) == 1) {
      sim_->adjust_resident(registry_.shard_of(id, sim_->machine_count()), kRegistryEntryWords);
    }
  }
  recompute_keys(false);
  DisjointSets ds(config_.n);
  for (const Edge& e : forest_->edges()) ds.unite(e.u, e.v);
  std::vector<Edge> links;
  for (const Edge& e : edges) {
    if (ds.unite(e.u, e.v)) links.push_back(e);
  }
  forest_->bulk_link(links);
}

std::vector<std::uint32_t> DynGraph::component_labels() const {
  std::vector<std::uint32_t> out(config_.n);
  for (Vertex v = 0; v < config_.n; ++v) out[v] = forest_->peek_id(v).value;
  return out;
}

std::uint64_t DynGraph::state_digest() const {
  std::uint64_t h = prf(0x6469676573ULL, config_.n);
  for (const auto& [id, entry] : registry_.sorted_entries()) {
    h = hash_combine(h, prf(id.value, entry.u, entry.v, entry.multiplicity));
  }
  for (Vertex v = 0; v < config_.n; ++v) {
    const AugKey& key = forest_->peek_key(v);
    for (std::size_t i = 0; i < key.length(); ++i) h = hash_combine(h, key.word(i));
  }
  // Partition in canonical form: each vertex labelled by its component's
  // smallest vertex.
  std::unordered_map<std::uint32_t, Vertex> first;
  for (Vertex v = 0; v < config_.n; ++v) {
    const auto [it, fresh] = first.emplace(forest_->peek_id(v).value, v);
    h = hash_combine(h, it->second);
  }
  return h;
}

void DynGraph::validate() const {
  forest_->validate();
  const std::uint64_t eseed = edge_seed(config_.seed);
  for (const Edge& e : forest_->edges()) {
    if (registry_.multiplicity(edge_id(eseed, e.u, e.v)) == 0) fail("forest edge missing from the graph");
  }
  DisjointSets g(config_.n);
  std::vector<std::vector<EdgeId>> incident(config_.n);
  for (const auto& [id, entry] : registry_.sorted_entries()) {
    g.unite(entry.u, entry.v);
    incident[entry.u].push_back(id);
    incident[entry.v].push_back(id);
  }
  std::unordered_map<std::uint32_t, std::uint32_t> f_to_g;
  std::unordered_map<std::uint32_t, std::uint32_t> g_to_f;
  for (Vertex v = 0; v < config_.n; ++v) {
    const std::uint32_t f = forest_->peek_id(v).value;
    const std::uint32_t c = g.find(v);
    if (f_to_g.emplace(f, c).first->second != c || g_to_f.emplace(c, f).first->second != f) {
      fail("forest components differ from graph components at vertex " + std::to_string(v));
    }
    AugKey expect(sketch_.key_words());
    for (EdgeId id : incident[v]) sketch_toggle(sketch_, expect, id);
    if (!(expect == forest_->peek_key(v))) fail("sketch of vertex " + std::to_string(v) + " is stale");
  }
}

}  // namespace bdc
