#include "bdc/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "bdc/union_find.hpp"

namespace bdc {

namespace {

std::size_t auto_batch_cap(std::uint64_t capacity, std::size_t n, double alpha, std::size_t key_words) {
  const double spread = std::ceil(std::pow(static_cast<double>(std::max<std::size_t>(n, 2)), alpha) - 1e-9);
  const double denom = static_cast<double>(4 + key_words) * spread *
                       static_cast<double>(ceil_log2(static_cast<double>(n)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(capacity) / denom));
}

[[noreturn]] void fail(const std::string& what) { throw std::logic_error("forest: " + what); }

}  // namespace

Forest::Forest(const ForestParams& params, mpc::Simulator& sim)
    : n_(params.n),
      batch_cap_(params.batch_cap != 0
                     ? params.batch_cap
                     : auto_batch_cap(sim.config().capacity_words, params.n, params.alpha,
                                      params.key_words)),
      seq_(
          [&] {
            if (params.n == 0) throw Error(ErrorCode::kBadParams, "forest needs n >= 1");
            SequenceParams sp;
            sp.element_capacity = params.n + 2 * std::max<std::size_t>(params.n - 1, 1);
            sp.n = params.n;
            sp.alpha = params.alpha;
            sp.key_words = params.key_words;
            sp.seed = params.seed;
            sp.max_height = params.max_height;
            sp.block_cap = params.block_cap;
            return sp;
          }(),
          &sim) {
  const bool saved = seq_.accounting();
  seq_.set_accounting(false);
  for (Vertex v = 0; v < n_; ++v) seq_.add_element(v);
  seq_.restructure();
  seq_.set_accounting(saved);
  slot_edge_.resize(std::max<std::size_t>(n_ - 1, 1));
  for (std::uint32_t s = 0; s < slot_edge_.size(); ++s) free_slots_.push(s);
}

void Forest::check_batch(std::size_t k) const {
  if (!bypass_cap_ && k > batch_cap_) {
    throw Error(ErrorCode::kBatchTooLarge, "batch of " + std::to_string(k) + " exceeds cap " +
                                               std::to_string(batch_cap_));
  }
}

void Forest::check_vertex(Vertex v) const {
  if (v >= n_) throw Error(ErrorCode::kUnknownVertex, "vertex " + std::to_string(v));
}

MachineId Forest::home(ElementId e) const {
  const MachineId m = seq_.owner(e, 0);
  return m == kUnplaced ? seq_.coordinator() : m;
}

ElementId Forest::arc(Vertex from, Vertex to) const {
  const auto it = slot_of_.find(Edge{from, to}.key());
  if (it == slot_of_.end()) {
    throw Error(ErrorCode::kEdgeNotInForest,
                "(" + std::to_string(from) + "," + std::to_string(to) + ")");
  }
  return static_cast<ElementId>(n_ + 2 * it->second + (from < to ? 0 : 1));
}

std::optional<std::pair<Vertex, Vertex>> Forest::arc_endpoints(ElementId e) const {
  if (e < n_) return std::nullopt;
  const std::size_t slot = (e - n_) / 2;
  const Edge& ed = slot_edge_[slot];
  return ((e - n_) % 2 == 0) ? std::make_pair(ed.u, ed.v) : std::make_pair(ed.v, ed.u);
}

bool Forest::has_edge(Edge e) const { return slot_of_.count(e.key()) != 0; }

std::vector<Edge> Forest::edges() const {
  std::vector<Edge> out;
  out.reserve(slot_of_.size());
  for (const auto& [key, slot] : slot_of_) out.push_back(slot_edge_[slot]);
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
  return out;
}

void Forest::link(std::span<const Edge> edges, LinkCheck check) {
  check_batch(edges.size());
  std::vector<Edge> batch;
  batch.reserve(edges.size());
  std::vector<std::uint64_t> keys;
  for (const Edge& e : edges) {
    check_vertex(e.u);
    check_vertex(e.v);
    if (e.u == e.v) throw Error(ErrorCode::kCycleDetected, "self-loop at " + std::to_string(e.u));
    if (has_edge(e)) throw Error(ErrorCode::kCycleDetected, "edge already in forest");
    keys.push_back(e.key());
    batch.push_back(e);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw Error(ErrorCode::kCycleDetected, "edge repeated within a link batch");
  }
  if (check == LinkCheck::kVerify && !batch.empty()) {
    std::vector<Vertex> ends;
    for (const Edge& e : batch) {
      ends.push_back(e.u);
      ends.push_back(e.v);
    }
    std::vector<ComponentId> ids;
    {
      CapBypass bypass(*this);
      ids = id(ends);
    }
    std::map<ElementId, std::uint32_t> dense;
    for (const ComponentId& c : ids) dense.emplace(c.value, static_cast<std::uint32_t>(dense.size()));
    DisjointSets ds(dense.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!ds.unite(dense.at(ids[2 * i].value), dense.at(ids[2 * i + 1].value))) {
        throw Error(ErrorCode::kCycleDetected, "link of (" + std::to_string(batch[i].u) + "," +
                                                   std::to_string(batch[i].v) + ") closes a cycle");
      }
    }
  }
  link_impl(batch);
}

void Forest::link_impl(std::span<const Edge> edges) {
  if (edges.empty()) return;
  const MachineId coord = seq_.coordinator();
  mpc::OutboxBuilder dispatch;
  for (const Edge& e : edges) {
    dispatch.add(coord, home(e.u), {e.u, e.v});
    dispatch.add(coord, home(e.v), {e.u, e.v});
  }
  seq_.send(dispatch);

  // New neighbours per vertex in input order; joins at one vertex are
  // serialized on that vertex's machine.
  std::map<Vertex, std::vector<Vertex>> nbrs;
  std::vector<ElementId> fresh;
  for (const Edge& e : edges) {
    if (free_slots_.empty()) fail("no free edge slot");
    const std::uint32_t slot = free_slots_.top();
    free_slots_.pop();
    slot_edge_[slot] = e.normalized();
    slot_of_[e.key()] = slot;
    const auto base = static_cast<ElementId>(n_ + 2 * slot);
    seq_.add_element(base);
    seq_.add_element(base + 1);
    fresh.push_back(base);
    fresh.push_back(base + 1);
    nbrs[e.u].push_back(e.v);
    nbrs[e.v].push_back(e.u);
  }

  mpc::OutboxBuilder lookup;
  std::vector<std::pair<ElementId, ElementId>> links;
  for (const auto& [x, ws] : nbrs) {
    const ElementId old = seq_.next(x);
    lookup.add(home(x), home(old), {x, old});
    links.emplace_back(x, arc(x, ws.front()));
    for (std::size_t i = 0; i < ws.size(); ++i) {
      links.emplace_back(arc(ws[i], x), i + 1 < ws.size() ? arc(x, ws[i + 1]) : old);
    }
  }
  seq_.send(lookup);

  mpc::OutboxBuilder relinks;
  for (const auto& [p, q] : links) {
    relinks.add(coord, home(p), {p, q});
    relinks.add(coord, home(q), {p, q});
  }
  seq_.send(relinks);
  seq_.relink(links);
  for (ElementId e : fresh) seq_.mark_dirty(e);
  seq_.restructure();
}

void Forest::cut(std::span<const Edge> edges) {
  check_batch(edges.size());
  std::vector<Edge> batch;
  for (const Edge& e : edges) {
    check_vertex(e.u);
    check_vertex(e.v);
    if (!has_edge(e)) {
      throw Error(ErrorCode::kEdgeNotInForest,
                  "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    batch.push_back(e.normalized());
  }
  std::sort(batch.begin(), batch.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
  batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
  if (batch.empty()) return;

  const MachineId coord = seq_.coordinator();
  std::vector<ElementId> removed;
  for (const Edge& e : batch) {
    removed.push_back(arc(e.u, e.v));
    removed.push_back(arc(e.v, e.u));
  }
  std::sort(removed.begin(), removed.end());
  const auto is_removed = [&](ElementId e) {
    return std::binary_search(removed.begin(), removed.end(), e);
  };

  // Three lookup rounds: reach the arcs, read their neighbours, and resolve
  // runs of removed arcs around each endpoint.
  mpc::OutboxBuilder reach;
  mpc::OutboxBuilder neighbours;
  for (ElementId a : removed) {
    reach.add(coord, home(a), {a});
    neighbours.add(home(a), home(seq_.prev(a)), {a, seq_.prev(a)});
    neighbours.add(home(a), home(seq_.next(a)), {a, seq_.next(a)});
  }
  seq_.send(reach);
  seq_.send(neighbours);

  mpc::OutboxBuilder resolve;
  std::vector<std::pair<ElementId, ElementId>> links;
  for (ElementId a : removed) {
    const ElementId p = seq_.prev(a);
    if (is_removed(p)) continue;
    const auto [x, w] = *arc_endpoints(a);
    ElementId q = seq_.next(arc(w, x));
    while (is_removed(q)) {
      const auto [qx, y] = *arc_endpoints(q);
      if (qx != x) fail("tour rotation broken around vertex " + std::to_string(x));
      q = seq_.next(arc(y, x));
    }
    resolve.add(home(a), home(p), {p, q});
    links.emplace_back(p, q);
  }
  seq_.send(resolve);

  mpc::OutboxBuilder relinks;
  for (const auto& [p, q] : links) {
    relinks.add(coord, home(p), {p, q});
    relinks.add(coord, home(q), {p, q});
  }
  seq_.send(relinks);

  for (ElementId a : removed) seq_.remove_element(a);
  for (const Edge& e : batch) {
    const auto it = slot_of_.find(e.key());
    free_slots_.push(it->second);
    slot_of_.erase(it);
  }
  seq_.relink(links);
  seq_.restructure();
}

void Forest::charge_walk(const std::vector<SequenceStore::TopInfo>& tops,
                         const std::vector<std::vector<std::uint64_t>>& replies) {
  if (tops.empty()) return;
  const MachineId coord = seq_.coordinator();
  std::size_t depth = 0;
  for (const auto& t : tops) depth = std::max(depth, t.path.size());
  mpc::OutboxBuilder dispatch;
  for (std::size_t i = 0; i < tops.size(); ++i) dispatch.add(coord, tops[i].path[0], {i, 0});
  seq_.send(dispatch);
  for (std::size_t r = 1; r <= depth; ++r) {
    mpc::OutboxBuilder out;
    for (std::size_t i = 0; i < tops.size(); ++i) {
      const auto& path = tops[i].path;
      if (r < path.size()) {
        out.add(path[r - 1], path[r], {i, r});
      } else if (r == path.size()) {
        out.add(path.back(), coord, replies[i]);
      }
    }
    seq_.send(out);
  }
}

std::vector<ComponentId> Forest::id(std::span<const Vertex> vertices) {
  check_batch(vertices.size());
  for (Vertex v : vertices) check_vertex(v);
  std::vector<Vertex> uniq(vertices.begin(), vertices.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<SequenceStore::TopInfo> tops;
  std::vector<std::vector<std::uint64_t>> replies;
  std::unordered_map<Vertex, ElementId> found;
  for (Vertex v : uniq) {
    tops.push_back(seq_.find_top(v));
    const ElementId m = seq_.top_min(tops.back());
    found[v] = m;
    replies.push_back({v, m});
  }
  charge_walk(tops, replies);
  std::vector<ComponentId> out;
  out.reserve(vertices.size());
  for (Vertex v : vertices) out.push_back(ComponentId{found.at(v)});
  return out;
}

std::vector<AugKey> Forest::component_sum(std::span<const Vertex> vertices) {
  check_batch(vertices.size());
  for (Vertex v : vertices) check_vertex(v);
  std::vector<Vertex> uniq(vertices.begin(), vertices.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<SequenceStore::TopInfo> tops;
  std::vector<std::vector<std::uint64_t>> replies;
  std::unordered_map<Vertex, AugKey> found;
  for (Vertex v : uniq) {
    tops.push_back(seq_.find_top(v));
    AugKey sum = seq_.top_sum(tops.back());
    std::vector<std::uint64_t> reply{v};
    reply.insert(reply.end(), sum.words().begin(), sum.words().end());
    replies.push_back(std::move(reply));
    found.emplace(v, std::move(sum));
  }
  charge_walk(tops, replies);
  std::vector<AugKey> out;
  out.reserve(vertices.size());
  for (Vertex v : vertices) out.push_back(found.at(v));
  return out;
}

void Forest::update_key(std::span<const std::pair<Vertex, AugKey>> pairs) {
  check_batch(pairs.size());
  std::map<Vertex, const AugKey*> last;
  for (const auto& [v, key] : pairs) {
    check_vertex(v);
    if (key.length() != key_words()) {
      throw Error(ErrorCode::kKeyLengthMismatch,
                  "key of length " + std::to_string(key.length()) + " for vertex " + std::to_string(v));
    }
    last[v] = &key;
  }
  if (last.empty()) return;
  mpc::OutboxBuilder out;
  for (const auto& [v, key] : last) {
    std::vector<std::uint64_t> words{v};
    words.insert(words.end(), key->words().begin(), key->words().end());
    out.add(seq_.coordinator(), home(v), words);
  }
  seq_.send(out);
  for (const auto& [v, key] : last) seq_.set_value(v, *key);
  seq_.restructure();
}

std::vector<AugKey> Forest::get_key(std::span<const Vertex> vertices) {
  check_batch(vertices.size());
  for (Vertex v : vertices) check_vertex(v);
  if (vertices.empty()) return {};
  mpc::OutboxBuilder ask;
  mpc::OutboxBuilder reply;
  std::vector<AugKey> out;
  for (Vertex v : vertices) {
    ask.add(seq_.coordinator(), home(v), {v});
    std::vector<std::uint64_t> words{v};
    const AugKey& key = seq_.value(v);
    words.insert(words.end(), key.words().begin(), key.words().end());
    reply.add(home(v), seq_.coordinator(), words);
    out.push_back(key);
  }
  seq_.send(ask);
  seq_.send(reply);
  return out;
}

void Forest::bulk_link(std::span<const Edge> edges) {
  DisjointSets ds(n_);
  for (const Edge& e : this->edges()) ds.unite(e.u, e.v);
  for (const Edge& e : edges) {
    check_vertex(e.u);
    check_vertex(e.v);
    if (e.u == e.v || !ds.unite(e.u, e.v)) {
      throw Error(ErrorCode::kCycleDetected, "bulk link of (" + std::to_string(e.u) + "," +
                                                 std::to_string(e.v) + ") closes a cycle");
    }
  }
  const bool saved = seq_.accounting();
  seq_.set_accounting(false);
  link_impl(edges);
  seq_.set_accounting(saved);
}

void Forest::bulk_set_keys(std::span<const std::pair<Vertex, AugKey>> pairs) {
  const bool saved = seq_.accounting();
  seq_.set_accounting(false);
  for (const auto& [v, key] : pairs) {
    check_vertex(v);
    seq_.set_value(v, key);
  }
  seq_.restructure();
  seq_.set_accounting(saved);
}

ComponentId Forest::peek_id(Vertex v) const {
  check_vertex(v);
  return ComponentId{seq_.sequence_id(v)};
}

AugKey Forest::peek_sum(Vertex v) const {
  check_vertex(v);
  return seq_.top_sum(seq_.find_top(v));
}

const AugKey& Forest::peek_key(Vertex v) const {
  check_vertex(v);
  return seq_.value(v);
}

std::vector<ElementId> Forest::tour(Vertex v) const {
  check_vertex(v);
  return seq_.canonical(v);
}

void Forest::validate() const {
  seq_.validate();
  DisjointSets ds(n_);
  for (const auto& [key, slot] : slot_of_) {
    const Edge& e = slot_edge_[slot];
    if (e.key() != key) fail("slot table out of sync");
    const auto base = static_cast<ElementId>(n_ + 2 * slot);
    if (!seq_.alive(base) || !seq_.alive(base + 1)) fail("tree edge without both arcs");
    ds.unite(e.u, e.v);
  }
  // Every element is followed by the visit or an out-arc of the vertex it
  // enters.
  const auto enters = [&](ElementId e) { return e < n_ ? static_cast<Vertex>(e) : arc_endpoints(e)->second; };
  const auto leaves = [&](ElementId e) { return e < n_ ? static_cast<Vertex>(e) : arc_endpoints(e)->first; };
  std::vector<std::uint8_t> done(n_, 0);
  for (Vertex v = 0; v < n_; ++v) {
    if (!seq_.alive(v)) fail("visit element missing");
    if (done[v]) continue;
    const std::vector<ElementId> cyc = seq_.cycle(v);
    std::size_t visits = 0;
    for (ElementId e : cyc) {
      if (e >= n_ && !seq_.alive(e)) fail("dead element on a tour");
      if (enters(e) != leaves(seq_.next(e))) fail("tour step does not follow the rotation");
      if (e < n_) {
        ++visits;
        done[e] = 1;
        if (!ds.same(e, v)) fail("tour mixes components");
      }
    }
    if (visits != ds.set_size(v)) fail("tour misses vertices of its tree");
    if (cyc.size() != 3 * visits - 2) fail("tour length does not match tree size");
    const ElementId rep = seq_.sequence_id(v);
    if (std::find(cyc.begin(), cyc.end(), rep) == cyc.end()) fail("component id outside its tour");
  }
}

}  // namespace bdc
