#include "bdc/skip_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace bdc {

namespace {

constexpr ElementId kTopMarker = kNoElement - 1;
constexpr std::size_t kOverflowAttempts = 16;

void sort_unique(std::vector<ElementId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

[[noreturn]] void fail(const std::string& what) { throw std::logic_error("sequence: " + what); }

}  // namespace

SequenceStore::SequenceStore(const SequenceParams& params, mpc::Simulator* sim)
    : sim_(sim),
      key_words_(params.key_words),
      seed_(params.seed),
      place_seed_(prf(params.seed, 0x706c616365ULL)),
      coordinator_(params.coordinator) {
  if (sim_ == nullptr) throw Error(ErrorCode::kBadParams, "sequence store needs a simulator");
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw Error(ErrorCode::kBadParams, "alpha must be in (0,1)");
  }
  const double n = static_cast<double>(std::max<std::size_t>(params.n, 2));
  promotion_ = std::min(std::pow(n, -params.alpha), 0.5);
  threshold_ = static_cast<std::uint64_t>(std::ldexp(promotion_, 64));
  max_height_ = params.max_height != 0
                    ? params.max_height
                    : std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(4.0 / params.alpha)));
  block_cap_ = params.block_cap != 0
                   ? params.block_cap
                   : std::max<std::size_t>(
                         8, static_cast<std::size_t>(8.0 * std::pow(n, params.alpha) * std::log2(n)));
  if (coordinator_ >= sim_->machine_count()) {
    throw Error(ErrorCode::kBadParams, "coordinator machine out of range");
  }
  elems_.resize(params.element_capacity);
  stamp_.assign(params.element_capacity, 0);
  resolved_.assign(params.element_capacity, kNoElement);
  tally_.assign(sim_->machine_count(), 0);
}

void SequenceStore::send(const mpc::OutboxBuilder& out) {
  if (accounting_) sim_->exchange(out.build(sim_->config()));
}

std::size_t SequenceStore::draw_height(ElementId id, std::uint32_t salt) const {
  std::size_t h = 1;
  while (h < max_height_ && prf(seed_, id, salt, h) < threshold_) ++h;
  return h;
}

MachineId SequenceStore::place(ElementId id, std::size_t level) const {
  return static_cast<MachineId>(prf(place_seed_, id, level) % sim_->machine_count());
}

MachineId SequenceStore::owner(ElementId id, std::size_t level) const {
  return elems_[id].lv[level].owner;
}

std::size_t SequenceStore::entry_words(ElementId id, std::size_t level) const {
  return 4 + elems_[id].lv[level].agg.words().size();
}

void SequenceStore::charge(ElementId id, std::size_t level, int sign) {
  const MachineId m = elems_[id].lv[level].owner;
  if (m == kUnplaced) return;
  const auto words = static_cast<std::int64_t>(entry_words(id, level));
  sim_->adjust_resident(m, sign * words);
  tally_[m] = static_cast<std::uint64_t>(static_cast<std::int64_t>(tally_[m]) + sign * words);
}

std::vector<std::uint64_t> SequenceStore::serialize(ElementId id, std::size_t level) const {
  const Entry& e = elems_[id].lv[level];
  std::vector<std::uint64_t> words{id, level, e.next, e.prev};
  words.insert(words.end(), e.agg.words().begin(), e.agg.words().end());
  return words;
}

void SequenceStore::move_entry(ElementId id, std::size_t level, MachineId dst,
                               mpc::OutboxBuilder& out) {
  Entry& e = elems_[id].lv[level];
  if (e.owner == dst) return;
  if (e.owner != kUnplaced && accounting_) out.add(e.owner, dst, serialize(id, level));
  charge(id, level, -1);
  e.owner = dst;
  charge(id, level, +1);
}

void SequenceStore::set_agg(ElementId id, std::size_t level, AugKey value) {
  if (value.length() != key_words_) {
    throw Error(ErrorCode::kKeyLengthMismatch, "key has " + std::to_string(value.length()) +
                                                   " words, expected " + std::to_string(key_words_));
  }
  value.compact();
  charge(id, level, -1);
  elems_[id].lv[level].agg = std::move(value);
  charge(id, level, +1);
}

void SequenceStore::add_element(ElementId id) {
  if (id >= elems_.size()) throw Error(ErrorCode::kBadParams, "element id beyond capacity");
  Elem& el = elems_[id];
  if (el.alive) fail("element " + std::to_string(id) + " added twice");
  el.alive = true;
  el.lv.assign(draw_height(id, el.salt), Entry{});
  for (Entry& e : el.lv) {
    e.next = id;
    e.prev = id;
    e.agg = AugKey(key_words_);
  }
  pending_.push_back(id);
}

void SequenceStore::remove_element(ElementId id) {
  Elem& el = elems_[id];
  if (!el.alive) fail("removing dead element " + std::to_string(id));
  for (std::size_t l = 0; l < el.lv.size(); ++l) charge(id, l, -1);
  el.lv.clear();
  el.alive = false;
  el.salt = 0;
}

void SequenceStore::relink(std::span<const std::pair<ElementId, ElementId>> links) {
  for (const auto& [p, q] : links) {
    elems_[p].lv[0].next = q;
    elems_[q].lv[0].prev = p;
    pending_.push_back(p);
  }
}

void SequenceStore::set_value(ElementId id, AugKey value) {
  set_agg(id, 0, std::move(value));
  pending_.push_back(id);
}

void SequenceStore::restructure() {
  std::vector<ElementId> dirty;
  dirty.swap(pending_);
  resolve_overflows(restructure_pass(std::move(dirty)));
}

std::vector<SequenceStore::Overflow> SequenceStore::restructure_pass(std::vector<ElementId> dirty) {
  std::vector<Overflow> overflows;
  dirty.erase(std::remove_if(dirty.begin(), dirty.end(), [&](ElementId e) { return !alive(e); }),
              dirty.end());
  sort_unique(dirty);
  std::size_t level = 0;
  for (; !dirty.empty(); ++level) {
    ++epoch_;
    std::vector<ElementId> heads;
    std::vector<ElementId> tops;
    std::vector<ElementId> path;
    for (ElementId x : dirty) {
      if (stamp_[x] == epoch_) continue;
      path.clear();
      ElementId head = kNoElement;
      ElementId y = x;
      while (true) {
        if (stamp_[y] == epoch_) {
          head = resolved_[y];
          break;
        }
        path.push_back(y);
        if (height(y) > level + 1) {
          head = y;
          heads.push_back(y);
          break;
        }
        y = prev(y, level);
        if (y == x) {
          head = kTopMarker;
          tops.push_back(x);
          break;
        }
      }
      for (ElementId e : path) {
        stamp_[e] = epoch_;
        resolved_[e] = head;
      }
    }
    sort_unique(heads);
    std::sort(tops.begin(), tops.end());

    mpc::OutboxBuilder out;
    for (ElementId h : heads) rebuild_block(h, level, out, overflows);
    for (ElementId t : tops) rebuild_top(t, level, out, overflows);
    // Aggregates computed one level down travel to the owner of the entry
    // they now describe.
    if (level > 0 && accounting_) {
      for (ElementId x : dirty) {
        const MachineId src = owner(x, level - 1);
        const MachineId dst = owner(x, level);
        if (src != kUnplaced && dst != kUnplaced && src != dst) {
          std::vector<std::uint64_t> words{x, level};
          const auto agg = elems_[x].lv[level].agg.words();
          words.insert(words.end(), agg.begin(), agg.end());
          out.add(src, dst, words);
        }
      }
    }
    send(out);
    dirty = std::move(heads);
  }
  stats_.last_levels = level;
  return overflows;
}

void SequenceStore::rebuild_block(ElementId head, std::size_t level, mpc::OutboxBuilder& out,
                                  std::vector<Overflow>& overflows) {
  std::vector<ElementId> block{head};
  ElementId r = next(head, level);
  while (r != head && height(r) <= level + 1) {
    block.push_back(r);
    r = next(r, level);
  }
  stats_.max_block = std::max(stats_.max_block, block.size());
  if (block.size() > block_cap_) overflows.push_back({head, block});

  AugKey sum(key_words_);
  for (ElementId e : block) sum ^= elems_[e].lv[level].agg;
  const MachineId m = place(head, level);
  for (ElementId e : block) move_entry(e, level, m, out);

  elems_[head].lv[level + 1].next = r;
  elems_[r].lv[level + 1].prev = head;
  set_agg(head, level + 1, std::move(sum));
}

void SequenceStore::rebuild_top(ElementId start, std::size_t level, mpc::OutboxBuilder& out,
                                std::vector<Overflow>& overflows) {
  std::vector<ElementId> members{start};
  for (ElementId e = next(start, level); e != start; e = next(e, level)) members.push_back(e);
  stats_.max_block = std::max(stats_.max_block, members.size());
  if (members.size() > block_cap_) overflows.push_back({start, members});
  const ElementId lead = *std::min_element(members.begin(), members.end());
  const MachineId m = place(lead, level);
  for (ElementId e : members) move_entry(e, level, m, out);
}

std::vector<SequenceStore::Overflow> SequenceStore::rebuild_cycle(ElementId start) {
  std::vector<ElementId> members = cycle(start);
  for (ElementId e : members) {
    Elem& el = elems_[e];
    for (std::size_t l = 1; l < el.lv.size(); ++l) charge(e, l, -1);
    el.lv.resize(1);
    const std::size_t h = draw_height(e, el.salt);
    for (std::size_t l = 1; l < h; ++l) {
      Entry fresh;
      fresh.next = e;
      fresh.prev = e;
      fresh.agg = AugKey(key_words_);
      el.lv.push_back(std::move(fresh));
    }
  }
  return restructure_pass(std::move(members));
}

void SequenceStore::resolve_overflows(std::vector<Overflow> overflows) {
  std::set<ElementId> handled;
  for (Overflow& o : overflows) {
    if (!alive(o.rep)) continue;
    const std::vector<ElementId> whole = cycle(o.rep);
    const ElementId lead = *std::min_element(whole.begin(), whole.end());
    if (!handled.insert(lead).second) continue;
    std::vector<ElementId> block = std::move(o.block);
    bool resolved = false;
    for (std::size_t attempt = 0; attempt < kOverflowAttempts; ++attempt) {
      ++stats_.overflow_events;
      for (ElementId e : block) ++elems_[e].salt;
      std::vector<Overflow> again = rebuild_cycle(lead);
      if (again.empty()) {
        resolved = true;
        break;
      }
      block = std::move(again.front().block);
    }
    if (!resolved) ++stats_.overflow_unresolved;
  }
}

SequenceStore::TopInfo SequenceStore::find_top(ElementId id) const {
  if (!alive(id)) fail("find_top on dead element " + std::to_string(id));
  TopInfo t;
  ElementId x = id;
  for (std::size_t level = 0;; ++level) {
    t.path.push_back(owner(x, level));
    ElementId y = x;
    bool wrapped = false;
    while (height(y) <= level + 1) {
      y = prev(y, level);
      if (y == x) {
        wrapped = true;
        break;
      }
    }
    if (wrapped) {
      t.level = level;
      t.rep = x;
      return t;
    }
    x = y;
  }
}

ElementId SequenceStore::top_min(const TopInfo& top) const {
  ElementId best = top.rep;
  for (ElementId e = next(top.rep, top.level); e != top.rep; e = next(e, top.level)) {
    best = std::min(best, e);
  }
  return best;
}

AugKey SequenceStore::top_sum(const TopInfo& top) const {
  AugKey sum = elems_[top.rep].lv[top.level].agg;
  for (ElementId e = next(top.rep, top.level); e != top.rep; e = next(e, top.level)) {
    sum ^= elems_[e].lv[top.level].agg;
  }
  sum.compact();
  return sum;
}

std::vector<ElementId> SequenceStore::cycle(ElementId id) const {
  std::vector<ElementId> out{id};
  for (ElementId e = next(id); e != id; e = next(e)) out.push_back(e);
  return out;
}

std::vector<ElementId> SequenceStore::canonical(ElementId id) const {
  std::vector<ElementId> out = cycle(id);
  std::rotate(out.begin(), std::min_element(out.begin(), out.end()), out.end());
  return out;
}

void SequenceStore::join(std::span<const std::pair<ElementId, ElementId>> pairs) {
  // Sequences are named by their head (minimum element).
  std::map<ElementId, ElementId> succ_seq;
  std::map<ElementId, ElementId> pred_seq;
  std::map<ElementId, ElementId> last_of;
  for (const auto& [a, b] : pairs) {
    if (!alive(a) || !alive(b)) throw Error(ErrorCode::kMalformedJoinPair, "join of unknown element");
    const std::vector<ElementId> sa = canonical(a);
    const std::vector<ElementId> sb = canonical(b);
    if (sa.back() != a) throw Error(ErrorCode::kMalformedJoinPair, "left element is not a sequence end");
    if (sb.front() != b) throw Error(ErrorCode::kMalformedJoinPair, "right element is not a sequence start");
    if (sa.front() == sb.front()) throw Error(ErrorCode::kMalformedJoinPair, "join within one sequence");
    if (!succ_seq.emplace(sa.front(), sb.front()).second ||
        !pred_seq.emplace(sb.front(), sa.front()).second) {
      throw Error(ErrorCode::kMalformedJoinPair, "sequence joined twice on one side");
    }
    last_of[sa.front()] = sa.back();
    last_of[sb.front()] = sb.back();
  }
  std::vector<std::pair<ElementId, ElementId>> links;
  std::set<ElementId> seen;
  for (const auto& [head, last] : last_of) {
    if (pred_seq.count(head) != 0) continue;
    ElementId cur = head;
    seen.insert(cur);
    while (succ_seq.count(cur) != 0) {
      const ElementId nxt = succ_seq.at(cur);
      links.emplace_back(last_of.at(cur), nxt);
      cur = nxt;
      seen.insert(cur);
    }
    links.emplace_back(last_of.at(cur), head);
  }
  if (seen.size() != last_of.size()) {
    throw Error(ErrorCode::kMalformedJoinPair, "joins close a cycle of sequences");
  }
  mpc::OutboxBuilder out;
  for (const auto& [p, q] : links) out.add(coordinator_, owner(p) == kUnplaced ? coordinator_ : owner(p), {p, q});
  send(out);
  relink(links);
  restructure();
}

void SequenceStore::split(std::span<const ElementId> after) {
  std::map<ElementId, std::vector<ElementId>> by_seq;
  for (ElementId x : after) {
    if (!alive(x)) throw Error(ErrorCode::kMalformedJoinPair, "split at unknown element");
    const std::vector<ElementId> seq = canonical(x);
    by_seq[seq.front()].push_back(x);
  }
  std::vector<std::pair<ElementId, ElementId>> links;
  for (auto& [head, cuts] : by_seq) {
    const std::vector<ElementId> seq = canonical(head);
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (std::find(cuts.begin(), cuts.end(), seq[i]) != cuts.end() && i + 1 < seq.size()) {
        pos.push_back(i);
      }
    }
    std::size_t begin = 0;
    for (std::size_t cut : pos) {
      links.emplace_back(seq[cut], seq[begin]);
      begin = cut + 1;
    }
    if (!pos.empty()) links.emplace_back(seq.back(), seq[begin]);
  }
  mpc::OutboxBuilder out;
  for (const auto& [p, q] : links) out.add(coordinator_, owner(p) == kUnplaced ? coordinator_ : owner(p), {p, q});
  send(out);
  relink(links);
  restructure();
}

std::size_t SequenceStore::levels_in_use() const {
  std::size_t best = 0;
  for (const Elem& el : elems_) {
    if (el.alive) best = std::max(best, el.lv.size());
  }
  return best;
}

void SequenceStore::validate() const {
  std::vector<std::uint64_t> words(tally_.size(), 0);
  for (ElementId id = 0; id < elems_.size(); ++id) {
    const Elem& el = elems_[id];
    if (!el.alive) {
      if (!el.lv.empty()) fail("dead element " + std::to_string(id) + " keeps levels");
      continue;
    }
    const std::string tag = "element " + std::to_string(id);
    if (el.lv.size() != draw_height(id, el.salt)) fail(tag + " height does not match its draw");
    for (std::size_t l = 0; l < el.lv.size(); ++l) {
      const Entry& e = el.lv[l];
      if (!alive(e.next) || height(e.next) <= l) fail(tag + " next missing at level " + std::to_string(l));
      if (!alive(e.prev) || height(e.prev) <= l) fail(tag + " prev missing at level " + std::to_string(l));
      if (elems_[e.next].lv[l].prev != id) fail(tag + " next/prev mismatch at level " + std::to_string(l));
      if (e.agg.length() != key_words_) fail(tag + " key length mismatch");
      if (e.owner == kUnplaced) fail(tag + " unplaced at level " + std::to_string(l));
      words[e.owner] += entry_words(id, l);
      if (l + 1 < el.lv.size()) {
        AugKey sum(key_words_);
        ElementId r = id;
        do {
          sum ^= elems_[r].lv[l].agg;
          if (elems_[r].lv[l].owner != place(id, l)) fail(tag + " block member misplaced");
          r = elems_[r].lv[l].next;
        } while (r != id && height(r) <= l + 1);
        if (el.lv[l + 1].next != r) fail(tag + " level link disagrees with block end");
        if (!(el.lv[l + 1].agg == sum)) fail(tag + " aggregate stale at level " + std::to_string(l + 1));
      } else {
        // Top-cycle members (no promoted element in the cycle) share one owner.
        ElementId y = id;
        bool top = true;
        do {
          if (height(y) > l + 1) {
            top = false;
            break;
          }
          y = elems_[y].lv[l].prev;
        } while (y != id);
        if (top) {
          ElementId lead = id;
          for (ElementId z = e.next; z != id; z = elems_[z].lv[l].next) lead = std::min(lead, z);
          if (e.owner != place(lead, l)) fail(tag + " top member misplaced");
        }
      }
    }
  }
  if (words != tally_) fail("resident word tally out of sync");
}

}  // namespace bdc
