#include "bdc/sketching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bdc/kernels.hpp"

namespace bdc {

EdgeId edge_id(std::uint64_t seed, Vertex u, Vertex v) {
  if (u == v) throw Error(ErrorCode::kSelfLoop, "edge_id of self-loop at " + std::to_string(u));
  const Vertex a = std::min(u, v);
  const Vertex b = std::max(u, v);
  std::uint64_t id = prf(seed, 0x65646765ULL, a, b);
  if (id == 0) id = 0x9e3779b97f4a7c15ULL;
  return EdgeId{id};
}

SketchConfig SketchConfig::make(std::size_t n, double delta, std::size_t sketch_factor,
                                std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kBadParams, "sketch needs n >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kBadParams, "delta must be in (0,1)");
  if (sketch_factor == 0) throw Error(ErrorCode::kBadParams, "sketch factor must be >= 1");
  SketchConfig c;
  c.n = n;
  c.delta = delta;
  c.sketch_factor = sketch_factor;
  c.seed = seed;
  const double log_n = n > 1 ? std::log2(static_cast<double>(n)) : 0.0;
  const auto spread = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), delta) - 1e-9));
  c.bundles = sketch_factor * std::max<std::size_t>(1, spread) * ceil_log2(static_cast<double>(n));
  c.levels = static_cast<std::size_t>(std::ceil(2.0 * log_n - 1e-9)) + 1;
  c.levels = std::min<std::size_t>(c.levels, 64);
  return c;
}

bool SketchConfig::member(std::size_t bundle, std::size_t level, EdgeId id) const {
  return kernels::sketch_member(seed, bundle, level, id.value);
}

double SketchConfig::rate(std::size_t level) const { return std::ldexp(1.0, -static_cast<int>(level)); }

void sketch_toggle(const SketchConfig& config, SketchVector& vector, EdgeId id) {
  kernels::sketch_accumulate(vector.mutable_words(), config.seed, config.bundles, config.levels,
                             id.value);
}

std::map<Vertex, SketchVector> sketch_delta(const SketchConfig& config,
                                            std::span<const SketchEdge> edges) {
  std::map<Vertex, SketchVector> out;
  const std::size_t words = config.key_words();
  std::vector<std::uint64_t> cells(words);
  for (const SketchEdge& e : edges) {
    std::fill(cells.begin(), cells.end(), 0);
    kernels::sketch_accumulate(cells, config.seed, config.bundles, config.levels, e.id.value);
    for (Vertex x : {e.u, e.v}) {
      auto [it, inserted] = out.try_emplace(x, SketchVector(words));
      kernels::xor_into(it->second.mutable_words(), cells);
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it->second.compact();
    it = it->second.stored() ? std::next(it) : out.erase(it);
  }
  return out;
}

std::vector<EdgeId> decode_candidates(const SketchVector& component_xor) {
  std::vector<EdgeId> out;
  for (std::uint64_t v : kernels::nonzero_values(component_xor.words())) out.push_back(EdgeId{v});
  return out;
}

std::vector<EdgeId> decode_bundle(const SketchConfig& config, const SketchVector& component_xor,
                                  std::size_t bundle) {
  std::vector<EdgeId> out;
  if (!component_xor.stored()) return out;
  auto cells = component_xor.words().subspan(config.cell(bundle, 0), config.levels);
  for (std::uint64_t v : kernels::serial::nonzero_values(cells)) out.push_back(EdgeId{v});
  return out;
}

std::uint32_t EdgeRegistry::insert(EdgeId id, Vertex u, Vertex v) {
  const Vertex a = std::min(u, v);
  const Vertex b = std::max(u, v);
  auto [it, inserted] = entries_.try_emplace(id, RegistryEntry{a, b, 0});
  if (!inserted && (it->second.u != a || it->second.v != b)) {
    throw Error(ErrorCode::kEdgeIdCollision,
                "edge id collision between (" + std::to_string(a) + "," + std::to_string(b) +
                    ") and (" + std::to_string(it->second.u) + "," + std::to_string(it->second.v) +
                    "); rerun with a different seed");
  }
  ++total_;
  return ++it->second.multiplicity;
}

std::uint32_t EdgeRegistry::erase(EdgeId id) {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::kEdgeAbsent, "edge not in registry");
  --total_;
  const std::uint32_t left = --it->second.multiplicity;
  if (left == 0) entries_.erase(it);
  return left;
}

const RegistryEntry* EdgeRegistry::find(EdgeId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::uint32_t EdgeRegistry::multiplicity(EdgeId id) const {
  const RegistryEntry* e = find(id);
  return e == nullptr ? 0 : e->multiplicity;
}

MachineId EdgeRegistry::shard_of(EdgeId id, std::size_t machines) const {
  return static_cast<MachineId>(prf(shard_seed_, id.value) % machines);
}

std::vector<std::pair<EdgeId, RegistryEntry>> EdgeRegistry::sorted_entries() const {
  std::vector<std::pair<EdgeId, RegistryEntry>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace bdc
