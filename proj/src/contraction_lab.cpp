#include "bdc/contraction_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bdc/kernels.hpp"
#include "bdc/union_find.hpp"

namespace bdc::lab {

namespace {

constexpr std::uint64_t kPhaseOneSalt = 0x70686131ULL;
constexpr std::uint64_t kPhaseTwoSalt = 0x70686132ULL;

bool coin(std::uint64_t seed, std::uint64_t salt, std::uint64_t index, double p) {
  const double u = static_cast<double>(prf(seed, salt, index) >> 11) * 0x1.0p-53;
  return u < p;
}

}  // namespace

MultiGraph MultiGraph::from_pairs(std::size_t n, const std::vector<Edge>& pairs) {
  std::vector<MultiEdge> edges;
  edges.reserve(pairs.size());
  for (const Edge& e : pairs) edges.push_back({e.u, e.v, 1});
  return from_multi(n, std::move(edges));
}

MultiGraph MultiGraph::from_multi(std::size_t n, std::vector<MultiEdge> edges) {
  std::map<std::uint64_t, std::uint64_t> merged;
  for (const MultiEdge& e : edges) {
    if (e.u == e.v || e.multiplicity == 0) continue;
    merged[Edge{e.u, e.v}.key()] += e.multiplicity;
  }
  MultiGraph g(n);
  g.edges_.reserve(merged.size());
  for (const auto& [key, mult] : merged) {
    const auto u = static_cast<Vertex>(key >> 32);
    const auto v = static_cast<Vertex>(key & 0xffffffffu);
    g.edges_.push_back({u, v, mult});
    g.degree_[u] += mult;
    g.degree_[v] += mult;
    g.total_ += mult;
  }
  return g;
}

MultiGraph path_graph(std::size_t n) {
  std::vector<Edge> pairs;
  for (Vertex v = 0; v + 1 < n; ++v) pairs.push_back({v, v + 1});
  return MultiGraph::from_pairs(n, pairs);
}

MultiGraph star_graph(std::size_t n) {
  std::vector<Edge> pairs;
  for (Vertex v = 1; v < n; ++v) pairs.push_back({0, v});
  return MultiGraph::from_pairs(n, pairs);
}

MultiGraph random_multigraph(std::size_t n, std::size_t m, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Edge> pairs;
  pairs.reserve(m);
  while (pairs.size() < m && n > 1) {
    const auto u = static_cast<Vertex>(rng() % n);
    const auto v = static_cast<Vertex>(rng() % n);
    if (u != v) pairs.push_back({u, v});
  }
  return MultiGraph::from_pairs(n, pairs);
}

MultiGraph complete_bipartite(std::size_t left, std::size_t right) {
  std::vector<Edge> pairs;
  for (Vertex a = 0; a < left; ++a) {
    for (Vertex b = 0; b < right; ++b) pairs.push_back({a, static_cast<Vertex>(left + b)});
  }
  return MultiGraph::from_pairs(left + right, pairs);
}

double log_squared(std::size_t n) {
  const double l = std::log2(static_cast<double>(std::max<std::size_t>(n, 1)));
  return std::max(1.0, l * l);
}

std::uint64_t sample_count(std::size_t n, std::size_t k, double kappa) {
  return static_cast<std::uint64_t>(std::ceil(kappa * static_cast<double>(k) * log_squared(n) - 1e-9));
}

double required_mass(std::size_t n, std::size_t k, double kappa, std::uint64_t degree) {
  return kappa * static_cast<double>(k) * log_squared(n) / static_cast<double>(degree);
}

double delivered_mass(std::uint64_t draws, std::uint64_t multiplicity, std::uint64_t degree) {
  return static_cast<double>(draws) * static_cast<double>(multiplicity) / static_cast<double>(degree);
}

std::vector<std::size_t> contraction_sample(const MultiGraph& g, std::size_t k, std::uint64_t seed,
                                            double kappa, std::size_t n_ref) {
  const std::size_t n = g.n();
  const std::uint64_t t = sample_count(n_ref != 0 ? n_ref : n, k, kappa);
  // CSR of multi-edge slots: edge index repeated by multiplicity, so a
  // uniform slot is a uniform incident multi-edge.
  std::vector<std::size_t> offsets(n + 1, 0);
  for (Vertex v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + g.degree(v);
  std::vector<std::uint32_t> slots(offsets[n]);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const MultiEdge& e = g.edges()[i];
    for (std::uint64_t c = 0; c < e.multiplicity; ++c) {
      slots[fill[e.u]++] = static_cast<std::uint32_t>(i);
      slots[fill[e.v]++] = static_cast<std::uint32_t>(i);
    }
  }
  const std::vector<std::uint64_t> draws(n, t);
  std::vector<std::uint8_t> marks(g.edges().size(), 0);
  kernels::sample_incident(offsets, slots, draws, seed, marks);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (marks[i]) out.push_back(i);
  }
  return out;
}

MultiGraph contract(const MultiGraph& g, const std::vector<std::size_t>& edges, std::vector<Vertex>* label) {
  DisjointSets ds(g.n());
  for (std::size_t i : edges) ds.unite(g.edges()[i].u, g.edges()[i].v);
  std::vector<Vertex> quotient(g.n());
  std::vector<Vertex> root_label(g.n(), kNoElement);
  Vertex next = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    const auto r = ds.find(v);
    if (root_label[r] == kNoElement) root_label[r] = next++;
    quotient[v] = root_label[r];
  }
  std::vector<MultiEdge> out;
  out.reserve(g.edges().size());
  for (const MultiEdge& e : g.edges()) out.push_back({quotient[e.u], quotient[e.v], e.multiplicity});
  if (label != nullptr) *label = quotient;
  return MultiGraph::from_multi(next, std::move(out));
}

std::vector<TraceRow> run_contraction(const MultiGraph& g, std::size_t k, std::uint64_t seed, double kappa,
                                      std::size_t max_rounds) {
  std::vector<TraceRow> trace{{0, g.total_multiplicity(), g.n()}};
  MultiGraph cur = g;
  for (std::size_t round = 1; round <= max_rounds && cur.total_multiplicity() > 0; ++round) {
    const auto sampled = contraction_sample(cur, k, prf(seed, round), kappa, g.n());
    cur = contract(cur, sampled);
    trace.push_back({round, cur.total_multiplicity(), cur.n()});
  }
  return trace;
}

std::vector<Color> random_coloring(std::size_t n, std::uint64_t seed) {
  std::vector<Color> out(n);
  for (std::size_t v = 0; v < n; ++v) out[v] = (prf(seed, v) & 1) != 0 ? Color::kRed : Color::kYellow;
  return out;
}

ExtractResult bipartite_extract(const MultiGraph& g, const std::vector<Color>& coloring, double p,
                                std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::kBadParams, "extractor probability must be in (0,1]");
  if (coloring.size() != g.n()) throw Error(ErrorCode::kBadParams, "coloring size differs from vertex count");
  ExtractResult out;
  const auto& edges = g.edges();
  std::vector<std::uint8_t> blocked(g.n(), 0);
  // Every parallel copy is an independent trial.
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const MultiEdge& e = edges[i];
    if (coloring[e.u] != coloring[e.v]) continue;
    bool hit = false;
    for (std::uint64_t c = 0; c < e.multiplicity && !hit; ++c) hit = coin(seed, kPhaseOneSalt, prf(i, c), p);
    if (hit) {
      out.first_phase.push_back(i);
      blocked[e.u] = 1;
      blocked[e.v] = 1;
    }
  }
  out.red_survived.assign(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) out.red_survived[v] = coloring[v] == Color::kRed && !blocked[v];

  std::vector<std::uint32_t> drawn(g.n(), 0);
  std::vector<std::size_t> pick(g.n(), 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const MultiEdge& e = edges[i];
    if (coloring[e.u] == coloring[e.v]) continue;
    const Vertex red = coloring[e.u] == Color::kRed ? e.u : e.v;
    if (!out.red_survived[red]) continue;
    for (std::uint64_t c = 0; c < e.multiplicity; ++c) {
      if (coin(seed, kPhaseTwoSalt, prf(i, c), p)) {
        ++drawn[red];
        pick[red] = i;
      }
    }
  }
  for (Vertex v = 0; v < g.n(); ++v) {
    if (drawn[v] == 1) out.kept.push_back(pick[v]);
  }
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

double chi_squared_2x2(std::uint64_t both, std::uint64_t only_a, std::uint64_t only_b, std::uint64_t neither) {
  const double a = static_cast<double>(both);
  const double b = static_cast<double>(only_a);
  const double c = static_cast<double>(only_b);
  const double d = static_cast<double>(neither);
  const double n = a + b + c + d;
  const double rows[2] = {a + b, c + d};
  const double cols[2] = {a + c, b + d};
  const double cells[2][2] = {{a, b}, {c, d}};
  double stat = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double expect = rows[i] * cols[j] / n;
      if (expect > 0.0) stat += (cells[i][j] - expect) * (cells[i][j] - expect) / expect;
    }
  }
  return stat;
}

double chi_squared_1dof_pvalue(double statistic) { return std::erfc(std::sqrt(statistic / 2.0)); }

}  // namespace bdc::lab
