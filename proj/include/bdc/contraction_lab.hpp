#pragma once

// Experimental contraction sampling, quotient contraction and the bipartite
// independent-sample extractor. Pure functions over value inputs.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bdc/common.hpp"

namespace bdc::lab {

struct MultiEdge {
  Vertex u = 0;
  Vertex v = 0;
  std::uint64_t multiplicity = 1;
  friend bool operator==(const MultiEdge&, const MultiEdge&) = default;
};

// Undirected multigraph with merged parallel edges (u < v) and no self-loops.
class MultiGraph {
 public:
  MultiGraph() = default;
  explicit MultiGraph(std::size_t n) : n_(n), degree_(n, 0) {}
  // Merges parallel pairs and drops self-loops.
  static MultiGraph from_pairs(std::size_t n, const std::vector<Edge>& pairs);
  static MultiGraph from_multi(std::size_t n, std::vector<MultiEdge> edges);

  std::size_t n() const { return n_; }
  const std::vector<MultiEdge>& edges() const { return edges_; }
  // Degree counting multiplicity.
  std::uint64_t degree(Vertex v) const { return degree_[v]; }
  std::uint64_t total_multiplicity() const { return total_; }

 private:
  std::size_t n_ = 0;
  std::vector<MultiEdge> edges_;
  std::vector<std::uint64_t> degree_;
  std::uint64_t total_ = 0;
};

MultiGraph path_graph(std::size_t n);
MultiGraph star_graph(std::size_t n);
// m uniformly random non-loop vertex pairs; repeats become multiplicity.
MultiGraph random_multigraph(std::size_t n, std::size_t m, std::uint64_t seed);
MultiGraph complete_bipartite(std::size_t left, std::size_t right);

// max(1, log2(n)^2).
double log_squared(std::size_t n);

// t_v = ceil(kappa * k * max(1, log2^2 n)), the same for every vertex.
std::uint64_t sample_count(std::size_t n, std::size_t k, double kappa = 1.0);

// Required per-edge mass from one endpoint: kappa * k * log^2 n / deg(v).
double required_mass(std::size_t n, std::size_t k, double kappa, std::uint64_t degree);
// Mass delivered by t uniform draws over deg slots to an edge of the given
// multiplicity: t * mult / deg.
double delivered_mass(std::uint64_t draws, std::uint64_t multiplicity, std::uint64_t degree);

// Indices into g.edges() of every edge drawn at least once. `n_ref` is the n
// in log^2 n (defaults to g.n()).
std::vector<std::size_t> contraction_sample(const MultiGraph& g, std::size_t k, std::uint64_t seed,
                                            double kappa = 1.0, std::size_t n_ref = 0);

// Quotient by the components of the given edges; multiplicities add up and
// self-loops vanish. Quotient vertices are numbered by their smallest member.
// `label` (optional) receives the quotient vertex of every input vertex.
MultiGraph contract(const MultiGraph& g, const std::vector<std::size_t>& edges,
                    std::vector<Vertex>* label = nullptr);

struct TraceRow {
  std::size_t round = 0;
  std::uint64_t edges = 0;  // remaining multi-edges (with multiplicity)
  std::size_t components = 0;  // quotient vertices
};

// Row 0 is the input; one row per sample+contract round until no edge is
// left or `max_rounds` is reached.
std::vector<TraceRow> run_contraction(const MultiGraph& g, std::size_t k, std::uint64_t seed,
                                      double kappa = 1.0, std::size_t max_rounds = 64);

enum class Color : std::uint8_t { kYellow = 0, kRed = 1 };

std::vector<Color> random_coloring(std::size_t n, std::uint64_t seed);

struct ExtractResult {
  // Non-bipartite edges sampled first.
  std::vector<std::size_t> first_phase;
  // Red vertices without an incident first-phase sample.
  std::vector<std::uint8_t> red_survived;
  // Kept bipartite samples: one per red vertex that drew exactly one.
  std::vector<std::size_t> kept;
};

ExtractResult bipartite_extract(const MultiGraph& g, const std::vector<Color>& coloring, double p,
                                std::uint64_t seed);

// Pearson statistic of a 2x2 contingency table (1 degree of freedom) and its
// upper-tail probability.
double chi_squared_2x2(std::uint64_t both, std::uint64_t only_a, std::uint64_t only_b,
                       std::uint64_t neither);
double chi_squared_1dof_pvalue(double statistic);

}  // namespace bdc::lab
