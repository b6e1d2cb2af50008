// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers as arguments to
// run a subset.
//
// Every tolerance lives in the constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bdc/adaptive.hpp"
#include "bdc/connectivity.hpp"
#include "bdc/contraction_lab.hpp"
#include "bdc/sketching.hpp"
#include "bdc/workload.hpp"
#include "oracles.hpp"

using namespace bdc;

namespace {

// Criterion 1 and 2.
constexpr std::size_t kOracleBatches = 1000;
constexpr std::size_t kOracleMaxK = 16;
constexpr std::size_t kOracleSurfacedBudget = 1;
constexpr double kOracleSecondsBudget = 300.0;

// Criterion 3. c_lvl is the per-level round constant of the bound
// ceil(3/delta) * c_lvl / alpha + 8.
constexpr double kRoundsFlatness = 0.20;
constexpr double kLevelConstant = 4.0;
constexpr std::size_t kScalingK = 16;
constexpr std::size_t kRoundsBatches = 30;

// Criterion 4. Exponent slack over alpha + delta. Sketch factor 1 at every
// n so the fit compares like with like and n = 2^14 fits in memory.
constexpr double kCommSlack = 0.15;
constexpr std::size_t kCommSketchFactor = 1;
constexpr std::size_t kCommBatches = 20;

// Criterion 5.
constexpr std::size_t kRecoveryTrials = 10000;
constexpr double kRecoveryFactor = 0.9;

// Criterion 6. Fitted constant C in survival <= C * k^(-1/3) * log2(n)^(4/3).
constexpr std::size_t kLabN = 10000;
constexpr std::size_t kLabSeeds = 30;
constexpr std::size_t kLabSeedsRequired = 28;
constexpr std::size_t kLabMaxRounds = 11;
constexpr double kSurvivalConstant = 1.0;

// Criterion 7.
constexpr std::size_t kExtractorTrials = 100000;
constexpr double kChiSquaredCritical = 6.635;  // 1 dof, significance 0.01

// Criterion 8.
constexpr std::size_t kCircuits = 500;
constexpr std::size_t kMaxGates = 1000;
constexpr std::size_t kAdaptivePairs = 200;
constexpr std::size_t kAdaptiveBatch = 8;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

Edge random_edge(SplitMix64& rng, std::size_t n) {
  const auto u = static_cast<Vertex>(rng() % n);
  const auto v = static_cast<Vertex>((u + 1 + rng() % (n - 1)) % n);
  return {u, v};
}

std::vector<Edge> random_edges(std::size_t n, std::size_t m, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Edge> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(random_edge(rng, n));
  return out;
}

EngineConfig base_config(std::size_t n, std::size_t sketch_factor, std::uint64_t seed) {
  EngineConfig c;
  c.n = n;
  c.alpha = 0.25;
  c.delta = 0.25;
  c.sketch_factor = sketch_factor;
  c.seed = seed;
  c.expected_edges = 2 * n;
  return c;
}

// Counts maximality violations: partition mismatch, or a component whose
// forest edge count is not size - 1.
std::size_t maximality_violations(const DynGraph& g, const std::vector<std::uint32_t>& truth) {
  const auto labels = g.component_labels();
  std::size_t bad = oracle::same_partition(labels, truth) ? 0 : 1;
  std::map<std::uint32_t, std::size_t> size;
  std::map<std::uint32_t, std::size_t> tree_edges;
  for (std::uint32_t l : labels) ++size[l];
  for (const Edge& e : g.forest().edges()) {
    if (labels[e.u] != labels[e.v]) ++bad;
    ++tree_edges[labels[e.u]];
  }
  for (const auto& [l, s] : size) {
    if (tree_edges[l] != s - 1) ++bad;
  }
  return bad;
}

struct OracleRun {
  std::size_t mismatches = 0;
  std::size_t surfaced = 0;
  std::size_t violations = 0;
  std::size_t queries = 0;
  std::size_t reseeds = 0;
  double seconds = 0;
};

OracleRun oracle_run(std::size_t n, std::uint64_t seed) {
  OracleRun r;
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(prf(seed, n));
  const auto initial = random_edges(n, 2 * n, prf(seed, 1));
  oracle::MultiGraph ref(n);
  std::vector<Edge> live = initial;
  for (const Edge& e : initial) ref.insert(e);
  auto make = [&](std::uint64_t s) {
    auto g = std::make_unique<DynGraph>(base_config(n, 4, s));
    std::vector<Edge> all;
    for (const Edge& e : live) all.push_back(e);
    g->bulk_load(all);
    return g;
  };
  auto g = make(seed);
  const auto take_live = [&](const Edge& e) {
    auto it = std::find_if(live.begin(), live.end(), [&](const Edge& x) { return x.key() == e.key(); });
    if (it == live.end()) return false;
    *it = live.back();
    live.pop_back();
    return true;
  };
  const auto pick_delete = [&]() {
    // Half the picks target forest edges so replacements are exercised.
    // A forest edge already taken earlier in the batch falls back to a
    // uniform live edge.
    const auto forest = g->forest().edges();
    if (rng() % 2 == 0 && !forest.empty()) {
      const Edge e = forest[rng() % forest.size()];
      if (take_live(e)) return e;
    }
    const Edge e = live[rng() % live.size()];
    take_live(e);
    return e;
  };
  for (std::size_t b = 0; b < kOracleBatches; ++b) {
    const std::size_t k = 1 + rng() % kOracleMaxK;
    const int kind = static_cast<int>(rng() % 4);
    std::vector<Edge> ins;
    std::vector<Edge> del;
    std::vector<VertexPair> pairs;
    if (kind == 0) {
      for (std::size_t i = 0; i < k; ++i) ins.push_back(random_edge(rng, n));
    } else if (kind == 1) {
      for (std::size_t i = 0; i < k && !live.empty(); ++i) del.push_back(pick_delete());
    } else if (kind == 2) {
      for (std::size_t i = 0; i < k; ++i) {
        if (rng() % 2 == 0 && !live.empty()) {
          del.push_back(pick_delete());
        } else {
          ins.push_back(random_edge(rng, n));
        }
      }
    } else {
      for (std::size_t i = 0; i < k; ++i) {
        pairs.push_back({static_cast<Vertex>(rng() % n), static_cast<Vertex>(rng() % n)});
      }
    }
    for (const Edge& e : del) ref.erase(e);
    for (const Edge& e : ins) {
      ref.insert(e);
      live.push_back(e);
    }
    try {
      if (kind == 3) {
        const auto out = g->query(pairs);
        const auto truth = ref.components();
        r.queries += pairs.size();
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          if (out.answers[i] != (truth[pairs[i].u] == truth[pairs[i].v])) ++r.mismatches;
        }
      } else if (kind == 0) {
        g->insert(ins);
      } else if (kind == 1) {
        r.reseeds += g->remove(del).reseeds;
      } else {
        r.reseeds += g->mixed(del, ins).reseeds;
      }
    } catch (const Error& e) {
      // Detected and surfaced: rebuild from the oracle and carry on.
      ++r.surfaced;
      std::fprintf(stderr, "  n=%zu batch %zu surfaced: %s\n", n, b, e.what());
      g = make(prf(seed, b));
      continue;
    }
    r.violations += maximality_violations(*g, ref.components());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::map<std::size_t, OracleRun> g_oracle_runs;

const OracleRun& oracle_for(std::size_t n) {
  auto it = g_oracle_runs.find(n);
  if (it == g_oracle_runs.end()) it = g_oracle_runs.emplace(n, oracle_run(n, 2024)).first;
  return it->second;
}

Result criterion1() {
  Result res{true, ""};
  for (std::size_t n : {256u, 1024u}) {
    const OracleRun& r = oracle_for(n);
    const bool ok = r.mismatches == 0 && r.surfaced <= kOracleSurfacedBudget && r.seconds <= kOracleSecondsBudget;
    res.pass = res.pass && ok;
    res.detail += "n=" + std::to_string(n) + ": " + std::to_string(r.queries) + " answers, " +
                  std::to_string(r.mismatches) + " mismatches, " + std::to_string(r.surfaced) + " surfaced, " +
                  std::to_string(r.reseeds) + " reseeds, " + fmt("%.1f", r.seconds) + "s; ";
  }
  res.detail += "budget: 0 mismatches, <= " + std::to_string(kOracleSurfacedBudget) + " surfaced, <= " +
                fmt("%.0f", kOracleSecondsBudget) + "s";
  return res;
}

Result criterion2() {
  Result res{true, ""};
  for (std::size_t n : {256u, 1024u}) {
    const OracleRun& r = oracle_for(n);
    res.pass = res.pass && r.violations == 0;
    res.detail += "n=" + std::to_string(n) + ": " + std::to_string(r.violations) + " violations over " +
                  std::to_string(kOracleBatches) + " batches; ";
  }
  return res;
}

struct DeleteCost {
  double rounds = 0;
  double comm = 0;
  std::size_t max_rounds = 0;
};

// Mean cost of delete batches of kScalingK random forest edges on a random
// graph with 2n edges; each batch is reinserted (unmeasured) afterwards.
DeleteCost delete_cost(std::size_t n, std::size_t sketch_factor, std::size_t batches, std::uint64_t seed) {
  DynGraph g(base_config(n, sketch_factor, seed));
  g.bulk_load(random_edges(n, 2 * n, prf(seed, 7)));
  SplitMix64 rng(prf(seed, 8));
  DeleteCost c;
  for (std::size_t b = 0; b < batches; ++b) {
    auto forest = g.forest().edges();
    std::vector<Edge> del;
    for (std::size_t i = 0; i < kScalingK && !forest.empty(); ++i) {
      const std::size_t j = rng() % forest.size();
      del.push_back(forest[j]);
      forest[j] = forest.back();
      forest.pop_back();
    }
    const auto out = g.remove(del);
    c.rounds += static_cast<double>(out.rounds_used);
    c.comm += static_cast<double>(out.comm_words);
    c.max_rounds = std::max<std::size_t>(c.max_rounds, out.rounds_used);
    g.insert(del);
  }
  c.rounds /= static_cast<double>(batches);
  c.comm /= static_cast<double>(batches);
  return c;
}

Result criterion3() {
  const double alpha = 0.25;
  const double delta = 0.25;
  const double bound = std::ceil(3.0 / delta) * kLevelConstant / alpha + 8.0;
  Result res{true, ""};
  double lo = 1e300;
  double hi = 0;
  std::size_t worst = 0;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const DeleteCost c = delete_cost(n, 4, kRoundsBatches, 11);
    lo = std::min(lo, c.rounds);
    hi = std::max(hi, c.rounds);
    worst = std::max(worst, c.max_rounds);
    res.detail += "n=" + std::to_string(n) + " mean " + fmt("%.1f", c.rounds) + " max " + std::to_string(c.max_rounds) + "; ";
  }
  const double spread = hi / lo - 1.0;
  res.pass = spread <= kRoundsFlatness && static_cast<double>(worst) <= bound;
  res.detail += "spread " + fmt("%.3f", spread) + " (<= " + fmt("%.2f", kRoundsFlatness) + "), worst " +
                std::to_string(worst) + " (<= " + fmt("%.0f", bound) + ")";
  return res;
}

Result criterion4() {
  const double alpha = 0.25;
  const double delta = 0.25;
  std::vector<double> xs;
  std::vector<double> ys;
  Result res{true, ""};
  for (std::size_t n : {256u, 1024u, 4096u, 16384u}) {
    const DeleteCost c = delete_cost(n, kCommSketchFactor, kCommBatches, 13);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(c.comm));
    res.detail += "n=" + std::to_string(n) + " " + fmt("%.0f", c.comm) + " words; ";
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  const double limit = alpha + delta + kCommSlack;
  res.pass = slope <= limit;
  res.detail += "k=" + std::to_string(kScalingK) + ", fitted exponent " + fmt("%.3f", slope) + " (<= " +
                fmt("%.2f", limit) + ")";
  return res;
}

Result criterion5() {
  // A planted set S = {0..9} with a few internal edges and exactly d
  // boundary edges; the component XOR is the sum of its vertex sketches.
  const std::size_t n = 1024;
  const std::size_t set_size = 10;
  Result res{true, ""};
  for (std::size_t d : {1u, 2u, 4u, 8u, 16u}) {
    std::uint64_t bundles_total = 0;
    std::uint64_t bundles_valid = 0;
    std::uint64_t level0_ok = 0;
    for (std::size_t t = 0; t < kRecoveryTrials; ++t) {
      const auto cfg = SketchConfig::make(n, 0.25, 1, prf(d, t, 1));
      SplitMix64 rng(prf(d, t, 2));
      const std::uint64_t id_seed = prf(d, t, 3);
      std::vector<SketchEdge> edges;
      std::set<std::uint64_t> boundary;
      std::set<std::uint64_t> seen;
      while (edges.size() < 5) {
        const auto u = static_cast<Vertex>(rng() % set_size);
        const auto v = static_cast<Vertex>(rng() % set_size);
        if (u == v || !seen.insert(Edge{u, v}.key()).second) continue;
        edges.push_back({edge_id(id_seed, u, v), u, v});
      }
      while (boundary.size() < d) {
        const auto u = static_cast<Vertex>(rng() % set_size);
        const auto v = static_cast<Vertex>(set_size + rng() % (n - set_size));
        if (!seen.insert(Edge{u, v}.key()).second) continue;
        const EdgeId id = edge_id(id_seed, u, v);
        boundary.insert(id.value);
        edges.push_back({id, u, v});
      }
      const auto per_vertex = sketch_delta(cfg, edges);
      SketchVector sum(cfg.key_words());
      for (const auto& [v, vec] : per_vertex) {
        if (v < set_size) sum ^= vec;
      }
      if (d == 1) {
        bool all = true;
        for (std::size_t b = 0; b < cfg.bundles; ++b) all = all && boundary.count(sum.word(cfg.cell(b, 0))) == 1;
        level0_ok += all ? 1 : 0;
      }
      for (std::size_t b = 0; b < cfg.bundles; ++b) {
        const auto cands = decode_bundle(cfg, sum, b);
        ++bundles_total;
        if (std::any_of(cands.begin(), cands.end(), [&](EdgeId id) { return boundary.count(id.value) == 1; })) {
          ++bundles_valid;
        }
      }
    }
    const double rate = static_cast<double>(bundles_valid) / static_cast<double>(bundles_total);
    bool ok = rate >= kRecoveryFactor / static_cast<double>(d);
    if (d == 1) ok = ok && level0_ok == kRecoveryTrials;
    res.pass = res.pass && ok;
    res.detail += "d=" + std::to_string(d) + " " + fmt("%.4f", rate);
    if (d == 1) res.detail += " (level 0: " + std::to_string(level0_ok) + "/" + std::to_string(kRecoveryTrials) + ")";
    res.detail += "; ";
  }
  res.detail += "need >= " + fmt("%.1f", kRecoveryFactor) + "/d per bundle";
  return res;
}

Result criterion6() {
  const std::size_t k = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(kLabN)) - 1e-9));
  const double bound =
      kSurvivalConstant * std::pow(static_cast<double>(k), -1.0 / 3.0) * std::pow(std::log2(static_cast<double>(kLabN)), 4.0 / 3.0);
  Result res{true, ""};
  const std::vector<std::pair<std::string, std::function<lab::MultiGraph(std::uint64_t)>>> families{
      {"path", [](std::uint64_t) { return lab::path_graph(kLabN); }},
      {"star", [](std::uint64_t) { return lab::star_graph(kLabN); }},
      {"er", [](std::uint64_t s) { return lab::random_multigraph(kLabN, 5 * kLabN, s); }},
  };
  for (const auto& [name, make] : families) {
    std::size_t collapsed = 0;
    std::size_t worst_rounds = 0;
    std::vector<double> ratio;
    std::uint64_t max_degree = 0;
    for (std::uint64_t s = 0; s < kLabSeeds; ++s) {
      const auto g = make(1000 + s);
      for (Vertex v = 0; v < g.n(); ++v) max_degree = std::max(max_degree, g.degree(v));
      const auto trace = lab::run_contraction(g, k, s, 1.0, 64);
      const std::size_t rounds = trace.size() - 1;
      worst_rounds = std::max(worst_rounds, rounds);
      if (trace.back().edges == 0 && rounds <= kLabMaxRounds) ++collapsed;
      ratio.push_back(static_cast<double>(trace[1].edges) / static_cast<double>(trace[0].edges));
    }
    std::sort(ratio.begin(), ratio.end());
    const double median = (ratio[kLabSeeds / 2 - 1] + ratio[kLabSeeds / 2]) / 2.0;
    const bool ok = collapsed >= kLabSeedsRequired && median <= bound;
    res.pass = res.pass && ok;
    res.detail += name + ": " + std::to_string(collapsed) + "/" + std::to_string(kLabSeeds) + " within " +
                  std::to_string(kLabMaxRounds) + " rounds (worst " + std::to_string(worst_rounds) +
                  "), median survival " + fmt("%.2e", median) + ", max degree " + std::to_string(max_degree) + "; ";
  }
  res.detail += "k=" + std::to_string(k) + ", " + std::to_string(lab::sample_count(kLabN, k)) +
                " draws per vertex, survival bound " + fmt("%.2f", bound) + " with C=" +
                fmt("%.1f", kSurvivalConstant);
  return res;
}

Result criterion7() {
  const auto g = lab::complete_bipartite(8, 8);
  std::vector<lab::Color> coloring(16, lab::Color::kYellow);
  for (std::size_t v = 0; v < 8; ++v) coloring[v] = lab::Color::kRed;
  // Edge (0,8) at red vertex 0 and edge (1,9) at red vertex 1.
  std::size_t ea = 0;
  std::size_t eb = 0;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    if (g.edges()[i] == lab::MultiEdge{0, 8, 1}) ea = i;
    if (g.edges()[i] == lab::MultiEdge{1, 9, 1}) eb = i;
  }
  std::uint64_t both = 0;
  std::uint64_t only_a = 0;
  std::uint64_t only_b = 0;
  std::uint64_t neither = 0;
  for (std::size_t t = 0; t < kExtractorTrials; ++t) {
    const auto r = lab::bipartite_extract(g, coloring, 1.0 / 8.0, prf(77, t));
    const bool a = std::binary_search(r.kept.begin(), r.kept.end(), ea);
    const bool b = std::binary_search(r.kept.begin(), r.kept.end(), eb);
    both += a && b;
    only_a += a && !b;
    only_b += !a && b;
    neither += !a && !b;
  }
  const double stat = lab::chi_squared_2x2(both, only_a, only_b, neither);
  Result res;
  res.pass = stat < kChiSquaredCritical;
  const double pa = static_cast<double>(both + only_a) / kExtractorTrials;
  const double pb = static_cast<double>(both + only_b) / kExtractorTrials;
  res.detail = "P(a)=" + fmt("%.4f", pa) + " P(b)=" + fmt("%.4f", pb) + " P(ab)=" +
               fmt("%.5f", static_cast<double>(both) / kExtractorTrials) + " chi2=" + fmt("%.3f", stat) +
               " (< " + fmt("%.3f", kChiSquaredCritical) + "), p=" + fmt("%.3f", lab::chi_squared_1dof_pvalue(stat));
  return res;
}

Result criterion8() {
  Result res{true, ""};
  std::size_t agree = 0;
  std::size_t root_mismatch = 0;
  for (std::size_t i = 0; i < kCircuits; ++i) {
    SplitMix64 rng(prf(88, i));
    const std::size_t inputs = 1 + rng() % 32;
    const std::size_t gates = 1 + rng() % kMaxGates;
    const auto c = adaptive::random_circuit(inputs, gates, prf(89, i));
    const auto inst = adaptive::cvp_to_adaptive(c);
    EngineConfig cfg = base_config(inst.vertex_count, 4, prf(90, i));
    DynGraph g(cfg);
    g.bulk_load(inst.initial_edges);
    const std::size_t batch = std::min<std::size_t>(g.k_max(), 64);
    const auto out = adaptive::run_adaptive(g, inst.pairs, batch);
    if (out.final_answer == adaptive::eval_circuit_direct(c)) ++agree;
    const auto value = adaptive::eval_all_nodes(c);
    const auto labels = g.component_labels();
    for (std::size_t v = 0; v < c.node_count(); ++v) {
      if ((labels[v] == labels[inst.root]) != value[v]) {
        ++root_mismatch;
        break;
      }
    }
  }
  res.pass = agree == kCircuits && root_mismatch == 0;
  res.detail = "circuits " + std::to_string(agree) + "/" + std::to_string(kCircuits) + " (root membership wrong on " +
               std::to_string(root_mismatch) + "); ";

  // Random adaptive pairs on n = 256 against sequential replay.
  const std::size_t n = 256;
  const auto initial = random_edges(n, 2 * n, 91);
  DynGraph g(base_config(n, 4, 92));
  g.bulk_load(initial);
  SplitMix64 rng(93);
  std::vector<Edge> pool = initial;
  std::vector<adaptive::QueryUpdatePair> pairs;
  for (std::size_t i = 0; i < kAdaptivePairs; ++i) {
    adaptive::QueryUpdatePair p;
    p.pred = rng() % 3 == 0 ? adaptive::Predicate::kNotConnected : adaptive::Predicate::kConnected;
    p.u = static_cast<Vertex>(rng() % n);
    p.v = static_cast<Vertex>(rng() % n);
    const int kind = static_cast<int>(rng() % 3);
    if (kind == 0 && !pool.empty()) {
      const std::size_t j = rng() % pool.size();
      p.update = adaptive::Update::kDelete;
      p.edge = pool[j];
      pool[j] = pool.back();
      pool.pop_back();
    } else if (kind == 1) {
      p.update = adaptive::Update::kInsert;
      p.edge = random_edge(rng, n);
    }
    pairs.push_back(p);
  }
  oracle::MultiGraph ref(n);
  for (const Edge& e : initial) ref.insert(e);
  std::vector<bool> expect_values;
  std::vector<bool> expect_applied;
  for (const auto& p : pairs) {
    const bool c = ref.connected(p.u, p.v);
    const bool holds = p.pred == adaptive::Predicate::kConnected ? c : !c;
    expect_values.push_back(holds);
    const bool apply = holds && p.update != adaptive::Update::kNoop;
    expect_applied.push_back(apply);
    if (!apply) continue;
    if (p.update == adaptive::Update::kInsert) {
      ref.insert(p.edge);
    } else {
      ref.erase(p.edge);
    }
  }
  adaptive::AdaptiveOptions opt;
  opt.verify_undo = true;
  const auto out = adaptive::run_adaptive(g, pairs, kAdaptiveBatch, opt);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < kAdaptivePairs; ++i) {
    wrong += out.predicate_values[i] != expect_values[i] || out.applied[i] != expect_applied[i];
  }
  const bool partition_ok = oracle::same_partition(g.component_labels(), ref.components());
  res.pass = res.pass && wrong == 0 && out.undo_mismatches == 0 && partition_ok;
  res.detail += "adaptive pairs " + std::to_string(kAdaptivePairs - wrong) + "/" + std::to_string(kAdaptivePairs) +
                " match replay, final partition " + (partition_ok ? "matches" : "differs") + ", undo digest mismatches " +
                std::to_string(out.undo_mismatches) + " over " +
                std::to_string((kAdaptivePairs + kAdaptiveBatch - 1) / kAdaptiveBatch) + " batches, " +
                std::to_string(out.replacements_found) + " replacements seen";
  return res;
}

Result criterion9() {
  Result res{true, ""};
  std::vector<std::pair<std::string, workload::Generated>> runs;
  workload::GenParams rp;
  rp.n = 256;
  rp.k = 16;
  rp.batches = 200;
  rp.seed = 5;
  runs.emplace_back("random", workload::gen_workload(rp));
  workload::GenParams pp;
  pp.kind = workload::GenKind::kPathStress;
  pp.n = 512;
  pp.k = 15;
  pp.batches = 5;
  runs.emplace_back("path-stress", workload::gen_workload(pp));
  workload::GenParams cp;
  cp.kind = workload::GenKind::kAdaptiveCvp;
  cp.k = 8;
  cp.circuit_inputs = 8;
  cp.circuit_gates = 120;
  cp.seed = 6;
  runs.emplace_back("adaptive-cvp", workload::gen_workload(cp));
  for (const auto& [name, gen] : runs) {
    EngineConfig c = base_config(gen.n, 4, 31);
    std::vector<std::string> s1;
    std::vector<std::string> s2;
    const std::string a = workload::run(c, gen.graph, gen.workload, &s1).to_json();
    const std::string b = workload::run(c, gen.graph, gen.workload, &s2).to_json();
    const bool same = a == b && s1 == s2;
    res.pass = res.pass && same;
    res.detail += name + " " + (same ? "identical" : "DIFFERENT") + " (" + std::to_string(a.size()) + " bytes); ";
  }
  return res;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Result()>>> all{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, fn] : all) {
    if (!wanted.empty() && wanted.count(id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s  %s [%.1fs]\n", id, r.pass ? "PASS" : "FAIL", r.detail.c_str(), secs);
    std::fflush(stdout);
    failures += r.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
