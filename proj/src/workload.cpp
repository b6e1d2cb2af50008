#include "bdc/workload.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace bdc::workload {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

ordered_json edges_json(const std::vector<Edge>& edges) {
  ordered_json a = ordered_json::array();
  for (const Edge& e : edges) a.push_back({e.u, e.v});
  return a;
}

Edge edge_from(const ordered_json& j, std::size_t line) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    parse_fail(line, "expected an edge [u, v] of non-negative integers");
  }
  const auto u = j[0].get<std::uint64_t>();
  const auto v = j[1].get<std::uint64_t>();
  if (u > 0xffffffffULL || v > 0xffffffffULL) parse_fail(line, "vertex id too large");
  return {static_cast<Vertex>(u), static_cast<Vertex>(v)};
}

std::vector<Edge> edge_list(const ordered_json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key) || !obj[key].is_array()) parse_fail(line, std::string("missing array '") + key + "'");
  std::vector<Edge> out;
  for (const auto& e : obj[key]) out.push_back(edge_from(e, line));
  return out;
}

adaptive::QueryUpdatePair pair_from(const ordered_json& j, std::size_t line) {
  using namespace adaptive;
  if (!j.is_object()) parse_fail(line, "adaptive pair must be an object");
  QueryUpdatePair p;
  const std::string pred = j.value("pred", "");
  if (pred == "connected") {
    p.pred = Predicate::kConnected;
  } else if (pred == "not_connected") {
    p.pred = Predicate::kNotConnected;
  } else {
    parse_fail(line, "pred must be connected or not_connected");
  }
  if (!j.contains("u") || !j.contains("v") || !j["u"].is_number_unsigned() || !j["v"].is_number_unsigned()) {
    parse_fail(line, "adaptive pair needs u and v");
  }
  p.u = j["u"].get<Vertex>();
  p.v = j["v"].get<Vertex>();
  const std::string upd = j.value("update", "noop");
  if (upd == "insert") {
    p.update = Update::kInsert;
  } else if (upd == "delete") {
    p.update = Update::kDelete;
  } else if (upd == "noop") {
    p.update = Update::kNoop;
  } else {
    parse_fail(line, "update must be insert, delete or noop");
  }
  if (p.update != Update::kNoop) {
    if (!j.contains("edge")) parse_fail(line, "insert/delete needs an edge");
    p.edge = edge_from(j["edge"], line);
  }
  return p;
}

std::string strip_code(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(error_code_name(e.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

Edge random_edge(SplitMix64& rng, std::size_t n) {
  const auto u = static_cast<Vertex>(rng() % n);
  const auto v = static_cast<Vertex>((u + 1 + rng() % (n - 1)) % n);
  return {u, v};
}

Generated gen_random(const GenParams& p) {
  if (p.n < 2) throw Error(ErrorCode::kBadParams, "random workload needs n >= 2");
  SplitMix64 rng(prf(p.seed, 0x72616e64ULL));
  Generated g;
  g.n = p.n;
  const std::size_t m = p.initial_edges != 0 ? p.initial_edges : 2 * p.n;
  std::vector<Edge> live;
  for (std::size_t i = 0; i < m; ++i) live.push_back(random_edge(rng, p.n));
  g.graph = live;
  for (std::size_t b = 0; b < p.batches; ++b) {
    BatchRecord r;
    const std::size_t k = 1 + static_cast<std::size_t>(rng() % p.k);
    const auto pick_live = [&]() {
      const std::size_t i = rng() % live.size();
      const Edge e = live[i];
      live[i] = live.back();
      live.pop_back();
      return e;
    };
    switch (rng() % 4) {
      case 0:
        r.op = OpKind::kInsert;
        for (std::size_t i = 0; i < k; ++i) r.edges.push_back(random_edge(rng, p.n));
        live.insert(live.end(), r.edges.begin(), r.edges.end());
        break;
      case 1:
        r.op = OpKind::kDelete;
        for (std::size_t i = 0; i < k && !live.empty(); ++i) r.edges.push_back(pick_live());
        if (r.edges.empty()) r.op = OpKind::kQuery;
        break;
      case 2:
        r.op = OpKind::kMixed;
        for (std::size_t i = 0; i < k; ++i) {
          if (rng() % 2 == 0 && !live.empty()) {
            r.deletes.push_back(pick_live());
          } else {
            r.inserts.push_back(random_edge(rng, p.n));
          }
        }
        live.insert(live.end(), r.inserts.begin(), r.inserts.end());
        break;
      default:
        r.op = OpKind::kQuery;
        break;
    }
    if (r.op == OpKind::kQuery) {
      for (std::size_t i = 0; i < k; ++i) {
        r.pairs.push_back({static_cast<Vertex>(rng() % p.n), static_cast<Vertex>(rng() % p.n)});
      }
    }
    g.workload.push_back(std::move(r));
  }
  return g;
}

// Cuts at evenly spaced positions, shifted by `shift`; consecutive positions
// stay distinct because the spacing is at least one.
std::vector<Edge> spaced_cuts(std::size_t n, std::size_t k, std::size_t shift) {
  std::vector<Edge> out;
  const std::size_t gap = (n - 1) / (k + 1);
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t pos = (i * gap + shift) % (n - 1);
    out.push_back({static_cast<Vertex>(pos), static_cast<Vertex>(pos + 1)});
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.u < b.u; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Generated gen_path(const GenParams& p) {
  if (p.k == 0 || p.n < p.k + 2) throw Error(ErrorCode::kBadParams, "path-stress needs n >= k + 2 and k >= 1");
  Generated g;
  g.n = p.n;
  for (Vertex v = 0; v + 1 < p.n; ++v) g.graph.push_back({v, v + 1});
  // With gap = (n-1)/(k+1) the first batch cuts after vertices gap, 2 gap, ...
  // and leaves k+1 segments.
  for (std::size_t b = 0; b < p.batches; ++b) {
    const std::vector<Edge> cuts = spaced_cuts(p.n, p.k, b);
    if (b > 0) {
      BatchRecord back;
      back.op = OpKind::kInsert;
      back.edges = spaced_cuts(p.n, p.k, b - 1);
      g.workload.push_back(back);
    }
    BatchRecord del;
    del.op = OpKind::kDelete;
    del.edges = cuts;
    g.workload.push_back(del);
    BatchRecord q;
    q.op = OpKind::kQuery;
    for (const Edge& e : cuts) q.pairs.push_back(e);
    g.workload.push_back(q);
  }
  return g;
}

Generated gen_star(const GenParams& p) {
  if (p.k == 0 || p.n < p.k + 3) throw Error(ErrorCode::kBadParams, "star-stress needs n >= k + 3 and k >= 1");
  Generated g;
  g.n = p.n;
  // Spokes from 0 plus a ring through the leaves, so every deleted spoke has
  // replacement candidates.
  for (Vertex v = 1; v < p.n; ++v) g.graph.push_back({0, v});
  for (Vertex v = 1; v + 1 < p.n; ++v) g.graph.push_back({v, v + 1});
  SplitMix64 rng(prf(p.seed, 0x73746172ULL));
  for (std::size_t b = 0; b < p.batches; ++b) {
    std::vector<Vertex> leaves;
    while (leaves.size() < p.k) {
      const auto v = static_cast<Vertex>(1 + rng() % (p.n - 1));
      if (std::find(leaves.begin(), leaves.end(), v) == leaves.end()) leaves.push_back(v);
    }
    BatchRecord del;
    del.op = OpKind::kDelete;
    for (Vertex v : leaves) del.edges.push_back({0, v});
    BatchRecord q;
    q.op = OpKind::kQuery;
    for (Vertex v : leaves) q.pairs.push_back({0, v});
    BatchRecord back;
    back.op = OpKind::kInsert;
    back.edges = del.edges;
    g.workload.push_back(del);
    g.workload.push_back(q);
    g.workload.push_back(back);
  }
  return g;
}

Generated gen_cvp(const GenParams& p) {
  if (p.k == 0) throw Error(ErrorCode::kBadParams, "adaptive-cvp needs k >= 1");
  const adaptive::Circuit c = p.circuit_text.empty()
                                  ? adaptive::random_circuit(p.circuit_inputs, p.circuit_gates, p.seed)
                                  : adaptive::parse_circuit_text(p.circuit_text);
  const adaptive::CvpInstance inst = adaptive::cvp_to_adaptive(c);
  Generated g;
  g.n = inst.vertex_count;
  g.graph = inst.initial_edges;
  for (std::size_t lo = 0; lo < inst.pairs.size(); lo += p.k) {
    BatchRecord r;
    r.op = OpKind::kAdaptive;
    const std::size_t hi = std::min(inst.pairs.size(), lo + p.k);
    r.adaptive.assign(inst.pairs.begin() + static_cast<std::ptrdiff_t>(lo),
                      inst.pairs.begin() + static_cast<std::ptrdiff_t>(hi));
    g.workload.push_back(std::move(r));
  }
  return g;
}

}  // namespace

std::vector<Edge> parse_graph(std::istream& in, std::size_t n) {
  std::vector<Edge> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string a;
    if (!(ls >> a) || a[0] == '#') continue;
    std::string b;
    std::string extra;
    if (!(ls >> b) || (ls >> extra && extra[0] != '#')) parse_fail(lineno, "expected 'u v'");
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    try {
      std::size_t ua = 0;
      std::size_t ub = 0;
      if (a[0] == '-' || b[0] == '-') throw std::invalid_argument("negative");
      u = std::stoull(a, &ua);
      v = std::stoull(b, &ub);
      if (ua != a.size() || ub != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      parse_fail(lineno, "expected two non-negative integers");
    }
    if (u > 0xffffffffULL || v > 0xffffffffULL || (n != 0 && (u >= n || v >= n))) {
      throw Error(ErrorCode::kVertexOutOfRange,
                  "line " + std::to_string(lineno) + ": vertex outside [0," + std::to_string(n) + ")");
    }
    out.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  return out;
}

std::vector<Edge> ingest_graph(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open graph file " + path);
  return parse_graph(in, n);
}

std::string write_graph(const std::vector<Edge>& edges) {
  std::ostringstream out;
  for (const Edge& e : edges) out << e.u << ' ' << e.v << '\n';
  return out.str();
}

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::kInsert:
      return "insert";
    case OpKind::kDelete:
      return "delete";
    case OpKind::kQuery:
      return "query";
    case OpKind::kMixed:
      return "mixed";
    case OpKind::kAdaptive:
      return "adaptive";
  }
  return "query";
}

std::size_t BatchRecord::size() const {
  switch (op) {
    case OpKind::kInsert:
    case OpKind::kDelete:
      return edges.size();
    case OpKind::kQuery:
      return pairs.size();
    case OpKind::kMixed:
      return inserts.size() + deletes.size();
    case OpKind::kAdaptive:
      return adaptive.size();
  }
  return 0;
}

Workload parse_workload(std::istream& in) {
  Workload w;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      parse_fail(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) parse_fail(lineno, "record needs an 'op'");
    const std::string op = j["op"];
    BatchRecord r;
    if (op == "insert" || op == "delete") {
      r.op = op == "insert" ? OpKind::kInsert : OpKind::kDelete;
      r.edges = edge_list(j, "edges", lineno);
    } else if (op == "query") {
      r.op = OpKind::kQuery;
      r.pairs = edge_list(j, "pairs", lineno);
    } else if (op == "mixed") {
      r.op = OpKind::kMixed;
      r.inserts = edge_list(j, "insert", lineno);
      r.deletes = edge_list(j, "delete", lineno);
    } else if (op == "adaptive") {
      r.op = OpKind::kAdaptive;
      if (!j.contains("pairs") || !j["pairs"].is_array()) parse_fail(lineno, "adaptive record needs 'pairs'");
      for (const auto& p : j["pairs"]) r.adaptive.push_back(pair_from(p, lineno));
    } else {
      parse_fail(lineno, "unknown op '" + op + "'");
    }
    w.push_back(std::move(r));
  }
  return w;
}

Workload read_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open workload file " + path);
  return parse_workload(in);
}

std::string write_workload(const Workload& w) {
  std::string out;
  for (const BatchRecord& r : w) {
    ordered_json j;
    j["op"] = op_name(r.op);
    switch (r.op) {
      case OpKind::kInsert:
      case OpKind::kDelete:
        j["edges"] = edges_json(r.edges);
        break;
      case OpKind::kQuery:
        j["pairs"] = edges_json(r.pairs);
        break;
      case OpKind::kMixed:
        j["insert"] = edges_json(r.inserts);
        j["delete"] = edges_json(r.deletes);
        break;
      case OpKind::kAdaptive: {
        ordered_json pairs = ordered_json::array();
        for (const auto& p : r.adaptive) {
          ordered_json q;
          q["pred"] = adaptive::predicate_name(p.pred);
          q["u"] = p.u;
          q["v"] = p.v;
          q["update"] = adaptive::update_name(p.update);
          if (p.update != adaptive::Update::kNoop) q["edge"] = {p.edge.u, p.edge.v};
          pairs.push_back(q);
        }
        j["pairs"] = pairs;
        break;
      }
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::optional<GenKind> parse_gen_kind(const std::string& name) {
  if (name == "random") return GenKind::kRandom;
  if (name == "path-stress") return GenKind::kPathStress;
  if (name == "star-stress") return GenKind::kStarStress;
  if (name == "adaptive-cvp") return GenKind::kAdaptiveCvp;
  return std::nullopt;
}

Generated gen_workload(const GenParams& params) {
  if (params.k == 0) throw Error(ErrorCode::kBadParams, "k must be >= 1");
  switch (params.kind) {
    case GenKind::kRandom:
      return gen_random(params);
    case GenKind::kPathStress:
      return gen_path(params);
    case GenKind::kStarStress:
      return gen_star(params);
    case GenKind::kAdaptiveCvp:
      return gen_cvp(params);
  }
  throw Error(ErrorCode::kBadParams, "unknown workload kind");
}

RunReport run(const EngineConfig& config, const std::vector<Edge>& graph, const Workload& workload,
              std::vector<std::string>* stats) {
  if (config.alpha + config.delta >= 1.0) throw Error(ErrorCode::kBadParams, "alpha + delta must be < 1");
  EngineConfig cfg = config;
  if (cfg.expected_edges == 0) cfg.expected_edges = std::max<std::size_t>(graph.size(), cfg.n);
  DynGraph g(cfg);
  RunReport report;
  report.config = cfg;
  report.bundles = g.sketch().bundles;
  report.levels = g.sketch().levels;
  report.key_words = g.sketch().key_words();
  report.k_max = g.k_max();
  report.max_iterations = g.max_iterations();
  report.capacity_words = g.capacity_words();
  report.sketch_seed = g.sketch().seed;
  report.initial_edges = graph.size();
  g.bulk_load(graph);

  for (std::size_t i = 0; i < workload.size(); ++i) {
    const BatchRecord& r = workload[i];
    BatchReport b;
    b.index = i;
    b.op = r.op;
    b.k = r.size();
    const auto& ledger = g.sim().ledger();
    const std::uint64_t rounds0 = ledger.rounds;
    const std::size_t comm0 = ledger.per_round_comm.size();
    try {
      switch (r.op) {
        case OpKind::kInsert:
          g.insert(r.edges);
          break;
        case OpKind::kDelete: {
          const BatchOutcome o = g.remove(r.edges);
          b.replacements = o.replacements_added.size();
          b.iterations = o.iterations;
          b.reseeds = o.reseeds;
          break;
        }
        case OpKind::kQuery:
          b.answers = g.query(r.pairs).answers;
          break;
        case OpKind::kMixed: {
          const BatchOutcome o = g.mixed(r.deletes, r.inserts);
          b.replacements = o.replacements_added.size();
          b.iterations = o.iterations;
          b.reseeds = o.reseeds;
          break;
        }
        case OpKind::kAdaptive: {
          const adaptive::AdaptiveOutcome o = adaptive::run_adaptive_batch(g, r.adaptive);
          b.answers = o.predicate_values;
          b.applied = o.applied;
          b.replacements = o.replacements_found;
          break;
        }
      }
    } catch (const Error& e) {
      throw Error(e.code(), "batch " + std::to_string(i) + " (" + op_name(r.op) + "): " + strip_code(e));
    }
    mpc::RoundLedger delta;
    delta.rounds = ledger.rounds - rounds0;
    delta.per_round_comm.assign(ledger.per_round_comm.begin() + static_cast<std::ptrdiff_t>(comm0),
                                ledger.per_round_comm.end());
    delta.per_machine_peak = ledger.per_machine_peak;
    b.rounds = delta.rounds;
    b.comm_words = delta.comm_total();
    report.total_rounds += b.rounds;
    report.total_comm_words += b.comm_words;
    if (stats != nullptr) stats->push_back(mpc::stats_record(delta));
    report.batches.push_back(std::move(b));
  }
  report.peak_machine_words = g.sim().ledger().peak_machine_words();
  report.final_state_digest = g.state_digest();
  return report;
}

std::string RunReport::to_json() const {
  ordered_json j;
  ordered_json c;
  c["n"] = config.n;
  c["alpha"] = config.alpha;
  c["delta"] = config.delta;
  c["seed"] = config.seed;
  c["sketch_seed"] = sketch_seed;
  c["sketch_factor"] = config.sketch_factor;
  c["machines"] = config.machines;
  c["capacity_words"] = capacity_words;
  c["bundles"] = bundles;
  c["levels"] = levels;
  c["key_words"] = key_words;
  c["k_max"] = k_max;
  c["max_iterations"] = max_iterations;
  c["initial_edges"] = initial_edges;
  j["config"] = c;
  ordered_json bs = ordered_json::array();
  for (const BatchReport& b : batches) {
    ordered_json x;
    x["index"] = b.index;
    x["op"] = op_name(b.op);
    x["k"] = b.k;
    x["rounds"] = b.rounds;
    x["comm_words"] = b.comm_words;
    if (b.op == OpKind::kQuery || b.op == OpKind::kAdaptive) x["answers"] = b.answers;
    if (b.op == OpKind::kAdaptive) x["applied"] = b.applied;
    if (b.op == OpKind::kDelete || b.op == OpKind::kMixed || b.op == OpKind::kAdaptive) {
      x["replacements"] = b.replacements;
    }
    if (b.op == OpKind::kDelete || b.op == OpKind::kMixed) {
      x["iterations"] = b.iterations;
      x["reseeds"] = b.reseeds;
    }
    bs.push_back(x);
  }
  j["batches"] = bs;
  ordered_json t;
  t["batches"] = batches.size();
  t["rounds"] = total_rounds;
  t["comm_words"] = total_comm_words;
  t["peak_machine_words"] = peak_machine_words;
  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << final_state_digest;
  t["state_digest"] = digest.str();
  j["totals"] = t;
  return j.dump(2) + "\n";
}

std::string RunReport::to_table() const {
  std::ostringstream out;
  out << "n=" << config.n << " alpha=" << config.alpha << " delta=" << config.delta << " seed=" << config.seed
      << " B=" << bundles << " L=" << levels << " k_max=" << k_max << " s=" << capacity_words << '\n';
  out << std::left << std::setw(7) << "batch" << std::setw(10) << "op" << std::right << std::setw(6) << "k"
      << std::setw(9) << "rounds" << std::setw(14) << "comm_words" << std::setw(8) << "repl" << '\n';
  for (const BatchReport& b : batches) {
    out << std::left << std::setw(7) << b.index << std::setw(10) << op_name(b.op) << std::right << std::setw(6)
        << b.k << std::setw(9) << b.rounds << std::setw(14) << b.comm_words << std::setw(8) << b.replacements
        << '\n';
  }
  out << std::left << std::setw(23) << "total" << std::right << std::setw(9) << total_rounds << std::setw(14)
      << total_comm_words << '\n';
  return out.str();
}

}  // namespace bdc::workload
