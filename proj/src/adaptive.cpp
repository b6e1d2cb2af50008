#include "bdc/adaptive.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "bdc/union_find.hpp"

namespace bdc::adaptive {

namespace {

void add_ledger_delta(const mpc::RoundLedger& ledger, std::uint64_t rounds0, std::size_t comm0,
                      AdaptiveOutcome& out) {
  out.rounds_used += ledger.rounds - rounds0;
  for (std::size_t i = comm0; i < ledger.per_round_comm.size(); ++i) {
    out.comm_per_round.push_back(ledger.per_round_comm[i]);
    out.comm_words += ledger.per_round_comm[i];
  }
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "circuit line " + std::to_string(line) + ": " + what);
}

}  // namespace

const char* predicate_name(Predicate p) { return p == Predicate::kConnected ? "connected" : "not_connected"; }

const char* update_name(Update u) {
  switch (u) {
    case Update::kInsert:
      return "insert";
    case Update::kDelete:
      return "delete";
    case Update::kNoop:
      return "noop";
  }
  return "noop";
}

AdaptiveOutcome run_adaptive_batch(DynGraph& graph, std::span<const QueryUpdatePair> pairs,
                                   const AdaptiveOptions& options) {
  if (pairs.size() > graph.k_max()) {
    throw Error(ErrorCode::kBatchTooLarge,
                "adaptive batch of " + std::to_string(pairs.size()) + " exceeds k_max " +
                    std::to_string(graph.k_max()));
  }
  for (const QueryUpdatePair& p : pairs) {
    if (p.u >= graph.n() || p.v >= graph.n()) throw Error(ErrorCode::kUnknownVertex, "predicate vertex out of range");
  }
  AdaptiveOutcome out;
  const auto& ledger = graph.sim().ledger();
  const std::uint64_t rounds0 = ledger.rounds;
  const std::size_t comm0 = ledger.per_round_comm.size();

  // Touched edges, in first-appearance order, and their multiplicity now.
  std::vector<Edge> touched;
  std::unordered_map<std::uint64_t, std::size_t> slot;
  for (const QueryUpdatePair& p : pairs) {
    if (p.update == Update::kNoop) continue;
    if (slot.emplace(p.edge.key(), touched.size()).second) touched.push_back(p.edge.normalized());
  }
  const std::vector<std::uint32_t> mult0 = graph.lookup_multiplicity(touched);

  // Phase A: every delete of the batch at once (never more copies than
  // exist), observed through the probe, then undone.
  std::vector<std::uint32_t> budget = mult0;
  std::vector<Edge> doomed;
  for (const QueryUpdatePair& p : pairs) {
    if (p.update != Update::kDelete) continue;
    std::uint32_t& left = budget[slot.at(p.edge.key())];
    if (left > 0) {
      --left;
      doomed.push_back(p.edge);
    }
  }
  DeleteProbe probe;
  for (const QueryUpdatePair& p : pairs) {
    probe.watch.push_back(p.u);
    probe.watch.push_back(p.v);
    if (p.update != Update::kNoop) {
      probe.watch.push_back(p.edge.u);
      probe.watch.push_back(p.edge.v);
    }
  }
  if (options.verify_undo) out.digest_before = graph.state_digest();
  if (!doomed.empty()) {
    graph.remove(doomed, &probe);
    graph.insert(doomed);
  } else {
    probe.piece_of = graph.component_ids(probe.watch);
  }
  if (options.verify_undo) {
    out.digest_after_undo = graph.state_digest();
    out.undo_mismatches = out.digest_after_undo != out.digest_before ? 1 : 0;
  }
  out.replacements_found = probe.replacement_pieces.size();

  // Phase B: the batch, piece labels, replacement pairs and multiplicities
  // go to one machine, which replays the pairs in order.
  {
    mpc::OutboxBuilder ship;
    const MachineId coord = graph.forest().sequences().coordinator();
    for (std::size_t i = 0; i < probe.watch.size(); ++i) {
      const MachineId src = static_cast<MachineId>(probe.watch[i] % graph.sim().machine_count());
      ship.add(src, coord, {probe.watch[i], probe.piece_of[i].value});
    }
    graph.sim().exchange(ship.build(graph.sim().config()));
  }
  std::map<ComponentId, std::uint32_t> dense;
  for (const ComponentId& c : probe.piece_of) dense.emplace(c, static_cast<std::uint32_t>(dense.size()));
  std::unordered_map<Vertex, std::uint32_t> piece;
  for (std::size_t i = 0; i < probe.watch.size(); ++i) piece[probe.watch[i]] = dense.at(probe.piece_of[i]);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> replacement;
  for (const auto& [a, b] : probe.replacement_pieces) {
    // Labels outside the watched pieces cannot matter to a watched query.
    auto ia = dense.find(a);
    auto ib = dense.find(b);
    const std::uint32_t x = ia != dense.end() ? ia->second : dense.emplace(a, dense.size()).first->second;
    const std::uint32_t y = ib != dense.end() ? ib->second : dense.emplace(b, dense.size()).first->second;
    replacement.emplace_back(x, y);
  }
  std::vector<std::uint32_t> mult(mult0);
  DisjointSets local(dense.size());
  for (const QueryUpdatePair& p : pairs) {
    local.reset(dense.size());
    for (const auto& [x, y] : replacement) local.unite(x, y);
    for (std::size_t t = 0; t < touched.size(); ++t) {
      if (mult[t] > 0) local.unite(piece.at(touched[t].u), piece.at(touched[t].v));
    }
    const bool joined = local.same(piece.at(p.u), piece.at(p.v));
    const bool holds = p.pred == Predicate::kConnected ? joined : !joined;
    out.predicate_values.push_back(holds);
    out.applied.push_back(holds && p.update != Update::kNoop);
    if (!holds || p.update == Update::kNoop) continue;
    std::uint32_t& m = mult[slot.at(p.edge.key())];
    if (p.update == Update::kInsert) {
      if (p.edge.u == p.edge.v) throw Error(ErrorCode::kSelfLoop, "adaptive insert of a self-loop");
      ++m;
    } else {
      if (m == 0) {
        throw Error(ErrorCode::kEdgeAbsent, "adaptive delete of (" + std::to_string(p.edge.u) + "," +
                                                std::to_string(p.edge.v) + ") which is not present");
      }
      --m;
    }
  }
  out.final_answer = !out.predicate_values.empty() && out.predicate_values.back();

  // Phase C: net multiplicity change as one mixed batch.
  std::vector<Edge> ins;
  std::vector<Edge> del;
  for (std::size_t t = 0; t < touched.size(); ++t) {
    for (std::uint32_t c = mult0[t]; c < mult[t]; ++c) ins.push_back(touched[t]);
    for (std::uint32_t c = mult[t]; c < mult0[t]; ++c) del.push_back(touched[t]);
  }
  if (!ins.empty() || !del.empty()) graph.mixed(del, ins);
  add_ledger_delta(ledger, rounds0, comm0, out);
  return out;
}

AdaptiveOutcome run_adaptive(DynGraph& graph, std::span<const QueryUpdatePair> pairs, std::size_t batch_size,
                             const AdaptiveOptions& options) {
  if (batch_size == 0) throw Error(ErrorCode::kBadParams, "adaptive batch size must be >= 1");
  AdaptiveOutcome total;
  for (std::size_t lo = 0; lo < pairs.size(); lo += batch_size) {
    const std::size_t len = std::min(batch_size, pairs.size() - lo);
    AdaptiveOutcome part = run_adaptive_batch(graph, pairs.subspan(lo, len), options);
    total.predicate_values.insert(total.predicate_values.end(), part.predicate_values.begin(),
                                  part.predicate_values.end());
    total.applied.insert(total.applied.end(), part.applied.begin(), part.applied.end());
    total.rounds_used += part.rounds_used;
    total.comm_words += part.comm_words;
    total.comm_per_round.insert(total.comm_per_round.end(), part.comm_per_round.begin(), part.comm_per_round.end());
    total.replacements_found += part.replacements_found;
    total.undo_mismatches += part.undo_mismatches;
    if (lo == 0) total.digest_before = part.digest_before;
    total.digest_after_undo = part.digest_after_undo;
  }
  total.final_answer = !total.predicate_values.empty() && total.predicate_values.back();
  return total;
}

void check_circuit(const Circuit& c) {
  const std::size_t n = c.inputs.size();
  for (std::size_t j = 0; j < c.gates.size(); ++j) {
    const Gate& g = c.gates[j];
    const std::size_t self = n + j;
    const bool unary = g.op == GateOp::kNot;
    if (g.a >= c.node_count() || (!unary && g.b >= c.node_count())) {
      throw Error(ErrorCode::kBadParams, "gate " + std::to_string(j + 1) + " references an unknown node");
    }
    if (g.a >= self || (!unary && g.b >= self)) {
      throw Error(ErrorCode::kNotTopologicallyOrdered,
                  "gate " + std::to_string(j + 1) + " uses an operand that does not precede it");
    }
  }
  if (c.output >= c.node_count()) throw Error(ErrorCode::kBadParams, "output node out of range");
}

Circuit parse_circuit(std::istream& in) {
  Circuit c;
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  bool header = false;
  bool have_out = false;
  std::vector<bool> input_seen;
  // Gate operands may be forward references; resolve after reading.
  struct Raw {
    std::size_t line;
    std::vector<std::string> operands;
  };
  std::vector<Raw> raw;
  const auto node_of = [&](const std::string& name, std::size_t at) -> std::size_t {
    if (name.size() < 2 || (name[0] != 'x' && name[0] != 'g')) parse_fail(at, "bad node name '" + name + "'");
    std::size_t idx = 0;
    try {
      std::size_t used = 0;
      idx = std::stoul(name.substr(1), &used);
      if (used != name.size() - 1) throw std::invalid_argument(name);
    } catch (const std::exception&) {
      parse_fail(at, "bad node name '" + name + "'");
    }
    const std::size_t limit = name[0] == 'x' ? n : k;
    if (idx == 0 || idx > limit) parse_fail(at, "node '" + name + "' out of range");
    return name[0] == 'x' ? idx - 1 : n + idx - 1;
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (!header) {
      if (tok.size() != 2) parse_fail(lineno, "expected header 'n k'");
      try {
        n = std::stoul(tok[0]);
        k = std::stoul(tok[1]);
      } catch (const std::exception&) {
        parse_fail(lineno, "expected header 'n k'");
      }
      header = true;
      c.inputs.assign(n, false);
      input_seen.assign(n, false);
      c.gates.assign(k, Gate{});
      raw.assign(k, Raw{});
      continue;
    }
    if (tok[0] == "out") {
      if (tok.size() != 2 || have_out) parse_fail(lineno, "expected a single 'out <node>'");
      c.output = node_of(tok[1], lineno);
      have_out = true;
    } else if (tok[0][0] == 'x') {
      const std::size_t i = node_of(tok[0], lineno);
      if (tok.size() != 2 || (tok[1] != "0" && tok[1] != "1")) parse_fail(lineno, "expected 'x<i> 0|1'");
      if (input_seen[i]) parse_fail(lineno, "input assigned twice");
      input_seen[i] = true;
      c.inputs[i] = tok[1] == "1";
    } else if (tok[0][0] == 'g') {
      const std::size_t j = node_of(tok[0], lineno) - n;
      if (raw[j].line != 0) parse_fail(lineno, "gate defined twice");
      if (tok.size() < 3) parse_fail(lineno, "expected 'g<i> OP a [b]'");
      Gate g;
      if (tok[1] == "AND") {
        g.op = GateOp::kAnd;
      } else if (tok[1] == "OR") {
        g.op = GateOp::kOr;
      } else if (tok[1] == "NOT") {
        g.op = GateOp::kNot;
      } else {
        parse_fail(lineno, "unknown gate type '" + tok[1] + "'");
      }
      const std::size_t arity = g.op == GateOp::kNot ? 1 : 2;
      if (tok.size() != 2 + arity) parse_fail(lineno, "wrong operand count for " + tok[1]);
      c.gates[j] = g;
      raw[j] = Raw{lineno, std::vector<std::string>(tok.begin() + 2, tok.end())};
    } else {
      parse_fail(lineno, "unrecognised line");
    }
  }
  if (!header) parse_fail(lineno, "missing header");
  if (!have_out) parse_fail(lineno, "missing 'out' line");
  for (std::size_t i = 0; i < n; ++i) {
    if (!input_seen[i]) parse_fail(lineno, "input x" + std::to_string(i + 1) + " not assigned");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (raw[j].line == 0) parse_fail(lineno, "gate g" + std::to_string(j + 1) + " not defined");
    c.gates[j].a = node_of(raw[j].operands[0], raw[j].line);
    if (raw[j].operands.size() > 1) c.gates[j].b = node_of(raw[j].operands[1], raw[j].line);
  }
  check_circuit(c);
  return c;
}

Circuit parse_circuit_text(const std::string& text) {
  std::istringstream in(text);
  return parse_circuit(in);
}

std::string write_circuit(const Circuit& c) {
  const std::size_t n = c.inputs.size();
  const auto name = [n](std::size_t node) {
    return node < n ? "x" + std::to_string(node + 1) : "g" + std::to_string(node - n + 1);
  };
  std::ostringstream out;
  out << n << ' ' << c.gates.size() << '\n';
  for (std::size_t i = 0; i < n; ++i) out << 'x' << i + 1 << ' ' << (c.inputs[i] ? 1 : 0) << '\n';
  for (std::size_t j = 0; j < c.gates.size(); ++j) {
    const Gate& g = c.gates[j];
    out << 'g' << j + 1 << ' ';
    switch (g.op) {
      case GateOp::kAnd:
        out << "AND " << name(g.a) << ' ' << name(g.b);
        break;
      case GateOp::kOr:
        out << "OR " << name(g.a) << ' ' << name(g.b);
        break;
      case GateOp::kNot:
        out << "NOT " << name(g.a);
        break;
    }
    out << '\n';
  }
  out << "out " << name(c.output) << '\n';
  return out.str();
}

std::vector<bool> eval_all_nodes(const Circuit& c) {
  check_circuit(c);
  std::vector<bool> value(c.inputs.begin(), c.inputs.end());
  value.resize(c.node_count());
  for (std::size_t j = 0; j < c.gates.size(); ++j) {
    const Gate& g = c.gates[j];
    bool r = false;
    switch (g.op) {
      case GateOp::kAnd:
        r = value[g.a] && value[g.b];
        break;
      case GateOp::kOr:
        r = value[g.a] || value[g.b];
        break;
      case GateOp::kNot:
        r = !value[g.a];
        break;
    }
    value[c.inputs.size() + j] = r;
  }
  return value;
}

bool eval_circuit_direct(const Circuit& c) { return eval_all_nodes(c)[c.output]; }

Circuit random_circuit(std::size_t inputs, std::size_t gates, std::uint64_t seed) {
  if (inputs == 0) throw Error(ErrorCode::kBadParams, "a circuit needs at least one input");
  SplitMix64 rng(seed);
  Circuit c;
  for (std::size_t i = 0; i < inputs; ++i) c.inputs.push_back((rng() & 1) != 0);
  for (std::size_t j = 0; j < gates; ++j) {
    const std::size_t avail = inputs + j;
    Gate g;
    g.op = static_cast<GateOp>(rng() % 3);
    g.a = static_cast<std::size_t>(rng() % avail);
    g.b = g.op == GateOp::kNot ? 0 : static_cast<std::size_t>(rng() % avail);
    c.gates.push_back(g);
  }
  c.output = c.node_count() - 1;
  return c;
}

CvpInstance cvp_to_adaptive(const Circuit& c) {
  check_circuit(c);
  CvpInstance inst;
  const std::size_t n = c.inputs.size();
  inst.vertex_count = c.node_count() + 1;
  inst.root = static_cast<Vertex>(c.node_count());
  const Vertex r = inst.root;
  for (std::size_t i = 0; i < n; ++i) {
    if (c.inputs[i]) inst.initial_edges.push_back({r, static_cast<Vertex>(i)});
  }
  const QueryUpdatePair pad{Predicate::kConnected, r, r, Update::kNoop, Edge{}};
  for (std::size_t j = 0; j < c.gates.size(); ++j) {
    const Gate& g = c.gates[j];
    const auto vi = static_cast<Vertex>(n + j);
    const auto va = static_cast<Vertex>(g.a);
    const auto vb = static_cast<Vertex>(g.b);
    const Edge grow{r, vi};
    switch (g.op) {
      case GateOp::kAnd:
        // Two distinct false nodes are never connected to each other, but
        // AND(a, a) would be trivially true, so it asks about the root.
        if (g.a == g.b) {
          inst.pairs.push_back({Predicate::kConnected, r, va, Update::kInsert, grow});
        } else {
          inst.pairs.push_back({Predicate::kConnected, va, vb, Update::kInsert, grow});
        }
        inst.pairs.push_back(pad);
        break;
      case GateOp::kOr:
        inst.pairs.push_back({Predicate::kConnected, r, va, Update::kInsert, grow});
        inst.pairs.push_back({Predicate::kConnected, r, vb, Update::kInsert, grow});
        break;
      case GateOp::kNot:
        inst.pairs.push_back({Predicate::kNotConnected, r, va, Update::kInsert, grow});
        inst.pairs.push_back(pad);
        break;
    }
  }
  inst.pairs.push_back({Predicate::kConnected, r, static_cast<Vertex>(c.output), Update::kNoop, Edge{}});
  return inst;
}

}  // namespace bdc::adaptive
