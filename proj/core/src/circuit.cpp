#include "qf/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qf {

InputLabel InputLabel::var(int index) {
  if (index < 0) throw SchemaError("variable index must be non-negative");
  return InputLabel(Kind::Var, index);
}

InputLabel InputLabel::parse(std::string_view text) {
  if (text == "0") return constant(false);
  if (text == "1") return constant(true);
  if (text.size() >= 2 && text[0] == 'x') {
    int value = 0;
    for (char ch : text.substr(1)) {
      if (ch < '0' || ch > '9' || value > 1'000'000) {
        throw SchemaError("bad input label '" + std::string(text) + "'");
      }
      value = value * 10 + (ch - '0');
    }
    return var(value);
  }
  throw SchemaError("bad input label '" + std::string(text) + "'");
}

std::string InputLabel::to_string() const {
  switch (kind_) {
    case Kind::Const0: return "0";
    case Kind::Const1: return "1";
    case Kind::Var: break;
  }
  return "x" + std::to_string(index_);
}

bool is_named_gate(std::string_view name) {
  return name == "X" || name == "H" || name == "CNOT" || name == "TOFFOLI" || name == "SWAP";
}

CMatrix named_unitary(std::string_view name) {
  if (name == "X") return CMatrix{{0, 1}, {1, 0}};
  if (name == "H") {
    const double r = 1.0 / std::sqrt(2.0);
    return CMatrix{{r, r}, {r, -r}};
  }
  if (name == "CNOT") {
    return CMatrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
  }
  if (name == "SWAP") {
    return CMatrix{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
  }
  if (name == "TOFFOLI") {
    CMatrix u = CMatrix::identity(8);
    u(6, 6) = 0;
    u(7, 7) = 0;
    u(6, 7) = 1;
    u(7, 6) = 1;
    return u;
  }
  throw SchemaError("unknown gate name '" + std::string(name) + "'");
}

Gate make_gate(std::string_view name, std::vector<int> targets, int id) {
  Gate g{id, std::move(targets), named_unitary(name), std::string(name)};
  if (g.unitary.rows() != (std::size_t{1} << g.arity())) {
    throw SchemaError("gate " + g.name + " expects " +
                      std::to_string(static_cast<int>(std::log2(g.unitary.rows()))) +
                      " targets");
  }
  return g;
}

Gate make_gate(CMatrix unitary, std::vector<int> targets, int id) {
  return Gate{id, std::move(targets), std::move(unitary), {}};
}

int Circuit::num_vars() const {
  int n = 0;
  for (const auto& label : inputs) {
    if (label.is_var()) n = std::max(n, label.index() + 1);
  }
  return n;
}

void Circuit::validate(std::size_t max_arity, double tol) const {
  if (wires < 1) throw SchemaError("circuit needs at least one wire");
  if (inputs.size() != static_cast<std::size_t>(wires)) {
    throw SchemaError("inputs has " + std::to_string(inputs.size()) + " labels for " +
                      std::to_string(wires) + " wires");
  }
  if (output < 0 || output >= wires) throw SchemaError("output wire out of range");
  for (std::size_t p = 0; p < gates.size(); ++p) {
    const Gate& g = gates[p];
    const std::string where = "gate " + std::to_string(p);
    if (g.targets.empty()) throw SchemaError(where + " has no targets");
    if (g.arity() > max_arity) {
      throw PreconditionError(where + " has arity " + std::to_string(g.arity()) +
                              " above the limit " + std::to_string(max_arity));
    }
    for (std::size_t i = 0; i < g.targets.size(); ++i) {
      if (g.targets[i] < 0 || g.targets[i] >= wires) {
        throw SchemaError(where + " targets wire " + std::to_string(g.targets[i]) +
                          " out of range");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (g.targets[i] == g.targets[j]) throw SchemaError(where + " repeats a target");
      }
    }
    const std::size_t dim = std::size_t{1} << g.arity();
    if (g.unitary.rows() != dim || g.unitary.cols() != dim) {
      throw DimensionError(where + " matrix is not " + std::to_string(dim) + "x" +
                           std::to_string(dim));
    }
    if (!g.unitary.is_finite()) throw SchemaError(where + " matrix has non-finite entries");
    const double residual = unitarity_residual(g.unitary);
    if (residual > tol) {
      throw UnitarityError(where + " is not unitary", residual);
    }
  }
}

WireLinks wire_links(const Circuit& c) {
  WireLinks links;
  links.producer.resize(c.gates.size());
  links.consumer.resize(c.gates.size());
  links.last_on_wire.assign(c.wires, -1);
  // Per wire: the (position, slot) of the most recent gate touching it.
  std::vector<std::pair<int, int>> last(c.wires, {-1, -1});
  for (std::size_t p = 0; p < c.gates.size(); ++p) {
    const auto& targets = c.gates[p].targets;
    links.producer[p].assign(targets.size(), -1);
    links.consumer[p].assign(targets.size(), -1);
    for (std::size_t s = 0; s < targets.size(); ++s) {
      auto [prev, prev_slot] = last[targets[s]];
      links.producer[p][s] = prev;
      if (prev >= 0) links.consumer[prev][prev_slot] = static_cast<int>(p);
      last[targets[s]] = {static_cast<int>(p), static_cast<int>(s)};
    }
  }
  for (int w = 0; w < c.wires; ++w) links.last_on_wire[w] = last[w].first;
  return links;
}

ComputationGraph computation_graph(const Circuit& c) {
  ComputationGraph graph;
  const WireLinks links = wire_links(c);
  graph.root = links.last_on_wire[c.output];
  std::vector<char> in_graph(c.gates.size(), 0);
  if (graph.root >= 0) {
    std::vector<int> stack{graph.root};
    in_graph[graph.root] = 1;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      for (int q : links.producer[p]) {
        if (q >= 0 && !in_graph[q]) {
          in_graph[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  for (std::size_t p = 0; p < c.gates.size(); ++p) {
    if (in_graph[p]) {
      graph.nodes.push_back(static_cast<int>(p));
      for (std::size_t s = 0; s < links.producer[p].size(); ++s) {
        int q = links.producer[p][s];
        if (q >= 0) graph.edges.push_back({q, static_cast<int>(p), c.gates[p].targets[s]});
      }
    } else {
      graph.dead.push_back(static_cast<int>(p));
    }
  }
  return graph;
}

namespace {

// Path from an input up to position p (inclusive), following slot 0 downward.
void descend(const Circuit& c, const WireLinks& links, int p, WirePath& path) {
  std::vector<int> gates;
  std::vector<int> wires;
  int cur = p;
  for (;;) {
    gates.push_back(c.gates[cur].id);
    wires.push_back(c.gates[cur].targets[0]);
    int below = links.producer[cur][0];
    if (below < 0) break;
    cur = below;
  }
  path.input_wire = wires.back();
  path.gate_ids.assign(gates.rbegin(), gates.rend());
  path.wires.assign(wires.rbegin(), wires.rend());
}

// Extends path upward from position p leaving through slot s.
void ascend(const Circuit& c, const WireLinks& links, const std::vector<char>& in_graph,
            int p, std::size_t s, int root, WirePath& path) {
  int cur = p;
  std::size_t slot = s;
  for (;;) {
    int next = links.consumer[cur][slot];
    path.wires.push_back(c.gates[cur].targets[slot]);
    if (cur == root && next < 0) return;
    path.gate_ids.push_back(c.gates[next].id);
    cur = next;
    slot = c.gates[cur].arity();
    for (std::size_t t = 0; t < c.gates[cur].arity(); ++t) {
      int n = links.consumer[cur][t];
      bool continues = (n >= 0 && in_graph[n]) ||
                       (cur == root && c.gates[cur].targets[t] == c.output);
      if (continues) {
        slot = t;
        break;
      }
    }
  }
}

}  // namespace

FormulaCheck is_formula(const Circuit& c) {
  FormulaCheck check;
  check.graph = computation_graph(c);
  const WireLinks links = wire_links(c);
  std::vector<char> in_graph(c.gates.size(), 0);
  for (int p : check.graph.nodes) in_graph[p] = 1;

  for (int p : check.graph.nodes) {
    if (p == check.graph.root) continue;
    std::vector<std::size_t> live;
    for (std::size_t s = 0; s < links.consumer[p].size(); ++s) {
      int n = links.consumer[p][s];
      if (n >= 0 && in_graph[n]) live.push_back(s);
    }
    if (live.size() >= 2) {
      check.formula = false;
      check.offending_gate = c.gates[p].id;
      for (std::size_t k = 0; k < 2; ++k) {
        WirePath path;
        descend(c, links, p, path);
        ascend(c, links, in_graph, p, live[k], check.graph.root, path);
        check.witness.push_back(std::move(path));
      }
      break;
    }
  }
  return check;
}

NotFormulaError::NotFormulaError(FormulaCheck check)
    : Error(ErrorKind::NotFormula,
            "circuit is not a formula: gate " + std::to_string(check.offending_gate) +
                " feeds two gates of the computation graph"),
      check_(std::move(check)) {}

void require_formula(const Circuit& c) {
  FormulaCheck check = is_formula(c);
  if (!check.formula) throw NotFormulaError(std::move(check));
}

void apply_matrix(CVector& state, std::size_t m, std::span<const int> targets,
                  const CMatrix& u) {
  const std::size_t d = targets.size();
  const std::size_t local = std::size_t{1} << d;
  if (state.size() != (std::size_t{1} << m) || u.rows() != local || u.cols() != local) {
    throw DimensionError("apply_matrix: dimension mismatch");
  }
  std::vector<std::size_t> offset(local, 0);
  std::size_t mask = 0;
  for (std::size_t k = 0; k < local; ++k) {
    for (std::size_t s = 0; s < d; ++s) {
      if ((k >> (d - 1 - s)) & 1) offset[k] |= std::size_t{1} << (m - 1 - targets[s]);
    }
  }
  for (std::size_t s = 0; s < d; ++s) mask |= std::size_t{1} << (m - 1 - targets[s]);

  CVector in(local), out(local);
  for (std::size_t base = 0; base < state.size(); ++base) {
    if (base & mask) continue;
    for (std::size_t k = 0; k < local; ++k) in[k] = state[base | offset[k]];
    for (std::size_t r = 0; r < local; ++r) {
      Complex acc = 0;
      for (std::size_t k = 0; k < local; ++k) acc += u(r, k) * in[k];
      out[r] = acc;
    }
    for (std::size_t k = 0; k < local; ++k) state[base | offset[k]] = out[k];
  }
}

CMatrix embed_gate(const Gate& g, std::size_t m) {
  for (int t : g.targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= m) {
      throw DimensionError("embed_gate: target out of range");
    }
  }
  const std::size_t dim = std::size_t{1} << m;
  CMatrix result(dim, dim);
  CVector column(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    std::fill(column.begin(), column.end(), Complex{});
    column[b] = 1;
    apply_matrix(column, m, g.targets, g.unitary);
    result.set_column(b, column);
  }
  return result;
}

Circuit strip_dead_gates(const Circuit& c) {
  const ComputationGraph graph = computation_graph(c);
  Circuit out = c;
  out.gates.clear();
  for (int p : graph.nodes) out.gates.push_back(c.gates[p]);
  return out;
}

}  // namespace qf
