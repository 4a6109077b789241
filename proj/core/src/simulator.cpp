#include "qf/simulator.hpp"

#include <algorithm>
#include <thread>

namespace qf {

Assignment Assignment::parse(std::string_view text) {
  Assignment a;
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw SchemaError("assignment must be a string of 0 and 1, got '" + std::string(text) + "'");
    }
    a.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return a;
}

Assignment Assignment::from_index(std::uint64_t index, int n) {
  Assignment a;
  a.bits.resize(n);
  for (int i = 0; i < n; ++i) a.bits[i] = static_cast<std::uint8_t>((index >> (n - 1 - i)) & 1);
  return a;
}

std::string Assignment::to_string() const {
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

namespace {

void check_assignment(int n, const Assignment& a) {
  if (a.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("assignment has " + std::to_string(a.size()) +
                         " bits but the circuit reads " + std::to_string(n) + " variables");
  }
}

bool label_value(const InputLabel& label, const Assignment& a) {
  return label.is_var() ? a.bits[label.index()] != 0 : label.value();
}

}  // namespace

CVector initial_state(const Circuit& c, const Assignment& a) {
  check_assignment(c.num_vars(), a);
  std::size_t index = 0;
  for (int w = 0; w < c.wires; ++w) {
    index = (index << 1) | (label_value(c.inputs[w], a) ? 1 : 0);
  }
  CVector state(std::size_t{1} << c.wires);
  state[index] = 1;
  return state;
}

CVector statevector_final(const Circuit& c, const Assignment& a, std::size_t max_wires) {
  if (static_cast<std::size_t>(c.wires) > max_wires) {
    throw BudgetError("statevector simulation limited to " + std::to_string(max_wires) +
                      " wires, circuit has " + std::to_string(c.wires));
  }
  CVector state = initial_state(c, a);
  for (const Gate& g : c.gates) apply_matrix(state, c.wires, g.targets, g.unitary);
  return state;
}

double statevector_run(const Circuit& c, const Assignment& a, std::size_t max_wires) {
  const CVector state = statevector_final(c, a, max_wires);
  const std::size_t bit = std::size_t{1} << (c.wires - 1 - c.output);
  double p = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i & bit) p += std::norm(state[i]);
  }
  return p;
}

CMatrix apply_gate_kept(const CMatrix& v, const CMatrix& rho, std::size_t kept) {
  const std::size_t dim = v.rows();
  std::size_t d = 0;
  while ((std::size_t{1} << d) < dim) ++d;
  const CMatrix evolved = v * rho * v.adjoint();
  std::vector<std::size_t> dims(d, 2);
  const std::size_t keep[] = {kept};
  return partial_trace(evolved, dims, keep);
}

SuperOp gate_superop(const CMatrix& u, std::size_t kept) {
  const std::size_t dim = u.rows();
  std::size_t d = 0;
  while ((std::size_t{1} << d) < dim) ++d;
  if (kept >= d) throw DimensionError("kept output slot out of range");
  // Kraus operators <r| U with r running over the discarded outputs.
  std::vector<CMatrix> kraus;
  const std::size_t rest = dim / 2;
  for (std::size_t r = 0; r < rest; ++r) {
    CMatrix k(2, dim);
    for (std::size_t a = 0; a < 2; ++a) {
      // Insert bit a at slot kept (slot 0 is the most significant).
      const std::size_t shift = d - 1 - kept;
      const std::size_t high = r >> shift;
      const std::size_t low = r & ((std::size_t{1} << shift) - 1);
      const std::size_t row = (((high << 1) | a) << shift) | low;
      for (std::size_t x = 0; x < dim; ++x) k(a, x) = u(row, x);
    }
    kraus.push_back(std::move(k));
  }
  return SuperOp::from_kraus(kraus);
}

SuperOp gate_superop(const Gate& g, std::size_t kept) { return gate_superop(g.unitary, kept); }

FormulaEvaluator::FormulaEvaluator(const Circuit& f) : FormulaEvaluator(extract_tree(f)) {
  num_vars_ = f.num_vars();
}

FormulaEvaluator::FormulaEvaluator(FormulaTree tree) : tree_(std::move(tree)) {
  auto visit = [&](const TreeChild& ch) {
    if (ch.is_leaf && ch.label.is_var()) num_vars_ = std::max(num_vars_, ch.label.index() + 1);
  };
  visit(tree_.root);
  for (const auto& node : tree_.nodes)
    for (const auto& ch : node.children) visit(ch);
}

FormulaResult FormulaEvaluator::run(const Assignment& a) const {
  std::vector<CMatrix> matrices;
  matrices.reserve(tree_.nodes.size());
  for (const auto& node : tree_.nodes) matrices.push_back(node.unitary);
  return run_with(a, matrices);
}

FormulaResult FormulaEvaluator::run_with(const Assignment& a,
                                         std::span<const CMatrix> matrices) const {
  check_assignment(num_vars_, a);
  if (matrices.size() != tree_.nodes.size()) throw DimensionError("one matrix per node expected");
  auto leaf_density = [&](const TreeChild& ch) {
    CMatrix rho(2, 2);
    rho(label_value(ch.label, a) ? 1 : 0, label_value(ch.label, a) ? 1 : 0) = 1;
    return rho;
  };
  std::vector<CMatrix> out(tree_.nodes.size());
  for (std::size_t k = 0; k < tree_.nodes.size(); ++k) {
    const TreeNode& node = tree_.nodes[k];
    CMatrix rho_in;
    for (const auto& ch : node.children) {
      const CMatrix part = ch.is_leaf ? leaf_density(ch) : out[ch.index];
      rho_in = rho_in.empty() ? part : kron(rho_in, part);
    }
    out[k] = apply_gate_kept(matrices[k], rho_in, node.kept);
  }
  FormulaResult result;
  result.rho_final = tree_.root.is_leaf ? leaf_density(tree_.root) : out[tree_.root.index];
  result.p = result.rho_final(1, 1).real();
  return result;
}

FormulaResult formula_run(const Circuit& f, const Assignment& a) {
  return FormulaEvaluator(f).run(a);
}

std::vector<std::uint64_t> TruthTable::undecided() const {
  std::vector<std::uint64_t> rows;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] < 0) rows.push_back(i);
  }
  return rows;
}

TruthTable truthtable(const Circuit& c, Engine engine, int threads) {
  const int n = c.num_vars();
  if (n > kTruthTableMaxVars) {
    throw BudgetError("truth table limited to " + std::to_string(kTruthTableMaxVars) +
                      " variables");
  }
  if (engine == Engine::Auto) {
    engine = is_formula(c).formula ? Engine::Formula : Engine::Statevector;
  }
  std::optional<FormulaEvaluator> evaluator;
  if (engine == Engine::Formula) evaluator.emplace(c);

  TruthTable table;
  table.n = n;
  const std::uint64_t rows = std::uint64_t{1} << n;
  table.p.assign(rows, 0.0);
  table.value.assign(rows, -1);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      const Assignment a = Assignment::from_index(r, n);
      const double p = evaluator ? evaluator->run(a).p : statevector_run(c, a);
      table.p[r] = p;
      if (p < 1.0 / 3.0) {
        table.value[r] = 0;
      } else if (p > 2.0 / 3.0) {
        table.value[r] = 1;
      }
    }
  };
  const std::uint64_t workers =
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(threads, 1)), 1, rows);
  if (workers == 1) {
    work(0, rows);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (rows + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(rows, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

}  // namespace qf
