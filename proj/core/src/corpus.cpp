#include "qf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qf/error.hpp"

namespace qf {

namespace {

const char* named_for_arity(std::size_t arity, Rng& rng) {
  switch (arity) {
    case 1: return std::bernoulli_distribution(0.5)(rng) ? "X" : "H";
    case 2: return std::bernoulli_distribution(0.5)(rng) ? "CNOT" : "SWAP";
    default: return "TOFFOLI";
  }
}

Gate random_gate(std::vector<int> targets, double named_fraction, Rng& rng) {
  const std::size_t arity = targets.size();
  if (std::bernoulli_distribution(named_fraction)(rng)) {
    return make_gate(named_for_arity(arity, rng), std::move(targets));
  }
  return make_gate(haar_unitary(std::size_t{1} << arity, rng), std::move(targets));
}

InputLabel random_label(int num_vars, double const_fraction, Rng& rng) {
  if (num_vars < 1 || std::bernoulli_distribution(const_fraction)(rng)) {
    return InputLabel::constant(std::bernoulli_distribution(0.5)(rng));
  }
  return InputLabel::var(std::uniform_int_distribution<int>(0, num_vars - 1)(rng));
}

}  // namespace

CMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> gauss;
  CMatrix g(rows, cols);
  for (Complex& z : g.data()) z = Complex(gauss(rng), gauss(rng));
  return g;
}

CMatrix haar_unitary(std::size_t dim, Rng& rng) {
  const CMatrix g = ginibre(dim, dim, rng);
  CMatrix q(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    CVector v = g.column(c);
    // Two passes of modified Gram-Schmidt keep Q orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < c; ++k) {
        const CVector qk = q.column(k);
        const Complex r = inner(qk, v);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= r * qk[i];
      }
    }
    const double nv = norm(v);
    // R's diagonal is real and positive here, so Q already carries the
    // Haar phase distribution.
    for (Complex& z : v) z /= nv;
    q.set_column(c, v);
  }
  return q;
}

CMatrix random_density(std::size_t dim, Rng& rng) {
  const CMatrix g = ginibre(dim, dim, rng);
  CMatrix rho = g * g.adjoint();
  rho *= Complex(1.0 / rho.trace().real());
  return rho;
}

std::vector<CMatrix> random_kraus(std::size_t dim_in, std::size_t dim_out, std::size_t count,
                                  Rng& rng) {
  if (count == 0) throw PreconditionError("random_kraus needs at least one operator");
  // sum K^dag K has rank at most count * dim_out and must reach the identity.
  if (count * dim_out < dim_in) {
    throw PreconditionError("random_kraus needs count * dim_out >= dim_in");
  }
  std::vector<CMatrix> ks;
  CMatrix s(dim_in, dim_in);
  for (std::size_t k = 0; k < count; ++k) {
    ks.push_back(ginibre(dim_out, dim_in, rng));
    s += ks.back().adjoint() * ks.back();
  }
  const HermitianEigen eig = hermitian_eigen(s);
  CMatrix inv_sqrt(dim_in, dim_in);
  for (std::size_t i = 0; i < dim_in; ++i) {
    const CVector v = eig.vectors.column(i);
    inv_sqrt += Complex(1.0 / std::sqrt(eig.values[i])) * CMatrix::outer(v, v);
  }
  for (CMatrix& k : ks) k = k * inv_sqrt;
  return ks;
}

Circuit random_formula(const FormulaShape& shape, Rng& rng) {
  if (shape.min_gates < 1 || shape.max_gates < shape.min_gates || shape.max_wires < 1 ||
      shape.max_arity < 1) {
    throw PreconditionError("random_formula: bad shape");
  }
  const int gates = std::uniform_int_distribution<int>(shape.min_gates, shape.max_gates)(rng);

  // Grow the tree top-down. children[k][s] is a node index or -1 for a leaf.
  std::vector<std::vector<int>> children;
  std::vector<int> parent;
  std::vector<std::pair<int, int>> open;
  int leaves = 0;
  auto add_node = [&](int par) {
    // Each node of arity a turns one open slot into a open slots.
    const int room = shape.max_wires - std::max(leaves, 1);
    const int top = std::max(1, std::min(shape.max_arity, room + 1));
    const int arity = std::uniform_int_distribution<int>(1, top)(rng);
    const int k = static_cast<int>(children.size());
    children.emplace_back(arity, -1);
    parent.push_back(par);
    for (int s = 0; s < arity; ++s) open.emplace_back(k, s);
    leaves += arity - (par >= 0 ? 1 : 0);
    return k;
  };
  add_node(-1);
  for (int g = 1; g < gates; ++g) {
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng);
    const auto [node, slot] = open[pick];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    children[node][slot] = add_node(node);
  }

  // Random linear extension of the child-before-parent order.
  const int n = static_cast<int>(children.size());
  std::vector<int> pending(n, 0);
  for (int k = 0; k < n; ++k)
    for (int c : children[k]) pending[k] += c >= 0;
  std::vector<int> ready;
  for (int k = 0; k < n; ++k)
    if (pending[k] == 0) ready.push_back(k);
  std::vector<int> order;
  while (!ready.empty()) {
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng);
    const int k = ready[pick];
    ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
    order.push_back(k);
    if (parent[k] >= 0 && --pending[parent[k]] == 0) ready.push_back(parent[k]);
  }

  Circuit c;
  c.wires = leaves;
  std::vector<int> wire_perm(leaves);
  std::iota(wire_perm.begin(), wire_perm.end(), 0);
  std::shuffle(wire_perm.begin(), wire_perm.end(), rng);
  for (int w = 0; w < leaves; ++w) {
    c.inputs.push_back(random_label(shape.num_vars, shape.const_fraction, rng));
  }

  std::vector<int> out_wire(n, -1);
  std::vector<int> discarded;  // wires whose value no live gate reads again
  int next_leaf = 0;
  std::bernoulli_distribution dead(std::clamp(shape.dead_fraction, 0.0, 1.0));
  for (int k : order) {
    std::vector<int> targets;
    for (int ch : children[k]) targets.push_back(ch >= 0 ? out_wire[ch] : wire_perm[next_leaf++]);
    const std::size_t kept =
        std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng);
    out_wire[k] = targets[kept];
    for (std::size_t s = 0; s < targets.size(); ++s)
      if (s != kept) discarded.push_back(targets[s]);
    c.gates.push_back(random_gate(targets, shape.named_fraction, rng));
    if (!discarded.empty() && dead(rng)) {
      const int arity = std::min<int>(std::uniform_int_distribution<int>(1, shape.max_arity)(rng),
                                      static_cast<int>(discarded.size()));
      std::vector<int> pool = discarded;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(static_cast<std::size_t>(arity));
      c.gates.push_back(random_gate(pool, shape.named_fraction, rng));
    }
  }
  c.output = out_wire[0];
  for (std::size_t i = 0; i < c.gates.size(); ++i) c.gates[i].id = static_cast<int>(i);
  return c;
}

Circuit random_circuit(int wires, int gates, int max_arity, int num_vars, Rng& rng) {
  if (wires < 1 || gates < 0 || max_arity < 1) throw PreconditionError("random_circuit: bad shape");
  Circuit c;
  c.wires = wires;
  for (int w = 0; w < wires; ++w) c.inputs.push_back(random_label(num_vars, 0.2, rng));
  std::vector<int> all(wires);
  std::iota(all.begin(), all.end(), 0);
  for (int g = 0; g < gates; ++g) {
    const int arity = std::uniform_int_distribution<int>(1, std::min(max_arity, wires))(rng);
    std::shuffle(all.begin(), all.end(), rng);
    c.gates.push_back(random_gate({all.begin(), all.begin() + arity}, 0.3, rng));
    c.gates.back().id = g;
  }
  c.output = std::uniform_int_distribution<int>(0, wires - 1)(rng);
  return c;
}

}  // namespace qf
