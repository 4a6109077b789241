#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "qf/rewrite.hpp"
#include "qf/simulator.hpp"
#include "tree_analysis.hpp"

namespace qf {

namespace {

using detail::Analysis;
using detail::Segment;
using detail::SlotRef;

std::size_t bit_at(std::size_t value, std::size_t width, std::size_t slot) {
  return (value >> (width - 1 - slot)) & 1;
}

// Densities of every node with variable leaves read as |0>; only used on
// subtrees without variables.
std::vector<CMatrix> constant_densities(const FormulaTree& tree) {
  std::vector<CMatrix> out(tree.nodes.size());
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const TreeNode& node = tree.nodes[k];
    CMatrix rho_in;
    for (const auto& ch : node.children) {
      CMatrix part(2, 2);
      if (ch.is_leaf) {
        const std::size_t v = ch.label.value() ? 1 : 0;
        part(v, v) = 1;
      } else {
        part = out[ch.index];
      }
      rho_in = rho_in.empty() ? part : kron(rho_in, part);
    }
    out[k] = apply_gate_kept(node.unitary, rho_in, node.kept);
  }
  return out;
}

// A cold input as a pure state on (slot qubit, purifier qubits).
struct SideState {
  CVector amp;  // index slot_bit * 2^pur + purifier
  std::size_t pur = 0;
};

SideState purify(const CMatrix& rho) {
  const HermitianEigen eig = hermitian_eigen(rho);
  SideState st;
  st.pur = 1;
  st.amp.assign(4, Complex{});
  for (std::size_t k = 0; k < 2; ++k) {
    const double lambda = std::max(eig.values[k], 0.0);
    const double s = std::sqrt(lambda);
    for (std::size_t b = 0; b < 2; ++b) st.amp[b * 2 + k] = s * eig.vectors(b, k);
  }
  return st;
}

SideState side_state(const FormulaTree& tree, const std::vector<CMatrix>& densities,
                     const TreeChild& ch) {
  if (ch.is_leaf) {
    SideState st;
    st.amp.assign(2, Complex{});
    st.amp[ch.label.value() ? 1 : 0] = 1;
    return st;
  }
  (void)tree;
  return purify(densities[ch.index]);
}

// Per head input alpha, the region's state on (exit, new register, carried
// register, environment). Layout: ((exit * reg + r) * env + e).
struct PathState {
  std::size_t reg = 1;
  std::size_t env = 1;
  std::vector<CVector> psi;
};

// Projects the environment onto the span of all components.
void compress(PathState& st) {
  const std::size_t rows = 2 * st.reg;
  std::vector<CVector> parts;
  for (const auto& psi : st.psi) {
    for (std::size_t c = 0; c < rows; ++c) {
      parts.emplace_back(psi.begin() + c * st.env, psi.begin() + (c + 1) * st.env);
    }
  }
  const GramSchmidtResult gs = gram_schmidt_extend(parts, st.env, 1e-13);
  const std::size_t dim = std::max<std::size_t>(gs.basis.size(), 1);
  for (std::size_t a = 0; a < st.psi.size(); ++a) {
    CVector next(rows * dim);
    for (std::size_t c = 0; c < rows; ++c) {
      const CVector& coeff = gs.coeffs[a * rows + c];
      for (std::size_t j = 0; j < gs.basis.size(); ++j) next[c * dim + j] = coeff[j];
    }
    st.psi[a] = std::move(next);
  }
  st.env = dim;
}

// Applies one region gate. hot_slots take the consumed qubits (the first
// `consumed` qubits of the current exit/register layout); new_reg_slots are
// promoted to register qubits, other non-kept slots join the environment.
PathState apply_region_gate(const PathState& in, std::size_t consumed_qubits,
                            const TreeNode& node, const std::vector<std::size_t>& hot_slots,
                            const std::vector<std::size_t>& new_reg_slots,
                            const std::map<std::size_t, SideState>& sides) {
  const std::size_t d = node.arity();
  const std::size_t slot_dim = std::size_t{1} << d;
  // Carried register: what is left of exit+register after consuming.
  const std::size_t in_rows = 2 * in.reg;
  const std::size_t consumed_dim = std::size_t{1} << consumed_qubits;
  const std::size_t carry_reg = in_rows / consumed_dim;
  std::size_t pur_qubits = 0;
  for (const auto& [slot, st] : sides) pur_qubits += st.pur;
  const std::size_t pur_dim = std::size_t{1} << pur_qubits;
  const std::size_t rest_dim = pur_dim * carry_reg * in.env;

  std::vector<std::size_t> left_slots;
  for (std::size_t s = 0; s < d; ++s) {
    if (s == node.kept) continue;
    if (std::find(new_reg_slots.begin(), new_reg_slots.end(), s) != new_reg_slots.end()) continue;
    left_slots.push_back(s);
  }
  const std::size_t new_reg_dim = std::size_t{1} << new_reg_slots.size();
  PathState out;
  out.reg = new_reg_dim * carry_reg;
  out.env = (std::size_t{1} << left_slots.size()) * pur_dim * in.env;

  for (const CVector& psi : in.psi) {
    // joint[s][rest], rest = (pur * carry_reg + r) * env + e
    CMatrix joint(slot_dim, rest_dim);
    for (std::size_t s = 0; s < slot_dim; ++s) {
      std::size_t cons = 0;
      for (std::size_t h : hot_slots) cons = (cons << 1) | bit_at(s, d, h);
      for (std::size_t pb = 0; pb < pur_dim; ++pb) {
        Complex side_amp = 1;
        std::size_t used = 0;
        for (const auto& [slot, st] : sides) {
          const std::size_t pbits = st.pur ? (pb >> (pur_qubits - used - st.pur)) & 1 : 0;
          side_amp *= st.amp[bit_at(s, d, slot) * (std::size_t{1} << st.pur) + pbits];
          used += st.pur;
        }
        if (side_amp == Complex{}) continue;
        for (std::size_t r = 0; r < carry_reg; ++r) {
          for (std::size_t e = 0; e < in.env; ++e) {
            const Complex v = psi[((cons * carry_reg) + r) * in.env + e];
            joint(s, (pb * carry_reg + r) * in.env + e) = side_amp * v;
          }
        }
      }
    }
    const CMatrix evolved = node.unitary * joint;
    CVector next(2 * out.reg * out.env);
    for (std::size_t s = 0; s < slot_dim; ++s) {
      const std::size_t exit = bit_at(s, d, node.kept);
      std::size_t rn = 0;
      for (std::size_t q : new_reg_slots) rn = (rn << 1) | bit_at(s, d, q);
      std::size_t left = 0;
      for (std::size_t q : left_slots) left = (left << 1) | bit_at(s, d, q);
      for (std::size_t pb = 0; pb < pur_dim; ++pb) {
        for (std::size_t r = 0; r < carry_reg; ++r) {
          for (std::size_t e = 0; e < in.env; ++e) {
            const Complex v = evolved(s, (pb * carry_reg + r) * in.env + e);
            if (v == Complex{}) continue;
            const std::size_t reg = rn * carry_reg + r;
            const std::size_t env = (left * pur_dim + pb) * in.env + e;
            next[(exit * out.reg + reg) * out.env + env] += v;
          }
        }
      }
    }
    out.psi.push_back(std::move(next));
  }
  compress(out);
  return out;
}

struct RegionResult {
  SqueezeData data;
  CMatrix unitary;
};

RegionResult squeeze_region(const Analysis& an, const std::vector<CMatrix>& densities,
                            const Segment& seg) {
  const FormulaTree& tree = an.tree;
  const std::size_t h = seg.head.size();
  const std::size_t heads = std::size_t{1} << h;
  auto sides_of = [&](int node) {
    std::map<std::size_t, SideState> sides;
    for (const auto& ref : seg.sides) {
      if (ref.node == node) sides[ref.slot] = side_state(tree, densities, an.child(ref));
    }
    return sides;
  };

  PathState st;
  st.reg = heads / 2;
  st.env = 1;
  for (std::size_t a = 0; a < heads; ++a) {
    CVector psi(heads);
    psi[a] = 1;
    st.psi.push_back(std::move(psi));
  }
  if (seg.start_node >= 0) {
    const TreeNode& g1 = tree.nodes[seg.start_node];
    std::vector<std::size_t> hot_slots;
    for (const auto& ref : seg.head) hot_slots.push_back(ref.slot);
    std::vector<std::size_t> reg_slots;
    for (std::size_t s : hot_slots) {
      if (s != g1.kept && reg_slots.size() + 1 < h) reg_slots.push_back(s);
    }
    st = apply_region_gate(st, h, g1, hot_slots, reg_slots, sides_of(seg.start_node));
  }
  int below = seg.start_node;
  for (int node : seg.interior) {
    const TreeNode& g = tree.nodes[node];
    std::size_t path_slot = 0;
    for (std::size_t s = 0; s < g.arity(); ++s) {
      const TreeChild& ch = g.children[s];
      const bool from_below = below >= 0 ? (!ch.is_leaf && ch.index == below)
                                         : (ch.is_leaf && SlotRef{node, s}.slot == seg.start_leaf.slot &&
                                            seg.start_leaf.node == node);
      if (from_below) path_slot = s;
    }
    st = apply_region_gate(st, 1, g, {path_slot}, {}, sides_of(node));
    below = node;
  }

  RegionResult res;
  SqueezeData& data = res.data;
  data.head_qubits = h;
  data.fresh_qubits = std::max<std::size_t>(4, 2 * h);
  data.env_dim = st.env;
  std::vector<CVector> flat;
  for (std::size_t a = 0; a < heads; ++a) {
    std::vector<CVector> per_c;
    for (std::size_t c = 0; c < heads; ++c) {
      per_c.emplace_back(st.psi[a].begin() + c * st.env, st.psi[a].begin() + (c + 1) * st.env);
      flat.push_back(per_c.back());
    }
    data.images.push_back(std::move(per_c));
  }
  // The region is an isometry on the head inputs.
  for (std::size_t a = 0; a < heads; ++a) {
    for (std::size_t b = 0; b < heads; ++b) {
      Complex g = 0;
      for (std::size_t c = 0; c < heads; ++c) g += inner(data.images[a][c], data.images[b][c]);
      if (std::abs(g - Complex(a == b ? 1.0 : 0.0)) > 1e-8) {
        throw Error(ErrorKind::Precondition, "squeezed region images are not orthonormal");
      }
    }
  }
  const GramSchmidtResult gs = gram_schmidt_extend(flat, st.env, kRankTol);
  data.basis = gs.basis;
  const std::size_t fresh_dim = std::size_t{1} << data.fresh_qubits;
  if (data.rank() > heads * heads || data.rank() > fresh_dim) {
    throw Error(ErrorKind::Precondition,
                "image span has rank " + std::to_string(data.rank()) + ", above " +
                    std::to_string(heads * heads));
  }
  data.lambda.resize(heads);
  for (std::size_t a = 0; a < heads; ++a) {
    for (std::size_t c = 0; c < heads; ++c) data.lambda[a].push_back(gs.coeffs[a * heads + c]);
  }

  // |alpha>|0..0> -> sum_c sum_j lambda |c>|j>, completed to a unitary.
  const std::size_t total = heads * fresh_dim;
  std::vector<CVector> columns;
  for (std::size_t a = 0; a < heads; ++a) {
    CVector col(total);
    for (std::size_t c = 0; c < heads; ++c)
      for (std::size_t j = 0; j < data.rank(); ++j) col[c * fresh_dim + j] = data.lambda[a][c][j];
    columns.push_back(std::move(col));
  }
  const GramSchmidtResult cols = gram_schmidt_extend(columns, total, kRankTol);
  if (cols.basis.size() != heads) {
    throw Error(ErrorKind::Precondition, "squeezed gate columns are rank deficient");
  }
  res.unitary = CMatrix(total, total);
  std::size_t next = 0;
  for (std::size_t col = 0; col < total; ++col) {
    if (col % fresh_dim == 0) {
      res.unitary.set_column(col, cols.basis[col / fresh_dim]);
    } else {
      res.unitary.set_column(col, cols.completion.at(next++));
    }
  }
  return res;
}

// Two-qubit gate preparing the purification of rho from |00>; slot 0 is kept.
CMatrix preparation_unitary(const CMatrix& rho) {
  const SideState st = purify(rho);
  const std::vector<CVector> first = {st.amp};
  const GramSchmidtResult gs = gram_schmidt_extend(first, 4, kRankTol);
  CMatrix u(4, 4);
  u.set_column(0, gs.basis.at(0));
  for (std::size_t k = 0; k < 3; ++k) u.set_column(k + 1, gs.completion.at(k));
  return u;
}

const Segment* find_segment(const Analysis& an, const PathSegment& pi) {
  for (const Segment& seg : an.segments) {
    const bool same_start =
        pi.start_gate >= 0
            ? (seg.start_node >= 0 && an.tree.nodes[seg.start_node].gate_id == pi.start_gate)
            : (seg.start_node < 0 && an.child(seg.start_leaf).index == pi.start_wire);
    if (same_start) return &seg;
  }
  return nullptr;
}

// Region as a standalone formula with head inputs labeled x0, x1, ...
Circuit region_circuit(const Analysis& an, const Segment& seg) {
  FormulaTree sub;
  std::map<int, int> copied;
  std::function<TreeChild(const TreeChild&)> copy = [&](const TreeChild& ch) -> TreeChild {
    if (ch.is_leaf) return ch;
    TreeNode node = an.tree.nodes[ch.index];
    for (auto& c : node.children) c = copy(c);
    sub.nodes.push_back(std::move(node));
    return TreeChild::node(static_cast<int>(sub.nodes.size()) - 1);
  };
  auto head_leaf = [&](std::size_t k) {
    return TreeChild::leaf(-1, InputLabel::var(static_cast<int>(k)));
  };
  TreeChild current;
  if (seg.start_node >= 0) {
    TreeNode g1 = an.tree.nodes[seg.start_node];
    std::size_t k = 0;
    for (std::size_t s = 0; s < g1.arity(); ++s) {
      const bool is_head = std::any_of(seg.head.begin(), seg.head.end(),
                                       [&](const SlotRef& r) { return r.slot == s; });
      g1.children[s] = is_head ? head_leaf(k++) : copy(g1.children[s]);
    }
    sub.nodes.push_back(std::move(g1));
    current = TreeChild::node(static_cast<int>(sub.nodes.size()) - 1);
  } else {
    current = head_leaf(0);
  }
  int below = seg.start_node;
  for (int idx : seg.interior) {
    TreeNode node = an.tree.nodes[idx];
    for (std::size_t s = 0; s < node.arity(); ++s) {
      const TreeChild& ch = node.children[s];
      const bool on_path = below >= 0 ? (!ch.is_leaf && ch.index == below)
                                      : (seg.start_leaf.node == idx && seg.start_leaf.slot == s);
      node.children[s] = on_path ? current : copy(ch);
    }
    sub.nodes.push_back(std::move(node));
    current = TreeChild::node(static_cast<int>(sub.nodes.size()) - 1);
    below = idx;
  }
  sub.root = current;
  return emit_tree(sub);
}

Circuit fragment_circuit(const CMatrix& w, std::size_t h, std::size_t fresh) {
  Circuit c;
  c.wires = static_cast<int>(h + fresh);
  for (std::size_t k = 0; k < h; ++k) c.inputs.push_back(InputLabel::var(static_cast<int>(k)));
  for (std::size_t k = 0; k < fresh; ++k) c.inputs.push_back(InputLabel::constant(false));
  std::vector<int> targets;
  for (int t = 0; t < c.wires; ++t) targets.push_back(t);
  c.gates.push_back(Gate{0, std::move(targets), w, kSqueezeTag});
  c.output = 0;
  return c;
}

}  // namespace

SqueezedPath squeeze_path(const Circuit& f_tau, const PathSegment& pi,
                          const PathDecomposition& decomp) {
  (void)decomp;
  if (!pi.squeezable()) {
    throw PreconditionError("path has m = " + std::to_string(pi.m) + "; squeezing needs m > 2");
  }
  const Analysis an = detail::analyze(f_tau);
  const Segment* seg = find_segment(an, pi);
  if (seg == nullptr) throw PreconditionError("segment does not belong to this formula");
  const std::vector<CMatrix> densities = constant_densities(an.tree);
  RegionResult res = squeeze_region(an, densities, *seg);
  SqueezedPath out;
  const std::size_t h = res.data.head_qubits;
  const std::size_t fresh = res.data.fresh_qubits;
  std::vector<int> targets;
  for (std::size_t t = 0; t < h + fresh; ++t) targets.push_back(static_cast<int>(t));
  out.gate = Gate{0, targets, res.unitary, kSqueezeTag};
  out.fragment = fragment_circuit(res.unitary, h, fresh);
  out.original = region_circuit(an, *seg);
  out.data = std::move(res.data);
  return out;
}

SqueezeReport squeeze_formula(const Circuit& f, std::span<const int> block,
                              std::span<const std::uint8_t> tau) {
  const Circuit f_tau = substitute(f, block, tau);
  SqueezeReport report;
  report.decomposition = decompose_substituted(f_tau, block);
  const Analysis an = detail::analyze(f_tau);
  const std::vector<CMatrix> densities = constant_densities(an.tree);

  std::map<int, const Segment*> squeezed_top;  // top interior node -> segment
  std::map<int, const Segment*> kept_start;    // g1 of an unsqueezed segment
  for (const Segment& seg : an.segments) {
    if (seg.m() > 2) {
      squeezed_top[seg.interior.back()] = &seg;
    } else if (seg.start_node >= 0) {
      kept_start[seg.start_node] = &seg;
    }
  }
  bool needs_prep = false;
  for (const auto& [node, seg] : kept_start) {
    for (const auto& ref : seg->sides) needs_prep |= !an.child(ref).is_leaf;
  }
  FormulaTree out;
  auto zero_leaf = [] { return TreeChild::leaf(-1, InputLabel::constant(false)); };
  // No block variable reaches the output: the whole tree prepares one fixed state.
  if (report.decomposition.s_j == 0 && !an.tree.root.is_leaf) {
    TreeNode prep;
    prep.name = kPrepTag;
    prep.unitary = preparation_unitary(densities[an.tree.root.index]);
    prep.children = {zero_leaf(), zero_leaf()};
    report.unitarity_residuals.push_back(unitarity_residual(prep.unitary));
    out.nodes.push_back(std::move(prep));
    out.root = TreeChild::node(0);
    report.circuit = emit_tree(out);
    report.size = 1;
    report.changed = true;
    return report;
  }
  if (squeezed_top.empty() && !needs_prep) {
    report.circuit = strip_dead_gates(f_tau);
    report.size = report.circuit.gates.size();
    report.changed = report.circuit.gates.size() != f_tau.gates.size();
    return report;
  }

  std::function<TreeChild(const TreeChild&)> build = [&](const TreeChild& ch) -> TreeChild {
    if (ch.is_leaf) return ch;
    auto sq = squeezed_top.find(ch.index);
    if (sq != squeezed_top.end()) {
      const Segment& seg = *sq->second;
      RegionResult res = squeeze_region(an, densities, seg);
      TreeNode node;
      node.gate_id = 0;
      node.name = kSqueezeTag;
      for (const auto& ref : seg.head) node.children.push_back(build(an.child(ref)));
      for (std::size_t k = 0; k < res.data.fresh_qubits; ++k) node.children.push_back(zero_leaf());
      node.kept = 0;
      report.ranks.push_back(res.data.rank());
      report.unitarity_residuals.push_back(unitarity_residual(res.unitary));
      node.unitary = std::move(res.unitary);
      out.nodes.push_back(std::move(node));
      ++report.squeezed;
      return TreeChild::node(static_cast<int>(out.nodes.size()) - 1);
    }
    TreeNode node = an.tree.nodes[ch.index];
    const bool prep_sides = kept_start.count(ch.index) > 0;
    for (std::size_t s = 0; s < node.arity(); ++s) {
      TreeChild& c = node.children[s];
      if (prep_sides && !c.is_leaf && !an.child_hot(c)) {
        TreeNode prep;
        prep.name = kPrepTag;
        prep.unitary = preparation_unitary(densities[c.index]);
        prep.children = {zero_leaf(), zero_leaf()};
        prep.kept = 0;
        report.unitarity_residuals.push_back(unitarity_residual(prep.unitary));
        out.nodes.push_back(std::move(prep));
        c = TreeChild::node(static_cast<int>(out.nodes.size()) - 1);
      } else {
        c = build(c);
      }
    }
    out.nodes.push_back(std::move(node));
    return TreeChild::node(static_cast<int>(out.nodes.size()) - 1);
  };
  out.root = build(an.tree.root);
  report.circuit = emit_tree(out);
  report.size = report.circuit.gates.size();
  report.changed = true;
  return report;
}

bool same_outside_squeezed(const Circuit& a, const Circuit& b) {
  if (a.wires != b.wires || a.output != b.output || a.gates.size() != b.gates.size()) return false;
  for (int w = 0; w < a.wires; ++w) {
    const InputLabel& x = a.inputs[w];
    const InputLabel& y = b.inputs[w];
    if (x.is_var() != y.is_var() || (x.is_var() && x.index() != y.index())) return false;
  }
  for (std::size_t p = 0; p < a.gates.size(); ++p) {
    const Gate& g = a.gates[p];
    const Gate& h = b.gates[p];
    if (g.targets != h.targets || g.name != h.name) return false;
    const bool replaced = g.name == kSqueezeTag || g.name == kPrepTag;
    if (!replaced && !(g.unitary == h.unitary)) return false;
  }
  return true;
}

}  // namespace qf
