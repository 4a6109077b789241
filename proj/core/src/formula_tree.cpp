#include "qf/formula_tree.hpp"

#include <algorithm>
#include <functional>

namespace qf {

std::size_t FormulaTree::max_arity() const noexcept {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.arity());
  return d;
}

FormulaTree extract_tree(const Circuit& f) {
  FormulaCheck check = is_formula(f);
  if (!check.formula) throw NotFormulaError(std::move(check));
  const ComputationGraph& graph = check.graph;
  const WireLinks links = wire_links(f);

  FormulaTree tree;
  if (graph.root < 0) {
    tree.root = TreeChild::leaf(f.output, f.inputs[f.output]);
    return tree;
  }
  std::vector<int> node_of(f.gates.size(), -1);
  std::vector<char> in_graph(f.gates.size(), 0);
  for (int p : graph.nodes) in_graph[p] = 1;
  // Time order already lists producers before consumers.
  for (int p : graph.nodes) {
    const Gate& g = f.gates[p];
    TreeNode node;
    node.gate_id = g.id;
    node.unitary = g.unitary;
    node.name = g.name;
    for (std::size_t s = 0; s < g.arity(); ++s) {
      int q = links.producer[p][s];
      node.children.push_back(q < 0 ? TreeChild::leaf(g.targets[s], f.inputs[g.targets[s]])
                                    : TreeChild::node(node_of[q]));
    }
    if (p == graph.root) {
      node.kept = static_cast<std::size_t>(
          std::find(g.targets.begin(), g.targets.end(), f.output) - g.targets.begin());
    } else {
      for (std::size_t s = 0; s < g.arity(); ++s) {
        int n = links.consumer[p][s];
        if (n >= 0 && in_graph[n]) node.kept = s;
      }
    }
    node_of[p] = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(std::move(node));
  }
  tree.root = TreeChild::node(node_of[graph.root]);
  return tree;
}

Circuit emit_tree(const FormulaTree& tree) {
  Circuit c;
  std::function<int(const TreeChild&)> emit = [&](const TreeChild& child) -> int {
    if (child.is_leaf) {
      c.inputs.push_back(child.label);
      return c.wires++;
    }
    const TreeNode& node = tree.nodes[child.index];
    std::vector<int> targets;
    for (const auto& ch : node.children) targets.push_back(emit(ch));
    const int kept_wire = targets[node.kept];
    Gate g{static_cast<int>(c.gates.size()), std::move(targets), node.unitary, node.name};
    c.gates.push_back(std::move(g));
    return kept_wire;
  };
  c.output = emit(tree.root);
  return c;
}

}  // namespace qf
