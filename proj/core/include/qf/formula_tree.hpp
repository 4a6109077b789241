#pragma once

// Tree view of a formula. Every gate in the computation graph becomes a node
// whose children are the values entering its slots; exactly one output slot
// (kept) continues toward the root, the others are discarded.

#include <cstddef>
#include <vector>

#include "qf/circuit.hpp"

namespace qf {

struct TreeChild {
  bool is_leaf = true;
  int index = 0;  // node index, or the original input wire for leaves
  InputLabel label = InputLabel::constant(false);  // leaves only

  static TreeChild leaf(int wire, InputLabel label) { return {true, wire, label}; }
  static TreeChild node(int index) { return {false, index, InputLabel::constant(false)}; }
};

struct TreeNode {
  int gate_id = 0;
  CMatrix unitary;
  std::string name;
  std::vector<TreeChild> children;  // slot order
  std::size_t kept = 0;

  std::size_t arity() const noexcept { return children.size(); }
};

struct FormulaTree {
  std::vector<TreeNode> nodes;  // children precede parents
  TreeChild root;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t max_arity() const noexcept;
};

// Throws NotFormulaError. Dead gates are ignored.
FormulaTree extract_tree(const Circuit& f);

// Circuit with one fresh wire per leaf, gates in post-order.
Circuit emit_tree(const FormulaTree& tree);

}  // namespace qf
