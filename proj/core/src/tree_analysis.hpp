#pragma once

// Shared bookkeeping for path decomposition and squeezing. Internal header.

#include <span>
#include <unordered_map>
#include <vector>

#include "qf/circuit.hpp"
#include "qf/formula_tree.hpp"

namespace qf::detail {

struct SlotRef {
  int node = -1;  // -1 for the output
  std::size_t slot = 0;
};

struct Segment {
  int start_node = -1;  // g1, -1 for a leaf start
  SlotRef start_leaf;   // leaf start: where the leaf plugs in (node -1 = output)
  std::vector<int> interior;
  int end_node = -1;    // -1 for the output
  std::vector<SlotRef> head;   // hot inputs of g1, or the leaf itself
  std::vector<SlotRef> sides;  // cold children of g1 and the interior gates

  std::size_t m() const noexcept { return interior.size() + 2; }
  int top_node() const noexcept {
    return interior.empty() ? start_node : interior.back();
  }
};

struct Analysis {
  Circuit circuit;
  FormulaTree tree;
  std::vector<int> parent;
  std::vector<std::size_t> parent_slot;
  std::vector<char> hot;
  std::vector<char> intersection;
  std::vector<int> position;  // node -> gate position in circuit
  std::vector<Segment> segments;

  const TreeChild& child(const SlotRef& ref) const {
    return ref.node < 0 ? tree.root : tree.nodes[ref.node].children[ref.slot];
  }
  bool child_hot(const TreeChild& ch) const {
    return ch.is_leaf ? ch.label.is_var() : hot[ch.index] != 0;
  }
};

Analysis analyze(const Circuit& f_tau);

// Gate ids of all nodes under ch, in post-order.
void collect_gates(const FormulaTree& tree, const TreeChild& ch, std::vector<int>& ids);
void collect_leaf_wires(const FormulaTree& tree, const TreeChild& ch, std::vector<int>& wires);

}  // namespace qf::detail
