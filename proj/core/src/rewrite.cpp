#include "qf/rewrite.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>
#include <tuple>

#include "qf/circuit_json.hpp"
#include "tree_analysis.hpp"

namespace qf {

namespace {

int shared_wire(const Gate& a, const Gate& b) {
  for (int t : a.targets) {
    if (std::find(b.targets.begin(), b.targets.end(), t) != b.targets.end()) return t;
  }
  return -1;
}

}  // namespace

Circuit commute_disjoint(const Circuit& c, std::size_t i, std::size_t j) {
  if (j != i + 1 || j >= c.gates.size()) {
    throw PreconditionError("commute_disjoint needs adjacent positions, got " +
                            std::to_string(i) + " and " + std::to_string(j));
  }
  const int w = shared_wire(c.gates[i], c.gates[j]);
  if (w >= 0) {
    throw PreconditionError("gates " + std::to_string(c.gates[i].id) + " and " +
                            std::to_string(c.gates[j].id) + " share wire " + std::to_string(w));
  }
  Circuit out = c;
  std::swap(out.gates[i], out.gates[j]);
  return out;
}

Circuit postpone_gates(const Circuit& c, std::span<const std::size_t> positions,
                       std::size_t after_position) {
  if (after_position >= c.gates.size()) throw PreconditionError("after_position out of range");
  std::vector<std::size_t> order(positions.begin(), positions.end());
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw PreconditionError("postpone_gates: repeated position");
  }
  Circuit out = c;
  std::size_t limit = after_position;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::size_t p = *it;
    if (p > limit) {
      throw PreconditionError("gate at position " + std::to_string(p) +
                              " already lies after the target position");
    }
    while (p < limit) {
      const Gate& mover = out.gates[p];
      const Gate& next = out.gates[p + 1];
      const int w = shared_wire(mover, next);
      if (w >= 0) {
        throw PreconditionError("gate " + std::to_string(mover.id) + " is blocked by gate " +
                                std::to_string(next.id) + " on wire " + std::to_string(w));
      }
      std::swap(out.gates[p], out.gates[p + 1]);
      ++p;
    }
    if (limit == 0) break;
    --limit;
  }
  return out;
}

Circuit substitute(const Circuit& f, std::span<const int> block,
                   std::span<const std::uint8_t> tau) {
  const int n = f.num_vars();
  std::set<int> in_block(block.begin(), block.end());
  std::vector<int> slot(n, -1);
  int k = 0;
  for (int v = 0; v < n; ++v) {
    if (!in_block.count(v)) slot[v] = k++;
  }
  if (tau.size() != static_cast<std::size_t>(k)) {
    throw DimensionError("tau has " + std::to_string(tau.size()) + " bits but " +
                         std::to_string(k) + " variables lie outside the block");
  }
  Circuit out = f;
  for (auto& label : out.inputs) {
    if (label.is_var() && slot[label.index()] >= 0) {
      label = InputLabel::constant(tau[slot[label.index()]] != 0);
    }
  }
  return out;
}

namespace detail {

void collect_gates(const FormulaTree& tree, const TreeChild& ch, std::vector<int>& ids) {
  if (ch.is_leaf) return;
  const TreeNode& node = tree.nodes[ch.index];
  for (const auto& c : node.children) collect_gates(tree, c, ids);
  ids.push_back(node.gate_id);
}

void collect_leaf_wires(const FormulaTree& tree, const TreeChild& ch, std::vector<int>& wires) {
  if (ch.is_leaf) {
    wires.push_back(ch.index);
    return;
  }
  for (const auto& c : tree.nodes[ch.index].children) collect_leaf_wires(tree, c, wires);
}

Analysis analyze(const Circuit& f_tau) {
  Analysis an;
  an.circuit = f_tau;
  an.tree = extract_tree(f_tau);
  const std::size_t count = an.tree.nodes.size();
  an.parent.assign(count, -1);
  an.parent_slot.assign(count, 0);
  an.hot.assign(count, 0);
  an.intersection.assign(count, 0);
  an.position.assign(count, -1);

  std::vector<int> position_of_id;
  for (std::size_t p = 0; p < f_tau.gates.size(); ++p) {
    const int id = f_tau.gates[p].id;
    if (id < 0) throw SchemaError("gate ids must be non-negative");
    if (static_cast<std::size_t>(id) >= position_of_id.size()) position_of_id.resize(id + 1, -1);
    position_of_id[id] = static_cast<int>(p);
  }
  for (std::size_t k = 0; k < count; ++k) {
    const TreeNode& node = an.tree.nodes[k];
    an.position[k] = position_of_id[node.gate_id];
    int hot_children = 0;
    for (std::size_t s = 0; s < node.arity(); ++s) {
      const TreeChild& ch = node.children[s];
      if (!ch.is_leaf) {
        an.parent[ch.index] = static_cast<int>(k);
        an.parent_slot[ch.index] = s;
      }
      if (an.child_hot(ch)) ++hot_children;
    }
    an.hot[k] = hot_children > 0;
    an.intersection[k] = hot_children >= 2;
  }

  auto make_segment = [&](int start_node, SlotRef start_leaf) {
    Segment seg;
    seg.start_node = start_node;
    seg.start_leaf = start_leaf;
    int cur_parent;
    if (start_node >= 0) {
      const TreeNode& g1 = an.tree.nodes[start_node];
      for (std::size_t s = 0; s < g1.arity(); ++s) {
        SlotRef ref{start_node, s};
        (an.child_hot(g1.children[s]) ? seg.head : seg.sides).push_back(ref);
      }
      cur_parent = an.parent[start_node];
    } else {
      seg.head.push_back(start_leaf);
      cur_parent = start_leaf.node;
    }
    while (cur_parent >= 0 && !an.intersection[cur_parent]) {
      seg.interior.push_back(cur_parent);
      const TreeNode& node = an.tree.nodes[cur_parent];
      for (std::size_t s = 0; s < node.arity(); ++s) {
        if (!an.child_hot(node.children[s])) seg.sides.push_back({cur_parent, s});
      }
      cur_parent = an.parent[cur_parent];
    }
    seg.end_node = cur_parent;
    return seg;
  };

  // Leaf starts.
  if (an.tree.root.is_leaf) {
    if (an.tree.root.label.is_var()) an.segments.push_back(make_segment(-1, SlotRef{-1, 0}));
  }
  for (std::size_t k = 0; k < count; ++k) {
    const TreeNode& node = an.tree.nodes[k];
    for (std::size_t s = 0; s < node.arity(); ++s) {
      const TreeChild& ch = node.children[s];
      if (ch.is_leaf && ch.label.is_var()) {
        an.segments.push_back(make_segment(-1, SlotRef{static_cast<int>(k), s}));
      }
    }
    if (an.intersection[k]) an.segments.push_back(make_segment(static_cast<int>(k), {}));
  }
  // Ordered by the time of the segment's top, ties by start.
  auto key = [&](const Segment& seg) {
    const int top = seg.top_node();
    const int top_pos = top >= 0 ? an.position[top] : -1;
    const int end_pos = seg.end_node >= 0 ? an.position[seg.end_node]
                                          : std::numeric_limits<int>::max();
    const int start_key = seg.start_node >= 0 ? an.position[seg.start_node]
                                              : -1 - an.child(seg.start_leaf).index;
    return std::tuple(top_pos, end_pos, start_key);
  };
  std::stable_sort(an.segments.begin(), an.segments.end(),
                   [&](const Segment& a, const Segment& b) { return key(a) < key(b); });
  return an;
}

}  // namespace detail

namespace {

using detail::Analysis;
using detail::Segment;

// Dead gates fed, possibly through other dead gates, by discarded outputs of
// the given gate positions.
std::vector<int> dead_successors(const Circuit& c, const WireLinks& links,
                                 const std::vector<char>& in_graph,
                                 const std::vector<int>& positions) {
  std::set<int> found;
  std::vector<int> stack;
  for (int p : positions) {
    for (int q : links.consumer[p]) {
      if (q >= 0 && !in_graph[q] && found.insert(q).second) stack.push_back(q);
    }
  }
  while (!stack.empty()) {
    const int p = stack.back();
    stack.pop_back();
    for (int q : links.consumer[p]) {
      if (q >= 0 && found.insert(q).second) stack.push_back(q);
    }
  }
  std::vector<int> ids;
  for (int p : found) ids.push_back(c.gates[p].id);
  return ids;
}

}  // namespace

PathDecomposition decompose_substituted(const Circuit& f_tau, std::span<const int> block) {
  const Analysis an = detail::analyze(f_tau);
  const std::set<int> in_block(block.begin(), block.end());
  PathDecomposition out;
  out.block.assign(in_block.begin(), in_block.end());

  const WireLinks links = wire_links(f_tau);
  std::vector<char> in_graph(f_tau.gates.size(), 0);
  for (int p : an.position) in_graph[p] = 1;

  // Sigma leaves and their paths to the output.
  auto add_leaf = [&](const TreeChild& leaf, int parent_node, std::size_t slot) {
    if (!leaf.label.is_var()) return;
    if (!in_block.count(leaf.label.index())) {
      throw DimensionError("variable x" + std::to_string(leaf.label.index()) +
                           " is neither in the block nor fixed by tau");
    }
    out.sigma_wires.push_back(leaf.index);
    WirePath path;
    path.input_wire = leaf.index;
    int node = parent_node;
    std::size_t s = slot;
    while (node >= 0) {
      const Gate& g = f_tau.gates[an.position[node]];
      path.gate_ids.push_back(g.id);
      path.wires.push_back(g.targets[s]);
      s = an.tree.nodes[node].kept;
      const int up = an.parent[node];
      if (up >= 0) s = an.parent_slot[node];
      node = up;
    }
    path.wires.push_back(f_tau.output);
    out.paths.push_back(std::move(path));
  };
  if (an.tree.root.is_leaf) add_leaf(an.tree.root, -1, 0);
  for (std::size_t k = 0; k < an.tree.nodes.size(); ++k) {
    const TreeNode& node = an.tree.nodes[k];
    for (std::size_t s = 0; s < node.arity(); ++s) {
      if (node.children[s].is_leaf) add_leaf(node.children[s], static_cast<int>(k), s);
    }
  }
  // Order paths by input wire.
  std::vector<std::size_t> order(out.paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return out.paths[a].input_wire < out.paths[b].input_wire; });
  std::vector<WirePath> sorted_paths;
  for (auto i : order) sorted_paths.push_back(out.paths[i]);
  out.paths = std::move(sorted_paths);
  std::sort(out.sigma_wires.begin(), out.sigma_wires.end());
  out.s_j = out.sigma_wires.size();

  std::vector<std::pair<int, int>> g_by_time;
  for (std::size_t k = 0; k < an.tree.nodes.size(); ++k) {
    if (an.intersection[k]) g_by_time.push_back({an.position[k], an.tree.nodes[k].gate_id});
  }
  std::sort(g_by_time.begin(), g_by_time.end());
  for (auto [pos, id] : g_by_time) out.intersections.push_back(id);
  if (out.intersections.size() > out.s_j) {
    throw Error(ErrorKind::Precondition, "more intersection gates than block leaves");
  }

  for (const Segment& seg : an.segments) {
    PathSegment ps;
    std::vector<int> region;
    if (seg.start_node >= 0) {
      ps.start_gate = an.tree.nodes[seg.start_node].gate_id;
      region.push_back(an.position[seg.start_node]);
    } else {
      ps.start_wire = an.child(seg.start_leaf).index;
    }
    for (int node : seg.interior) {
      ps.interior.push_back(an.tree.nodes[node].gate_id);
      region.push_back(an.position[node]);
    }
    ps.end_gate = seg.end_node >= 0 ? an.tree.nodes[seg.end_node].gate_id : -1;
    ps.m = seg.m();
    ps.head_qubits = seg.head.size();
    for (const auto& ref : seg.sides) {
      const TreeChild& ch = an.child(ref);
      detail::collect_leaf_wires(an.tree, ch, ps.companions);
      detail::collect_gates(an.tree, ch, ps.side_gates);
    }
    std::sort(ps.companions.begin(), ps.companions.end());
    for (int id : ps.side_gates) {
      for (std::size_t p = 0; p < f_tau.gates.size(); ++p) {
        if (f_tau.gates[p].id == id) region.push_back(static_cast<int>(p));
      }
    }
    ps.postponed = dead_successors(f_tau, links, in_graph, region);
    out.segments.push_back(std::move(ps));
  }
  return out;
}

PathDecomposition decompose_paths(const Circuit& f, std::span<const int> block,
                                  std::span<const std::uint8_t> tau) {
  return decompose_substituted(substitute(f, block, tau), block);
}

Circuit postponed_form(const Circuit& f_tau, const PathDecomposition& decomp) {
  std::set<int> ids;
  for (const auto& seg : decomp.segments) ids.insert(seg.postponed.begin(), seg.postponed.end());
  if (ids.empty() || f_tau.gates.empty()) return f_tau;
  std::vector<std::size_t> positions;
  for (std::size_t p = 0; p < f_tau.gates.size(); ++p) {
    if (ids.count(f_tau.gates[p].id)) positions.push_back(p);
  }
  return postpone_gates(f_tau, positions, f_tau.gates.size() - 1);
}

nlohmann::ordered_json segment_to_json(const PathSegment& pi) {
  nlohmann::ordered_json j;
  j["start_gate"] = pi.start_gate;
  j["start_wire"] = pi.start_wire;
  j["interior"] = pi.interior;
  j["end_gate"] = pi.end_gate;
  j["m"] = pi.m;
  j["head_qubits"] = pi.head_qubits;
  j["companions"] = pi.companions;
  j["side_gates"] = pi.side_gates;
  j["postponed"] = pi.postponed;
  return j;
}

nlohmann::ordered_json decomposition_to_json(const PathDecomposition& d) {
  nlohmann::ordered_json j;
  j["block"] = d.block;
  j["s_j"] = d.s_j;
  j["sigma_wires"] = d.sigma_wires;
  j["intersections"] = d.intersections;
  j["paths"] = nlohmann::ordered_json::array();
  for (const auto& p : d.paths) j["paths"].push_back(path_to_json(p));
  j["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : d.segments) j["segments"].push_back(segment_to_json(s));
  return j;
}

}  // namespace qf
