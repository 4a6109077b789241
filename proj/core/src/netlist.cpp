#include "qf/netlist.hpp"

#include <algorithm>
#include <string>

#include "qf/error.hpp"

namespace qf {

const char* to_string(Op op) noexcept {
  switch (op) {
    case Op::Input: return "INPUT";
    case Op::Const0: return "CONST0";
    case Op::Const1: return "CONST1";
    case Op::And: return "AND";
    case Op::Or: return "OR";
    case Op::Xor: return "XOR";
    case Op::Not: return "NOT";
  }
  return "?";
}

NetlistStats netlist_stats(const Netlist& n) {
  NetlistStats stats;
  std::vector<std::uint32_t> depth(n.nodes.size(), 0);
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const NetNode& node = n.nodes[i];
    switch (node.op) {
      case Op::Input:
      case Op::Const0:
      case Op::Const1:
        break;
      case Op::Not:
        depth[i] = depth[node.a] + 1;
        break;
      default:
        depth[i] = std::max(depth[node.a], depth[node.b]) + 1;
        break;
    }
    if (n.is_gate(static_cast<NodeId>(i))) {
      ++stats.size;
      const std::size_t cat = i < n.category.size() ? n.category[i] : 0;
      const std::string& name = cat < n.categories.size() ? n.categories[cat] : "other";
      ++stats.breakdown[name];
    }
  }
  for (NodeId o : n.outputs) stats.depth = std::max<std::size_t>(stats.depth, depth[o]);
  return stats;
}

std::vector<std::uint64_t> eval_bitparallel(const Netlist& n,
                                            std::span<const std::uint64_t> inputs) {
  if (inputs.size() != n.inputs.size()) {
    throw DimensionError("netlist has " + std::to_string(n.inputs.size()) + " inputs, got " +
                         std::to_string(inputs.size()));
  }
  std::vector<std::uint64_t> value(n.nodes.size(), 0);
  for (std::size_t i = 0; i < n.inputs.size(); ++i) value[n.inputs[i]] = inputs[i];
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const NetNode& node = n.nodes[i];
    switch (node.op) {
      case Op::Input: break;
      case Op::Const0: value[i] = 0; break;
      case Op::Const1: value[i] = ~std::uint64_t{0}; break;
      case Op::And: value[i] = value[node.a] & value[node.b]; break;
      case Op::Or: value[i] = value[node.a] | value[node.b]; break;
      case Op::Xor: value[i] = value[node.a] ^ value[node.b]; break;
      case Op::Not: value[i] = ~value[node.a]; break;
    }
  }
  std::vector<std::uint64_t> out;
  out.reserve(n.outputs.size());
  for (NodeId o : n.outputs) out.push_back(value[o]);
  return out;
}

nlohmann::ordered_json netlist_to_json(const Netlist& n) {
  nlohmann::ordered_json doc;
  doc["inputs"] = n.inputs;
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const NetNode& node = n.nodes[i];
    if (node.op == Op::Input) continue;
    nlohmann::ordered_json g;
    g["id"] = i;
    g["op"] = to_string(node.op);
    nlohmann::ordered_json args = nlohmann::ordered_json::array();
    if (node.op == Op::Not) args.push_back(node.a);
    if (node.op == Op::And || node.op == Op::Or || node.op == Op::Xor) {
      args.push_back(node.a);
      args.push_back(node.b);
    }
    g["args"] = std::move(args);
    gates.push_back(std::move(g));
  }
  doc["gates"] = std::move(gates);
  doc["outputs"] = n.outputs;
  const NetlistStats stats = netlist_stats(n);
  doc["meta"] = {{"mu", n.mu}, {"W", n.width}, {"size", stats.size}, {"depth", stats.depth}};
  return doc;
}

namespace {

bool dense_topological_ids(const nlohmann::json& doc) {
  if (!doc["inputs"].is_array() || !doc["gates"].is_array()) return false;
  const std::size_t total = doc["inputs"].size() + doc["gates"].size();
  std::vector<bool> seen(total, false);
  auto claim = [&](const nlohmann::json& id) {
    if (!id.is_number_integer()) return false;
    const auto v = id.get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= total || seen[v]) return false;
    seen[v] = true;
    return true;
  };
  for (const auto& id : doc["inputs"])
    if (!claim(id)) return false;
  for (const auto& g : doc["gates"]) {
    if (!g.is_object() || !g.contains("id") || !claim(g["id"])) return false;
    const auto self = g["id"].get<std::int64_t>();
    for (const auto& a : g.value("args", nlohmann::json::array()))
      if (!a.is_number_integer() || a.get<std::int64_t>() >= self) return false;
  }
  return true;
}

}  // namespace

Netlist netlist_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("inputs") || !doc.contains("gates") ||
      !doc.contains("outputs")) {
    throw SchemaError("netlist needs inputs, gates and outputs");
  }
  // Ids that are exactly 0..N-1 with arguments below their users are kept, so
  // a written netlist reads back unchanged. Other ids are renumbered densely
  // in document order.
  const bool keep_ids = dense_topological_ids(doc);
  std::map<std::int64_t, NodeId> remap;
  Netlist n;
  const std::size_t total = doc["inputs"].size() + doc["gates"].size();
  if (keep_ids) {
    for (std::size_t k = 0; k < total; ++k) remap[static_cast<std::int64_t>(k)] = static_cast<NodeId>(k);
  }
  n.nodes.assign(total, NetNode{});
  NodeId next = 0;
  auto define = [&](const nlohmann::json& id, NetNode node) {
    if (!id.is_number_integer()) throw SchemaError("netlist ids must be integers");
    const auto key = id.get<std::int64_t>();
    if (!keep_ids) {
      if (remap.count(key)) throw SchemaError("duplicate netlist id");
      remap[key] = next++;
    }
    const NodeId slot = remap.at(key);
    n.nodes[slot] = node;
    return slot;
  };
  auto lookup = [&](const nlohmann::json& id) {
    if (!id.is_number_integer()) throw SchemaError("netlist ids must be integers");
    auto it = remap.find(id.get<std::int64_t>());
    if (it == remap.end()) {
      throw SchemaError("netlist id " + std::to_string(id.get<std::int64_t>()) +
                        " used before definition");
    }
    return it->second;
  };
  for (const auto& id : doc["inputs"]) n.inputs.push_back(define(id, {Op::Input, 0, 0}));
  for (const auto& g : doc["gates"]) {
    if (!g.is_object() || !g.contains("id") || !g.contains("op")) {
      throw SchemaError("netlist gate needs id and op");
    }
    const std::string op = g["op"].get<std::string>();
    const nlohmann::json args = g.value("args", nlohmann::json::array());
    NetNode node;
    std::size_t arity = 0;
    if (op == "CONST0") {
      node.op = Op::Const0;
    } else if (op == "CONST1") {
      node.op = Op::Const1;
    } else if (op == "NOT") {
      node.op = Op::Not;
      arity = 1;
    } else if (op == "AND" || op == "OR" || op == "XOR") {
      node.op = op == "AND" ? Op::And : op == "OR" ? Op::Or : Op::Xor;
      arity = 2;
    } else {
      throw SchemaError("unknown netlist op '" + op + "'");
    }
    if (args.size() != arity) throw SchemaError("netlist op " + op + " has wrong arity");
    if (arity >= 1) node.a = lookup(args[0]);
    if (arity == 2) node.b = lookup(args[1]);
    define(g["id"], node);
  }
  for (const auto& id : doc["outputs"]) n.outputs.push_back(lookup(id));
  if (doc.contains("meta")) {
    n.mu = doc["meta"].value("mu", 0);
    n.width = doc["meta"].value("W", 0);
  }
  n.category.assign(n.nodes.size(), 0);
  n.categories = {"other"};
  return n;
}

NetlistBuilder::NetlistBuilder() {
  net_.categories = {"other"};
  net_.nodes.push_back({Op::Const0, 0, 0});
  net_.nodes.push_back({Op::Const1, 0, 0});
  net_.category = {0, 0};
}

NodeId NetlistBuilder::make(Op op, NodeId a, NodeId b) {
  net_.nodes.push_back({op, a, b});
  net_.category.push_back(current_);
  return static_cast<NodeId>(net_.nodes.size() - 1);
}

NodeId NetlistBuilder::input() {
  const NodeId id = make(Op::Input, 0, 0);
  net_.inputs.push_back(id);
  return id;
}

NodeId NetlistBuilder::and_(NodeId a, NodeId b) {
  if (a == zero() || b == zero()) return zero();
  if (a == one()) return b;
  if (b == one()) return a;
  return make(Op::And, a, b);
}

NodeId NetlistBuilder::or_(NodeId a, NodeId b) {
  if (a == one() || b == one()) return one();
  if (a == zero()) return b;
  if (b == zero()) return a;
  return make(Op::Or, a, b);
}

NodeId NetlistBuilder::xor_(NodeId a, NodeId b) {
  if (a == zero()) return b;
  if (b == zero()) return a;
  if (a == one()) return not_(b);
  if (b == one()) return not_(a);
  return make(Op::Xor, a, b);
}

NodeId NetlistBuilder::not_(NodeId a) {
  if (a == zero()) return one();
  if (a == one()) return zero();
  return make(Op::Not, a, 0);
}

void NetlistBuilder::set_category(const std::string& name) {
  auto it = std::find(net_.categories.begin(), net_.categories.end(), name);
  if (it == net_.categories.end()) {
    net_.categories.push_back(name);
    it = net_.categories.end() - 1;
  }
  current_ = static_cast<std::uint8_t>(it - net_.categories.begin());
}

Word NetlistBuilder::constant(std::int64_t value, int width) {
  Word w(width);
  for (int i = 0; i < width; ++i) {
    w[i] = bit(((static_cast<std::uint64_t>(value) >> std::min(i, 63)) & 1) != 0);
  }
  return w;
}

Word NetlistBuilder::add(const Word& a, const Word& b) {
  if (a.size() != b.size()) throw DimensionError("word widths differ");
  Word s(a.size());
  NodeId carry = zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const NodeId t = xor_(a[i], b[i]);
    s[i] = xor_(t, carry);
    if (i + 1 < a.size()) carry = or_(and_(a[i], b[i]), and_(carry, t));
  }
  return s;
}

Word NetlistBuilder::negate(const Word& a) {
  Word inv(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) inv[i] = not_(a[i]);
  return add(inv, constant(1, static_cast<int>(a.size())));
}

Word NetlistBuilder::sub(const Word& a, const Word& b) {
  // a + ~b + 1 with the +1 as the initial carry.
  if (a.size() != b.size()) throw DimensionError("word widths differ");
  Word s(a.size());
  NodeId carry = one();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const NodeId nb = not_(b[i]);
    const NodeId t = xor_(a[i], nb);
    s[i] = xor_(t, carry);
    if (i + 1 < a.size()) carry = or_(and_(a[i], nb), and_(carry, t));
  }
  return s;
}

Word NetlistBuilder::sum_columns(std::vector<std::vector<NodeId>> columns, int width) {
  columns.resize(width);
  // Constant ones are summed arithmetically; constant zeros vanish.
  std::uint64_t ones = 0;
  for (int c = 0; c < width; ++c) {
    auto& col = columns[c];
    std::size_t count = 0;
    std::erase_if(col, [&](NodeId x) {
      if (x == one()) ++count;
      return is_const(x);
    });
    if (c < 64) ones += static_cast<std::uint64_t>(count) << c;
  }
  for (int c = 0; c < width && c < 64; ++c) {
    if ((ones >> c) & 1) columns[c].push_back(one());
  }
  auto tallest = [&] {
    std::size_t t = 0;
    for (const auto& col : columns) t = std::max(t, col.size());
    return t;
  };
  while (tallest() > 2) {
    std::vector<std::vector<NodeId>> next(width);
    for (int c = 0; c < width; ++c) {
      const auto& col = columns[c];
      std::size_t i = 0;
      for (; i + 3 <= col.size(); i += 3) {
        const NodeId a = col[i], b = col[i + 1], x = col[i + 2];
        const NodeId t = xor_(a, b);
        next[c].push_back(xor_(t, x));
        if (c + 1 < width) next[c + 1].push_back(or_(and_(a, b), and_(x, t)));
      }
      if (col.size() - i == 2 && col.size() > 3) {
        // Half adder keeps tall columns shrinking.
        next[c].push_back(xor_(col[i], col[i + 1]));
        if (c + 1 < width) next[c + 1].push_back(and_(col[i], col[i + 1]));
        i += 2;
      }
      for (; i < col.size(); ++i) next[c].push_back(col[i]);
    }
    columns = std::move(next);
  }
  Word a(width, zero()), b(width, zero());
  for (int c = 0; c < width; ++c) {
    if (!columns[c].empty()) a[c] = columns[c][0];
    if (columns[c].size() > 1) b[c] = columns[c][1];
  }
  return add(a, b);
}

Netlist NetlistBuilder::finish(Word output, int mu) {
  // Drop nodes that cannot reach the output; constants and inputs stay.
  std::vector<char> live(net_.nodes.size(), 0);
  live[0] = live[1] = 1;
  for (NodeId id : net_.inputs) live[id] = 1;
  for (NodeId id : output) live[id] = 1;
  for (std::size_t i = net_.nodes.size(); i-- > 0;) {
    if (!live[i] || !net_.is_gate(static_cast<NodeId>(i))) continue;
    live[net_.nodes[i].a] = 1;
    if (net_.nodes[i].op != Op::Not) live[net_.nodes[i].b] = 1;
  }
  Netlist out;
  out.categories = net_.categories;
  std::vector<NodeId> remap(net_.nodes.size(), 0);
  for (std::size_t i = 0; i < net_.nodes.size(); ++i) {
    if (!live[i]) continue;
    NetNode node = net_.nodes[i];
    if (net_.is_gate(static_cast<NodeId>(i))) {
      node.a = remap[node.a];
      if (node.op != Op::Not) node.b = remap[node.b];
    }
    remap[i] = static_cast<NodeId>(out.nodes.size());
    out.nodes.push_back(node);
    out.category.push_back(net_.category[i]);
  }
  for (NodeId id : net_.inputs) out.inputs.push_back(remap[id]);
  for (NodeId id : output) out.outputs.push_back(remap[id]);
  out.mu = mu;
  out.width = static_cast<int>(out.outputs.size());
  *this = NetlistBuilder();
  return out;
}

}  // namespace qf
