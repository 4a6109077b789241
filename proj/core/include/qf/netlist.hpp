#pragma once

// Boolean gate DAG plus the word-level arithmetic used to build it. Words are
// W-bit two's complement, least significant bit first.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qf {

enum class Op : std::uint8_t { Input, Const0, Const1, And, Or, Xor, Not };

const char* to_string(Op op) noexcept;

using NodeId = std::uint32_t;

struct NetNode {
  Op op = Op::Const0;
  NodeId a = 0;
  NodeId b = 0;
};

struct Netlist {
  std::vector<NetNode> nodes;   // topological: arguments precede users
  std::vector<NodeId> inputs;   // inputs[i] carries x_i
  std::vector<NodeId> outputs;  // output word, LSB first
  std::vector<std::uint8_t> category;  // per node, index into categories
  std::vector<std::string> categories;
  int mu = 0;
  int width = 0;

  bool is_gate(NodeId id) const noexcept {
    const Op op = nodes[id].op;
    return op == Op::And || op == Op::Or || op == Op::Xor || op == Op::Not;
  }
};

struct NetlistStats {
  std::size_t size = 0;   // AND, OR, XOR and NOT nodes
  std::size_t depth = 0;  // longest input-to-output gate path
  std::map<std::string, std::size_t> breakdown;
};

NetlistStats netlist_stats(const Netlist& n);

// Evaluates 64 input vectors at once: bit k of inputs[i] is x_i of vector k.
std::vector<std::uint64_t> eval_bitparallel(const Netlist& n,
                                            std::span<const std::uint64_t> inputs);

nlohmann::ordered_json netlist_to_json(const Netlist& n);
Netlist netlist_from_json(const nlohmann::json& doc);

using Word = std::vector<NodeId>;

// Builder with constant folding. No other logic optimization is applied.
class NetlistBuilder {
 public:
  NetlistBuilder();

  NodeId zero() const noexcept { return 0; }
  NodeId one() const noexcept { return 1; }
  NodeId input();
  NodeId bit(bool v) const noexcept { return v ? one() : zero(); }
  NodeId and_(NodeId a, NodeId b);
  NodeId or_(NodeId a, NodeId b);
  NodeId xor_(NodeId a, NodeId b);
  NodeId not_(NodeId a);

  // Subsequent nodes are charged to this block.
  void set_category(const std::string& name);

  // Word arithmetic at a fixed width, all modulo 2^width.
  Word constant(std::int64_t value, int width);
  Word add(const Word& a, const Word& b);
  Word negate(const Word& a);
  Word sub(const Word& a, const Word& b);
  // Two columns of bits reduced by carry-save full adders, then one
  // ripple-carry adder. columns[c] lists bits of weight 2^c.
  Word sum_columns(std::vector<std::vector<NodeId>> columns, int width);

  Netlist finish(Word output, int mu);

 private:
  bool is_const(NodeId a) const noexcept { return a <= 1; }
  NodeId make(Op op, NodeId a, NodeId b);

  Netlist net_;
  std::uint8_t current_ = 0;
};

}  // namespace qf
