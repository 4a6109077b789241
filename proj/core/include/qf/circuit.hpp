#pragma once

// Circuit model: wires carrying labeled inputs, gates in time order, and the
// computation graph rooted at the last gate on the output wire.
//
// Wire 0 is the most significant qubit of the full state. Within a gate,
// targets[0] is the most significant qubit of the gate's local index.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qf/error.hpp"
#include "qf/linalg.hpp"

namespace qf {

inline constexpr std::size_t kDefaultMaxArity = 3;

class InputLabel {
 public:
  enum class Kind : std::uint8_t { Var, Const0, Const1 };

  static InputLabel var(int index);
  static InputLabel constant(bool value) {
    return InputLabel(value ? Kind::Const1 : Kind::Const0, -1);
  }
  // Accepts "x<i>", "0" or "1".
  static InputLabel parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  bool is_var() const noexcept { return kind_ == Kind::Var; }
  int index() const noexcept { return index_; }
  bool value() const noexcept { return kind_ == Kind::Const1; }
  std::string to_string() const;

  friend bool operator==(const InputLabel&, const InputLabel&) = default;

 private:
  InputLabel(Kind kind, int index) : kind_(kind), index_(index) {}
  Kind kind_;
  int index_;
};

struct Gate {
  int id = 0;
  std::vector<int> targets;
  CMatrix unitary;
  // One of X, H, CNOT, TOFFOLI, SWAP for named gates; other values are
  // in-memory tags and serialize as explicit matrices.
  std::string name;

  std::size_t arity() const noexcept { return targets.size(); }
};

bool is_named_gate(std::string_view name);
CMatrix named_unitary(std::string_view name);  // throws SchemaError
Gate make_gate(std::string_view name, std::vector<int> targets, int id = 0);
Gate make_gate(CMatrix unitary, std::vector<int> targets, int id = 0);

struct Circuit {
  int wires = 0;
  std::vector<InputLabel> inputs;
  std::vector<Gate> gates;
  int output = 0;

  // One more than the largest variable index on any input, 0 when none.
  int num_vars() const;
  // Throws on bad indices, arity above max_arity or non-unitary gates.
  void validate(std::size_t max_arity = kDefaultMaxArity, double tol = kTol) const;
};

// Producer/consumer links. Slot s of the gate at position p reads the value
// produced by producer[p][s] (a gate position, or -1 for the wire's input)
// and its output goes to consumer[p][s] (a gate position, or -1 if the value
// is never read again).
struct WireLinks {
  std::vector<std::vector<int>> producer;
  std::vector<std::vector<int>> consumer;
  std::vector<int> last_on_wire;  // per wire, -1 if untouched
};

WireLinks wire_links(const Circuit& c);

struct GraphEdge {
  int producer;  // gate position
  int consumer;  // gate position
  int wire;
};

struct ComputationGraph {
  int root = -1;           // gate position, -1 when the output wire is untouched
  std::vector<int> nodes;  // gate positions in time order
  std::vector<GraphEdge> edges;
  std::vector<int> dead;   // gate positions not in the graph
};

ComputationGraph computation_graph(const Circuit& c);

// A walk from an input wire to the output. gate_ids[k] is entered through
// wires[k]; the final entry of wires is the output wire.
struct WirePath {
  int input_wire = -1;
  std::vector<int> gate_ids;
  std::vector<int> wires;
};

struct FormulaCheck {
  bool formula = true;
  std::vector<WirePath> witness;  // two distinct paths when not a formula
  int offending_gate = -1;        // id of the gate feeding two graph gates
  ComputationGraph graph;
};

FormulaCheck is_formula(const Circuit& c);

class NotFormulaError : public Error {
 public:
  explicit NotFormulaError(FormulaCheck check);
  const FormulaCheck& check() const noexcept { return check_; }

 private:
  FormulaCheck check_;
};

// Throws NotFormulaError when c is not a formula.
void require_formula(const Circuit& c);

CMatrix embed_gate(const Gate& g, std::size_t m);

// Applies a 2^d x 2^d matrix to the given wires of an m-qubit state in place.
void apply_matrix(CVector& state, std::size_t m, std::span<const int> targets,
                  const CMatrix& u);

// Drops every gate outside the computation graph.
Circuit strip_dead_gates(const Circuit& c);

}  // namespace qf
