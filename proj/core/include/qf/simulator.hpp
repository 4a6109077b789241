#pragma once

// Two semantics for the same circuit: the full statevector of the whole
// register, and mixed-state propagation of one 2x2 density per tree edge.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qf/channel.hpp"
#include "qf/circuit.hpp"
#include "qf/formula_tree.hpp"

namespace qf {

inline constexpr std::size_t kStatevectorMaxWires = 14;
inline constexpr int kTruthTableMaxVars = 20;

// bits[i] is the value of x_i. The text form lists x_0 first, so as a binary
// number "110" is row 6 of a truth table over three variables.
struct Assignment {
  std::vector<std::uint8_t> bits;

  static Assignment parse(std::string_view text);
  static Assignment from_index(std::uint64_t index, int n);
  std::size_t size() const noexcept { return bits.size(); }
  std::string to_string() const;
};

CVector initial_state(const Circuit& c, const Assignment& a);
CVector statevector_final(const Circuit& c, const Assignment& a,
                          std::size_t max_wires = kStatevectorMaxWires);
double statevector_run(const Circuit& c, const Assignment& a,
                       std::size_t max_wires = kStatevectorMaxWires);

// [g]: rho -> Tr_discarded(U rho U^dag), keeping local output slot kept.
SuperOp gate_superop(const CMatrix& u, std::size_t kept);
SuperOp gate_superop(const Gate& g, std::size_t kept);

// Tr_discarded(V rho V^dag) for a 2^d x 2^d density, computed directly.
CMatrix apply_gate_kept(const CMatrix& v, const CMatrix& rho, std::size_t kept);

struct FormulaResult {
  CMatrix rho_final;  // 2x2
  double p = 0;
};

class FormulaEvaluator {
 public:
  explicit FormulaEvaluator(const Circuit& f);  // throws NotFormulaError
  explicit FormulaEvaluator(FormulaTree tree);

  const FormulaTree& tree() const noexcept { return tree_; }
  int num_vars() const noexcept { return num_vars_; }

  FormulaResult run(const Assignment& a) const;
  // Replaces node k's unitary by matrices[k]; each gate acts as
  // rho -> Tr(V rho V^dag) even when V is not unitary.
  FormulaResult run_with(const Assignment& a, std::span<const CMatrix> matrices) const;

 private:
  FormulaTree tree_;
  int num_vars_ = 0;
};

FormulaResult formula_run(const Circuit& f, const Assignment& a);

enum class Engine { Auto, Formula, Statevector };

struct TruthTable {
  int n = 0;
  std::vector<double> p;  // indexed by Assignment::from_index order
  std::vector<std::int8_t> value;  // 0, 1, or -1 when p is in [1/3, 2/3]

  std::vector<std::uint64_t> undecided() const;
  bool is_total() const { return undecided().empty(); }
};

// Auto uses the formula engine when c is a formula.
TruthTable truthtable(const Circuit& c, Engine engine = Engine::Auto, int threads = 1);

}  // namespace qf
