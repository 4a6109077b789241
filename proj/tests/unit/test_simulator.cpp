#include <gtest/gtest.h>

#include <cmath>

#include "qf/circuit_json.hpp"
#include "qf/corpus.hpp"
#include "qf/simulator.hpp"

namespace qf {
namespace {

std::string data(const std::string& name) { return std::string(QF_DATA_DIR) + "/" + name; }

Circuit single(const char* name, std::vector<int> targets, std::vector<InputLabel> inputs,
               int output) {
  Circuit c;
  c.wires = static_cast<int>(inputs.size());
  c.inputs = std::move(inputs);
  c.gates = {make_gate(name, std::move(targets))};
  c.output = output;
  return c;
}

// Tr over discarded slots of U rho U^dag by explicit index sums.
CMatrix reduce_oracle(const CMatrix& u, const CMatrix& rho, std::size_t d, std::size_t kept) {
  const CMatrix full = u * rho * u.adjoint();
  const std::size_t dim = std::size_t{1} << d;
  CMatrix out(2, 2);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      bool same_rest = true;
      for (std::size_t s = 0; s < d; ++s) {
        if (s == kept) continue;
        const std::size_t shift = d - 1 - s;
        if (((r >> shift) & 1) != ((c >> shift) & 1)) same_rest = false;
      }
      if (!same_rest) continue;
      const std::size_t shift = d - 1 - kept;
      out((r >> shift) & 1, (c >> shift) & 1) += full(r, c);
    }
  return out;
}

TEST(Assignment, ParseAndIndex) {
  const Assignment a = Assignment::parse("110");
  EXPECT_EQ(a.bits, (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_EQ(Assignment::from_index(6, 3).bits, a.bits);
  EXPECT_EQ(a.to_string(), "110");
  EXPECT_THROW(Assignment::parse("12"), SchemaError);
}

TEST(Statevector, NotSemantics) {
  const Circuit c = single("X", {0}, {InputLabel::var(0)}, 0);
  EXPECT_NEAR(statevector_run(c, Assignment::parse("0")), 1.0, 1e-15);
  EXPECT_NEAR(statevector_run(c, Assignment::parse("1")), 0.0, 1e-15);
}

TEST(Statevector, HadamardOnZero) {
  const Circuit c = single("H", {0}, {InputLabel::constant(false)}, 0);
  EXPECT_NEAR(statevector_run(c, Assignment{}), 0.5, 1e-15);
}

TEST(Statevector, ToffoliComputesAnd) {
  const Circuit c = single("TOFFOLI", {0, 1, 2},
                           {InputLabel::var(0), InputLabel::var(1), InputLabel::constant(false)}, 2);
  for (std::uint64_t r = 0; r < 4; ++r) {
    const Assignment a = Assignment::from_index(r, 2);
    EXPECT_NEAR(statevector_run(c, a), a.bits[0] && a.bits[1] ? 1.0 : 0.0, 1e-15);
  }
}

TEST(Statevector, Limits) {
  const Circuit c = single("X", {0}, {InputLabel::var(0), InputLabel::var(1)}, 0);
  EXPECT_THROW(statevector_run(c, Assignment::parse("1")), DimensionError);
  Circuit wide;
  wide.wires = 15;
  wide.inputs.assign(15, InputLabel::constant(false));
  EXPECT_THROW(statevector_run(wide, Assignment{}), BudgetError);
}

TEST(GateSuperop, XConjugation) {
  const SuperOp t = gate_superop(named_unitary("X"), 0);
  Rng rng(20);
  const CMatrix rho = random_density(2, rng);
  const CMatrix x = named_unitary("X");
  EXPECT_LT(max_abs_diff(t.apply(rho), x * rho * x), 1e-15);
}

TEST(GateSuperop, CnotMakesBellReduction) {
  const SuperOp t = gate_superop(named_unitary("CNOT"), 1);
  CMatrix plus(2, 2, {0.5, 0.5, 0.5, 0.5});
  CMatrix zero{{1, 0}, {0, 0}};
  EXPECT_LT(max_abs_diff(t.apply(kron(plus, zero)), Complex(0.5) * CMatrix::identity(2)), 1e-15);
}

TEST(GateSuperop, RandomTwoQubitAgainstDefinition) {
  Rng rng(21);
  const CMatrix u = haar_unitary(4, rng);
  for (std::size_t kept = 0; kept < 2; ++kept) {
    const SuperOp t = gate_superop(u, kept);
    EXPECT_LT(t.trace_preservation_residual(), 1e-10);
    EXPECT_GT(t.min_choi_eigenvalue(), -1e-10);
    for (int k = 0; k < 20; ++k) {
      const CMatrix rho = random_density(4, rng);
      const CMatrix expect = reduce_oracle(u, rho, 2, kept);
      EXPECT_LT(max_abs_diff(t.apply(rho), expect), 1e-10);
      EXPECT_LT(max_abs_diff(apply_gate_kept(u, rho, kept), expect), 1e-10);
    }
  }
}

TEST(FormulaRun, ConstantOutput) {
  Circuit c;
  c.wires = 1;
  c.inputs = {InputLabel::constant(true)};
  const FormulaResult r = formula_run(c, Assignment{});
  EXPECT_EQ(r.rho_final, (CMatrix{{0, 0}, {0, 1}}));
  EXPECT_EQ(r.p, 1.0);
}

TEST(FormulaRun, HadamardOnZero) {
  const Circuit c = single("H", {0}, {InputLabel::constant(false)}, 0);
  const FormulaResult r = formula_run(c, Assignment{});
  EXPECT_LT(max_abs_diff(r.rho_final, CMatrix{{0.5, 0.5}, {0.5, 0.5}}), 1e-15);
  EXPECT_NEAR(r.p, 0.5, 1e-15);
}

TEST(FormulaRun, RejectsNonFormula) {
  EXPECT_THROW(formula_run(load_circuit(data("sample_top.json")), Assignment::parse("00")),
               NotFormulaError);
}

TEST(FormulaRun, MatchesStatevectorOnRandomFormulas) {
  Rng rng(22);
  double worst = 0;
  for (int t = 0; t < 40; ++t) {
    FormulaShape shape;
    shape.max_arity = 3;
    const Circuit f = random_formula(shape, rng);
    const int n = f.num_vars();
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
      const Assignment a = Assignment::from_index(r, n);
      worst = std::max(worst, std::abs(formula_run(f, a).p - statevector_run(f, a)));
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(FormulaRun, OrderRobustUnderDisjointSwaps) {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    const Circuit f = random_formula(FormulaShape{}, rng);
    Circuit g = f;
    for (std::size_t i = 0; i + 1 < g.gates.size(); i += 2) {
      const auto& x = g.gates[i].targets;
      const auto& y = g.gates[i + 1].targets;
      if (std::none_of(x.begin(), x.end(),
                       [&](int w) { return std::find(y.begin(), y.end(), w) != y.end(); })) {
        std::swap(g.gates[i], g.gates[i + 1]);
      }
    }
    const int n = f.num_vars();
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
      const Assignment a = Assignment::from_index(r, n);
      EXPECT_NEAR(formula_run(f, a).p, formula_run(g, a).p, 1e-12);
    }
  }
}

TEST(TruthTable, ToffoliAnd) {
  const Circuit c = single("TOFFOLI", {0, 1, 2},
                           {InputLabel::var(0), InputLabel::var(1), InputLabel::constant(false)}, 2);
  const TruthTable t = truthtable(c);
  EXPECT_EQ(t.value, (std::vector<std::int8_t>{0, 0, 0, 1}));
  EXPECT_TRUE(t.is_total());
}

TEST(TruthTable, DesignedAmbiguity) {
  Circuit c = single("H", {0}, {InputLabel::constant(false), InputLabel::var(0)}, 0);
  const TruthTable t = truthtable(c);
  EXPECT_EQ(t.value, (std::vector<std::int8_t>{-1, -1}));
  EXPECT_EQ(t.undecided(), (std::vector<std::uint64_t>{0, 1}));
}

TEST(TruthTable, Maj3IsMajority) {
  const TruthTable t = truthtable(load_circuit(data("maj3.json")));
  ASSERT_EQ(t.n, 3);
  for (std::uint64_t r = 0; r < 8; ++r) {
    const int ones = static_cast<int>((r & 1) + ((r >> 1) & 1) + ((r >> 2) & 1));
    EXPECT_EQ(t.value[r], ones >= 2 ? 1 : 0) << r;
  }
}

TEST(TruthTable, EnginesAndThreadsAgree) {
  const Circuit c = load_circuit(data("maj3.json"));
  const TruthTable a = truthtable(c, Engine::Formula, 1);
  const TruthTable b = truthtable(c, Engine::Statevector, 3);
  for (std::size_t r = 0; r < a.p.size(); ++r) EXPECT_NEAR(a.p[r], b.p[r], 1e-12);
}

TEST(TruthTable, NonFormulaFallsBackToStatevector) {
  const TruthTable t = truthtable(load_circuit(data("sample_top.json")));
  EXPECT_EQ(t.p.size(), 4u);
  EXPECT_THROW(truthtable(load_circuit(data("sample_top.json")), Engine::Formula), NotFormulaError);
}

}  // namespace
}  // namespace qf
