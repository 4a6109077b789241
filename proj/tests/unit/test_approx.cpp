#include <gtest/gtest.h>

#include <cmath>

#include "qf/approx.hpp"
#include "qf/corpus.hpp"
#include "qf/simulator.hpp"

namespace qf {
namespace {

TEST(Truncate, ExactEntriesUnchanged) {
  const CMatrix x = named_unitary("X");
  for (int mu : {1, 4, 20}) EXPECT_EQ(truncate_gate(x, mu), x);
}

TEST(Truncate, HadamardFourBits) {
  // 1/sqrt(2) = 0.10110101...b, four bits give 0.1011b.
  const CMatrix h = truncate_gate(named_unitary("H"), 4);
  EXPECT_EQ(h(0, 0), Complex(0.6875));
  EXPECT_EQ(h(0, 1), Complex(0.6875));
  EXPECT_EQ(h(1, 0), Complex(0.6875));
  EXPECT_EQ(h(1, 1), Complex(-0.6875));
}

TEST(Truncate, RandomUnitaryWithinDelta) {
  Rng rng(60);
  const CMatrix u = haar_unitary(8, rng);
  const CMatrix v = truncate_gate(u, 20);
  EXPECT_LE(max_abs_diff(u, v), std::pow(2.0, 0.5 - 20));
  EXPECT_DOUBLE_EQ(truncation_delta(20), std::pow(2.0, 0.5 - 20));
  EXPECT_THROW(truncate_gate(u, 0), PreconditionError);
}

TEST(Eta, FrozenValues) {
  EXPECT_EQ(eta(2, 0), 0);
  EXPECT_DOUBLE_EQ(eta(2, std::ldexp(1.0, -10)), 0.0313720703125);
  EXPECT_DOUBLE_EQ(eta(3, std::ldexp(1.0, -16)), 0.0019533634185791015625);
}

TEST(ErrorBound, FrozenValuesAndMonotone) {
  const double delta = std::ldexp(1.0, -10);
  EXPECT_EQ(circuit_error_bound(2, delta, 0), 0);
  EXPECT_NEAR(circuit_error_bound(2, delta, 10), 0.3685074633080839, 1e-15);
  EXPECT_GT(circuit_error_bound(2, delta, 20), circuit_error_bound(2, delta, 10));
}

TEST(ErrorBound, BothMuRules) {
  EXPECT_EQ(formula_mu(16, 1.0 / 64), 10);
  const int mu = bound_driven_mu(2, 16, 1.0 / 64);
  EXPECT_LE(circuit_error_bound(2, truncation_delta(mu), 16), 1.0 / 64);
  EXPECT_GT(circuit_error_bound(2, truncation_delta(mu - 1), 16), 1.0 / 64);
  // The constant in eta makes the bound-driven rule ask for more bits.
  EXPECT_GT(mu, formula_mu(16, 1.0 / 64));
  EXPECT_THROW(formula_mu(16, 0), PreconditionError);
}

TEST(VerifyTruncation, NearExactGates) {
  Rng rng(61);
  const Circuit f = random_formula(FormulaShape{}, rng);
  const TruncationReport r = verify_truncation(f, 40);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.measured_p_dev, 1e-10);
  EXPECT_LE(r.measured_trace_dist, 1e-10);
}

TEST(VerifyTruncation, HadamardChain) {
  Circuit c;
  c.wires = 1;
  c.inputs = {InputLabel::var(0)};
  for (int k = 0; k < 10; ++k) c.gates.push_back(make_gate("H", {0}, k));
  const TruncationReport r = verify_truncation(c, 8);
  EXPECT_EQ(r.s, 10u);
  EXPECT_EQ(r.d, 1);
  EXPECT_GT(r.measured_p_dev, 0);
  EXPECT_TRUE(r.pass);
}

TEST(VerifyTruncation, RandomCorpus) {
  Rng rng(62);
  for (int t = 0; t < 40; ++t) {
    const Circuit f = random_formula(FormulaShape{}, rng);
    for (int mu : {8, 12, 16}) {
      const TruncationReport r = verify_truncation(f, mu);
      EXPECT_TRUE(r.pass) << "formula " << t << " mu " << mu << ": " << r.measured_trace_dist
                          << " vs " << r.bound;
      EXPECT_LE(r.measured_p_dev, r.measured_trace_dist + 1e-12);
    }
  }
}

TEST(OvOw, ClosedForms) {
  Rng rng(63);
  const CMatrix u = haar_unitary(4, rng);
  EXPECT_EQ(ov_ow_bound(u, u), 0);
  EXPECT_DOUBLE_EQ(ov_ow_bound(CMatrix::identity(2), CMatrix(2, 2)), 2.0);
  EXPECT_THROW(ov_ow_bound(CMatrix::identity(2), CMatrix::identity(4)), DimensionError);
}

TEST(Diamond, IdenticalChannels) {
  const SuperOp t = SuperOp::conjugation(named_unitary("H"));
  EXPECT_EQ(diamond_lower_bound(t, t, 50, 1).value, 0);
}

TEST(Diamond, IdentityVersusNot) {
  const SuperOp i = SuperOp::conjugation(CMatrix::identity(2));
  const SuperOp x = SuperOp::conjugation(named_unitary("X"));
  EXPECT_GE(diamond_lower_bound(i, x, 20, 2).value, 2 - 1e-6);
}

TEST(Diamond, BelowAnalyticBoundForRandomPairs) {
  Rng rng(64);
  for (int t = 0; t < 20; ++t) {
    const CMatrix v = haar_unitary(2, rng);
    const CMatrix w = t % 2 ? truncate_gate(v, 8) : haar_unitary(2, rng);
    const double lb =
        diamond_lower_bound(SuperOp::conjugation(v), SuperOp::conjugation(w), 200, t).value;
    const double rhs = ov_ow_bound(v, w);
    EXPECT_TRUE(std::isfinite(rhs));
    EXPECT_LE(lb, rhs + 1e-9);
  }
}

// Moves A (x) B on (s1 a1) (x) (s2 a2) to the order (s1 s2) (a1 a2).
CMatrix interleave(const CMatrix& a, const CMatrix& b, std::size_t n1, std::size_t n2) {
  const CMatrix ab = kron(a, b);
  const std::size_t dim = ab.rows();
  auto map = [&](std::size_t idx) {
    const std::size_t x2 = idx % (n2 * n2), x1 = idx / (n2 * n2);
    const std::size_t s1 = x1 / n1, a1 = x1 % n1, s2 = x2 / n2, a2 = x2 % n2;
    return (s1 * n2 + s2) * (n1 * n2) + a1 * n2 + a2;
  };
  CMatrix out(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) out(map(r), map(c)) = ab(r, c);
  return out;
}

TEST(Diamond, TensorLowerBoundsMultiply) {
  Rng rng(65);
  for (int t = 0; t < 3; ++t) {
    const SuperOp a = SuperOp::conjugation(haar_unitary(2, rng));
    const SuperOp b = SuperOp::conjugation(haar_unitary(2, rng));
    const SuperOp c = SuperOp::conjugation(haar_unitary(2, rng));
    const SuperOp d = SuperOp::conjugation(haar_unitary(2, rng));
    const DiamondEstimate l1 = diamond_lower_bound(a, b, 100, 1);
    const DiamondEstimate l2 = diamond_lower_bound(c, d, 100, 2);
    const SuperOp prod = tensor(a - b, c - d);
    const SuperOp zero(4, 4, CMatrix(16, 16));
    const CMatrix seed[] = {interleave(l1.witness, l2.witness, 2, 2)};
    const double lt = diamond_lower_bound(prod, zero, 100, 3, seed).value;
    EXPECT_GE(lt, l1.value * l2.value - 1e-6);
  }
}

TEST(StarRatio, GateSuperopsAreContractive) {
  Rng rng(66);
  for (int t = 0; t < 10; ++t) {
    const CMatrix u = haar_unitary(t % 2 ? 4 : 8, rng);
    const SuperOp g = gate_superop(u, static_cast<std::size_t>(t % 2));
    const double r = star_ratio_sample(g, 200, t);
    EXPECT_GE(r, 1 - 1e-9);
    EXPECT_LE(r, 1 + 1e-8);
  }
}

}  // namespace
}  // namespace qf
