#include <gtest/gtest.h>

#include <numeric>

#include "qf/circuit_json.hpp"
#include "qf/corpus.hpp"
#include "qf/rewrite.hpp"
#include "qf/simulator.hpp"

namespace qf {
namespace {

std::string data(const std::string& name) { return std::string(QF_DATA_DIR) + "/" + name; }

// x0 climbs through a chain of gates, each also reading one constant.
Circuit chain(const std::vector<CMatrix>& gates, const std::vector<bool>& constants) {
  Circuit c;
  c.wires = 1 + static_cast<int>(constants.size());
  c.inputs.push_back(InputLabel::var(0));
  for (bool b : constants) c.inputs.push_back(InputLabel::constant(b));
  int on = 0;
  int next_const = 1;
  for (std::size_t k = 0; k < gates.size(); ++k) {
    if (gates[k].rows() == 2) {
      c.gates.push_back(make_gate(gates[k], {on}, static_cast<int>(k)));
    } else {
      const int other = next_const++;
      c.gates.push_back(make_gate(gates[k], {on, other}, static_cast<int>(k)));
      on = other;  // the path continues on the second slot
    }
  }
  c.output = on;
  return c;
}

const PathSegment& longest(const PathDecomposition& d) {
  return *std::max_element(d.segments.begin(), d.segments.end(),
                           [](const PathSegment& a, const PathSegment& b) { return a.m < b.m; });
}

double fragment_gap(const SqueezedPath& sp) {
  const TruthTable a = truthtable(sp.fragment, Engine::Statevector);
  const TruthTable b = truthtable(sp.original, Engine::Statevector);
  double worst = 0;
  for (std::size_t r = 0; r < a.p.size(); ++r) worst = std::max(worst, std::abs(a.p[r] - b.p[r]));
  return worst;
}

void expect_data_consistent(const SqueezeData& data) {
  for (std::size_t i = 0; i < data.basis.size(); ++i)
    for (std::size_t j = 0; j < data.basis.size(); ++j)
      EXPECT_LT(std::abs(inner(data.basis[i], data.basis[j]) - Complex(i == j ? 1 : 0)), 1e-9);
  for (std::size_t a = 0; a < data.images.size(); ++a)
    for (std::size_t c = 0; c < data.images[a].size(); ++c) {
      CVector back(data.env_dim);
      for (std::size_t j = 0; j < data.rank(); ++j)
        for (std::size_t x = 0; x < data.env_dim; ++x) back[x] += data.lambda[a][c][j] * data.basis[j][x];
      for (std::size_t x = 0; x < data.env_dim; ++x) EXPECT_LT(std::abs(back[x] - data.images[a][c][x]), 1e-9);
    }
  EXPECT_LE(data.rank(), std::size_t{1} << data.fresh_qubits);
}

TEST(SqueezePath, IdentityInterior) {
  const CMatrix id4 = CMatrix::identity(4);
  const Circuit f = chain({id4, id4, id4}, {false, true, false});
  const PathDecomposition d = decompose_paths(f, std::vector<int>{0}, {});
  const PathSegment& seg = longest(d);
  ASSERT_EQ(seg.m, 5u);
  const SqueezedPath sp = squeeze_path(f, seg, d);
  EXPECT_LT(unitarity_residual(sp.gate.unitary), 1e-8);
  EXPECT_EQ(sp.gate.name, kSqueezeTag);
  EXPECT_LE(fragment_gap(sp), 1e-9);
  expect_data_consistent(sp.data);
}

TEST(SqueezePath, NoCompanions) {
  Rng rng(50);
  const Circuit f = chain({haar_unitary(2, rng), haar_unitary(2, rng), haar_unitary(2, rng)}, {});
  const PathDecomposition d = decompose_paths(f, std::vector<int>{0}, {});
  const PathSegment& seg = longest(d);
  EXPECT_TRUE(seg.companions.empty());
  const SqueezedPath sp = squeeze_path(f, seg, d);
  EXPECT_LT(unitarity_residual(sp.gate.unitary), 1e-8);
  EXPECT_LE(fragment_gap(sp), 1e-9);
  // Without companions the images are scalars times a single environment.
  EXPECT_EQ(sp.data.rank(), 1u);
  expect_data_consistent(sp.data);
}

TEST(SqueezePath, ThreeCompanions) {
  Rng rng(51);
  for (int t = 0; t < 10; ++t) {
    const Circuit f = chain({haar_unitary(4, rng), haar_unitary(4, rng), haar_unitary(4, rng)},
                            {true, false, true});
    const PathDecomposition d = decompose_paths(f, std::vector<int>{0}, {});
    const PathSegment& seg = longest(d);
    EXPECT_EQ(seg.companions.size(), 3u);
    const SqueezedPath sp = squeeze_path(f, seg, d);
    EXPECT_LT(unitarity_residual(sp.gate.unitary), 1e-8);
    EXPECT_LE(fragment_gap(sp), 1e-9);
    expect_data_consistent(sp.data);
  }
}

TEST(SqueezePath, RejectsShortSegment) {
  Circuit c;
  c.wires = 2;
  c.inputs = {InputLabel::var(0), InputLabel::var(1)};
  c.gates = {make_gate("CNOT", {0, 1}, 0)};
  c.output = 1;
  const PathDecomposition d = decompose_paths(c, std::vector<int>{0, 1}, {});
  for (const auto& seg : d.segments) {
    if (!seg.squeezable()) EXPECT_THROW(squeeze_path(c, seg, d), PreconditionError);
  }
}

TEST(SqueezeFormula, NothingToSqueeze) {
  Circuit c;
  c.wires = 2;
  c.inputs = {InputLabel::var(0), InputLabel::var(1)};
  c.gates = {make_gate("CNOT", {0, 1}, 0)};
  c.output = 1;
  const SqueezeReport r = squeeze_formula(c, std::vector<int>{0, 1}, {});
  EXPECT_FALSE(r.changed);
  EXPECT_EQ(serialize_circuit(r.circuit), serialize_circuit(c));
}

TEST(SqueezeFormula, RandomFormulasKeepTruthTables) {
  Rng rng(52);
  int squeezed = 0;
  for (int t = 0; t < 60; ++t) {
    FormulaShape shape;
    shape.max_gates = 12;
    shape.num_vars = 3;
    shape.max_arity = 3;
    const Circuit f = random_formula(shape, rng);
    const int n = f.num_vars();
    if (n < 1) continue;
    const std::vector<int> block = {0};
    std::vector<std::uint8_t> tau(static_cast<std::size_t>(n - 1));
    for (auto& b : tau) b = static_cast<std::uint8_t>(rng() & 1);
    const SqueezeReport r = squeeze_formula(f, block, tau);
    const Circuit f_tau = substitute(f, block, tau);
    const TruthTable a = truthtable(f_tau);
    const TruthTable b = truthtable(r.circuit);
    ASSERT_EQ(a.p.size(), b.p.size());
    for (std::size_t k = 0; k < a.p.size(); ++k) EXPECT_NEAR(a.p[k], b.p[k], 1e-7);
    for (double res : r.unitarity_residuals) EXPECT_LT(res, 1e-8);
    EXPECT_LE(r.size, kSqueezeSizeConstant * std::max<std::size_t>(r.decomposition.s_j, 1));
    squeezed += r.squeezed > 0;
  }
  EXPECT_GT(squeezed, 10);
}

TEST(SqueezeFormula, StructureIndependentOfTau) {
  Rng rng(53);
  for (int t = 0; t < 20; ++t) {
    FormulaShape shape;
    shape.max_gates = 10;
    shape.num_vars = 3;
    const Circuit f = random_formula(shape, rng);
    const int n = f.num_vars();
    if (n < 2) continue;
    const std::vector<int> block = {0};
    const std::size_t outside = static_cast<std::size_t>(n - 1);
    const SqueezeReport base = squeeze_formula(f, block, std::vector<std::uint8_t>(outside, 0));
    for (std::uint64_t r = 1; r < (std::uint64_t{1} << outside); ++r) {
      std::vector<std::uint8_t> tau(outside);
      for (std::size_t k = 0; k < outside; ++k) tau[k] = (r >> k) & 1;
      EXPECT_TRUE(same_outside_squeezed(base.circuit, squeeze_formula(f, block, tau).circuit));
    }
  }
}

TEST(SqueezeFormula, ED4EveryBlock) {
  const Circuit ed = load_circuit(data("ed4.json"));
  for (int j = 0; j < 4; ++j) {
    const std::vector<int> block = {4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3};
    std::vector<std::uint8_t> tau(12);
    // The other three strings set to distinct values 1, 2, 3.
    for (int s = 0, k = 0; s < 3; ++s)
      for (int b = 0; b < 4; ++b) tau[k++] = static_cast<std::uint8_t>(((s + 1) >> (3 - b)) & 1);
    const SqueezeReport r = squeeze_formula(ed, block, tau);
    EXPECT_EQ(r.decomposition.s_j, 12u);
    EXPECT_LE(r.size, kSqueezeSizeConstant * r.decomposition.s_j);
    const TruthTable a = truthtable(substitute(ed, block, tau));
    const TruthTable b = truthtable(r.circuit);
    for (std::size_t k = 0; k < 16; ++k) {
      EXPECT_NEAR(a.p[k], b.p[k], 1e-7);
      EXPECT_EQ(a.value[k], k == 0 || k >= 4 ? 1 : 0) << "block " << j << " row " << k;
    }
  }
}

}  // namespace
}  // namespace qf
