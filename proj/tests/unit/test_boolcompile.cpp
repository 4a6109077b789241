#include <gtest/gtest.h>

#include <cmath>

#include "qf/approx.hpp"
#include "qf/boolcompile.hpp"
#include "qf/circuit_json.hpp"
#include "qf/corpus.hpp"
#include "qf/simulator.hpp"
#include "support/fixed_point_oracle.hpp"

namespace qf {
namespace {

Circuit one_wire(const char* gate, InputLabel in) {
  Circuit c;
  c.wires = 1;
  c.inputs = {in};
  if (gate) c.gates = {make_gate(gate, {0}, 0)};
  return c;
}

// Random formula with at most `gates` tree gates of arity <= 2.
Circuit small_formula(int gates, Rng& rng) {
  FormulaShape shape;
  shape.max_gates = gates;
  shape.num_vars = 4;
  return random_formula(shape, rng);
}

TEST(Compile, NotGateOnVariable) {
  const Netlist n = compile_formula(one_wire("X", InputLabel::var(0)), 8);
  EXPECT_EQ(n.width, 16);
  EXPECT_EQ(eval_netlist(n, Assignment::parse("0")).word, 256);
  EXPECT_EQ(eval_netlist(n, Assignment::parse("1")).word, 0);
}

TEST(Compile, HadamardOnZero) {
  const Netlist n = compile_formula(one_wire("H", InputLabel::constant(false)), 8);
  EXPECT_NEAR(eval_netlist(n, Assignment{}).p, 0.5, std::ldexp(1.0, -8));
}

TEST(Compile, EmptyFormulaIsWiring) {
  const Netlist n = compile_formula(one_wire(nullptr, InputLabel::var(0)), 8);
  EXPECT_EQ(netlist_stats(n).size, 0u);
  EXPECT_EQ(eval_netlist(n, Assignment::parse("1")).word, 256);
  const Netlist k = compile_formula(one_wire(nullptr, InputLabel::constant(true)), 8);
  EXPECT_EQ(eval_netlist(k, Assignment{}).word, 256);
}

TEST(Compile, MatchesOracleAndSimulator) {
  Rng rng(70);
  const int mu = 16;
  for (int t = 0; t < 25; ++t) {
    const Circuit f = small_formula(8, rng);
    const Netlist n = compile_formula(f, mu);
    const FormulaTree tree = extract_tree(f);
    const oracle::FixedPoint fp(mu, n.width);
    const auto all = eval_netlist_all(n);
    const int vars = f.num_vars();
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << vars); ++r) {
      const Assignment a = Assignment::from_index(r, vars);
      EXPECT_EQ(all[r].word, fp.run(tree, a)) << "formula " << t << " row " << r;
      EXPECT_EQ(eval_netlist(n, a).word, all[r].word);
      const double p = formula_run(f, a).p;
      EXPECT_LE(std::abs(all[r].p - p), std::ldexp(1.0, -8));
      const double budget = circuit_error_bound(static_cast<int>(tree.max_arity()),
                                                truncation_delta(mu), tree.size()) +
                            tree.size() * std::ldexp(1.0, -mu + 6);
      EXPECT_LE(std::abs(all[r].p - p), budget);
    }
  }
}

TEST(Compile, ThreeQubitGates) {
  Rng rng(71);
  FormulaShape shape;
  shape.max_gates = 4;
  shape.max_arity = 3;
  shape.num_vars = 3;
  for (int t = 0; t < 5; ++t) {
    const Circuit f = random_formula(shape, rng);
    const Netlist n = compile_formula(f, 12);
    const FormulaTree tree = extract_tree(f);
    const oracle::FixedPoint fp(12, n.width);
    const auto all = eval_netlist_all(n);
    for (std::uint64_t r = 0; r < all.size(); ++r) {
      EXPECT_EQ(all[r].word, fp.run(tree, Assignment::from_index(r, f.num_vars())));
    }
  }
}

TEST(Compile, Deterministic) {
  Rng a(72), b(72);
  const Netlist x = compile_formula(small_formula(6, a), 10);
  const Netlist y = compile_formula(small_formula(6, b), 10);
  EXPECT_EQ(netlist_to_json(x).dump(), netlist_to_json(y).dump());
}

TEST(Compile, NarrowWidthIsARangeError) {
  Rng rng(73);
  const Circuit f = small_formula(6, rng);
  try {
    compile_formula(f, 10, CompileOptions{1});
    FAIL() << "expected a range error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Range);
    EXPECT_NE(std::string(e.what()).find("width"), std::string::npos);
  }
  EXPECT_THROW(compile_formula(load_circuit(std::string(QF_DATA_DIR) + "/sample_top.json"), 8),
               NotFormulaError);
}

TEST(Netlist, JsonRoundTrip) {
  Rng rng(74);
  const Circuit f = small_formula(5, rng);
  const Netlist n = compile_formula(f, 8);
  const nlohmann::ordered_json doc = netlist_to_json(n);
  for (const char* key : {"inputs", "gates", "outputs", "meta"}) EXPECT_TRUE(doc.contains(key));
  EXPECT_EQ(doc["meta"]["mu"], 8);
  EXPECT_EQ(doc["meta"]["W"], 16);
  EXPECT_EQ(doc["meta"]["size"], netlist_stats(n).size);
  const Netlist back = netlist_from_json(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(netlist_to_json(back).dump(), doc.dump());
  const auto a = eval_netlist_all(n);
  const auto b = eval_netlist_all(back);
  for (std::size_t r = 0; r < a.size(); ++r) EXPECT_EQ(a[r].word, b[r].word);
}

TEST(Netlist, ConstantWord) {
  NetlistBuilder b;
  const Netlist n = b.finish(b.constant(-3, 8), 2);
  EXPECT_EQ(eval_netlist(n, Assignment{}).word, -3);
  EXPECT_DOUBLE_EQ(eval_netlist(n, Assignment{}).p, -0.75);
  EXPECT_EQ(netlist_stats(n).size, 0u);
}

TEST(Netlist, WordArithmetic) {
  NetlistBuilder b;
  Word x;
  for (int i = 0; i < 6; ++i) x.push_back(b.input());
  const Word y = b.constant(5, 6);
  const Netlist n = b.finish(b.sub(b.add(x, x), y), 0);
  for (std::uint64_t r = 0; r < 64; ++r) {
    Assignment a;
    // Inputs are LSB first in the word.
    for (int i = 0; i < 6; ++i) a.bits.push_back(static_cast<std::uint8_t>((r >> i) & 1));
    std::int64_t v = static_cast<std::int64_t>(r);
    if (v >= 32) v -= 64;
    std::int64_t expect = ((2 * v - 5) % 64 + 64) % 64;
    if (expect >= 32) expect -= 64;
    EXPECT_EQ(eval_netlist(n, a).word, expect);
  }
}

TEST(Stats, BreakdownSumsToSize) {
  Rng rng(75);
  const Netlist n = compile_formula(small_formula(4, rng), 8);
  const NetlistStats s = netlist_stats(n);
  std::size_t sum = 0;
  for (const auto& [name, count] : s.breakdown) sum += count;
  EXPECT_EQ(sum, s.size);
  EXPECT_GT(s.depth, 0u);
}

TEST(Stats, SizeScaling) {
  // A chain of g random two-qubit gates, each taking a fresh variable.
  auto chain = [](int g, Rng& rng) {
    Circuit c;
    c.wires = g + 1;
    for (int w = 0; w <= g; ++w) c.inputs.push_back(InputLabel::var(w));
    for (int k = 0; k < g; ++k) c.gates.push_back(make_gate(haar_unitary(4, rng), {k, k + 1}, k));
    c.output = g;
    return c;
  };
  Rng rng(76);
  const Circuit eight = chain(8, rng);
  const Circuit sixteen = chain(16, rng);
  const double mu16 = static_cast<double>(netlist_stats(compile_formula(eight, 16)).size);
  const double mu32 = static_cast<double>(netlist_stats(compile_formula(eight, 32)).size);
  const double twice = static_cast<double>(netlist_stats(compile_formula(sixteen, 16)).size);
  // Doubling mu: multipliers dominate, about 4x.
  EXPECT_GT(mu32 / mu16, 3.0);
  EXPECT_LT(mu32 / mu16, 5.0);
  // Doubling the gate count: about 2x.
  EXPECT_GT(twice / mu16, 1.7);
  EXPECT_LT(twice / mu16, 2.3);
}

TEST(Stats, DepthGrowsWithFormulaDepth) {
  Rng rng(77);
  auto depth_of = [&](int g) {
    Circuit c;
    c.wires = 1;
    c.inputs = {InputLabel::var(0)};
    for (int k = 0; k < g; ++k) c.gates.push_back(make_gate(haar_unitary(2, rng), {0}, k));
    return static_cast<double>(netlist_stats(compile_formula(c, 10)).depth);
  };
  const double d2 = depth_of(2), d4 = depth_of(4), d8 = depth_of(8);
  EXPECT_GT(d4, d2);
  EXPECT_GT(d8, d4);
  EXPECT_NEAR((d8 - d4) / (d4 - d2), 2.0, 0.3);
}

}  // namespace
}  // namespace qf
