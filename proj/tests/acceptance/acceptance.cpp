// One line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "qf/approx.hpp"
#include "qf/boolcompile.hpp"
#include "qf/bounds.hpp"
#include "qf/channel.hpp"
#include "qf/circuit_json.hpp"
#include "qf/corpus.hpp"
#include "qf/rewrite.hpp"
#include "qf/simulator.hpp"
#include "support/fixed_point_oracle.hpp"

using namespace qf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome c1_simulators() {
  Rng rng(1001);
  double worst = 0;
  std::size_t rows = 0;
  FormulaShape shape;
  for (int t = 0; t < 200; ++t) {
    const Circuit f = random_formula(shape, rng);
    const int n = f.num_vars();
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
      const Assignment a = Assignment::from_index(r, n);
      worst = std::max(worst, std::abs(formula_run(f, a).p - statevector_run(f, a)));
      ++rows;
    }
  }
  return {worst <= 1e-9, fmt("200 formulas, %zu assignments, max |dp| = %.3e", rows, worst)};
}

bool has_long_path(const Circuit& f) {
  const int n = f.num_vars();
  for (int v = 0; v < n; ++v) {
    const std::vector<int> block = {v};
    const PathDecomposition d =
        decompose_paths(f, block, std::vector<std::uint8_t>(static_cast<std::size_t>(n - 1), 0));
    for (const auto& seg : d.segments)
      if (seg.squeezable()) return true;
  }
  return false;
}

Outcome c2_squeeze() {
  Rng rng(1002);
  FormulaShape shape;
  shape.num_vars = 3;
  shape.max_gates = 14;
  int formulas = 0, cases = 0, squeezed = 0;
  double worst = 0, worst_unitary = 0, worst_ratio = 0;
  bool size_ok = true;
  while (formulas < 50) {
    const Circuit f = random_formula(shape, rng);
    const int n = f.num_vars();
    if (n < 1 || !has_long_path(f)) continue;
    ++formulas;
    for (int v = 0; v < n; ++v) {
      const std::vector<int> block = {v};
      const std::size_t outside = static_cast<std::size_t>(n - 1);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << outside); ++bits) {
        std::vector<std::uint8_t> tau(outside);
        for (std::size_t k = 0; k < outside; ++k) tau[k] = (bits >> (outside - 1 - k)) & 1;
        const SqueezeReport rep = squeeze_formula(f, block, tau);
        const TruthTable a = truthtable(substitute(f, block, tau));
        const TruthTable b = truthtable(rep.circuit);
        for (std::size_t k = 0; k < a.p.size(); ++k) worst = std::max(worst, std::abs(a.p[k] - b.p[k]));
        for (double r : rep.unitarity_residuals) worst_unitary = std::max(worst_unitary, r);
        const std::size_t sj = std::max<std::size_t>(rep.decomposition.s_j, 1);
        worst_ratio = std::max(worst_ratio, static_cast<double>(rep.size) / static_cast<double>(sj));
        if (rep.size > kSqueezeSizeConstant * sj) size_ok = false;
        squeezed += rep.squeezed;
        ++cases;
      }
    }
  }
  const bool pass = worst <= 1e-7 && worst_unitary <= 1e-8 && size_ok;
  return {pass, fmt("%d formulas, %d block/tau cases, %d squeezes, max |dp| = %.3e, max unitarity "
                    "residual = %.3e, K = %zu, max size/s_j = %.2f",
                    formulas, cases, squeezed, worst, worst_unitary, kSqueezeSizeConstant,
                    worst_ratio)};
}

Outcome c3_truncation() {
  Rng rng(1003);
  int violations = 0;
  double worst_ratio = 0;
  for (int t = 0; t < 100; ++t) {
    const Circuit f = random_formula(FormulaShape{}, rng);
    const std::size_t s = extract_tree(f).size();
    for (int mu : {8, 12, 16}) {
      const TruncationReport r = verify_truncation(f, mu);
      const double bound = circuit_error_bound(2, truncation_delta(mu), static_cast<double>(s));
      if (!(r.measured_trace_dist <= bound && r.measured_p_dev <= bound)) ++violations;
      if (bound > 0) worst_ratio = std::max(worst_ratio, r.measured_trace_dist / bound);
    }
  }
  return {violations == 0,
          fmt("100 formulas x mu {8,12,16}, violations = %d, max measured/bound = %.3e",
              violations, worst_ratio)};
}

Outcome c4_dilation() {
  Rng rng(1004);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t din = t % 2 ? 2 : 4;
    const std::size_t dout = t % 3 ? 2 : 4;
    const std::size_t count = std::max<std::size_t>(din / dout, 1) + static_cast<std::size_t>(t % 4);
    const SuperOp op = SuperOp::from_kraus(random_kraus(din, dout, count, rng));
    const Dilation d = stinespring_dilation(op);
    for (int k = 0; k < 50; ++k) {
      const CMatrix rho = random_density(din, rng);
      worst = std::max(worst, max_abs_diff(d.apply(rho), op.apply(rho)));
    }
  }
  return {worst <= 1e-8, fmt("50 channels x 50 states, max entrywise error = %.3e", worst)};
}

Outcome c5_norms() {
  Rng rng(1005);
  int bad = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(t % 8);
    const NormReport n = norms(ginibre(m, m, rng));
    const double md = static_cast<double>(m);
    // Relative slack of 1e-12 absorbs the rounding in the singular values.
    if (!(n.m_norm / md <= n.op_norm * (1 + 1e-12))) ++bad;
    if (!(n.op_norm <= n.m_norm * (1 + 1e-12))) ++bad;
    if (!(n.trace_norm <= md * n.op_norm * (1 + 1e-12))) ++bad;
  }
  double worst_gap = -1e300;
  for (int t = 0; t < 100; ++t) {
    const std::size_t dim = t % 2 ? 2 : 4;
    const CMatrix v = haar_unitary(dim, rng);
    const CMatrix w = t % 3 == 0 ? haar_unitary(dim, rng) : truncate_gate(v, 4 + t % 8);
    const double lb = diamond_lower_bound(SuperOp::conjugation(v), SuperOp::conjugation(w), 200,
                                          static_cast<std::uint64_t>(t))
                          .value;
    const double rhs = ov_ow_bound(v, w);
    worst_gap = std::max(worst_gap, lb - rhs);
    if (!(lb <= rhs + 1e-9)) ++bad;
  }
  double lo = 1e300, hi = 0;
  for (int t = 0; t < 50; ++t) {
    const CMatrix u = haar_unitary(t % 2 ? 4 : 8, rng);
    const double r = star_ratio_sample(gate_superop(u, static_cast<std::size_t>(t % 2)), 200,
                                       static_cast<std::uint64_t>(t));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    if (!(r >= 1 - 1e-9 && r <= 1 + 1e-8)) ++bad;
  }
  return {bad == 0, fmt("500 matrices, 100 pairs (max LB - RHS = %.3e), 50 gate maps with star "
                        "ratio in [%.12f, %.12f], failures = %d",
                        worst_gap, lo, hi, bad)};
}

Outcome c6_nechiporuk() {
  const std::uint64_t s2 = subfunction_count(ed_function(2), PartitionSpec::ed(2), 0).sigma;
  const std::uint64_t s4 = subfunction_count(ed_function(4), PartitionSpec::ed(4), 0).sigma;
  const TruthTable maj = truthtable(load_circuit(std::string(QF_DATA_DIR) + "/maj3.json"));
  const std::uint64_t sm =
      subfunction_count(function_from_truthtable(maj), PartitionSpec{{{0}, {1, 2}}}, 0).sigma;
  const bool ineq = s2 >= std::stoull(ed_sigma_lower(2).binom) &&
                    s4 >= std::stoull(ed_sigma_lower(4).binom);
  const double total = nechiporuk_bound({s4, s4, s4, s4}).total;
  const bool pass = s2 == 4 && s4 == 561 && sm == 3 && ineq && std::abs(total - 11.447) <= 1e-3;
  return {pass, fmt("sigma(ED2) = %llu, sigma(ED4) = %llu, sigma(MAJ3) = %llu, total = %.6f",
                    static_cast<unsigned long long>(s2), static_cast<unsigned long long>(s4),
                    static_cast<unsigned long long>(sm), total)};
}

Outcome c7_boolcompile() {
  Rng rng(1007);
  FormulaShape shape;
  shape.max_gates = 8;
  const int mu = 16;
  double worst = 0;
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const Circuit f = random_formula(shape, rng);
    const Netlist n = compile_formula(f, mu);
    const FormulaTree tree = extract_tree(f);
    const oracle::FixedPoint fp(mu, n.width);
    const auto all = eval_netlist_all(n);
    for (std::uint64_t r = 0; r < all.size(); ++r) {
      const Assignment a = Assignment::from_index(r, f.num_vars());
      worst = std::max(worst, std::abs(all[r].p - formula_run(f, a).p));
      if (all[r].word != fp.run(tree, a)) ++mismatches;
    }
  }
  // Size as mu doubles at a fixed formula, against the W^2 and W*mu models.
  Rng grng(1077);
  Circuit chain;
  chain.wires = 5;
  for (int w = 0; w < 5; ++w) chain.inputs.push_back(InputLabel::var(w));
  for (int k = 0; k < 4; ++k) chain.gates.push_back(make_gate(haar_unitary(4, grng), {k, k + 1}, k));
  chain.output = 4;
  const double a = static_cast<double>(netlist_stats(compile_formula(chain, 16)).size);
  const double b = static_cast<double>(netlist_stats(compile_formula(chain, 32)).size);
  const double w2 = (40.0 * 40.0) / (24.0 * 24.0);
  const double wmu = (40.0 * 32.0) / (24.0 * 16.0);
  const bool pass = worst <= std::ldexp(1.0, -8) && mismatches == 0;
  return {pass, fmt("50 formulas, max |p_hat - p| = %.3e, oracle mismatches = %d, "
                    "size(mu=32)/size(mu=16) = %.2f vs W^2 model %.2f and W*mu model %.2f",
                    worst, mismatches, b / a, w2, wmu)};
}

Outcome c8_counting() {
  struct W {
    double d, m, t, expect;
  };
  const W ws[] = {{1, 1, 1, 3.442695040888963},
                  {3, 10, 4, 25.39834254598993},
                  {8, 1024, 16, 199.0831206542234}};
  struct A {
    int n, N, d;
    double total;
  };
  const A as[] = {{4, 4, 2, 230.16624130844682904},
                  {3, 10, 2, 521.85416516886431955},
                  {8, 64, 3, 12138.54388558100399}};
  double worst = 0;
  bool identity = true;
  for (const W& w : ws)
    worst = std::max(worst, std::abs(warren_count(w.d, w.m, w.t) - w.expect) / w.expect);
  for (const A& a : as) {
    const AppendixCount c = appendix_count(a.n, a.N, a.d);
    worst = std::max(worst, std::abs(c.log2_total - a.total) / a.total);
    if (c.log2_signs != warren_count(2.0 * a.N, std::ldexp(1.0, a.n + 1), 2 * c.mu)) identity = false;
  }
  return {worst <= 1e-9 && identity,
          fmt("max relative error = %.3e, sign factor identity %s", worst,
              identity ? "exact" : "broken")};
}

}  // namespace

int main() {
  struct Entry {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
    double limit;  // seconds, 0 for none
  };
  const Entry entries[] = {
      {"C1", "simulator equivalence", c1_simulators, 60},
      {"C2", "squeezing soundness", c2_squeeze, 0},
      {"C3", "truncation bound", c3_truncation, 0},
      {"C4", "dilation", c4_dilation, 0},
      {"C5", "norm properties", c5_norms, 0},
      {"C6", "nechiporuk arithmetic", c6_nechiporuk, 10},
      {"C7", "boolean compilation", c7_boolcompile, 0},
      {"C8", "counting bounds", c8_counting, 0},
  };
  int failures = 0;
  for (const Entry& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (e.limit > 0 && secs > e.limit) {
      out.pass = false;
      out.detail += fmt(" (over the %.0f s limit)", e.limit);
    }
    failures += !out.pass;
    std::printf("[%s] %s %s: %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", e.id, e.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures;
}
