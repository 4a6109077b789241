#pragma once

// Compiles a formula into a netlist computing its acceptance probability in
// W-bit two's complement with mu fractional bits.
//
// Arithmetic, shared bit-for-bit with any reference interpreter:
//   mul(a, b)   = floor((a*b + 2^(mu-1)) / 2^mu) mod 2^W   (both variable)
//   kmul(a, k)  = floor((a*k + 2^(mu-1)) / 2^mu) mod 2^W   (k = round-to-zero
//                 of the gate entry times 2^mu)
//   add, sub    modulo 2^W
//   complex products expand as (ar br - ai bi, ar bi + ai br), each real
//   product rounded on its own.
// Per tree gate with children densities R_0..R_{d-1} (2x2) and constants V:
//   1. rho[i][j] for i <= j: the product R_0[i_0][j_0] * ... * R_{d-1}, chained
//      left to right; diagonal imaginary parts are zero; the lower triangle is
//      the conjugate of the upper one.
//   2. T[i][y] = sum_j rho[i][j] * conj(V[y][j]), j ascending.
//   3. P[x][y] = sum_i V[x][i] * T[i][y], only for x = (a, r), y = (b, r) with
//      (a, b) in {00, 01, 11}, where a sits at the kept slot.
//   4. out[a][b] = sum_r P[(a,r)][(b,r)], r ascending; out[0][0], out[1][1]
//      have zero imaginary part and out[1][0] = conj(out[0][1]).
// The output word is Re out_root[1][1].

#include <cstdint>
#include <vector>

#include "qf/circuit.hpp"
#include "qf/formula_tree.hpp"
#include "qf/netlist.hpp"
#include "qf/simulator.hpp"

namespace qf {

struct FixedPointFormat {
  int mu = 16;
  int width = 24;

  static FixedPointFormat for_mu(int mu, int extra = 8) { return {mu, mu + extra}; }
  int guard_bits() const noexcept { return width - mu - 1; }
};

struct CompileOptions {
  int extra_width = 8;  // W = mu + extra_width
};

// Largest magnitude any intermediate can reach, by interval arithmetic on the
// truncated constants and the end-to-end error budget of each subtree.
double range_requirement(const FormulaTree& tree, int mu);

// Throws NotFormulaError, PreconditionError on arity above the default limit,
// or Error(Range) with a suggested width when W is too narrow.
Netlist compile_formula(const Circuit& f, int mu, const CompileOptions& options = {});

struct NetlistValue {
  std::int64_t word = 0;  // signed
  double p = 0;           // word / 2^mu
};

NetlistValue eval_netlist(const Netlist& n, const Assignment& a);
// All 2^n assignments in Assignment::from_index order.
std::vector<NetlistValue> eval_netlist_all(const Netlist& n);

}  // namespace qf
