#pragma once

// Gate truncation and the error functional bounding how far a formula built
// from delta-close gates can drift in trace norm.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qf/channel.hpp"
#include "qf/circuit.hpp"

namespace qf {

// Real and imaginary parts truncated toward zero to mu fractional bits.
CMatrix truncate_gate(const CMatrix& u, int mu);

// Entrywise closeness of a mu-bit truncation: sqrt(2) * 2^-mu.
double truncation_delta(int mu);

// 2^(2d+1) * delta * (1 + 2^d * delta)
double eta(int d, double delta);

// e^(eta(d, delta) * s) - 1
double circuit_error_bound(int d, double delta, double s);

// Smallest mu with circuit_error_bound(d, truncation_delta(mu), ell) <= eps.
int bound_driven_mu(int d, double ell, double eps);
// ceil(log2 ell - log2 eps)
int formula_mu(double ell, double eps);

struct TruncationReport {
  int mu = 0;
  double delta = 0;
  double eta = 0;
  int d = 0;           // largest gate arity in the formula
  std::size_t s = 0;   // gates in the formula
  double bound = 0;
  double measured_trace_dist = 0;  // max over assignments
  double measured_p_dev = 0;       // max over assignments
  bool pass = false;
};

// Exact against truncated-gate propagation on every assignment.
TruncationReport verify_truncation(const Circuit& f, int mu);

// 2m ||V-W|| min(||V||, ||W||) + m ||V-W||^2, operator norms.
double ov_ow_bound(const CMatrix& v, const CMatrix& w);

struct DiamondEstimate {
  double value = 0;
  CMatrix witness;  // input A on system (x) ancilla achieving value
};

// Lower bound on ||T - R||_diamond by maximizing ||((T-R) (x) I) A||_Tr / ||A||_Tr
// over candidate inputs A with an ancilla as large as the input system.
// Candidates: projectors onto basis product states, the maximally entangled
// state, the extra candidates given, random pure states and random Hermitian
// matrices.
DiamondEstimate diamond_lower_bound(const SuperOp& t, const SuperOp& r, std::size_t trials,
                                    std::uint64_t seed = 0,
                                    std::span<const CMatrix> extra = {});

// Sampled sup ||T(A)||_Tr / ||A||_Tr over random Hermitian A, without an ancilla.
double star_ratio_sample(const SuperOp& t, std::size_t trials, std::uint64_t seed = 0);

}  // namespace qf
