#pragma once

// Seeded random objects for tests, benchmarks and the acceptance runs.

#include <cstdint>
#include <random>
#include <vector>

#include "qf/circuit.hpp"
#include "qf/linalg.hpp"

namespace qf {

using Rng = std::mt19937_64;

// Entries with independent standard normal real and imaginary parts.
CMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng);
// Haar measure, from the QR factorization of a Ginibre matrix with the
// phases of R's diagonal moved into Q.
CMatrix haar_unitary(std::size_t dim, Rng& rng);
// G G^dag / Tr(G G^dag) for a square Ginibre G.
CMatrix random_density(std::size_t dim, Rng& rng);
// count Ginibre operators K_k rescaled by S^(-1/2), S = sum K_k^dag K_k, so
// the set is trace preserving. Needs count * dim_out >= dim_in.
std::vector<CMatrix> random_kraus(std::size_t dim_in, std::size_t dim_out, std::size_t count,
                                  Rng& rng);

struct FormulaShape {
  int min_gates = 1;
  int max_gates = 20;
  int max_wires = 12;
  int max_arity = 2;
  int num_vars = 4;
  double named_fraction = 0.3;  // chance a gate is a named one of its arity
  double const_fraction = 0.2;  // chance a leaf is a constant
  double dead_fraction = 0.2;   // dead gates per live gate, on discarded wires
};

// A random formula: a random tree laid out in a random topological order on
// randomly permuted wires, with dead gates acting on discarded values.
Circuit random_formula(const FormulaShape& shape, Rng& rng);

// Gates on random target sets, no formula structure.
Circuit random_circuit(int wires, int gates, int max_arity, int num_vars, Rng& rng);

}  // namespace qf
