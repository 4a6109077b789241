#pragma once

// Lower-bound and counting arithmetic: element distinctness, subfunction
// counts over a variable partition, the Nechiporuk sum, and the Warren-style
// sign-assignment counts. All logarithms are base 2.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qf/simulator.hpp"

namespace qf {

// A total Boolean function of n variables. The argument is a row index in
// Assignment::from_index order, so x_0 is its most significant bit.
struct BooleanFunction {
  int n = 0;
  std::function<bool(std::uint64_t)> eval;
};

// ell strings of 2*log2(ell) bits each, string j on x_{jb} .. x_{jb+b-1}
// (first bit most significant). Accepts when the strings are pairwise
// distinct. ell must be 2, 4, 8 or 16.
BooleanFunction ed_function(int ell);

// Throws PreconditionError when some row is ambiguous.
BooleanFunction function_from_truthtable(const TruthTable& t);

struct PartitionSpec {
  std::vector<std::vector<int>> blocks;

  // Throws PreconditionError unless the blocks are nonempty, disjoint and
  // cover x_0 .. x_{n-1}.
  void validate(int n) const;
  // One block per string of ed_function(ell).
  static PartitionSpec ed(int ell);
};

enum class CountMode { Exhaustive, Sampled };

struct SubfunctionCount {
  std::uint64_t sigma = 0;
  bool exact = true;  // false for sampled counts, which are lower bounds
  std::uint64_t assignments = 0;  // settings of the outside variables tried
};

inline constexpr int kExhaustiveMaxOutside = 24;
inline constexpr int kExhaustiveMaxBlock = 16;

// Distinct truth tables on block j over settings of the variables outside it.
// Exhaustive mode throws BudgetError past the limits above.
SubfunctionCount subfunction_count(const BooleanFunction& f, const PartitionSpec& partition,
                                   std::size_t j, CountMode mode = CountMode::Exhaustive,
                                   std::uint64_t samples = 4096, std::uint64_t seed = 0,
                                   int threads = 1);

struct EdSigmaLower {
  int ell = 0;
  bool exact = true;       // false when the binomial came from lgamma
  std::string binom;       // C(ell^2, ell-1) in decimal, empty when inexact
  std::string power;       // ell^(ell-1) in decimal, empty when inexact
  double log2_binom = 0;
  double log2_power = 0;
  bool strict = false;     // binom > power
};

EdSigmaLower ed_sigma_lower(int ell);

struct NechiporukBlock {
  std::uint64_t sigma = 0;
  bool exact = true;
  double term = 0;  // log2 sigma / log2 log2 sigma, 0 when skipped
  bool skipped = false;
};

struct NechiporukReport {
  std::vector<NechiporukBlock> blocks;
  std::vector<std::size_t> skipped;  // blocks with sigma < 4
  double total = 0;
};

// exact[j] defaults to true when the vector is shorter than sigmas.
NechiporukReport nechiporuk_bound(const std::vector<std::uint64_t>& sigmas,
                                  const std::vector<bool>& exact = {});

// t * log2(4 e d m / t)
double warren_count(double d, double m, double t);

struct AppendixCount {
  int n = 0;
  int N = 0;
  int d = 0;
  double mu = 0;            // d^2 N
  double log2_classes = 0;  // dN log2(dN)
  double log2_signs = 0;    // warren_count(2N, 2^(n+1), 2 mu)
  double log2_total = 0;
  bool hypothesis_ok = true;  // n <= N
  std::string warning;
};

AppendixCount appendix_count(int n, int N, int d);

}  // namespace qf
