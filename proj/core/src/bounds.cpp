#include "qf/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <thread>

#include "qf/error.hpp"

namespace qf {

namespace {

__extension__ typedef unsigned __int128 u128;

std::string to_decimal(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

double log2_u128(u128 v) {
  return std::log2(static_cast<double>(static_cast<std::uint64_t>(v >> 64)) * 0x1p64 +
                   static_cast<double>(static_cast<std::uint64_t>(v)));
}

using Table = std::vector<std::uint64_t>;

}  // namespace

BooleanFunction ed_function(int ell) {
  if (ell < 2 || ell > 16 || !std::has_single_bit(static_cast<unsigned>(ell))) {
    throw PreconditionError("ed_function needs ell in {2, 4, 8, 16}, got " + std::to_string(ell));
  }
  const int b = 2 * std::countr_zero(static_cast<unsigned>(ell));
  const int n = ell * b;
  if (n > 64) throw BudgetError("ed_function: " + std::to_string(n) + " variables exceed 64");
  BooleanFunction f;
  f.n = n;
  f.eval = [ell, b, n](std::uint64_t r) {
    std::vector<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(ell));
    const std::uint64_t mask = (std::uint64_t{1} << b) - 1;
    for (int j = 0; j < ell; ++j) {
      const std::uint64_t z = (r >> (n - (j + 1) * b)) & mask;
      if (std::find(seen.begin(), seen.end(), z) != seen.end()) return false;
      seen.push_back(z);
    }
    return true;
  };
  return f;
}

BooleanFunction function_from_truthtable(const TruthTable& t) {
  if (!t.is_total()) throw PreconditionError("truth table has ambiguous rows");
  auto values = std::make_shared<std::vector<std::int8_t>>(t.value);
  return {t.n, [values](std::uint64_t r) { return (*values)[r] == 1; }};
}

void PartitionSpec::validate(int n) const {
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].empty()) throw PreconditionError("partition block " + std::to_string(j) + " is empty");
    for (int v : blocks[j]) {
      if (v < 0 || v >= n) throw PreconditionError("partition variable x" + std::to_string(v) + " out of range");
      if (owner[v] != -1) throw PreconditionError("partition blocks overlap at x" + std::to_string(v));
      owner[v] = static_cast<int>(j);
    }
  }
  for (int v = 0; v < n; ++v) {
    if (owner[v] == -1) throw PreconditionError("partition misses x" + std::to_string(v));
  }
}

PartitionSpec PartitionSpec::ed(int ell) {
  const BooleanFunction f = ed_function(ell);
  const int b = f.n / ell;
  PartitionSpec p;
  for (int j = 0; j < ell; ++j) {
    std::vector<int> block;
    for (int k = 0; k < b; ++k) block.push_back(j * b + k);
    p.blocks.push_back(std::move(block));
  }
  return p;
}

SubfunctionCount subfunction_count(const BooleanFunction& f, const PartitionSpec& partition,
                                   std::size_t j, CountMode mode, std::uint64_t samples,
                                   std::uint64_t seed, int threads) {
  partition.validate(f.n);
  if (j >= partition.blocks.size()) throw PreconditionError("no partition block " + std::to_string(j));
  std::vector<int> inside = partition.blocks[j];
  std::sort(inside.begin(), inside.end());
  std::vector<int> outside;
  for (int v = 0; v < f.n; ++v) {
    if (!std::binary_search(inside.begin(), inside.end(), v)) outside.push_back(v);
  }
  const int nj = static_cast<int>(inside.size());
  const int no = static_cast<int>(outside.size());
  if (nj > kExhaustiveMaxBlock) {
    throw BudgetError("block of " + std::to_string(nj) + " variables exceeds " +
                      std::to_string(kExhaustiveMaxBlock));
  }
  if (mode == CountMode::Exhaustive && no > kExhaustiveMaxOutside) {
    throw BudgetError(std::to_string(no) + " outside variables exceed the exhaustive limit of " +
                      std::to_string(kExhaustiveMaxOutside) + "; use sampled mode");
  }

  // Spread a packed value over the given variables, first variable most
  // significant, as bits of a row index.
  auto scatter = [n = f.n](std::uint64_t value, const std::vector<int>& vars) {
    std::uint64_t r = 0;
    const int k = static_cast<int>(vars.size());
    for (int i = 0; i < k; ++i) {
      if ((value >> (k - 1 - i)) & 1) r |= std::uint64_t{1} << (n - 1 - vars[i]);
    }
    return r;
  };
  const std::uint64_t rows = std::uint64_t{1} << nj;
  std::vector<std::uint64_t> inside_rows(rows);
  for (std::uint64_t u = 0; u < rows; ++u) inside_rows[u] = scatter(u, inside);
  auto table_for = [&](std::uint64_t tau) {
    const std::uint64_t base = scatter(tau, outside);
    Table t((rows + 63) / 64, 0);
    for (std::uint64_t u = 0; u < rows; ++u) {
      if (f.eval(base | inside_rows[u])) t[u / 64] |= std::uint64_t{1} << (u % 64);
    }
    return t;
  };

  std::vector<std::uint64_t> taus;
  SubfunctionCount out;
  if (mode == CountMode::Exhaustive) {
    out.assignments = std::uint64_t{1} << no;
  } else {
    out.exact = false;
    out.assignments = samples;
    std::mt19937_64 rng(seed);
    taus.resize(samples);
    const std::uint64_t mask = no >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << no) - 1;
    for (auto& t : taus) t = rng() & mask;
  }
  auto tau_at = [&](std::uint64_t k) { return mode == CountMode::Exhaustive ? k : taus[k]; };

  const int workers = std::max(1, threads);
  std::vector<std::set<Table>> found(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    const std::uint64_t lo = out.assignments * w / workers;
    const std::uint64_t hi = out.assignments * (w + 1) / workers;
    for (std::uint64_t k = lo; k < hi; ++k) found[w].insert(table_for(tau_at(k)));
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (int w = 1; w < workers; ++w) found[0].merge(found[w]);
  out.sigma = found[0].size();
  return out;
}

EdSigmaLower ed_sigma_lower(int ell) {
  if (ell < 2) throw PreconditionError("ed_sigma_lower needs ell >= 2");
  EdSigmaLower r;
  r.ell = ell;
  const int top = ell * ell;
  const int k = ell - 1;
  if (ell <= 16) {
    u128 c = 1;
    for (int i = 0; i < k; ++i) c = c * static_cast<u128>(top - i) / static_cast<u128>(i + 1);
    u128 p = 1;
    for (int i = 0; i < k; ++i) p *= static_cast<u128>(ell);
    r.binom = to_decimal(c);
    r.power = to_decimal(p);
    r.log2_binom = log2_u128(c);
    r.log2_power = log2_u128(p);
    r.strict = c > p;
  } else {
    r.exact = false;
    r.log2_binom = (std::lgamma(top + 1.0) - std::lgamma(k + 1.0) - std::lgamma(top - k + 1.0)) /
                   std::numbers::ln2;
    r.log2_power = k * std::log2(static_cast<double>(ell));
    r.strict = r.log2_binom > r.log2_power;
  }
  return r;
}

NechiporukReport nechiporuk_bound(const std::vector<std::uint64_t>& sigmas,
                                  const std::vector<bool>& exact) {
  NechiporukReport rep;
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    if (sigmas[j] < 1) throw PreconditionError("sigma must be at least 1");
    NechiporukBlock b;
    b.sigma = sigmas[j];
    b.exact = j < exact.size() ? exact[j] : true;
    if (b.sigma < 4) {
      b.skipped = true;
      rep.skipped.push_back(j);
    } else {
      const double l = std::log2(static_cast<double>(b.sigma));
      b.term = l / std::log2(l);
      rep.total += b.term;
    }
    rep.blocks.push_back(b);
  }
  return rep;
}

double warren_count(double d, double m, double t) {
  if (!(d >= 1 && m >= 1 && t >= 1)) throw PreconditionError("warren_count needs d, m, t >= 1");
  return t * std::log2(4 * std::numbers::e * d * m / t);
}

AppendixCount appendix_count(int n, int N, int d) {
  if (n < 1 || N < 1 || d < 1) throw PreconditionError("appendix_count needs n, N, d >= 1");
  AppendixCount r;
  r.n = n;
  r.N = N;
  r.d = d;
  r.mu = static_cast<double>(d) * d * N;
  const double dn = static_cast<double>(d) * N;
  r.log2_classes = dn * std::log2(dn);
  r.log2_signs = warren_count(2.0 * N, std::ldexp(1.0, n + 1), 2 * r.mu);
  r.log2_total = r.log2_classes + r.log2_signs;
  if (n > N) {
    r.hypothesis_ok = false;
    r.warning = "n > N: the counting hypothesis n <= N does not hold";
  }
  return r;
}

}  // namespace qf
