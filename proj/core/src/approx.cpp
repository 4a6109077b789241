#include "qf/approx.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qf/simulator.hpp"

namespace qf {

CMatrix truncate_gate(const CMatrix& u, int mu) {
  if (mu < 1) throw PreconditionError("truncation needs mu >= 1");
  const double scale = std::ldexp(1.0, mu);
  CMatrix v = u;
  for (Complex& z : v.data()) {
    z = Complex(std::trunc(z.real() * scale) / scale, std::trunc(z.imag() * scale) / scale);
  }
  return v;
}

double truncation_delta(int mu) { return std::sqrt(2.0) * std::ldexp(1.0, -mu); }

double eta(int d, double delta) {
  return std::ldexp(1.0, 2 * d + 1) * delta * (1.0 + std::ldexp(1.0, d) * delta);
}

double circuit_error_bound(int d, double delta, double s) {
  return std::expm1(eta(d, delta) * s);
}

int bound_driven_mu(int d, double ell, double eps) {
  if (!(eps > 0)) throw PreconditionError("eps must be positive");
  for (int mu = 1; mu <= 60; ++mu) {
    if (circuit_error_bound(d, truncation_delta(mu), ell) <= eps) return mu;
  }
  throw BudgetError("no mu up to 60 meets the target");
}

int formula_mu(double ell, double eps) {
  if (!(eps > 0) || !(ell >= 1)) throw PreconditionError("need ell >= 1 and eps > 0");
  return std::max(1, static_cast<int>(std::ceil(std::log2(ell) - std::log2(eps))));
}

TruncationReport verify_truncation(const Circuit& f, int mu) {
  const FormulaEvaluator evaluator(f);
  const FormulaTree& tree = evaluator.tree();
  TruncationReport rep;
  rep.mu = mu;
  rep.delta = truncation_delta(mu);
  rep.d = static_cast<int>(tree.max_arity());
  rep.s = tree.size();
  rep.eta = eta(rep.d, rep.delta);
  rep.bound = circuit_error_bound(rep.d, rep.delta, static_cast<double>(rep.s));

  std::vector<CMatrix> truncated;
  for (const auto& node : tree.nodes) truncated.push_back(truncate_gate(node.unitary, mu));
  const int n = evaluator.num_vars();
  if (n > kTruthTableMaxVars) throw BudgetError("too many variables to enumerate");
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
    const Assignment a = Assignment::from_index(r, n);
    const FormulaResult exact = evaluator.run(a);
    const FormulaResult approx = evaluator.run_with(a, truncated);
    rep.measured_trace_dist =
        std::max(rep.measured_trace_dist, trace_norm(exact.rho_final - approx.rho_final));
    rep.measured_p_dev = std::max(rep.measured_p_dev, std::abs(exact.p - approx.p));
  }
  rep.pass = rep.measured_trace_dist <= rep.bound && rep.measured_p_dev <= rep.bound;
  return rep;
}

double ov_ow_bound(const CMatrix& v, const CMatrix& w) {
  if (!v.is_square() || v.rows() != w.rows() || v.cols() != w.cols()) {
    throw DimensionError("ov_ow_bound needs square matrices of equal size");
  }
  const double m = static_cast<double>(v.rows());
  const double diff = op_norm(v - w);
  return 2 * m * diff * std::min(op_norm(v), op_norm(w)) + m * diff * diff;
}

namespace {

CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = gauss(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = Complex(gauss(rng), gauss(rng));
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

CMatrix random_pure(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CVector v(n);
  for (auto& z : v) z = Complex(gauss(rng), gauss(rng));
  const double nv = norm(v);
  for (auto& z : v) z /= nv;
  return CMatrix::outer(v, v);
}

}  // namespace

DiamondEstimate diamond_lower_bound(const SuperOp& t, const SuperOp& r, std::size_t trials,
                                    std::uint64_t seed, std::span<const CMatrix> extra) {
  if (t.dim_in() != r.dim_in() || t.dim_out() != r.dim_out()) {
    throw DimensionError("diamond_lower_bound needs matching super-operators");
  }
  const SuperOp diff = t - r;
  const std::size_t n = t.dim_in();
  const std::size_t total = n * n;
  DiamondEstimate best;
  auto consider = [&](const CMatrix& a) {
    const double denom = trace_norm(a);
    if (!(denom > 0)) return;
    const double value = trace_norm(diff.apply_extended(a, n)) / denom;
    if (value > best.value || best.witness.empty()) {
      best.value = std::max(best.value, value);
      best.witness = a;
    }
  };
  for (std::size_t i = 0; i < total; ++i) {
    CMatrix a(total, total);
    a(i, i) = 1;
    consider(a);
  }
  CVector bell(total);
  for (std::size_t i = 0; i < n; ++i) bell[i * n + i] = 1.0 / std::sqrt(static_cast<double>(n));
  consider(CMatrix::outer(bell, bell));
  for (const CMatrix& a : extra) consider(a);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    consider(k % 2 == 0 ? random_pure(total, rng) : random_hermitian(total, rng));
  }
  return best;
}

double star_ratio_sample(const SuperOp& t, std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = t.dim_in();
  double best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    CMatrix a(n, n);
    a(i, i) = 1;
    best = std::max(best, trace_norm(t.apply(a)));
  }
  for (std::size_t k = 0; k < trials; ++k) {
    const CMatrix a = k % 2 == 0 ? random_pure(n, rng) : random_hermitian(n, rng);
    best = std::max(best, trace_norm(t.apply(a)) / trace_norm(a));
  }
  return best;
}

}  // namespace qf
