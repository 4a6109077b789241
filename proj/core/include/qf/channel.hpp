#pragma once

// Linear maps on density matrices, stored as matrices acting on column-stacked
// vectorizations: vec(rho)[i + j*n] = rho(i, j).

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qf/linalg.hpp"

namespace qf {

class SuperOp {
 public:
  SuperOp() = default;
  // rep is (n_out^2) x (n_in^2).
  SuperOp(std::size_t n_in, std::size_t n_out, CMatrix rep);

  static SuperOp identity(std::size_t n);
  // rho -> sum_k K_k rho K_k^dag
  static SuperOp from_kraus(std::span<const CMatrix> kraus);
  // rho -> V rho V^dag for any square V (not necessarily unitary).
  static SuperOp conjugation(const CMatrix& v);
  // Inverse of choi().
  static SuperOp from_choi(const CMatrix& choi, std::size_t n_in, std::size_t n_out);

  std::size_t dim_in() const noexcept { return n_in_; }
  std::size_t dim_out() const noexcept { return n_out_; }
  const CMatrix& rep() const noexcept { return rep_; }

  CMatrix apply(const CMatrix& rho) const;
  // (T (x) I_G) applied to A on the space in (x) G, where the system is the
  // more significant factor.
  CMatrix apply_extended(const CMatrix& a, std::size_t ancilla_dim) const;

  // J = sum_ij E_ij (x) T(E_ij); entry (i*n_out + a, j*n_out + b).
  CMatrix choi() const;
  // max |Tr T(E_ij) - delta_ij|
  double trace_preservation_residual() const;
  double min_choi_eigenvalue() const;
  bool is_cptp(double tol = kTol) const;

  SuperOp& operator+=(const SuperOp& other);
  SuperOp& operator-=(const SuperOp& other);

 private:
  std::size_t n_in_ = 0;
  std::size_t n_out_ = 0;
  CMatrix rep_;
};

SuperOp operator+(SuperOp a, const SuperOp& b);
SuperOp operator-(SuperOp a, const SuperOp& b);
SuperOp tensor(const SuperOp& a, const SuperOp& b);

CVector vectorize(const CMatrix& rho);
CMatrix unvectorize(std::span<const Complex> v, std::size_t n);

// Kraus operators from the Choi spectrum; throws NotCpError when an
// eigenvalue is below -tol.
std::vector<CMatrix> kraus_decomposition(const SuperOp& t, double tol = kTol);

struct Dilation {
  CMatrix unitary;            // on system (x) ancilla, system most significant
  std::size_t dim_in = 0;     // input system dimension
  std::size_t dim_out = 0;    // output system dimension
  std::size_t ancilla_in = 0;   // dimension, prepared in |0>
  std::size_t traced_out = 0;   // dimension, traced after U
  std::size_t kraus_rank = 0;

  // Tr_G2(U (rho (x) |0><0|) U^dag)
  CMatrix apply(const CMatrix& rho) const;
};

// Throws NotCpError, or PreconditionError when t is not trace preserving.
Dilation stinespring_dilation(const SuperOp& t, double tol = 1e-8);

// {"kraus": [matrix, ...]} or {"superop": matrix, "dim_in": n, "dim_out": n}
SuperOp channel_from_json(const nlohmann::json& doc);

}  // namespace qf
