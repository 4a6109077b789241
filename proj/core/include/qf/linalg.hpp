#pragma once

// Dense complex linear algebra at the sizes quantum formulas need
// (dimensions 2^k, k <= 14). Everything here is value-semantic and pure.
//
// Tensor-factor convention: in kron(A, B) the left factor is the most
// significant part of the index, i.e. row (i1, i2) maps to i1 * B.rows() + i2.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qf {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kTol = 1e-9;
inline constexpr double kRankTol = 1e-8;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  // |v><w|
  static CMatrix outer(std::span<const Complex> v, std::span<const Complex> w);
  static CMatrix diagonal(std::span<const Complex> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  std::span<Complex> data() noexcept { return entries_; }
  std::span<const Complex> data() const noexcept { return entries_; }

  CVector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const Complex> v);

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conjugate() const;
  Complex trace() const;
  bool is_finite() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex scale);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix a);
CVector operator*(const CMatrix& a, std::span<const Complex> v);

Complex inner(std::span<const Complex> a, std::span<const Complex> b);  // <a|b>
double norm(std::span<const Complex> v);
CVector kron(std::span<const Complex> a, std::span<const Complex> b);

// Largest entrywise modulus of a - b.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// Pure state of unit Euclidean norm on 2^m amplitudes.
class StateVector {
 public:
  static StateVector basis(std::size_t dim, std::size_t index);
  // Throws DimensionError when the length is not a power of two or the norm
  // deviates from one by more than tol.
  static StateVector from(CVector amplitudes, double tol = kTol);

  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  CVector& mutable_amplitudes() noexcept { return amplitudes_; }

 private:
  explicit StateVector(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {}
  CVector amplitudes_;
};

/// Hermitian, trace-one, positive semidefinite matrix.
class DensityMatrix {
 public:
  static DensityMatrix pure(std::span<const Complex> psi);
  static DensityMatrix basis(std::size_t dim, std::size_t index);
  // Validates the density-matrix invariants within tol.
  static DensityMatrix from(CMatrix m, double tol = kTol);
  // Skips validation; for results produced by trusted CPTP arithmetic.
  static DensityMatrix unchecked(CMatrix m) { return DensityMatrix(std::move(m)); }

  std::size_t dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }

 private:
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Reduced matrix on the kept factors (ascending factor order). factor_dims
// lists the tensor factors from most to least significant.
CMatrix partial_trace(const CMatrix& rho, std::span<const std::size_t> factor_dims,
                      std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const std::size_t> factor_dims,
                            std::span<const std::size_t> keep);

// Singular values in descending order, by one-sided (Hestenes) Jacobi.
std::vector<double> singular_values(const CMatrix& a);

struct NormReport {
  double m_norm = 0;      // m * max |a_ij|
  double op_norm = 0;     // largest singular value
  double trace_norm = 0;  // sum of singular values
};

NormReport norms(const CMatrix& a);
double op_norm(const CMatrix& a);
double trace_norm(const CMatrix& a);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column k pairs with values[k]
};

// Cyclic complex Jacobi. The input is symmetrized as (A + A^dag)/2.
HermitianEigen hermitian_eigen(const CMatrix& a);

// ||U^dag U - I|| in operator norm.
double unitarity_residual(const CMatrix& u);

struct GramSchmidtResult {
  std::vector<CVector> basis;       // orthonormal, spans the inputs
  std::vector<CVector> coeffs;      // coeffs[i][k] = <basis_k | input_i>
  std::vector<CVector> completion;  // extends basis to the ambient dimension
};

// Modified Gram-Schmidt with one reorthogonalization pass. An input whose
// residual norm is at most rank_tol adds no basis vector. The completion
// walks the standard basis in index order.
GramSchmidtResult gram_schmidt_extend(std::span<const CVector> vectors,
                                      std::size_t ambient_dim,
                                      double rank_tol = kRankTol);

}  // namespace qf
