#include "qf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qf/error.hpp"

namespace qf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::NotUnitary: return "not_unitary";
    case ErrorKind::NotFormula: return "not_formula";
    case ErrorKind::NotCp: return "not_cp";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Range: return "range";
  }
  return "unknown";
}

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw DimensionError("matrix entry count " + std::to_string(entries_.size()) +
                         " does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::outer(std::span<const Complex> v, std::span<const Complex> w) {
  CMatrix m(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CVector CMatrix::column(std::size_t c) const {
  CVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void CMatrix::set_column(std::size_t c, std::span<const Complex> v) {
  if (v.size() != rows_) throw DimensionError("column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

CMatrix CMatrix::transpose() const {
  CMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

CMatrix CMatrix::conjugate() const {
  CMatrix m = *this;
  for (auto& z : m.entries_) z = std::conj(z);
  return m;
}

Complex CMatrix::trace() const {
  Complex t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool CMatrix::is_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("matrix sum shape mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("matrix difference shape mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex scale) {
  for (auto& z : entries_) z *= scale;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matrix product " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
  }
  CMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

CVector operator*(const CMatrix& a, std::span<const Complex> v) {
  if (a.cols() != v.size()) throw DimensionError("matrix-vector shape mismatch");
  CVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex acc = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw DimensionError("inner product length mismatch");
  Complex acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm(std::span<const Complex> v) {
  double acc = 0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

CVector kron(std::span<const Complex> a, std::span<const Complex> b) {
  CVector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shape mismatch");
  double worst = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (!is_power_of_two(dim) || index >= dim) throw DimensionError("bad basis state");
  CVector v(dim);
  v[index] = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::from(CVector amplitudes, double tol) {
  if (!is_power_of_two(amplitudes.size()))
    throw DimensionError("state dimension " + std::to_string(amplitudes.size()) +
                         " is not a power of two");
  const double n = norm(amplitudes);
  if (std::abs(n - 1.0) > tol)
    throw DimensionError("state norm " + std::to_string(n) + " differs from 1");
  return StateVector(std::move(amplitudes));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
  return DensityMatrix(CMatrix::outer(psi, psi));
}

DensityMatrix DensityMatrix::basis(std::size_t dim, std::size_t index) {
  CMatrix m(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from(CMatrix m, double tol) {
  if (!m.is_square() || !is_power_of_two(m.rows()))
    throw DimensionError("density matrix must be square with power-of-two dimension");
  if (!m.is_finite()) throw DimensionError("density matrix has non-finite entries");
  if (max_abs_diff(m, m.adjoint()) > tol) throw DimensionError("density matrix is not Hermitian");
  if (std::abs(m.trace() - 1.0) > tol) throw DimensionError("density matrix trace differs from 1");
  const auto eig = hermitian_eigen(m);
  if (eig.values.front() < -tol)
    throw DimensionError("density matrix has negative eigenvalue " +
                         std::to_string(eig.values.front()));
  return DensityMatrix(std::move(m));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
    for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
      const Complex s = a(i1, j1);
      if (s == Complex{}) continue;
      for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
        for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
          out(i1 * b.rows() + i2, j1 * b.cols() + j2) = s * b(i2, j2);
    }
  return out;
}

CMatrix partial_trace(const CMatrix& rho, std::span<const std::size_t> factor_dims,
                      std::span<const std::size_t> keep) {
  if (!rho.is_square()) throw DimensionError("partial trace needs a square matrix");
  if (keep.empty()) throw DimensionError("partial trace must keep at least one factor");
  const std::size_t total =
      std::accumulate(factor_dims.begin(), factor_dims.end(), std::size_t{1}, std::multiplies<>());
  if (total != rho.rows())
    throw DimensionError("factor dimensions multiply to " + std::to_string(total) +
                         ", matrix is " + std::to_string(rho.rows()));
  const std::size_t nf = factor_dims.size();
  std::vector<bool> kept(nf, false);
  for (std::size_t k : keep) {
    if (k >= nf || kept[k]) throw DimensionError("bad kept factor index");
    kept[k] = true;
  }

  // Strides of each factor in the full index.
  std::vector<std::size_t> stride(nf);
  {
    std::size_t s = 1;
    for (std::size_t f = nf; f-- > 0;) {
      stride[f] = s;
      s *= factor_dims[f];
    }
  }
  std::vector<std::size_t> kept_f, traced_f;
  for (std::size_t f = 0; f < nf; ++f) (kept[f] ? kept_f : traced_f).push_back(f);

  auto expand = [&](const std::vector<std::size_t>& factors, std::size_t idx) {
    // Offset in the full index of a compound index over the given factors.
    std::size_t off = 0;
    for (std::size_t p = factors.size(); p-- > 0;) {
      const std::size_t f = factors[p];
      off += (idx % factor_dims[f]) * stride[f];
      idx /= factor_dims[f];
    }
    return off;
  };

  std::size_t kdim = 1, tdim = 1;
  for (auto f : kept_f) kdim *= factor_dims[f];
  for (auto f : traced_f) tdim *= factor_dims[f];

  std::vector<std::size_t> koff(kdim), toff(tdim);
  for (std::size_t i = 0; i < kdim; ++i) koff[i] = expand(kept_f, i);
  for (std::size_t j = 0; j < tdim; ++j) toff[j] = expand(traced_f, j);

  CMatrix out(kdim, kdim);
  for (std::size_t i1 = 0; i1 < kdim; ++i1)
    for (std::size_t i2 = 0; i2 < kdim; ++i2) {
      Complex acc = 0;
      for (std::size_t j = 0; j < tdim; ++j) acc += rho(koff[i1] + toff[j], koff[i2] + toff[j]);
      out(i1, i2) = acc;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> factor_dims,
                            std::span<const std::size_t> keep) {
  return DensityMatrix::unchecked(partial_trace(rho.matrix(), factor_dims, keep));
}

std::vector<double> singular_values(const CMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<CVector> cols(n, CVector(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) cols[j][i] = a(i, j);

  constexpr double eps = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0;
        Complex gamma = 0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(cols[p][i]);
          beta += std::norm(cols[q][i]);
          gamma += std::conj(cols[p][i]) * cols[q][i];
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Complex phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const Complex xp = cols[p][i];
          const Complex xq = cols[q][i] * phase;
          cols[p][i] = c * xp - s * xq;
          cols[q][i] = s * xp + c * xq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = norm(cols[j]);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  if (m < n) sv.resize(m);
  return sv;
}

NormReport norms(const CMatrix& a) {
  if (!a.is_square()) throw DimensionError("norms need a square matrix");
  NormReport r;
  double maxabs = 0;
  for (const auto& z : a.data()) maxabs = std::max(maxabs, std::abs(z));
  r.m_norm = static_cast<double>(a.rows()) * maxabs;
  const auto sv = singular_values(a);
  r.op_norm = sv.empty() ? 0.0 : sv.front();
  r.trace_norm = std::accumulate(sv.begin(), sv.end(), 0.0);
  return r;
}

double op_norm(const CMatrix& a) {
  const auto sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

double trace_norm(const CMatrix& a) {
  const auto sv = singular_values(a);
  return std::accumulate(sv.begin(), sv.end(), 0.0);
}

HermitianEigen hermitian_eigen(const CMatrix& input) {
  if (!input.is_square()) throw DimensionError("eigendecomposition needs a square matrix");
  const std::size_t n = input.rows();
  CMatrix a = 0.5 * (input + input.adjoint());
  CMatrix v = CMatrix::identity(n);

  double scale = 0;
  for (const auto& z : a.data()) scale += std::norm(z);
  scale = std::sqrt(scale);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-16 * scale || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq <= 1e-300) continue;
        const Complex e = a(p, q) / apq;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        // J acts on the (p, q) plane: J_pp = c, J_pq = s, J_qp = -s conj(e), J_qq = c conj(e).
        const Complex jpp = c, jpq = s, jqp = -s * std::conj(e), jqq = c * std::conj(e);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0;
        a(q, p) = 0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double unitarity_residual(const CMatrix& u) {
  if (!u.is_square()) return std::numeric_limits<double>::infinity();
  return op_norm(u.adjoint() * u - CMatrix::identity(u.rows()));
}

namespace {

// Removes the components of w along the given orthonormal vectors, twice.
void orthogonalize(CVector& w, const std::vector<CVector>& against) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : against) {
      const Complex c = inner(b, w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * b[i];
    }
  }
}

}  // namespace

GramSchmidtResult gram_schmidt_extend(std::span<const CVector> vectors, std::size_t ambient_dim,
                                      double rank_tol) {
  GramSchmidtResult r;
  for (const auto& v : vectors) {
    if (v.size() != ambient_dim) throw DimensionError("vector length differs from ambient dimension");
    CVector w = v;
    orthogonalize(w, r.basis);
    const double n = norm(w);
    if (n > rank_tol) {
      for (auto& z : w) z /= n;
      r.basis.push_back(std::move(w));
    }
  }
  r.coeffs.reserve(vectors.size());
  for (const auto& v : vectors) {
    CVector c(r.basis.size());
    for (std::size_t k = 0; k < r.basis.size(); ++k) c[k] = inner(r.basis[k], v);
    r.coeffs.push_back(std::move(c));
  }

  std::vector<CVector> all = r.basis;
  for (std::size_t e = 0; e < ambient_dim && all.size() < ambient_dim; ++e) {
    CVector w(ambient_dim);
    w[e] = 1.0;
    orthogonalize(w, all);
    const double n = norm(w);
    // Standard basis vectors nearly inside the current span are skipped so the
    // completion stays well conditioned.
    if (n > 1e-6) {
      for (auto& z : w) z /= n;
      all.push_back(w);
      r.completion.push_back(std::move(w));
    }
  }
  return r;
}

}  // namespace qf
