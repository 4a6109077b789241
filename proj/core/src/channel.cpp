#include "qf/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qf/circuit_json.hpp"
#include "qf/error.hpp"

namespace qf {

SuperOp::SuperOp(std::size_t n_in, std::size_t n_out, CMatrix rep)
    : n_in_(n_in), n_out_(n_out), rep_(std::move(rep)) {
  if (rep_.rows() != n_out * n_out || rep_.cols() != n_in * n_in) {
    throw DimensionError("super-operator matrix has the wrong shape");
  }
}

SuperOp SuperOp::identity(std::size_t n) { return SuperOp(n, n, CMatrix::identity(n * n)); }

SuperOp SuperOp::from_kraus(std::span<const CMatrix> kraus) {
  if (kraus.empty()) throw DimensionError("empty Kraus set");
  const std::size_t n_out = kraus[0].rows();
  const std::size_t n_in = kraus[0].cols();
  CMatrix rep(n_out * n_out, n_in * n_in);
  for (const CMatrix& k : kraus) {
    if (k.rows() != n_out || k.cols() != n_in) throw DimensionError("ragged Kraus set");
    rep += kron(k.conjugate(), k);
  }
  return SuperOp(n_in, n_out, std::move(rep));
}

SuperOp SuperOp::conjugation(const CMatrix& v) {
  const CMatrix ops[] = {v};
  return from_kraus(ops);
}

SuperOp SuperOp::from_choi(const CMatrix& choi, std::size_t n_in, std::size_t n_out) {
  if (choi.rows() != n_in * n_out || choi.cols() != n_in * n_out) {
    throw DimensionError("Choi matrix has the wrong shape");
  }
  CMatrix rep(n_out * n_out, n_in * n_in);
  for (std::size_t i = 0; i < n_in; ++i)
    for (std::size_t j = 0; j < n_in; ++j)
      for (std::size_t a = 0; a < n_out; ++a)
        for (std::size_t b = 0; b < n_out; ++b)
          rep(a + b * n_out, i + j * n_in) = choi(i * n_out + a, j * n_out + b);
  return SuperOp(n_in, n_out, std::move(rep));
}

CVector vectorize(const CMatrix& rho) {
  const std::size_t n = rho.rows();
  CVector v(n * rho.cols());
  for (std::size_t j = 0; j < rho.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) v[i + j * n] = rho(i, j);
  return v;
}

CMatrix unvectorize(std::span<const Complex> v, std::size_t n) {
  CMatrix rho(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) rho(i, j) = v[i + j * n];
  return rho;
}

CMatrix SuperOp::apply(const CMatrix& rho) const {
  if (rho.rows() != n_in_ || rho.cols() != n_in_) {
    throw DimensionError("super-operator input has the wrong dimension");
  }
  const CVector v = vectorize(rho);
  return unvectorize(rep_ * std::span<const Complex>(v), n_out_);
}

CMatrix SuperOp::apply_extended(const CMatrix& a, std::size_t g) const {
  if (a.rows() != n_in_ * g || a.cols() != n_in_ * g) {
    throw DimensionError("extended input has the wrong dimension");
  }
  CMatrix out(n_out_ * g, n_out_ * g);
  CMatrix block(n_in_, n_in_);
  for (std::size_t ga = 0; ga < g; ++ga) {
    for (std::size_t gb = 0; gb < g; ++gb) {
      for (std::size_t i = 0; i < n_in_; ++i)
        for (std::size_t j = 0; j < n_in_; ++j) block(i, j) = a(i * g + ga, j * g + gb);
      const CMatrix image = apply(block);
      for (std::size_t x = 0; x < n_out_; ++x)
        for (std::size_t y = 0; y < n_out_; ++y) out(x * g + ga, y * g + gb) = image(x, y);
    }
  }
  return out;
}

CMatrix SuperOp::choi() const {
  CMatrix j(n_in_ * n_out_, n_in_ * n_out_);
  for (std::size_t i = 0; i < n_in_; ++i)
    for (std::size_t k = 0; k < n_in_; ++k)
      for (std::size_t a = 0; a < n_out_; ++a)
        for (std::size_t b = 0; b < n_out_; ++b)
          j(i * n_out_ + a, k * n_out_ + b) = rep_(a + b * n_out_, i + k * n_in_);
  return j;
}

double SuperOp::trace_preservation_residual() const {
  double worst = 0;
  for (std::size_t i = 0; i < n_in_; ++i) {
    for (std::size_t k = 0; k < n_in_; ++k) {
      Complex tr = 0;
      for (std::size_t a = 0; a < n_out_; ++a) tr += rep_(a + a * n_out_, i + k * n_in_);
      worst = std::max(worst, std::abs(tr - Complex(i == k ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double SuperOp::min_choi_eigenvalue() const { return hermitian_eigen(choi()).values.front(); }

bool SuperOp::is_cptp(double tol) const {
  return trace_preservation_residual() <= tol && min_choi_eigenvalue() >= -tol;
}

SuperOp& SuperOp::operator+=(const SuperOp& other) {
  if (n_in_ != other.n_in_ || n_out_ != other.n_out_) throw DimensionError("super-operator sum");
  rep_ += other.rep_;
  return *this;
}

SuperOp& SuperOp::operator-=(const SuperOp& other) {
  if (n_in_ != other.n_in_ || n_out_ != other.n_out_) throw DimensionError("super-operator sum");
  rep_ -= other.rep_;
  return *this;
}

SuperOp operator+(SuperOp a, const SuperOp& b) { return a += b; }
SuperOp operator-(SuperOp a, const SuperOp& b) { return a -= b; }

SuperOp tensor(const SuperOp& a, const SuperOp& b) {
  const std::size_t ni = a.dim_in() * b.dim_in();
  const std::size_t no = a.dim_out() * b.dim_out();
  CMatrix rep(no * no, ni * ni);
  CMatrix ea(a.dim_in(), a.dim_in());
  CMatrix eb(b.dim_in(), b.dim_in());
  for (std::size_t i1 = 0; i1 < a.dim_in(); ++i1) {
    for (std::size_t j1 = 0; j1 < a.dim_in(); ++j1) {
      ea(i1, j1) = 1;
      const CMatrix ta = a.apply(ea);
      ea(i1, j1) = 0;
      for (std::size_t i2 = 0; i2 < b.dim_in(); ++i2) {
        for (std::size_t j2 = 0; j2 < b.dim_in(); ++j2) {
          eb(i2, j2) = 1;
          const CMatrix image = kron(ta, b.apply(eb));
          eb(i2, j2) = 0;
          const std::size_t col = (i1 * b.dim_in() + i2) + (j1 * b.dim_in() + j2) * ni;
          const CVector v = vectorize(image);
          for (std::size_t r = 0; r < v.size(); ++r) rep(r, col) = v[r];
        }
      }
    }
  }
  return SuperOp(ni, no, std::move(rep));
}

std::vector<CMatrix> kraus_decomposition(const SuperOp& t, double tol) {
  const std::size_t n_in = t.dim_in();
  const std::size_t n_out = t.dim_out();
  const HermitianEigen eig = hermitian_eigen(t.choi());
  if (eig.values.front() < -tol) {
    throw NotCpError("Choi matrix has a negative eigenvalue", eig.values.front());
  }
  std::vector<CMatrix> kraus;
  // Largest eigenvalues first.
  for (std::size_t k = eig.values.size(); k-- > 0;) {
    const double lambda = eig.values[k];
    if (lambda <= tol) break;
    const double s = std::sqrt(lambda);
    CMatrix op(n_out, n_in);
    for (std::size_t i = 0; i < n_in; ++i)
      for (std::size_t a = 0; a < n_out; ++a) op(a, i) = s * eig.vectors(i * n_out + a, k);
    kraus.push_back(std::move(op));
  }
  return kraus;
}

CMatrix Dilation::apply(const CMatrix& rho) const {
  const std::size_t total = dim_in * ancilla_in;
  CMatrix padded(total, total);
  for (std::size_t i = 0; i < dim_in; ++i)
    for (std::size_t j = 0; j < dim_in; ++j) padded(i * ancilla_in, j * ancilla_in) = rho(i, j);
  const CMatrix evolved = unitary * padded * unitary.adjoint();
  const std::size_t dims[] = {dim_out, traced_out};
  const std::size_t keep[] = {0};
  return partial_trace(evolved, dims, keep);
}

Dilation stinespring_dilation(const SuperOp& t, double tol) {
  const double tp = t.trace_preservation_residual();
  if (tp > tol) {
    throw PreconditionError("channel is not trace preserving (residual " + std::to_string(tp) +
                            ")");
  }
  const std::vector<CMatrix> kraus = kraus_decomposition(t, tol);
  Dilation d;
  d.dim_in = t.dim_in();
  d.dim_out = t.dim_out();
  d.ancilla_in = d.dim_out * d.dim_out;
  d.traced_out = d.dim_in * d.dim_out;
  d.kraus_rank = kraus.size();
  if (kraus.size() > d.traced_out) throw DimensionError("Kraus rank exceeds the environment");

  const std::size_t total = d.dim_in * d.ancilla_in;
  // Columns |i>|0> carry the isometry |i> -> sum_k K_k|i> (x) |k>.
  std::vector<CVector> isometry;
  for (std::size_t i = 0; i < d.dim_in; ++i) {
    CVector col(total);
    for (std::size_t k = 0; k < kraus.size(); ++k)
      for (std::size_t a = 0; a < d.dim_out; ++a) col[a * d.traced_out + k] = kraus[k](a, i);
    isometry.push_back(std::move(col));
  }
  const GramSchmidtResult gs = gram_schmidt_extend(isometry, total, 1e-12);
  d.unitary = CMatrix(total, total);
  std::size_t next = 0;
  for (std::size_t col = 0; col < total; ++col) {
    if (col % d.ancilla_in == 0) {
      d.unitary.set_column(col, isometry[col / d.ancilla_in]);
    } else {
      d.unitary.set_column(col, gs.completion.at(next++));
    }
  }
  return d;
}

SuperOp channel_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("channel document must be an object");
  if (doc.contains("kraus")) {
    const auto& list = doc["kraus"];
    if (!list.is_array() || list.empty()) throw SchemaError("kraus must be a non-empty array");
    std::vector<CMatrix> ops;
    for (std::size_t k = 0; k < list.size(); ++k) {
      ops.push_back(matrix_from_json(list[k], "kraus " + std::to_string(k)));
    }
    return SuperOp::from_kraus(ops);
  }
  if (doc.contains("superop")) {
    if (!doc.contains("dim_in") || !doc.contains("dim_out")) {
      throw SchemaError("superop form needs dim_in and dim_out");
    }
    return SuperOp(doc["dim_in"].get<std::size_t>(), doc["dim_out"].get<std::size_t>(),
                   matrix_from_json(doc["superop"], "superop"));
  }
  throw SchemaError("channel document needs a 'kraus' or 'superop' field");
}

}  // namespace qf
