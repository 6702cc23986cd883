#include "fusionlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fusionlab {

namespace {

void require_finite(std::span<const Complex> entries) {
  for (const auto& z : entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::NonPhysicalInput, "matrix entry is not finite");
    }
  }
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << what << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorCode::DimensionMismatch, "entry count does not match shape");
  }
  require_finite(entries_);
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged initializer");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
  require_finite(entries_);
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  require_finite(m.entries());
  return m;
}

ComplexMatrix ComplexMatrix::projector(std::span<const Complex> ket) {
  require_finite(ket);
  ComplexMatrix m(ket.size(), ket.size());
  for (std::size_t i = 0; i < ket.size(); ++i)
    for (std::size_t j = 0; j < ket.size(); ++j) m(i, j) = ket[i] * std::conj(ket[j]);
  return m;
}

ComplexMatrix ComplexMatrix::ket(std::span<const Complex> amplitudes) {
  return ComplexMatrix(amplitudes.size(), 1, std::vector<Complex>(amplitudes.begin(), amplitudes.end()));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
  require_same_shape(*this, other, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
  return worst;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (!is_square()) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator+");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_shape(*this, rhs, "operator-");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : entries_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

ComplexMatrix kron(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

double trace_product(const ComplexMatrix& state, const ComplexMatrix& effect) {
  if (!state.is_square() || !effect.is_square() || state.rows() != effect.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "trace_product needs equal square operators");
  }
  // Tr(AB) = sum_ij A_ij B_ji
  Complex t = 0.0;
  const std::size_t n = state.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t += state(i, j) * effect(j, i);
  constexpr double kTol = 1e-9;
  if (std::abs(t.imag()) > kTol) {
    throw Error(ErrorCode::NonPhysicalInput, "trace has imaginary part " + std::to_string(t.imag()));
  }
  const double p = t.real();
  if (p < -kTol || p > 1.0 + kTol) {
    throw Error(ErrorCode::NonPhysicalInput, "probability outside [0,1]: " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}

std::pair<ComplexMatrix, ComplexMatrix> dichotomic_effects(const ComplexMatrix& obs) {
  constexpr double kTol = 1e-9;
  if (!obs.is_square()) throw Error(ErrorCode::DimensionMismatch, "observable must be square");
  if (!obs.is_hermitian(kTol)) throw Error(ErrorCode::NotHermitian, "observable is not Hermitian");
  const auto id = ComplexMatrix::identity(obs.rows());
  if ((obs * obs).max_abs_diff(id) > kTol) {
    throw Error(ErrorCode::NotInvolutory, "observable does not square to the identity");
  }
  ComplexMatrix e0 = (id + obs) * Complex(0.5);
  ComplexMatrix e1 = (id - obs) * Complex(0.5);
  return {std::move(e0), std::move(e1)};
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "eigenvalues need a square matrix");
  const std::size_t n = m.rows();
  const std::size_t N = 2 * n;
  // [[Re, -Im], [Im, Re]] has the spectrum of m, each eigenvalue twice.
  std::vector<double> a(N * N);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * N + c]; };
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      // symmetrize so tiny Hermiticity defects do not stall the sweeps
      const Complex z = 0.5 * (m(r, c) + std::conj(m(c, r)));
      at(r, c) = z.real();
      at(r + n, c + n) = z.real();
      at(r, c + n) = -z.imag();
      at(r + n, c) = z.imag();
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += at(p, q) * at(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> doubled(N);
  for (std::size_t i = 0; i < N; ++i) doubled[i] = at(i, i);
  std::sort(doubled.begin(), doubled.end());
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return eig;
}

ValidationReport validate_state(const ComplexMatrix& m, double tol) {
  ValidationReport report;
  if (!m.is_square()) {
    report.fail("square", "state", "matrix is not square");
    return report;
  }
  if (!m.is_hermitian(tol)) report.fail("Hermitian", "state", "matrix is not Hermitian");
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0)) > tol) {
    report.fail("trace", "state", "trace " + std::to_string(tr.real()) + " differs from 1");
  }
  const auto eig = hermitian_eigenvalues(m);
  if (!eig.empty() && eig.front() < -tol) {
    std::ostringstream os;
    os << "minimum eigenvalue " << eig.front();
    report.fail("PSD", "state", os.str());
  }
  return report;
}

ValidationReport validate_effect(const ComplexMatrix& m, double tol) {
  ValidationReport report;
  if (!m.is_square()) {
    report.fail("square", "effect", "matrix is not square");
    return report;
  }
  if (!m.is_hermitian(tol)) report.fail("Hermitian", "effect", "matrix is not Hermitian");
  const auto eig = hermitian_eigenvalues(m);
  if (!eig.empty() && eig.front() < -tol) report.fail("PSD", "effect", "negative eigenvalue");
  if (!eig.empty() && eig.back() > 1.0 + tol) report.fail("bounded", "effect", "eigenvalue above 1");
  return report;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, std::span<const std::size_t> dims,
                                 std::span<const std::size_t> perm) {
  const std::size_t k = dims.size();
  if (perm.size() != k) throw Error(ErrorCode::DimensionMismatch, "permutation length");
  const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (!m.is_square() || m.rows() != total) throw Error(ErrorCode::DimensionMismatch, "operator size vs dims");

  // map output index -> input index
  std::vector<std::size_t> out_dims(k);
  for (std::size_t i = 0; i < k; ++i) out_dims[i] = dims[perm[i]];
  std::vector<std::size_t> in_stride(k);
  {
    std::size_t s = 1;
    for (std::size_t i = k; i-- > 0;) {
      in_stride[i] = s;
      s *= dims[i];
    }
  }
  std::vector<std::size_t> map(total);
  std::vector<std::size_t> digit(k, 0);
  for (std::size_t out = 0; out < total; ++out) {
    std::size_t in = 0;
    for (std::size_t i = 0; i < k; ++i) in += digit[i] * in_stride[perm[i]];
    map[out] = in;
    for (std::size_t i = k; i-- > 0;) {
      if (++digit[i] < out_dims[i]) break;
      digit[i] = 0;
    }
  }
  ComplexMatrix result(total, total);
  for (std::size_t r = 0; r < total; ++r)
    for (std::size_t c = 0; c < total; ++c) result(r, c) = m(map[r], map[c]);
  return result;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  const std::size_t k = dims.size();
  std::vector<std::size_t> order(keep.begin(), keep.end());
  for (std::size_t i = 0; i < k; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) order.push_back(i);
  const ComplexMatrix p = permute_subsystems(m, dims, order);
  std::size_t dk = 1;
  for (auto i : keep) dk *= dims[i];
  const std::size_t dr = p.rows() / dk;
  ComplexMatrix out(dk, dk);
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      Complex s = 0.0;
      for (std::size_t t = 0; t < dr; ++t) s += p(r * dr + t, c * dr + t);
      out(r, c) = s;
    }
  return out;
}

namespace pauli {
ComplexMatrix I() { return ComplexMatrix::identity(2); }
ComplexMatrix X() { return ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix Y() { return ComplexMatrix{{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}; }
ComplexMatrix Z() { return ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

}  // namespace fusionlab
