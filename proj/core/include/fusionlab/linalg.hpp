#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "fusionlab/error.hpp"

namespace fusionlab {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Dimensions in this library stay below 64,
/// so every operation is a straightforward dense loop.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Throws DimensionMismatch if entries.size() != rows*cols and
  /// NonPhysicalInput on NaN/Inf entries.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> diag);
  /// |v><v| for a column vector v.
  static ComplexMatrix projector(std::span<const Complex> ket);
  /// Column vector from amplitudes.
  static ComplexMatrix ket(std::span<const Complex> amplitudes);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  std::span<const Complex> entries() const noexcept { return entries_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  double max_abs_diff(const ComplexMatrix& other) const;
  bool is_hermitian(double tol) const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(ComplexMatrix m, Complex s) { return m *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(std::span<const ComplexMatrix> factors);

/// Re Tr(state * effect), clamped to [0,1] once it is inside the 1e-9 band.
double trace_product(const ComplexMatrix& state, const ComplexMatrix& effect);

/// (1 + (-1)^o obs)/2 for o = 0, 1. obs must be Hermitian with obs^2 = 1.
std::pair<ComplexMatrix, ComplexMatrix> dichotomic_effects(const ComplexMatrix& obs);

ValidationReport validate_state(const ComplexMatrix& m, double tol = 1e-9);
/// 0 <= effect <= 1.
ValidationReport validate_effect(const ComplexMatrix& m, double tol = 1e-9);

/// Ascending eigenvalues of a Hermitian matrix (cyclic Jacobi on the real
/// 2n x 2n embedding).
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Reorders the tensor factors of a square operator. Factor k of the result is
/// factor perm[k] of the input.
ComplexMatrix permute_subsystems(const ComplexMatrix& m, std::span<const std::size_t> dims,
                                 std::span<const std::size_t> perm);

/// Partial trace keeping the listed factors (in ascending order).
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
}  // namespace pauli

}  // namespace fusionlab
