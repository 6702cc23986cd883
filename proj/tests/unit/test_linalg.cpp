#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fusionlab/linalg.hpp"
#include "fusionlab/quantum.hpp"

using namespace fusionlab;

namespace {

ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const Complex z = i == j ? Complex(g(rng), 0) : Complex(g(rng), g(rng));
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  return m;
}

ComplexMatrix random_state(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  return rho * Complex(1.0 / rho.trace().real());
}

}  // namespace

TEST(Linalg, ConstructorRejectsBadInput) {
  EXPECT_THROW(ComplexMatrix(2, 2, std::vector<Complex>(3)), Error);
  try {
    ComplexMatrix(1, 1, {Complex(std::nan(""), 0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPhysicalInput);
  }
}

TEST(Linalg, PauliAlgebra) {
  const auto X = pauli::X(), Y = pauli::Y(), Z = pauli::Z(), I = pauli::I();
  EXPECT_LT((X * X).max_abs_diff(I), 1e-15);
  EXPECT_LT((X * Y).max_abs_diff(Complex(0, 1) * Z), 1e-15);
  EXPECT_TRUE(Y.is_hermitian(0));
  EXPECT_EQ(X.trace(), Complex(0));
}

TEST(Linalg, KronShapeAndMixedProduct) {
  std::mt19937_64 rng(7);
  const auto a = random_hermitian(2, rng), b = random_hermitian(3, rng);
  const auto c = random_hermitian(2, rng), d = random_hermitian(3, rng);
  const auto ab = kron(a, b);
  EXPECT_EQ(ab.rows(), 6u);
  // (a x b)(c x d) = ac x bd
  EXPECT_LT((ab * kron(c, d)).max_abs_diff(kron(a * c, b * d)), 1e-12);
  const std::vector<ComplexMatrix> f{a, b, c};
  EXPECT_LT(kron(f).max_abs_diff(kron(kron(a, b), c)), 1e-12);
}

TEST(Linalg, DichotomicEffects) {
  const auto [e0, e1] = dichotomic_effects(pauli::Z());
  EXPECT_EQ(e0(0, 0), Complex(1));
  EXPECT_EQ(e1(1, 1), Complex(1));
  EXPECT_LT((e0 + e1).max_abs_diff(ComplexMatrix::identity(2)), 1e-15);

  try {
    dichotomic_effects(ComplexMatrix{{1, 1}, {0, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
  try {
    dichotomic_effects(pauli::Z() * Complex(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInvolutory);
  }
}

TEST(Linalg, EigenvaluesOfKnownMatrices) {
  const auto ev = hermitian_eigenvalues(pauli::Y());
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], -1.0, 1e-12);
  EXPECT_NEAR(ev[1], 1.0, 1e-12);

  const auto pp = hermitian_eigenvalues(phi_plus());
  EXPECT_NEAR(pp[0], 0.0, 1e-12);
  EXPECT_NEAR(pp[3], 1.0, 1e-12);
}

// Property: eigenvalues sum to the trace and their squares to Tr(H^2).
TEST(LinalgProperty, EigenvaluesMatchTraceInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto h = random_hermitian(n, rng);
    const auto ev = hermitian_eigenvalues(h);
    double s1 = 0, s2 = 0;
    for (double x : ev) s1 += x, s2 += x * x;
    EXPECT_NEAR(s1, h.trace().real(), 1e-9);
    EXPECT_NEAR(s2, (h * h).trace().real(), 1e-8);
    EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
  }
}

TEST(LinalgProperty, RandomStatesValidate) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rho = random_state(2 + trial % 5, rng);
    EXPECT_TRUE(validate_state(rho).ok());
    for (double v : {0.0, 0.3, 1.0}) EXPECT_TRUE(validate_state(isotropic(rho, v)).ok());
  }
}

TEST(Linalg, ValidateStateReportsProperties) {
  EXPECT_TRUE(validate_state(ComplexMatrix{{1, 0}, {0, 1}}).has_failure("trace"));
  EXPECT_TRUE(validate_state(ComplexMatrix{{1.5, 0}, {0, -0.5}}).has_failure("PSD"));
  EXPECT_TRUE(validate_state(ComplexMatrix{{0.5, 1}, {0, 0.5}}).has_failure("Hermitian"));
  EXPECT_TRUE(validate_effect(ComplexMatrix{{2, 0}, {0, 0}}).has_failure("bounded"));
}

TEST(Linalg, PartialTraceOfProductState) {
  std::mt19937_64 rng(5);
  const auto a = random_state(2, rng), b = random_state(3, rng), c = random_state(2, rng);
  const auto abc = kron(kron(a, b), c);
  const std::vector<std::size_t> dims{2, 3, 2};
  EXPECT_LT(partial_trace(abc, dims, std::vector<std::size_t>{1}).max_abs_diff(b), 1e-12);
  EXPECT_LT(partial_trace(abc, dims, std::vector<std::size_t>{0, 2}).max_abs_diff(kron(a, c)), 1e-12);
}

TEST(Linalg, PermuteSubsystemsSwapsFactors) {
  std::mt19937_64 rng(9);
  const auto a = random_state(2, rng), b = random_state(3, rng);
  const std::vector<std::size_t> dims{2, 3}, perm{1, 0};
  EXPECT_LT(permute_subsystems(kron(a, b), dims, perm).max_abs_diff(kron(b, a)), 1e-12);
}

TEST(Linalg, TraceProductClampsAndRejects) {
  const auto rho = phi_plus();
  const auto [e0, e1] = dichotomic_effects(kron(pauli::Z(), pauli::Z()));
  EXPECT_NEAR(trace_product(rho, e0), 1.0, 1e-15);
  EXPECT_NEAR(trace_product(rho, e1), 0.0, 1e-15);
  EXPECT_THROW(trace_product(rho, pauli::Z()), Error);
}

TEST(Linalg, IsotropicOutOfRange) {
  try {
    isotropic(phi_plus(), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}
