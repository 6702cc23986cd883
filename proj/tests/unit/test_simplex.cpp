#include <gtest/gtest.h>

#include <gmpxx.h>

#include <random>

#include "fusionlab/simplex.hpp"

using namespace fusionlab;

namespace {

template <typename S>
lp::Problem<S> dense(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c = {}) {
  lp::Problem<S> p;
  p.rows = A.size();
  for (double x : b) p.b.push_back(S(x));
  for (std::size_t j = 0; j < A[0].size(); ++j) {
    lp::Column<S> col;
    for (std::size_t i = 0; i < A.size(); ++i)
      if (A[i][j] != 0) col.rows.push_back(i), col.values.push_back(S(A[i][j]));
    p.add_column(col, c.empty() ? S(0) : S(c[j]));
  }
  if (c.empty()) p.c.clear();
  return p;
}

}  // namespace

TEST(Simplex, SmallOptimum) {
  // min -x - y  s.t. x + s1 = 2, y + s2 = 3, x + y + s3 = 4
  const auto p = dense<double>({{1, 0, 1, 0, 0}, {0, 1, 0, 1, 0}, {1, 1, 0, 0, 1}}, {2, 3, 4}, {-1, -1, 0, 0, 0});
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.objective, -4.0, 1e-12);
}

TEST(Simplex, InfeasibleGivesFarkasRay) {
  // x + y = 1, x + y = 2
  const auto p = dense<double>({{1, 1}, {1, 1}}, {1, 2});
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Infeasible);
  ASSERT_EQ(r.farkas.size(), 2u);
  const double ya = r.farkas[0] + r.farkas[1];
  EXPECT_LE(ya, 1e-9);
  EXPECT_GT(r.farkas[0] + 2 * r.farkas[1], 1e-9);
}

TEST(Simplex, Unbounded) {
  // min -x s.t. x - y = 0
  const auto p = dense<double>({{1, -1}}, {0}, {-1, 0});
  EXPECT_EQ(lp::solve(p).status, lp::Status::Unbounded);
}

TEST(Simplex, ExactRationalInfeasible) {
  const auto p = dense<mpq_class>({{1, 1}, {2, 2}}, {1, 3});
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::Infeasible);
  // exact Farkas conditions
  EXPECT_LE(r.farkas[0] + 2 * r.farkas[1], 0);
  EXPECT_GT(r.farkas[0] + 3 * r.farkas[1], 0);
}

TEST(Simplex, RedundantRowsDropped) {
  const auto p = dense<double>({{1, 1}, {2, 2}}, {1, 2});
  const auto r = lp::solve(p);
  EXPECT_EQ(r.status, lp::Status::Optimal);
  EXPECT_EQ(r.dropped_rows.size(), 1u);
}

// Property: on random feasible systems (b = A x0, x0 >= 0) the solver finds a
// feasible point; with b perturbed outside the cone the Farkas ray certifies it.
TEST(SimplexProperty, RandomSystems) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 40; ++t) {
    const std::size_t m = 3 + t % 5, n = m + 4 + t % 7;
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    std::vector<double> x0(n), b(m, 0);
    for (auto& x : x0) x = u(rng);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) A[i][j] = u(rng), b[i] += A[i][j] * x0[j];
    const auto r = lp::solve(dense<double>(A, b));
    ASSERT_EQ(r.status, lp::Status::Optimal);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_GE(r.x[j], -1e-12);
        s += A[i][j] * r.x[j];
      }
      EXPECT_NEAR(s, b[i], 1e-9);
    }
    // all A entries positive, so a negative right-hand side is infeasible
    b[0] = -1;
    const auto q = lp::solve(dense<double>(A, b));
    ASSERT_EQ(q.status, lp::Status::Infeasible);
    double yb = 0;
    for (std::size_t i = 0; i < m; ++i) yb += q.farkas[i] * b[i];
    EXPECT_GT(yb, 0);
    for (std::size_t j = 0; j < n; ++j) {
      double ya = 0;
      for (std::size_t i = 0; i < m; ++i) ya += q.farkas[i] * A[i][j];
      EXPECT_LE(ya, 1e-9);
    }
  }
}
