#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fusionlab::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status s);

/// Sparse column: (row, value) pairs.
template <typename Scalar>
struct Column {
  std::vector<std::size_t> rows;
  std::vector<Scalar> values;
};

/// min c^T x  subject to  A x = b, x >= 0. Columns are stored sparse.
template <typename Scalar>
struct Problem {
  std::size_t rows = 0;
  std::vector<Column<Scalar>> columns;
  std::vector<Scalar> b;
  std::vector<Scalar> c;  // empty = pure feasibility (zero objective)

  std::size_t cols() const noexcept { return columns.size(); }
  void add_column(Column<Scalar> col, Scalar cost = Scalar(0));
};

struct Options {
  double tol = 1e-9;              // pivot / feasibility tolerance in floating mode
  std::size_t max_iterations = 200000;
  std::size_t refactor_every = 64;  // rebuild the basis inverse this often (floating mode)
  bool bland = false;             // Bland's rule from the first iteration
};

template <typename Scalar>
struct Result {
  Status status = Status::IterationLimit;
  std::vector<Scalar> x;          // primal solution (Optimal)
  std::vector<Scalar> y;          // duals of the rows (Optimal)
  /// Farkas ray when Infeasible: y^T A <= 0 and y^T b > 0 (floating mode: up
  /// to tolerance).
  std::vector<Scalar> farkas;
  Scalar objective = Scalar(0);
  std::size_t iterations = 0;
  std::size_t phase1_iterations = 0;
  std::vector<std::size_t> dropped_rows;  // redundant equality rows found in phase 1
};

/// Two-phase revised simplex with a dense basis inverse. Dantzig pricing with
/// a switch to Bland's rule after a run of degenerate pivots (always Bland
/// when options.bland is set).
template <typename Scalar>
Result<Scalar> solve(const Problem<Scalar>& p, const Options& opt = {});

}  // namespace fusionlab::lp
