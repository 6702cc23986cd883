#pragma once

// Shared by the feasibility backends: deterministic response functions of a
// scenario and the data functionals they hit.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fusionlab/feasibility.hpp"
#include "fusionlab/scenario.hpp"
#include "fusionlab/tables.hpp"

namespace fusionlab::detail {

inline constexpr std::size_t kNoEntry = std::numeric_limits<std::size_t>::max();

/// One deterministic strategy per observable; a response config is a tuple of
/// strategy indices, encoded with the first observable most significant.
struct ResponseBasis {
  Scenario scenario;
  std::vector<StrategySpace> spaces;                // observable order
  std::vector<std::vector<std::size_t>> parent_pos;  // observable index of each parent
  std::vector<std::size_t> topo;
  std::size_t config_count = 1;

  explicit ResponseBasis(const Scenario& s);

  std::vector<std::size_t> decode(std::size_t config) const;
  std::size_t encode(const std::vector<std::size_t>& strategies) const;
  /// Natural outcomes of every observable; passed[i] >= 0 replaces what the
  /// children of observable i see.
  void run(const std::vector<std::size_t>& strategies, const std::vector<int>& passed, std::vector<int>& out) const;
};

/// Linear data functionals over response configs: row i says
/// sum_r coeff[i][r] * mu(r) = rhs[i]. entry[i] is the data index the rhs
/// came from (kNoEntry for constants such as normalization rows).
struct DataRows {
  std::vector<std::vector<double>> coeff;
  std::vector<double> rhs;
  std::vector<std::size_t> entry;
  std::vector<std::string> label;
  std::vector<double> data;                 // full data vector
  std::vector<std::string> data_labels;     // label per data index
  std::vector<std::string> data_exact;      // exact decimal per data index, may be empty

  std::size_t size() const { return rhs.size(); }
};

/// Rows for every entry of the selected tables; entry indices refer to
/// b.flat().
DataRows bundle_rows(const ResponseBasis& rb, const DataBundle& b, const std::vector<std::size_t>& tables);
/// Rows of the bundle's SWIG constraint system (one per equality).
DataRows swig_constraint_rows(const ResponseBasis& rb, const DataBundle& b);
/// One row per entry of a full SWIG distribution.
DataRows swig_rows(const ResponseBasis& rb, const SwigDistribution& q);

/// Accumulates polynomial terms keyed by their sorted entry list.
class TermBuilder {
 public:
  void add(double coeff, std::vector<std::size_t> entries);
  /// Adds coeff * f_i * f_j where f_k is row k's value (data entry or rhs).
  void add_rows(double coeff, const DataRows& rows, std::size_t i, std::size_t j = kNoEntry);
  Certificate build(const DataRows& rows, double bound, double drop_below = 0.0) const;

 private:
  std::vector<std::pair<std::vector<std::size_t>, double>> terms_;
};

double seconds_since(double start);
double now_seconds();

}  // namespace fusionlab::detail
