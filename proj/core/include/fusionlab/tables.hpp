#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fusionlab/error.hpp"
#include "fusionlab/scenario.hpp"

namespace fusionlab {

enum class TableKind { Observational, Interventional };

struct Axis {
  std::string name;
  int card = 2;
  bool operator==(const Axis&) const = default;
};

/// One probability table, flattened lexicographically over `axes` (first axis
/// most significant).
struct DataTable {
  TableKind kind = TableKind::Observational;
  std::string target;  // interventional only
  int setting = 0;     // interventional only
  std::vector<Axis> axes;
  std::vector<double> probs;
  /// Decimal strings as read from a bundle file, kept so exact-rational LP
  /// mode can use the written values rather than their binary64 rounding.
  /// Empty when the table was computed in-process.
  std::vector<std::string> exact;

  bool operator==(const DataTable&) const = default;

  std::size_t size() const;
  std::optional<std::size_t> axis_index(const std::string& name) const;
  /// Flat index of an outcome tuple given in axis order.
  std::size_t index(const std::vector<int>& outcome) const;
  std::vector<int> outcome(std::size_t flat) const;
  double at(const std::vector<int>& outcome) const { return probs[index(outcome)]; }
  /// "P(A,B,C)" or "P(B,C|do(A=0))".
  std::string label() const;
  /// Label of one entry, e.g. "P(A=0,B=1|do(C=1))".
  std::string entry_label(std::size_t flat) const;
};

DataTable make_table(std::vector<Axis> axes, std::vector<double> probs);
DataTable make_do_table(std::string target, int setting, std::vector<Axis> axes, std::vector<double> probs);

/// Sums out every axis not in `keep`; output axes follow the order of `keep`.
DataTable marginal(const DataTable& t, const std::vector<std::string>& keep);

/// One observational table plus do-tables fused over one scenario. The
/// scenario is the un-interrupted DAG.
struct DataBundle {
  Scenario scenario;
  std::vector<DataTable> tables;

  const DataTable* observational() const;
  const DataTable* interventional(const std::string& target, int setting) const;
  /// Nodes with at least one do-table, in scenario observable order.
  std::vector<std::string> targets() const;
  /// Sub-bundle keeping only the tables with the given indices.
  DataBundle subset(const std::vector<std::size_t>& table_indices) const;
  /// Concatenated probabilities of every table, in table order.
  std::vector<double> flat() const;
  std::size_t entry_count() const;
};

ValidationReport validate_bundle(const DataBundle& b, double tol = 1e-9);
/// Throws InvalidBundle carrying the diagnostics summary.
void require_valid(const DataBundle& b, double tol = 1e-9);

/// Convex combination t*b1 + (1-t)*b2 of two bundles with identical layout.
DataBundle mix(const DataBundle& b1, const DataBundle& b2, double t);

/// Q(outcomes | settings) for one set of interrupted targets. Storage is
/// settings-major: probs[s * outcome_count + o] with both indices
/// lexicographic (settings in `targets` order, outcomes in scenario
/// observable order).
struct SwigDistribution {
  Scenario scenario;  // un-interrupted
  std::vector<std::string> targets;
  std::vector<Axis> outcome_axes;
  std::vector<int> setting_cards;
  std::vector<double> probs;

  std::size_t outcome_count() const;
  std::size_t setting_count() const;
  double at(std::size_t setting_flat, std::size_t outcome_flat) const {
    return probs[setting_flat * outcome_count() + outcome_flat];
  }
  std::size_t setting_index(const std::vector<int>& settings) const;
  std::vector<int> setting_values(std::size_t flat) const;
  std::vector<int> outcome_values(std::size_t flat) const;
};

/// Throws NotNormalized if any setting block misses unit sum by > tol or has
/// a negative entry.
void check_normalized(const SwigDistribution& q, double tol = 1e-9);

/// A sparse 0/1 equality  sum_{k in vars} Q_k = rhs.
struct SwigEquality {
  std::vector<std::size_t> vars;
  double rhs = 0.0;
  /// Table index in the bundle and flat entry, or table = npos for a
  /// normalization row.
  std::size_t table = static_cast<std::size_t>(-1);
  std::size_t entry = 0;
  std::string label;
};

struct SwigConstraintSystem {
  std::vector<std::string> targets;
  std::vector<Axis> outcome_axes;
  std::vector<int> setting_cards;
  std::size_t variable_count = 0;
  std::vector<SwigEquality> equalities;

  /// Largest |lhs - rhs| for a candidate Q in SwigDistribution layout.
  double max_residual(const std::vector<double>& q) const;
};

/// Ties every bundle entry to the SWIG distribution: in the observational
/// regime all settings equal the natural outcomes; under do(T=s) the setting
/// of T is s, other settings follow their natural outcomes, and T's own
/// outcome plus any axis missing from the table is summed out. Throws
/// MissingRegime if a target lacks a setting value or the observational
/// table is absent.
SwigConstraintSystem swig_constraints(const DataBundle& b);

void to_json(nlohmann::json& j, const DataTable& t);
void from_json(const nlohmann::json& j, DataTable& t);
nlohmann::json bundle_to_json(const DataBundle& b);
/// `base_dir` resolves a relative scenario path.
DataBundle bundle_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
DataBundle load_bundle(const std::string& path);
std::string dump_bundle(const DataBundle& b);

nlohmann::json swig_to_json(const SwigDistribution& q);
SwigDistribution swig_from_json(const nlohmann::json& j);

}  // namespace fusionlab
