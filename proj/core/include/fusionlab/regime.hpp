#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fusionlab/tables.hpp"

namespace fusionlab {

/// Which observables are measured and what value each node passes to its
/// children. Indexed by scenario observable position.
///   observational:      measured = true,  passed = -1 (natural value)
///   do(X = s):          measured = false, passed = s
///   SWIG setting X# = s: measured = true,  passed = s
struct Regime {
  std::vector<bool> measured;
  std::vector<int> passed;

  static Regime observational(const Scenario& s);
  static Regime intervention(const Scenario& s, const std::string& node, int setting);
  /// Natural outcomes of every node measured, `targets` pass `settings`.
  static Regime swig(const Scenario& s, const std::vector<std::string>& targets, const std::vector<int>& settings);

  std::vector<Axis> axes(const Scenario& s) const;
};

/// Returns probabilities over regime.axes(), lexicographic.
using RegimeEvaluator = std::function<std::vector<double>(const Regime&)>;

/// Observational table plus one do-table per target and setting value.
DataBundle bundle_from_evaluator(const Scenario& s, const std::vector<std::string>& targets,
                                 const RegimeEvaluator& eval);

SwigDistribution swig_from_evaluator(const Scenario& s, const std::vector<std::string>& targets,
                                     const RegimeEvaluator& eval);

/// Observational = diagonal Q(o | settings = natural values); do-tables =
/// marginals of Q(. | target = s) over the target outcome, other settings on
/// the diagonal. Throws NotNormalized.
DataBundle bundle_from_swig(const SwigDistribution& q, double tol = 1e-9);

}  // namespace fusionlab
