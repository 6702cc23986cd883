#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fusionlab/classical.hpp"
#include "fusionlab/quantum.hpp"
#include "fusionlab/tables.hpp"

namespace fusionlab {

enum class Feasibility { Feasible, Infeasible, Unknown };
std::string_view to_string(Feasibility f);

/// Polynomial inequality  sum_k coeff_k * prod(data[entries_k]) <= bound  over
/// a data vector (bundle.flat() or SWIG probs). Terms have degree 0, 1 or 2.
struct Certificate {
  struct Term {
    double coeff = 0.0;
    std::vector<std::size_t> entries;
    std::string label;
    std::string exact_coeff;  // rational string when produced in exact mode
  };
  std::vector<Term> terms;
  double bound = 0.0;
  std::string exact_bound;
  /// Value on the data the verdict was computed from.
  double value = 0.0;

  double evaluate(const std::vector<double>& data) const;
  /// evaluate(data) - bound
  double separation(const std::vector<double>& data) const { return evaluate(data) - bound; }
};

struct SolverDiagnostics {
  std::string solver;
  double runtime_seconds = 0.0;
  std::size_t iterations = 0;  // simplex pivots, or B&B nodes
  std::vector<std::string> notes;
};

struct FeasibilityVerdict {
  Feasibility status = Feasibility::Unknown;
  /// Feasible (lp, bnb): a classical model that replays the data.
  std::optional<ClassicalModel> model;
  /// Infeasible (lp, inflation): separating inequality.
  std::optional<Certificate> certificate;
  /// bnb: global lower bound on the L-infinity distance after each node.
  std::vector<double> lower_bound_trace;
  /// bnb: best distance found by a feasible model.
  std::optional<double> best_distance;
  /// inflation Feasible: largest data-row residual of the LP solution's
  /// single-copy marginal (no classical model is implied).
  std::optional<double> relaxation_residual;
  SolverDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// LP membership (one latent shared by every observable)

struct LpOptions {
  /// Indices into bundle.tables; empty = all tables.
  std::vector<std::size_t> tables;
  /// Latent size for the returned model; 0 = support of the LP solution.
  int cardinality = 0;
  bool exact = false;  // rational simplex, exact certificate
  double tol = 1e-8;
};

/// Columns are the products of deterministic strategies of all observables,
/// rows are every entry of the selected tables. Feasible returns the mixture
/// as a one-latent ClassicalModel; Infeasible returns a linear Farkas
/// inequality shifted so that its classical bound is exactly 0.
/// Throws WrongTopology (not exactly one latent over all observables),
/// DegenerateBundle (no tables selected), BadCardinality.
FeasibilityVerdict lp_membership(const DataBundle& b, const LpOptions& opt = {});

/// Maximum of sum_e coeff[e] * entry_e over one-latent classical models,
/// with entries laid out like layout.flat().
double lp_maximize(const DataBundle& layout, const std::vector<double>& coeff);

/// Parses "obs,doA1,doB0" into table indices of b. Throws InvalidArgument.
std::vector<std::size_t> select_tables(const DataBundle& b, const std::string& spec);
/// "obs" or "do<target><setting>".
std::string table_tag(const DataTable& t);

// ---------------------------------------------------------------------------
// Branch and bound (two independent latents)

struct BnbOptions {
  /// Per-latent sizes in scenario latent order. Each latent's size must equal
  /// the product of the strategy counts of the observables that depend on it
  /// alone (their randomness is absorbed into the latent); empty = those
  /// products.
  std::vector<int> cardinalities;
  double tol = 1e-8;
  double budget_seconds = 600.0;
  std::size_t max_nodes = 0;  // 0 = unlimited
};

/// min over classical models of the L-infinity distance to the bundle. At
/// most two latents; at most one observable may depend on both, and it keeps
/// a free stochastic response. Bilinear weight products are relaxed with
/// McCormick envelopes and refined by best-bound branching on the weight with
/// the largest envelope gap. Throws UnsupportedStructure, BadCardinality.
FeasibilityVerdict bb_feasibility(const DataBundle& b, const BnbOptions& opt = {});

/// Default cardinalities for bb_feasibility; throws UnsupportedStructure.
std::vector<int> bb_default_cardinalities(const Scenario& s);

// ---------------------------------------------------------------------------
// Inflation

struct InflationOptions {
  int order = 2;
  /// Pin the bundle through its SWIG constraint system (diagonal and marginal
  /// functionals of Q) instead of table entries.
  bool use_swig = false;
  std::size_t max_variables = 10'000'000;
  double tol = 1e-8;
};

/// Response-function inflation: each observable is replaced by its response
/// function, which depends on its latents only. The order-n inflation keeps n
/// copies of every latent and one response copy per combination of latent
/// copies. LP variables are the inflated joint distribution, averaged over
/// the copy-permutation group (one column per orbit). Rows: normalization,
/// the data on the all-0 copy, and the products of data on the all-0 and
/// all-1 copies, which share no latent copy. Throws SizeLimit.
FeasibilityVerdict inflation_lp(const DataBundle& b, const InflationOptions& opt = {});
/// Same with every entry of a full SWIG distribution pinned.
FeasibilityVerdict inflation_lp(const SwigDistribution& q, const InflationOptions& opt = {});

// ---------------------------------------------------------------------------
// Visibility threshold

enum class SolverId { Lp, Bnb, Inflation };
SolverId parse_solver(const std::string& name);
std::string_view to_string(SolverId id);

struct ThresholdProbe {
  double v = 0.0;
  Feasibility status = Feasibility::Unknown;
  double runtime_seconds = 0.0;
};

struct ThresholdResult {
  double v_star = 0.0;
  double lo = 0.0;  // last Feasible probe
  double hi = 1.0;  // last Infeasible probe
  std::vector<ThresholdProbe> probes;
};

struct ThresholdOptions {
  double precision = 0.01;
  double tol = 1e-8;
  double budget_seconds = 600.0;  // bnb, per probe
  int inflation_order = 2;
  bool use_swig = false;
};

/// Verdict of one solver on protocol p at its visibility (all tables, default
/// targets).
FeasibilityVerdict run_solver(const ProtocolSpec& p, SolverId solver, const ThresholdOptions& opt);

/// Bisection on [0, 1]; v = 0 must be Feasible and v = 1 Infeasible. Throws
/// NonMonotoneOrBudget on an Unknown probe or when the endpoints do not
/// bracket a boundary (message lists every probe).
ThresholdResult visibility_threshold(ProtocolId protocol, SolverId solver, const ThresholdOptions& opt = {});

nlohmann::json verdict_to_json(const FeasibilityVerdict& v);
nlohmann::json threshold_to_json(const ThresholdResult& r);

}  // namespace fusionlab
