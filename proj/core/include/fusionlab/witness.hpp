#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fusionlab/quantum.hpp"
#include "fusionlab/tables.hpp"

namespace fusionlab {

struct WitnessReport {
  std::string witness;
  double value = 0.0;
  double bound = 0.0;
  double violation = 0.0;  // value - bound
  std::vector<std::pair<std::string, double>> components;
  /// Extra diagnostics that are not part of the recombination.
  std::vector<std::pair<std::string, double>> auxiliary;

  double component(const std::string& name) const;
};

/// Quadratic witness for the gamma(A,B), alpha(B,C), B->A, B->C, A->C
/// scenario:  W = P^2 - P*I + E_quad + J <= 0  with P = P_A(0|do(B=0)).
///
///   I = 2 P_AB(0,0) + P_B(1) + P_BC(1,0|do(A=0)) + P_ABC(0,1,1) - 2 P_ABC(0,1,0)
///   J = P_AB(0,0) - 2 P_B(0) + 2 P_AB(0,0) - 2 P_ABC(0,1,0)
///   E_quad = 2 P_AB(0,1) P_BC(1,0|do(A=0)) + P_AB(0,0) P_B(0)
///          + (2 P_B(0) - P_AB(0,0)) (P_BC(1,0|do(A=0)) + P_ABC(0,1,1))
///          - P_AB(0,0)^2 - P_ABC(0,1,0)^2
///
/// J keeps its duplicated P_AB(0,0) term unsimplified. The last summand of
/// the middle E_quad factor is P_ABC(0,1,1); the variant with P_ABC(0,1,0)
/// there is reported as auxiliary "E_quad_variant_010". That variant does not
/// give a valid classical bound (see tests).
WitnessReport eval_W(const DataBundle& b);

/// D = P_ABC(1,0,0) + P_ABC(1,1,1) - P_AC(0,0) + P_AC(0,0|do(B=0))
///   + P_BC(b != c|do(A=1)) <= 1  on the chain scenario.
WitnessReport eval_D(const DataBundle& b);

/// S = sum_{x,s} (-1)^{x s} E[(-1)^{a+b} | c = x, A# = s] from Q(a,b,c|A#),
/// reported against the Bell bound 2. On the triangle with edge A -> B that
/// bound is not a classical constraint: the B-C latent can hand C's bit to B,
/// and classical models then reach S = 4. Throws ZeroConditioningEvent.
WitnessReport eval_chsh_fritz(const SwigDistribution& q);

enum class WitnessId { W, D, CHSH };
WitnessId parse_witness(const std::string& name);
std::string_view to_string(WitnessId id);

struct SweepRow {
  double v = 0.0;
  bool ok = false;
  WitnessReport report;
  std::string error;
};

struct SweepResult {
  ProtocolId protocol = ProtocolId::UcRelaxation;
  WitnessId witness = WitnessId::W;
  std::string noise_model;
  std::vector<SweepRow> rows;
  /// Linear-interpolated zeros of the violation between consecutive rows.
  std::vector<double> crossings;
  bool monotone = true;
};

/// Evenly spaced v in [v_from, v_to]; per-point failures are recorded and the
/// sweep continues. `threads` = 0 uses FUSIONLAB_THREADS or 1.
SweepResult sweep(ProtocolId protocol, WitnessId witness, double v_from, double v_to, int steps, unsigned threads = 0);

/// Evaluates a witness on the protocol at visibility v (bundle or SWIG as the
/// witness requires).
WitnessReport evaluate_witness(ProtocolId protocol, WitnessId witness, double v);

std::string sweep_csv(const SweepResult& s);
std::string sweep_svg(const SweepResult& s);
nlohmann::json report_to_json(const WitnessReport& r);

/// Worker count from FUSIONLAB_THREADS (default 1, at least 1).
unsigned worker_count();

/// printf("%.17g")
std::string format17(double x);

}  // namespace fusionlab
