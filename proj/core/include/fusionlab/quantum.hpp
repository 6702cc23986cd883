#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fusionlab/linalg.hpp"
#include "fusionlab/regime.hpp"
#include "fusionlab/scenario.hpp"
#include "fusionlab/tables.hpp"

namespace fusionlab {

struct Subsystem {
  int dim = 2;
  std::string owner;  // observable that holds this share of the source
};

struct LatentState {
  std::string latent;
  ComplexMatrix rho;
  std::vector<Subsystem> subsystems;
};

/// effects[config][outcome] acts on the node's composite space: the tensor
/// product of its owned subsystems in global order (latents sorted by name,
/// subsystems in declared order inside a latent).
struct EffectFamily {
  std::string node;
  int outcome_card = 2;
  std::vector<ParentSlot> parents;
  std::vector<std::vector<ComplexMatrix>> effects;
};

struct QuantumCausalModel {
  Scenario scenario;
  std::vector<LatentState> latents;
  std::vector<EffectFamily> effects;

  /// Dimension of the space an observable's effects act on.
  std::size_t node_dim(const std::string& node) const;
};

ValidationReport validate_model(const QuantumCausalModel& m, double tol = 1e-9);

/// Probabilities over regime.axes(): Tr(rho (x) effects), each node's effect
/// conditioned on the values its parents pass; unmeasured nodes contribute
/// the identity. Throws InvalidModel or NonPhysicalProbability.
std::vector<double> evaluate(const QuantumCausalModel& m, const Regime& regime);

DataBundle generate_bundle(const QuantumCausalModel& m, const std::vector<std::string>& targets);
SwigDistribution generate_swig(const QuantumCausalModel& m, const std::vector<std::string>& targets);

enum class ProtocolId { UcRelaxation, Chain, FritzEdgeTriangle };

struct ProtocolSpec {
  ProtocolId id = ProtocolId::UcRelaxation;
  double visibility = 1.0;
};

/// Accepts "uc_relaxation"/"uc-relaxation", "chain",
/// "fritz_edge_triangle"/"fritz-edge-triangle". Throws UnknownProtocol.
ProtocolId parse_protocol(std::string_view name);
std::string_view to_string(ProtocolId id);

/// Nodes interrupted by default: uc_relaxation {A, B}, chain {A, B},
/// fritz_edge_triangle {A}.
std::vector<std::string> default_targets(ProtocolId id);
Scenario protocol_scenario(ProtocolId id);

/// Throws OutOfRange for v outside [0,1].
QuantumCausalModel build_protocol(const ProtocolSpec& p);

/// v*state + (1-v)*I/d. Throws OutOfRange.
ComplexMatrix isotropic(const ComplexMatrix& state, double v);

/// (|00> + |11>)/sqrt(2) as a density matrix.
ComplexMatrix phi_plus();

}  // namespace fusionlab
