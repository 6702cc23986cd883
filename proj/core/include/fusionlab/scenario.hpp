#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fusionlab/error.hpp"

namespace fusionlab {

struct Observable {
  std::string name;
  int card = 2;
  bool operator==(const Observable&) const = default;
};

struct Latent {
  std::string name;
  std::vector<std::string> children;
  bool operator==(const Latent&) const = default;
};

/// Exogenous input created by interruption, named "<node>#".
struct SettingNode {
  std::string name;
  int card = 2;
  bool operator==(const SettingNode&) const = default;
};

struct Edge {
  std::string from;
  std::string to;
  bool operator==(const Edge&) const = default;
};

struct ParentSlot {
  std::string name;
  int card = 2;
  bool operator==(const ParentSlot&) const = default;
};

/// Latent-exogenous DAG over observables and setting nodes. Latent
/// cardinalities are solver parameters and are not stored here.
struct Scenario {
  std::vector<Observable> observables;
  std::vector<Latent> latents;
  std::vector<Edge> edges;
  std::vector<SettingNode> settings;

  bool operator==(const Scenario&) const = default;

  std::optional<std::size_t> observable_index(const std::string& name) const;
  std::optional<std::size_t> setting_index(const std::string& name) const;
  std::optional<std::size_t> latent_index(const std::string& name) const;
  bool is_observable(const std::string& name) const { return observable_index(name).has_value(); }
  bool is_setting(const std::string& name) const { return setting_index(name).has_value(); }

  /// Cardinality of an observable or setting node; UnknownNode otherwise.
  int card(const std::string& name) const;

  /// Non-latent parents of an observable in edge declaration order.
  std::vector<ParentSlot> parents(const std::string& node) const;
  /// Names of latents that have `node` among their children, in latent order.
  std::vector<std::string> latent_parents(const std::string& node) const;
  std::vector<std::string> children(const std::string& node) const;

  /// Observables in an order compatible with the observable edges. Throws
  /// InvalidScenario on a cycle.
  std::vector<std::string> topological_order() const;

  /// Names of the interrupted nodes, i.e. settings with the trailing '#'
  /// removed, in setting order.
  std::vector<std::string> interrupted_nodes() const;
};

ValidationReport validate(const Scenario& s);

/// Splits `node` into its natural outcome (same name, keeps incoming edges) and
/// a new setting "<node>#" that takes over every outgoing edge.
Scenario interrupt(const Scenario& s, const std::string& node);
Scenario interrupt(const Scenario& s, const std::vector<std::string>& nodes);

std::string setting_name(const std::string& node);

/// All deterministic response functions of an observable given its non-latent
/// parents. Strategy k maps parent configuration j (lexicographic over
/// `parents`, first parent most significant) to digit j of k written in base
/// `outcome_card` with the first configuration as the most significant digit,
/// so strategies are ordered lexicographically by their function tables.
struct StrategySpace {
  std::string node;
  int outcome_card = 2;
  std::vector<ParentSlot> parents;
  std::size_t configs = 1;
  std::vector<std::vector<int>> strategies;

  std::size_t size() const noexcept { return strategies.size(); }
  /// Index of a parent configuration (values in parent order).
  std::size_t config_index(const std::vector<int>& parent_values) const;
};

/// Number of configurations of a parent list (product of cardinalities).
std::size_t config_count(const std::vector<ParentSlot>& parents);

/// Decodes a lexicographic configuration index into per-parent values.
std::vector<int> decode_config(const std::vector<ParentSlot>& parents, std::size_t index);

/// Throws SizeLimit beyond 2^22 strategies.
StrategySpace enumerate_strategies(const Scenario& s, const std::string& node);

void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string dump_scenario(const Scenario& s);

namespace scenarios {
/// Fig. 1a style: triangle of latents with an extra edge A -> B.
Scenario triangle_edge();
/// gamma(A,B), alpha(B,C) with edges B -> A, B -> C, A -> C.
Scenario uc_relaxation();
/// One latent Lambda over A, B, C with A -> B -> C.
Scenario chain();
}  // namespace scenarios

}  // namespace fusionlab
