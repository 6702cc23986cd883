#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fusionlab/regime.hpp"
#include "fusionlab/scenario.hpp"
#include "fusionlab/tables.hpp"

namespace fusionlab {

/// p_X(x | observed parents, latent parents). probs is laid out as
/// [latent config][parent config][outcome], latent configs lexicographic over
/// `latent_parents` (scenario latent order), parent configs over `parents`.
struct ResponseTable {
  std::string node;
  int outcome_card = 2;
  std::vector<ParentSlot> parents;
  std::vector<std::string> latent_parents;
  std::vector<int> latent_cards;
  std::vector<double> probs;

  double at(std::size_t latent_config, std::size_t parent_config, int outcome) const;
};

/// Independent latents with finite cardinalities and per-node response
/// tables.
struct ClassicalModel {
  Scenario scenario;
  std::vector<int> latent_cards;                 // scenario latent order
  std::vector<std::vector<double>> latent_weights;
  std::vector<ResponseTable> responses;          // scenario observable order
};

ValidationReport validate_classical(const ClassicalModel& m, double tol = 1e-12);

std::vector<double> evaluate(const ClassicalModel& m, const Regime& regime);
DataBundle generate_bundle(const ClassicalModel& m, const std::vector<std::string>& targets);
SwigDistribution generate_swig(const ClassicalModel& m, const std::vector<std::string>& targets);

/// Empty response tables with the right shape (all zeros).
ClassicalModel blank_model(const Scenario& s, const std::vector<int>& latent_cards);

/// Dirichlet(1) latent weights; responses are random deterministic
/// functions, or random stochastic tables when `deterministic` is false.
ClassicalModel random_classical_model(const Scenario& s, const std::vector<int>& latent_cards, std::mt19937_64& rng,
                                      bool deterministic = false);

/// Largest absolute entry difference between the model's bundle and `b`
/// (same targets, same table order).
double replay_error(const ClassicalModel& m, const DataBundle& b);

nlohmann::json model_to_json(const ClassicalModel& m);

}  // namespace fusionlab
