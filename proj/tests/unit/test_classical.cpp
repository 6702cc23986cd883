#include <gtest/gtest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "fusionlab/classical.hpp"

using namespace fusionlab;

TEST(Classical, BlankModelShape) {
  const auto s = scenarios::uc_relaxation();
  const auto m = blank_model(s, {3, 5});
  ASSERT_EQ(m.responses.size(), 3u);
  // C has latent alpha (5) and parents B, A (4 configs), binary outcome
  const auto& rc = m.responses[*s.observable_index("C")];
  EXPECT_EQ(rc.probs.size(), 5u * 4u * 2u);
  EXPECT_FALSE(validate_classical(m).ok());
}

TEST(Classical, BadCardinality) {
  const auto s = scenarios::uc_relaxation();
  try {
    blank_model(s, {2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadCardinality);
  }
  EXPECT_THROW(blank_model(s, {2, 0}), Error);
}

TEST(Classical, DeterministicModelHasZeroOneTables) {
  std::mt19937_64 rng(1);
  const auto m = random_classical_model(scenarios::chain(), {1}, rng, true);
  ASSERT_TRUE(validate_classical(m).ok());
  const auto b = generate_bundle(m, {"A", "B"});
  for (const auto& t : b.tables)
    for (double p : t.probs) EXPECT_TRUE(p == 0.0 || p == 1.0) << p;
}

TEST(Classical, InvalidModelThrowsOnGenerate) {
  std::mt19937_64 rng(1);
  auto m = random_classical_model(scenarios::chain(), {2}, rng);
  m.latent_weights[0][0] += 0.5;
  EXPECT_TRUE(validate_classical(m).has_failure("simplex"));
  try {
    generate_bundle(m, {"A"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidModel);
  }
}

// Property: do(B) leaves the distribution of B's non-descendants unchanged.
TEST(ClassicalProperty, InterventionsLeaveAncestorsAlone) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = random_classical_model(scenarios::chain(), {3}, rng);
    const auto b = generate_bundle(m, {"B"});
    const auto a_obs = marginal(*b.observational(), {"A"});
    for (int s : {0, 1}) {
      const auto a_do = marginal(*b.interventional("B", s), {"A"});
      EXPECT_NEAR(a_do.probs[0], a_obs.probs[0], 1e-12);
    }
  }
}

// Property: with a single latent value the model is a product of local
// mechanisms, so do(A=a) equals conditioning on A=a in the chain.
TEST(ClassicalProperty, NoLatentMeansDoEqualsConditioning) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = random_classical_model(scenarios::chain(), {1}, rng);
    const auto b = generate_bundle(m, {"A"});
    const auto& obs = *b.observational();
    for (int a : {0, 1}) {
      const double pa = marginal(obs, {"A"}).probs[a];
      if (pa < 1e-9) continue;
      const auto* d = b.interventional("A", a);
      for (int bb : {0, 1})
        for (int c : {0, 1}) EXPECT_NEAR(d->at({bb, c}), obs.at({a, bb, c}) / pa, 1e-12);
    }
  }
}

TEST(Classical, ModelJsonHasEveryNode) {
  std::mt19937_64 rng(2);
  const auto m = random_classical_model(scenarios::triangle_edge(), {2, 2, 2}, rng);
  const auto j = model_to_json(m);
  EXPECT_EQ(j["responses"].size(), 3u);
  EXPECT_EQ(j["latents"].size(), 3u);
}
