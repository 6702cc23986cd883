#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "fusionlab/classical.hpp"
#include "fusionlab/quantum.hpp"
#include "fusionlab/witness.hpp"

using namespace fusionlab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

/// One-valued latent with deterministic strategies for A, B, C of the chain
/// (indices into each node's strategy space).
ClassicalModel chain_deterministic(int sa, int sb, int sc) {
  const auto s = scenarios::chain();
  auto m = blank_model(s, {1});
  m.latent_weights = {{1.0}};
  const int pick[3] = {sa, sb, sc};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto space = enumerate_strategies(s, s.observables[i].name);
    const auto& f = space.strategies[static_cast<std::size_t>(pick[i])];
    auto& r = m.responses[i];
    for (std::size_t k = 0; k < f.size(); ++k) r.probs[k * 2 + static_cast<std::size_t>(f[k])] = 1.0;
  }
  return m;
}

}  // namespace

// Frozen oracle values at v = 1.
TEST(Witness, WOracle) {
  const auto r = evaluate_witness(ProtocolId::UcRelaxation, WitnessId::W, 1.0);
  EXPECT_NEAR(r.value, (38 * kSqrt2 - 53) / 128, 1e-12);
  EXPECT_NEAR(r.value, 0.005782151330, 1e-11);
  EXPECT_NEAR(r.component("P"), 0.5, 1e-12);
  EXPECT_NEAR(r.component("I"), (18 + 7 * kSqrt2) / 16, 1e-12);
  EXPECT_NEAR(r.component("J"), (kSqrt2 - 1) / 2, 1e-12);
  EXPECT_NEAR(r.component("E_quad"), (51 + 2 * kSqrt2) / 128, 1e-12);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_GT(r.violation, 0.0);
}

// The chain simulation gives D = 1 + sqrt2/8 with this implementation of the
// protocol; frozen here so any change to the simulator is noticed.
TEST(Witness, DSimulatedValue) {
  const auto r = evaluate_witness(ProtocolId::Chain, WitnessId::D, 1.0);
  EXPECT_NEAR(r.value, 1 + kSqrt2 / 8, 1e-12);
  EXPECT_EQ(r.bound, 1.0);
  EXPECT_NEAR(r.component("P_AC(0,0)"), 0.125, 1e-12);
}

TEST(Witness, ChshTsirelsonPoint) {
  const auto r = evaluate_witness(ProtocolId::FritzEdgeTriangle, WitnessId::CHSH, 1.0);
  EXPECT_NEAR(r.value, 2 * kSqrt2, 1e-12);
  EXPECT_NEAR(r.component("E00"), 1 / kSqrt2, 1e-12);
  EXPECT_NEAR(r.component("E11"), -1 / kSqrt2, 1e-12);
  EXPECT_EQ(r.bound, 2.0);
}

// S(v) = 2 sqrt2 v for isotropic noise.
TEST(WitnessProperty, ChshLinearInVisibility) {
  for (double v = 0.0; v <= 1.0; v += 0.1) {
    EXPECT_NEAR(evaluate_witness(ProtocolId::FritzEdgeTriangle, WitnessId::CHSH, v).value, 2 * kSqrt2 * v, 1e-12);
  }
}

TEST(Witness, ChshNeedsTargetA) {
  const auto q = generate_swig(build_protocol({ProtocolId::FritzEdgeTriangle, 1.0}), {"B"});
  try {
    eval_chsh_fritz(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingRegime);
  }
}

TEST(Witness, ChshZeroConditioningEvent) {
  std::mt19937_64 rng(3);
  auto m = random_classical_model(scenarios::triangle_edge(), {1, 1, 1}, rng, true);
  // C constant 0 makes c = 1 impossible
  auto& rc = m.responses[*m.scenario.observable_index("C")];
  for (std::size_t k = 0; k < rc.probs.size(); k += 2) rc.probs[k] = 1.0, rc.probs[k + 1] = 0.0;
  try {
    eval_chsh_fritz(generate_swig(m, {"A"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroConditioningEvent);
  }
}

TEST(Witness, MissingTablesAreReported) {
  const auto b = generate_bundle(build_protocol({ProtocolId::Chain, 1.0}), {"A"});
  try {
    eval_D(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingRegime);
  }
}

// The classical bound of D over all 2*4*4 deterministic chain strategies.
TEST(Witness, DBruteForceBoundIsOne) {
  double best = -1e9;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const auto m = chain_deterministic(a, b, c);
        best = std::max(best, eval_D(generate_bundle(m, {"A", "B"})).value);
      }
  EXPECT_EQ(best, 1.0);
}

// Recombination identity on every evaluation.
TEST(WitnessProperty, WRecombination) {
  std::mt19937_64 rng(8);
  auto check = [](const WitnessReport& r) {
    const double P = r.component("P");
    EXPECT_NEAR(r.value, P * P - P * r.component("I") + r.component("E_quad") + r.component("J"), 1e-12);
  };
  for (double v = 0.0; v <= 1.0; v += 0.05) check(evaluate_witness(ProtocolId::UcRelaxation, WitnessId::W, v));
  for (int t = 0; t < 50; ++t) {
    const auto m = random_classical_model(scenarios::uc_relaxation(), {3, 3}, rng);
    check(eval_W(generate_bundle(m, {"A", "B"})));
  }
}

// W <= 0 on random classical models of its scenario (deterministic and not).
TEST(WitnessProperty, WClassicalBoundHolds) {
  std::mt19937_64 rng(99);
  double worst = -1e9;
  for (int t = 0; t < 400; ++t) {
    const auto m = random_classical_model(scenarios::uc_relaxation(), {1 + t % 4, 1 + (t / 4) % 4}, rng, t % 2 == 0);
    worst = std::max(worst, eval_W(generate_bundle(m, {"A", "B"})).value);
  }
  EXPECT_LE(worst, 1e-12);
}

// The variant that reads P_ABC(0,1,0) in the middle E_quad factor is not a
// classical inequality: some classical model violates it.
TEST(WitnessProperty, WVariantIsNotAValidBound) {
  std::mt19937_64 rng(4);
  double worst = -1e9;
  for (int t = 0; t < 400; ++t) {
    const auto m = random_classical_model(scenarios::uc_relaxation(), {1 + t % 4, 1 + (t / 4) % 4}, rng, true);
    const auto r = eval_W(generate_bundle(m, {"A", "B"}));
    for (const auto& [k, v] : r.auxiliary)
      if (k == "W_variant_010") worst = std::max(worst, v);
  }
  EXPECT_GT(worst, 1e-9);
}

TEST(WitnessProperty, DClassicalBoundHolds) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    const auto m = random_classical_model(scenarios::chain(), {1 + t % 6}, rng, t % 3 == 0);
    EXPECT_LE(eval_D(generate_bundle(m, {"A", "B"})).value, 1.0 + 1e-12);
  }
}

TEST(WitnessProperty, DIsLinearUnderMixing) {
  std::mt19937_64 rng(21);
  const auto q = generate_bundle(build_protocol({ProtocolId::Chain, 1.0}), {"A", "B"});
  for (int t = 0; t < 20; ++t) {
    const auto c = generate_bundle(random_classical_model(scenarios::chain(), {3}, rng), {"A", "B"});
    const double w = t / 19.0;
    EXPECT_NEAR(eval_D(mix(q, c, w)).value, w * eval_D(q).value + (1 - w) * eval_D(c).value, 1e-12);
  }
}

// B can read C's bit from the B-C latent, so deterministic classical models
// on the triangle with edge reach the algebraic maximum S = 4.
TEST(Witness, ChshBellBoundIsNotClassicalHere) {
  const auto s = scenarios::triangle_edge();
  auto m = blank_model(s, {2, 1, 2});  // alpha (B,C), beta (A,C), gamma (A,B)
  m.latent_weights = {{0.5, 0.5}, {1.0}, {0.5, 0.5}};
  auto& A = m.responses[0];
  auto& B = m.responses[1];
  auto& C = m.responses[2];
  for (int u = 0; u < 2; ++u) A.probs[u * 2 + u] = 1.0;  // a = gamma
  for (int x = 0; x < 2; ++x) C.probs[x * 2 + x] = 1.0;  // c = alpha
  for (int x = 0; x < 2; ++x)
    for (int u = 0; u < 2; ++u)
      for (int in = 0; in < 2; ++in) {
        const int b = u ^ (x & in);
        B.probs[((x * 2 + u) * 2 + in) * 2 + b] = 1.0;
      }
  ASSERT_TRUE(validate_classical(m).ok());
  EXPECT_NEAR(eval_chsh_fritz(generate_swig(m, {"A"})).value, 4.0, 1e-12);
}

TEST(Sweep, WEndpointsAndCrossing) {
  const auto s = sweep(ProtocolId::UcRelaxation, WitnessId::W, 0.0, 1.0, 101, 1);
  ASSERT_EQ(s.rows.size(), 101u);
  EXPECT_LE(s.rows.front().report.violation, 0.0);
  EXPECT_GT(s.rows.back().report.violation, 0.0);
  EXPECT_NEAR(s.rows.back().report.value, 0.005782151330, 1e-11);
  ASSERT_EQ(s.crossings.size(), 1u);
  EXPECT_GT(s.crossings[0], 0.97);
  EXPECT_LT(s.crossings[0], 0.99);
}

TEST(Sweep, ChshCrossingAtInverseSqrt2) {
  const auto s = sweep(ProtocolId::FritzEdgeTriangle, WitnessId::CHSH, 0.0, 1.0, 101, 2);
  ASSERT_EQ(s.crossings.size(), 1u);
  EXPECT_NEAR(s.crossings[0], 1 / kSqrt2, 0.01);
  EXPECT_TRUE(s.monotone);
}

// With this simulator D grows with visibility, so its violation decreases as
// the source gets noisier.
TEST(Sweep, DMonotoneInVisibility) {
  const auto s = sweep(ProtocolId::Chain, WitnessId::D, 0.0, 1.0, 21, 1);
  EXPECT_TRUE(s.monotone);
  for (std::size_t i = 1; i < s.rows.size(); ++i) EXPECT_GT(s.rows[i].report.value, s.rows[i - 1].report.value);
  EXPECT_NE(s.noise_model.find("artifact choice"), std::string::npos);
}

TEST(Sweep, PointFailuresAreRecorded) {
  // CHSH at v = 0 is defined; the D witness on the Fritz protocol lacks tables
  const auto s = sweep(ProtocolId::FritzEdgeTriangle, WitnessId::D, 0.0, 1.0, 3, 1);
  for (const auto& r : s.rows) {
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.error.empty());
  }
  EXPECT_NE(sweep_csv(s).find("error"), std::string::npos);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  const auto a = sweep_csv(sweep(ProtocolId::UcRelaxation, WitnessId::W, 0.0, 1.0, 33, 1));
  const auto b = sweep_csv(sweep(ProtocolId::UcRelaxation, WitnessId::W, 0.0, 1.0, 33, 4));
  EXPECT_EQ(a, b);
}

TEST(Sweep, CsvAndSvgFormat) {
  const auto s = sweep(ProtocolId::UcRelaxation, WitnessId::W, 0.0, 1.0, 3, 1);
  const auto csv = sweep_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "v,value,bound,violation,P,I,J,E_quad,error");
  EXPECT_NE(csv.find("0.0057821513"), std::string::npos);
  const auto svg = sweep_svg(s);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_THROW(sweep(ProtocolId::UcRelaxation, WitnessId::W, 0, 1, 1), Error);
}

TEST(Witness, Format17RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 2 * kSqrt2, 1e-300}) EXPECT_EQ(std::stod(format17(x)), x);
}

TEST(Witness, ReportJson) {
  const auto j = report_to_json(evaluate_witness(ProtocolId::Chain, WitnessId::D, 1.0));
  EXPECT_EQ(j["witness"], "D");
  EXPECT_EQ(j["components"].size(), 5u);
}
