#include <gtest/gtest.h>

#include <cmath>

#include "fusionlab/quantum.hpp"
#include "fusionlab/regime.hpp"

using namespace fusionlab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

double max_diff(const DataTable& a, const DataTable& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) d = std::max(d, std::abs(a.probs[i] - b.probs[i]));
  return d;
}

}  // namespace

TEST(Quantum, ProtocolNames) {
  EXPECT_EQ(parse_protocol("uc-relaxation"), ProtocolId::UcRelaxation);
  EXPECT_EQ(parse_protocol("uc_relaxation"), ProtocolId::UcRelaxation);
  EXPECT_EQ(parse_protocol("fritz-edge-triangle"), ProtocolId::FritzEdgeTriangle);
  EXPECT_EQ(parse_protocol("chain"), ProtocolId::Chain);
  try {
    parse_protocol("bell");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownProtocol);
  }
  EXPECT_THROW(build_protocol({ProtocolId::Chain, -0.1}), Error);
  EXPECT_THROW(build_protocol({ProtocolId::Chain, 1.1}), Error);
}

TEST(Quantum, ProtocolModelsValidate) {
  for (auto id : {ProtocolId::UcRelaxation, ProtocolId::Chain, ProtocolId::FritzEdgeTriangle})
    for (double v : {0.0, 0.5, 1.0}) {
      const auto m = build_protocol({id, v});
      EXPECT_TRUE(validate_model(m).ok()) << validate_model(m).summary();
    }
}

TEST(Quantum, PhiPlusCorrelations) {
  const auto rho = phi_plus();
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho(0, 3).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho(1, 1).real(), 0.0, 1e-15);
}

// Frozen oracle values of the uc-relaxation tables at v = 1.
TEST(Quantum, UcRelaxationOracleEntries) {
  const auto b = generate_bundle(build_protocol({ProtocolId::UcRelaxation, 1.0}), {"A", "B"});
  const auto* doB0 = b.interventional("B", 0);
  ASSERT_NE(doB0, nullptr);
  EXPECT_NEAR(marginal(*doB0, {"A"}).probs[0], 0.5, 1e-12);
  const auto* obs = b.observational();
  ASSERT_NE(obs, nullptr);
  EXPECT_NEAR(marginal(*obs, {"B"}).probs[0], 0.5, 1e-12);
}

TEST(Quantum, ChainOracleEntries) {
  const auto b = generate_bundle(build_protocol({ProtocolId::Chain, 1.0}), {"A", "B"});
  const auto* obs = b.observational();
  EXPECT_NEAR(marginal(*obs, {"A", "C"}).probs[0], 0.125, 1e-12);
  // psi- and theta+ overlap by (1-i)/2, so A's reduced state is not I/2 and
  // sigma_x gives outcome 0 with probability (2+sqrt2)/4.
  EXPECT_NEAR(marginal(*obs, {"A"}).probs[0], (2 + kSqrt2) / 4, 1e-12);
}

// Interventions on a node never change the distribution of its non-descendants.
TEST(QuantumProperty, NoSignallingToNonDescendants) {
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto chain = generate_bundle(build_protocol({ProtocolId::Chain, v}), {"A", "B"});
    const auto a_obs = marginal(*chain.observational(), {"A"});
    for (int s : {0, 1}) EXPECT_LT(max_diff(marginal(*chain.interventional("B", s), {"A"}), a_obs), 1e-9);

    const auto uc = generate_bundle(build_protocol({ProtocolId::UcRelaxation, v}), {"A", "B"});
    const auto b_obs = marginal(*uc.observational(), {"B"});
    for (int s : {0, 1}) EXPECT_LT(max_diff(marginal(*uc.interventional("A", s), {"B"}), b_obs), 1e-9);
  }
}

// Every generated table is a probability distribution.
TEST(QuantumProperty, TablesNormalized) {
  for (auto id : {ProtocolId::UcRelaxation, ProtocolId::Chain, ProtocolId::FritzEdgeTriangle})
    for (double v = 0.0; v <= 1.0; v += 0.125) {
      const auto b = generate_bundle(build_protocol({id, v}), default_targets(id));
      for (const auto& t : b.tables) {
        double sum = 0;
        for (double p : t.probs) {
          EXPECT_GE(p, -1e-12);
          sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12) << t.label();
      }
      EXPECT_NO_THROW(check_normalized(generate_swig(build_protocol({id, v}), default_targets(id))));
    }
}

TEST(Quantum, VisibilityZeroIsUniformOnSourceBits) {
  const auto b = generate_bundle(build_protocol({ProtocolId::FritzEdgeTriangle, 0.0}), {"A"});
  const auto* obs = b.observational();
  for (const auto& a : obs->axes) {
    const auto m = marginal(*obs, {a.name});
    EXPECT_GT(m.probs[0], 0.0);
  }
}

TEST(Quantum, InvalidModelRejected) {
  auto m = build_protocol({ProtocolId::Chain, 1.0});
  m.effects.pop_back();
  EXPECT_FALSE(validate_model(m).ok());
  EXPECT_THROW(evaluate(m, Regime::observational(m.scenario)), Error);
}
