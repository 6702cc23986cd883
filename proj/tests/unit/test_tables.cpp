#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "fusionlab/classical.hpp"
#include "fusionlab/quantum.hpp"
#include "fusionlab/regime.hpp"
#include "fusionlab/tables.hpp"

using namespace fusionlab;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double d = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<std::string> all_targets(const Scenario& s) {
  std::vector<std::string> t;
  for (const auto& o : s.observables) t.push_back(o.name);
  return t;
}

}  // namespace

TEST(Tables, IndexingAndLabels) {
  const auto t = make_table({{"A", 2}, {"B", 3}}, {0.1, 0.1, 0.1, 0.2, 0.2, 0.3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.index({1, 2}), 5u);
  EXPECT_EQ(t.outcome(4), (std::vector<int>{1, 1}));
  EXPECT_DOUBLE_EQ(t.at({1, 0}), 0.2);
  EXPECT_EQ(t.label(), "P(A,B)");
  const auto d = make_do_table("C", 1, {{"A", 2}}, {0.5, 0.5});
  EXPECT_EQ(d.label(), "P(A|do(C=1))");
  EXPECT_EQ(d.entry_label(1), "P(A=1|do(C=1))");
  EXPECT_THROW(t.index({2, 0}), Error);
}

TEST(Tables, MarginalReordersAxes) {
  const auto t = make_table({{"A", 2}, {"B", 2}}, {0.1, 0.2, 0.3, 0.4});
  const auto m = marginal(t, {"B", "A"});
  EXPECT_DOUBLE_EQ(m.at({1, 0}), 0.2);
  const auto a = marginal(t, {"A"});
  EXPECT_NEAR(a.probs[0], 0.3, 1e-15);
  try {
    marginal(t, {"Q"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAxis);
  }
}

TEST(Tables, ValidateBundleCatchesProblems) {
  auto b = generate_bundle(build_protocol({ProtocolId::Chain, 1.0}), {"A", "B"});
  ASSERT_TRUE(validate_bundle(b).ok());

  auto bad = b;
  bad.tables[0].probs[0] += 1e-3;
  EXPECT_TRUE(validate_bundle(bad).has_failure("normalization"));

  bad = b;
  bad.tables.pop_back();
  EXPECT_TRUE(validate_bundle(bad).has_failure("regimes"));

  bad = b;
  bad.tables[1].axes[0].card = 3;
  EXPECT_FALSE(validate_bundle(bad).ok());
  EXPECT_THROW(require_valid(bad), Error);
}

TEST(Tables, BundleJsonRoundTripIsExact) {
  const auto b = generate_bundle(build_protocol({ProtocolId::UcRelaxation, 0.8}), {"A", "B"});
  const auto back = bundle_from_json(nlohmann::json::parse(dump_bundle(b)));
  ASSERT_EQ(back.tables.size(), b.tables.size());
  for (std::size_t i = 0; i < b.tables.size(); ++i) {
    EXPECT_EQ(back.tables[i].probs, b.tables[i].probs);  // bitwise
    EXPECT_EQ(back.tables[i].axes, b.tables[i].axes);
  }
  EXPECT_EQ(back.scenario, b.scenario);
}

TEST(Tables, SwigJsonRoundTrip) {
  const auto q = generate_swig(build_protocol({ProtocolId::FritzEdgeTriangle, 0.6}), {"A"});
  const auto back = swig_from_json(swig_to_json(q));
  EXPECT_EQ(back.probs, q.probs);
  EXPECT_EQ(back.targets, q.targets);
  EXPECT_NO_THROW(check_normalized(back));
  auto bad = back;
  bad.probs[0] += 0.01;
  try {
    check_normalized(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNormalized);
  }
}

TEST(Tables, MixIsEntrywise) {
  const auto b1 = generate_bundle(build_protocol({ProtocolId::Chain, 1.0}), {"A", "B"});
  const auto b0 = generate_bundle(build_protocol({ProtocolId::Chain, 0.0}), {"A", "B"});
  const auto m = mix(b1, b0, 0.25);
  const auto f1 = b1.flat(), f0 = b0.flat(), fm = m.flat();
  for (std::size_t i = 0; i < fm.size(); ++i) EXPECT_NEAR(fm[i], 0.25 * f1[i] + 0.75 * f0[i], 1e-15);
}

TEST(Tables, SelectSubsetAndTargets) {
  const auto b = generate_bundle(build_protocol({ProtocolId::Chain, 1.0}), {"A", "B"});
  EXPECT_EQ(b.targets(), (std::vector<std::string>{"A", "B"}));
  ASSERT_NE(b.interventional("B", 1), nullptr);
  EXPECT_EQ(b.interventional("C", 0), nullptr);
  const auto sub = b.subset({0});
  EXPECT_EQ(sub.tables.size(), 1u);
  EXPECT_TRUE(sub.targets().empty());
}

TEST(Tables, SwigConstraintsNeedObservational) {
  const auto b = generate_bundle(build_protocol({ProtocolId::Chain, 1.0}), {"A", "B"});
  try {
    swig_constraints(b.subset({1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingRegime);
  }
}

// Property: for random classical models on every scenario, the bundle derived
// from the SWIG distribution equals the directly generated bundle, and the
// SWIG distribution satisfies the bundle's constraint system.
TEST(TablesProperty, SwigAndBundleAgree) {
  std::mt19937_64 rng(2024);
  for (const auto& s : {scenarios::triangle_edge(), scenarios::uc_relaxation(), scenarios::chain()}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto m = random_classical_model(s, std::vector<int>(s.latents.size(), 2 + trial % 3), rng);
      const auto targets = all_targets(s);
      const auto b = generate_bundle(m, targets);
      const auto q = generate_swig(m, targets);
      ASSERT_TRUE(validate_bundle(b).ok());
      EXPECT_LT(max_diff(bundle_from_swig(q).flat(), b.flat()), 1e-12);
      EXPECT_LT(swig_constraints(b).max_residual(q.probs), 1e-12);
      EXPECT_LT(replay_error(m, b), 1e-15);
    }
  }
}

// Property: quantum protocols also agree between SWIG and bundle generation.
TEST(TablesProperty, QuantumSwigAndBundleAgree) {
  for (auto id : {ProtocolId::UcRelaxation, ProtocolId::Chain, ProtocolId::FritzEdgeTriangle}) {
    for (double v : {0.0, 0.5, 1.0}) {
      const auto m = build_protocol({id, v});
      const auto t = default_targets(id);
      const auto b = generate_bundle(m, t);
      const auto q = generate_swig(m, t);
      EXPECT_LT(max_diff(bundle_from_swig(q).flat(), b.flat()), 1e-12);
      EXPECT_LT(swig_constraints(b).max_residual(q.probs), 1e-12);
    }
  }
}

TEST(Regime, AxesPerKind) {
  const auto s = scenarios::chain();
  EXPECT_EQ(Regime::observational(s).axes(s).size(), 3u);
  const auto d = Regime::intervention(s, "B", 1);
  const auto ax = d.axes(s);
  ASSERT_EQ(ax.size(), 2u);
  EXPECT_EQ(ax[0].name, "A");
  EXPECT_EQ(ax[1].name, "C");
  EXPECT_THROW(Regime::intervention(s, "B", 2), Error);
  EXPECT_THROW(Regime::intervention(s, "Q", 0), Error);
}
