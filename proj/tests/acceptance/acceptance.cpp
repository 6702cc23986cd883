// Acceptance run: one line per criterion, tolerances pinned below.
//
// Criteria listed in kKnownRed are computed faithfully and print FAIL; they
// do not fail the process. Any other FAIL does, and so does a known-red
// criterion that starts passing (the list must then be updated).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fusionlab/classical.hpp"
#include "fusionlab/feasibility.hpp"
#include "fusionlab/quantum.hpp"
#include "fusionlab/witness.hpp"

using namespace fusionlab;

namespace {

// Pinned tolerances and budgets
constexpr double kValueTol = 1e-9;
constexpr double kReplayTol = 1e-7;
constexpr double kSeparationTol = 1e-8;
constexpr double kCutTol = 1e-8;
constexpr double kBnbBudget = 600.0;
constexpr int kRandomBundles = 100;

// 2: the simulated chain protocol gives D = 1 + sqrt2/8, not the target.
// 7: the Fritz data have an explicit classical model on this scenario.
const std::set<int> kKnownRed = {2, 7};

const double kSqrt2 = std::sqrt(2.0);

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

struct Outcome {
  bool pass = true;
  std::vector<std::string> soft;  // reported, not blocking
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

// Verdicts collected by criteria 4-7 and re-checked by criterion 8.
struct Recorded {
  std::string tag;
  FeasibilityVerdict verdict;
  std::vector<double> data;
  std::vector<std::size_t> tables;  // lp: checked tables
  DataBundle bundle;
  std::function<std::vector<double>(std::mt19937_64&)> classical_sample;
};
std::vector<Recorded> g_verdicts;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

DataBundle protocol_bundle(ProtocolId id, double v) { return generate_bundle(build_protocol({id, v}), default_targets(id)); }

std::vector<std::string> all_targets(const Scenario& s) {
  std::vector<std::string> t;
  for (const auto& o : s.observables) t.push_back(o.name);
  return t;
}

std::function<std::vector<double>(std::mt19937_64&)> sampler(const Scenario& s, const std::vector<std::string>& targets,
                                                             int card) {
  return [s, targets, card](std::mt19937_64& rng) {
    const auto m = random_classical_model(s, std::vector<int>(s.latents.size(), card), rng, rng() % 2 == 0);
    return generate_bundle(m, targets).flat();
  };
}

void criterion1(Outcome& o) {
  Stopwatch sw;
  const auto r = eval_W(protocol_bundle(ProtocolId::UcRelaxation, 1.0));
  const double t = sw.seconds();
  const double target = (38 * kSqrt2 - 53) / 128;
  o.require(std::abs(r.value - target) <= kValueTol, "W value");
  o.require(std::abs(r.component("I") - (18 + 7 * kSqrt2) / 16) <= kValueTol, "I");
  o.require(std::abs(r.component("J") - (kSqrt2 - 1) / 2) <= kValueTol, "J");
  o.require(std::abs(r.component("E_quad") - (51 + 2 * kSqrt2) / 128) <= kValueTol, "E");
  o.require(std::abs(r.component("P") - 0.5) <= kValueTol, "P");
  o.require(t < 1.0, "runtime");
  o.detail << " W=" << fmt(r.value) << " target=" << fmt(target) << " I=" << fmt(r.component("I"))
           << " J=" << fmt(r.component("J")) << " E=" << fmt(r.component("E_quad")) << " P=" << fmt(r.component("P"))
           << " t=" << fmt(t) << "s";
}

void criterion2(Outcome& o) {
  Stopwatch sw;
  const auto r = eval_D(protocol_bundle(ProtocolId::Chain, 1.0));
  const double t = sw.seconds();
  const double target = 1 + (2 - kSqrt2) / (16 * kSqrt2);
  o.require(std::abs(r.value - target) <= kValueTol, "D value");
  o.require(t < 1.0, "runtime");
  o.detail << " D=" << fmt(r.value) << " target=" << fmt(target) << " violation=" << fmt(r.violation)
           << " t=" << fmt(t) << "s";
}

void criterion3(Outcome& o) {
  Stopwatch sw;
  const auto s = scenarios::chain();
  std::vector<StrategySpace> spaces;
  for (const auto& ob : s.observables) spaces.push_back(enumerate_strategies(s, ob.name));
  double best = -1e300;
  std::size_t count = 0;
  for (std::size_t a = 0; a < spaces[0].size(); ++a)
    for (std::size_t b = 0; b < spaces[1].size(); ++b)
      for (std::size_t c = 0; c < spaces[2].size(); ++c) {
        auto m = blank_model(s, {1});
        m.latent_weights = {{1.0}};
        const std::size_t pick[3] = {a, b, c};
        for (std::size_t i = 0; i < 3; ++i) {
          const auto& f = spaces[i].strategies[pick[i]];
          for (std::size_t k = 0; k < f.size(); ++k) m.responses[i].probs[k * 2 + static_cast<std::size_t>(f[k])] = 1;
        }
        best = std::max(best, eval_D(generate_bundle(m, {"A", "B"})).value);
        ++count;
      }
  const double t = sw.seconds();
  o.require(count == 32, "strategy count");
  o.require(best == 1.0, "max D");
  o.require(t < 1.0, "runtime");
  o.detail << " strategies=" << count << " max=" << fmt(best) << " t=" << fmt(t) << "s";
}

void criterion4(Outcome& o) {
  Stopwatch sw;
  const auto b = protocol_bundle(ProtocolId::Chain, 1.0);
  auto check = [&](const std::string& spec, Feasibility want) {
    LpOptions opt;
    opt.tables = select_tables(b, spec);
    const auto v = lp_membership(b, opt);
    o.require(v.status == want, spec);
    o.detail << " " << spec << "=" << to_string(v.status);
    g_verdicts.push_back({"lp chain " + spec, v, b.flat(), opt.tables, b, sampler(b.scenario, {"A", "B"}, 4)});
  };
  check("obs", Feasibility::Feasible);
  check("obs,doA1", Feasibility::Feasible);
  check("obs,doB0", Feasibility::Feasible);
  check("doA1,doB0", Feasibility::Feasible);
  check("obs,doA1,doB0", Feasibility::Infeasible);
  const double t = sw.seconds();
  o.require(t < 10.0, "runtime");
  o.detail << " t=" << fmt(t) << "s";
}

void criterion5(Outcome& o) {
  BnbOptions opt;
  opt.cardinalities = {4, 16};
  opt.budget_seconds = kBnbBudget;
  for (double v : {1.0, 0.0, 0.75}) {
    const auto b = protocol_bundle(ProtocolId::UcRelaxation, v);
    const auto r = bb_feasibility(b, opt);
    const Feasibility want = v == 0.0 ? Feasibility::Feasible : Feasibility::Infeasible;
    o.detail << " v=" << fmt(v) << ":" << to_string(r.status) << "(" << fmt(r.diagnostics.runtime_seconds) << "s,"
             << r.diagnostics.iterations << " nodes)";
    if (v == 0.75) {
      if (r.status != want) o.soft.push_back("v=0.75 returned " + std::string(to_string(r.status)));
    } else {
      o.require(r.status == want, "v=" + fmt(v));
    }
    g_verdicts.push_back({"bnb uc v=" + fmt(v), r, b.flat(), {}, b, sampler(b.scenario, {"A", "B"}, 3)});
  }
}

void criterion6(Outcome& o) {
  Stopwatch sw;
  std::mt19937_64 rng(20240601);
  const std::vector<Scenario> ss = {scenarios::triangle_edge(), scenarios::uc_relaxation(), scenarios::chain()};
  int feasible = 0;
  double worst_resid = 0;
  for (int k = 0; k < kRandomBundles; ++k) {
    const auto& s = ss[static_cast<std::size_t>(k) % ss.size()];
    const int card = 2 + static_cast<int>(rng() % 3);
    const auto m = random_classical_model(s, std::vector<int>(s.latents.size(), card), rng, k % 2 == 0);
    const auto b = generate_bundle(m, all_targets(s));
    const auto v = inflation_lp(b);
    if (v.status == Feasibility::Feasible) ++feasible;
    if (v.relaxation_residual) worst_resid = std::max(worst_resid, *v.relaxation_residual);
    g_verdicts.push_back({"inflation random " + std::to_string(k), v, b.flat(), {}, b, {}});
  }
  o.require(feasible == kRandomBundles, "soundness");
  o.detail << " random=" << feasible << "/" << kRandomBundles << " max_resid=" << fmt(worst_resid);

  const auto b1 = protocol_bundle(ProtocolId::UcRelaxation, 1.0);
  const auto v1 = inflation_lp(b1);
  o.require(v1.status == Feasibility::Infeasible, "uc v=1");
  if (v1.certificate) {
    const double sep = v1.certificate->separation(b1.flat());
    o.require(sep > kSeparationTol, "certificate replay");
    o.require(std::abs(v1.certificate->evaluate(b1.flat()) - v1.certificate->value) < 1e-12, "certificate value");
    o.detail << " v=1:" << to_string(v1.status) << " sep=" << fmt(sep) << " terms=" << v1.certificate->terms.size();
  } else {
    o.require(false, "certificate missing");
  }
  g_verdicts.push_back({"inflation uc v=1", v1, b1.flat(), {}, b1, sampler(b1.scenario, {"A", "B"}, 3)});

  ThresholdOptions topt;
  topt.precision = 0.01;
  try {
    const auto th = visibility_threshold(ProtocolId::UcRelaxation, SolverId::Inflation, topt);
    o.require(th.v_star <= 0.99, "threshold <= 0.99");
    if (th.v_star < 0.93 || th.v_star > 0.99) o.soft.push_back("threshold " + fmt(th.v_star) + " outside [0.93, 0.99]");
    o.detail << " threshold=" << fmt(th.v_star) << " [" << fmt(th.lo) << "," << fmt(th.hi) << "]";
  } catch (const Error& e) {
    o.require(false, std::string("threshold: ") + e.what());
  }
  const double t = sw.seconds();
  o.require(t < 600.0, "runtime");
  o.detail << " t=" << fmt(t) << "s";
}

void criterion7(Outcome& o) {
  const auto q = generate_swig(build_protocol({ProtocolId::FritzEdgeTriangle, 1.0}), {"A"});
  const double S = eval_chsh_fritz(q).value;
  o.require(std::abs(S - 2 * kSqrt2) <= kValueTol, "CHSH");
  o.detail << " S=" << fmt(S);
  InflationOptions opt;
  opt.use_swig = true;
  for (double v : {1.0, 0.0}) {
    const auto b = protocol_bundle(ProtocolId::FritzEdgeTriangle, v);
    const auto r = inflation_lp(b, opt);
    o.require(r.status == (v == 1.0 ? Feasibility::Infeasible : Feasibility::Feasible), "inflation v=" + fmt(v));
    o.detail << " swig-inflation v=" << fmt(v) << ":" << to_string(r.status);
    g_verdicts.push_back({"inflation fritz v=" + fmt(v), r, b.flat(), {}, b, sampler(b.scenario, {"A"}, 2)});
  }
}

void criterion8(Outcome& o) {
  double norm = 0, inv = 0;
  for (auto id : {ProtocolId::UcRelaxation, ProtocolId::Chain, ProtocolId::FritzEdgeTriangle})
    for (double v : {0.0, 0.5, 1.0}) {
      const auto b = protocol_bundle(id, v);
      for (const auto& t : b.tables) {
        double s = 0;
        for (double p : t.probs) s += p;
        norm = std::max(norm, std::abs(s - 1));
      }
      const auto q = generate_swig(build_protocol({id, v}), default_targets(id));
      for (std::size_t st = 0; st < q.setting_count(); ++st) {
        double s = 0;
        for (std::size_t k = 0; k < q.outcome_count(); ++k) s += q.at(st, k);
        norm = std::max(norm, std::abs(s - 1));
      }
      auto invariance = [&](const std::string& node, const std::string& kept) {
        const auto base = marginal(*b.observational(), {kept});
        for (int s = 0; s < 2; ++s) {
          const auto d = marginal(*b.interventional(node, s), {kept});
          for (std::size_t k = 0; k < d.probs.size(); ++k) inv = std::max(inv, std::abs(d.probs[k] - base.probs[k]));
        }
      };
      if (id == ProtocolId::Chain) invariance("B", "A");
      if (id == ProtocolId::UcRelaxation) invariance("A", "B");
    }
  o.require(norm < 1e-9, "normalization");
  o.require(inv < 1e-9, "marginal invariance");
  o.detail << " norm_resid=" << fmt(norm) << " invariance=" << fmt(inv);

  double worst_replay = 0, min_sep = 1e300, worst_cut = -1e300;
  std::size_t feasible = 0, infeasible = 0;
  std::mt19937_64 rng(777);
  for (const auto& r : g_verdicts) {
    const auto& v = r.verdict;
    if (v.status == Feasibility::Feasible) {
      ++feasible;
      double e = 0;
      if (v.model) {
        const auto mb = generate_bundle(*v.model, r.bundle.targets());
        std::vector<std::size_t> idx = r.tables;
        if (idx.empty())
          for (std::size_t i = 0; i < r.bundle.tables.size(); ++i) idx.push_back(i);
        for (std::size_t i : idx)
          for (std::size_t k = 0; k < r.bundle.tables[i].probs.size(); ++k)
            e = std::max(e, std::abs(mb.tables[i].probs[k] - r.bundle.tables[i].probs[k]));
      } else if (v.relaxation_residual) {
        e = *v.relaxation_residual;
      } else {
        e = 1.0;  // a Feasible verdict with nothing to replay
      }
      worst_replay = std::max(worst_replay, e);
      if (e > kReplayTol) o.detail << " replay-fail(" << r.tag << ")";
    } else if (v.status == Feasibility::Infeasible) {
      ++infeasible;
      if (!v.certificate) continue;  // bnb proves infeasibility by its bound, not a certificate
      const double sep = v.certificate->separation(r.data);
      min_sep = std::min(min_sep, sep);
      if (r.classical_sample)
        for (int k = 0; k < kRandomBundles; ++k) worst_cut = std::max(worst_cut, v.certificate->separation(r.classical_sample(rng)));
    }
  }
  o.require(worst_replay <= kReplayTol, "replay");
  o.require(min_sep > kSeparationTol, "separation");
  o.require(worst_cut <= kCutTol, "certificate cuts a classical bundle");
  o.detail << " feasible=" << feasible << " worst_replay=" << fmt(worst_replay) << " infeasible=" << infeasible
           << " min_sep=" << fmt(min_sep) << " worst_classical=" << fmt(worst_cut);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, void (*)(Outcome&)>> criteria = {
      {"W reproduction", criterion1},        {"D reproduction", criterion2},
      {"D classical bound", criterion3},     {"three-way synthesis", criterion4},
      {"bnb nonclassical range", criterion5}, {"inflation", criterion6},
      {"Fritz-style SWIG", criterion7},      {"structural invariants", criterion8},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    Outcome o;
    Stopwatch sw;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const bool known = kKnownRed.count(id) > 0;
    std::string tag = o.pass ? "PASS" : "FAIL";
    if (known) tag += o.pass ? " (unexpected pass)" : " (known)";
    std::printf("criterion %d [%s] %s:%s", id, tag.c_str(), criteria[i].first.c_str(), o.detail.str().c_str());
    for (const auto& s : o.soft) std::printf(" SOFT-FAIL[%s]", s.c_str());
    std::printf(" (%.2fs)\n", sw.seconds());
    std::fflush(stdout);
    if (o.pass == known) ++unexpected;
  }
  std::printf("%s\n", unexpected ? "acceptance: unexpected result(s)" : "acceptance: all results as expected");
  return unexpected ? 1 : 0;
}
