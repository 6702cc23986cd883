#include "fusionlab/classical.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace fusionlab {

namespace {

std::size_t latent_config_count(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

std::vector<double> dirichlet_one(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) sum += (x = ex(rng));
  for (auto& x : w) x /= sum;
  return w;
}

}  // namespace

double ResponseTable::at(std::size_t latent_config, std::size_t parent_config, int outcome) const {
  const std::size_t configs = config_count(parents);
  return probs[(latent_config * configs + parent_config) * outcome_card + outcome];
}

ClassicalModel blank_model(const Scenario& s, const std::vector<int>& latent_cards) {
  if (latent_cards.size() != s.latents.size()) {
    throw Error(ErrorCode::BadCardinality, "one cardinality per latent expected");
  }
  for (int c : latent_cards)
    if (c < 1) throw Error(ErrorCode::BadCardinality, "latent cardinality must be positive");
  ClassicalModel m;
  m.scenario = s;
  m.latent_cards = latent_cards;
  for (int c : latent_cards) m.latent_weights.emplace_back(c, 1.0 / c);
  for (const auto& o : s.observables) {
    ResponseTable r;
    r.node = o.name;
    r.outcome_card = o.card;
    r.parents = s.parents(o.name);
    r.latent_parents = s.latent_parents(o.name);
    for (const auto& l : r.latent_parents) r.latent_cards.push_back(latent_cards[*s.latent_index(l)]);
    r.probs.assign(latent_config_count(r.latent_cards) * config_count(r.parents) * o.card, 0.0);
    m.responses.push_back(std::move(r));
  }
  return m;
}

ClassicalModel random_classical_model(const Scenario& s, const std::vector<int>& latent_cards, std::mt19937_64& rng,
                                      bool deterministic) {
  ClassicalModel m = blank_model(s, latent_cards);
  for (auto& w : m.latent_weights) w = dirichlet_one(w.size(), rng);
  for (auto& r : m.responses) {
    const std::size_t rows = r.probs.size() / r.outcome_card;
    for (std::size_t k = 0; k < rows; ++k) {
      if (deterministic) {
        std::uniform_int_distribution<int> pick(0, r.outcome_card - 1);
        r.probs[k * r.outcome_card + pick(rng)] = 1.0;
      } else {
        const auto w = dirichlet_one(r.outcome_card, rng);
        std::copy(w.begin(), w.end(), r.probs.begin() + k * r.outcome_card);
      }
    }
  }
  return m;
}

ValidationReport validate_classical(const ClassicalModel& m, double tol) {
  ValidationReport rep;
  for (const auto& d : validate(m.scenario).failures) rep.fail(d.property, "scenario:" + d.subject, d.message);
  if (m.latent_cards.size() != m.scenario.latents.size() || m.latent_weights.size() != m.scenario.latents.size()) {
    rep.fail("latents", "model", "one cardinality and weight vector per latent expected");
    return rep;
  }
  for (std::size_t i = 0; i < m.latent_weights.size(); ++i) {
    const auto& w = m.latent_weights[i];
    const auto& name = m.scenario.latents[i].name;
    if (w.size() != static_cast<std::size_t>(m.latent_cards[i])) rep.fail("latents", name, "weight vector size");
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= -tol)) rep.fail("simplex", name, "negative weight");
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol) rep.fail("simplex", name, "weights do not sum to 1");
  }
  if (m.responses.size() != m.scenario.observables.size()) {
    rep.fail("responses", "model", "one response table per observable expected");
    return rep;
  }
  for (std::size_t i = 0; i < m.responses.size(); ++i) {
    const auto& r = m.responses[i];
    const auto& o = m.scenario.observables[i];
    if (r.node != o.name || r.outcome_card != o.card || r.parents != m.scenario.parents(o.name) ||
        r.latent_parents != m.scenario.latent_parents(o.name)) {
      rep.fail("responses", o.name, "response signature differs from the scenario");
      continue;
    }
    const std::size_t rows = latent_config_count(r.latent_cards) * config_count(r.parents);
    if (r.probs.size() != rows * r.outcome_card) {
      rep.fail("responses", o.name, "response table size");
      continue;
    }
    for (std::size_t k = 0; k < rows; ++k) {
      double sum = 0.0;
      for (int x = 0; x < r.outcome_card; ++x) {
        const double p = r.probs[k * r.outcome_card + x];
        if (!(p >= -tol)) rep.fail("cpt", o.name, "negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) rep.fail("cpt", o.name, "row " + std::to_string(k) + " does not sum to 1");
    }
  }
  return rep;
}

std::vector<double> evaluate(const ClassicalModel& m, const Regime& regime) {
  const auto& s = m.scenario;
  const std::size_t n = s.observables.size();
  if (regime.measured.size() != n || m.responses.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "regime or model does not match the scenario");
  }
  std::vector<std::vector<std::size_t>> parent_pos(n), latent_pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : m.responses[i].parents) parent_pos[i].push_back(*s.observable_index(p.name));
    for (const auto& l : m.responses[i].latent_parents) latent_pos[i].push_back(*s.latent_index(l));
  }
  const auto axes = regime.axes(s);
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.card;
  std::vector<double> out(total, 0.0);

  const std::size_t nlat = latent_config_count(m.latent_cards);
  std::vector<int> lat(m.latent_cards.size(), 0);
  std::vector<int> value(n, 0);
  for (std::size_t lf = 0; lf < nlat; ++lf) {
    std::size_t rest = lf;
    double w = 1.0;
    for (std::size_t k = m.latent_cards.size(); k-- > 0;) {
      lat[k] = static_cast<int>(rest % m.latent_cards[k]);
      rest /= m.latent_cards[k];
      w *= m.latent_weights[k][lat[k]];
    }
    if (w == 0.0) continue;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t r = flat;
      for (std::size_t i = n; i-- > 0;) {
        if (!regime.measured[i]) continue;
        value[i] = static_cast<int>(r % s.observables[i].card);
        r /= s.observables[i].card;
      }
      double p = w;
      for (std::size_t i = 0; i < n && p != 0.0; ++i) {
        if (!regime.measured[i]) continue;
        const auto& resp = m.responses[i];
        std::size_t lc = 0;
        for (std::size_t k = 0; k < latent_pos[i].size(); ++k) lc = lc * resp.latent_cards[k] + lat[latent_pos[i][k]];
        std::size_t pc = 0;
        for (std::size_t k = 0; k < parent_pos[i].size(); ++k) {
          const auto pi = parent_pos[i][k];
          const int seen = regime.passed[pi] >= 0 ? regime.passed[pi] : value[pi];
          pc = pc * resp.parents[k].card + seen;
        }
        p *= resp.at(lc, pc, value[i]);
      }
      out[flat] += p;
    }
  }
  return out;
}

DataBundle generate_bundle(const ClassicalModel& m, const std::vector<std::string>& targets) {
  const auto rep = validate_classical(m, 1e-9);
  if (!rep.ok()) throw Error(ErrorCode::InvalidModel, rep.summary());
  return bundle_from_evaluator(m.scenario, targets, [&](const Regime& r) { return evaluate(m, r); });
}

SwigDistribution generate_swig(const ClassicalModel& m, const std::vector<std::string>& targets) {
  const auto rep = validate_classical(m, 1e-9);
  if (!rep.ok()) throw Error(ErrorCode::InvalidModel, rep.summary());
  return swig_from_evaluator(m.scenario, targets, [&](const Regime& r) { return evaluate(m, r); });
}

double replay_error(const ClassicalModel& m, const DataBundle& b) {
  double worst = 0.0;
  for (const auto& t : b.tables) {
    const Regime r = t.kind == TableKind::Observational ? Regime::observational(m.scenario)
                                                        : Regime::intervention(m.scenario, t.target, t.setting);
    DataTable full = make_table(r.axes(m.scenario), evaluate(m, r));
    std::vector<std::string> keep;
    for (const auto& a : t.axes) keep.push_back(a.name);
    const auto mt = marginal(full, keep);
    for (std::size_t k = 0; k < t.probs.size(); ++k) worst = std::max(worst, std::abs(mt.probs[k] - t.probs[k]));
  }
  return worst;
}

nlohmann::json model_to_json(const ClassicalModel& m) {
  nlohmann::json j;
  j["latents"] = nlohmann::json::array();
  for (std::size_t i = 0; i < m.latent_cards.size(); ++i) {
    j["latents"].push_back({{"name", m.scenario.latents[i].name},
                            {"card", m.latent_cards[i]},
                            {"weights", m.latent_weights[i]}});
  }
  j["responses"] = nlohmann::json::array();
  for (const auto& r : m.responses) {
    std::vector<std::string> pn;
    for (const auto& p : r.parents) pn.push_back(p.name);
    j["responses"].push_back({{"node", r.node},
                              {"parents", pn},
                              {"latent_parents", r.latent_parents},
                              {"layout", "[latent config][parent config][outcome]"},
                              {"probs", r.probs}});
  }
  return j;
}

}  // namespace fusionlab
