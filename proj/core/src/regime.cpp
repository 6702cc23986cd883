#include "fusionlab/regime.hpp"

#include <algorithm>

namespace fusionlab {

namespace {

std::size_t require_observable(const Scenario& s, const std::string& node) {
  auto i = s.observable_index(node);
  if (!i) throw Error(ErrorCode::UnknownNode, "no observable named '" + node + "'");
  return *i;
}

}  // namespace

Regime Regime::observational(const Scenario& s) {
  Regime r;
  r.measured.assign(s.observables.size(), true);
  r.passed.assign(s.observables.size(), -1);
  return r;
}

Regime Regime::intervention(const Scenario& s, const std::string& node, int setting) {
  Regime r = observational(s);
  const auto i = require_observable(s, node);
  if (setting < 0 || setting >= s.observables[i].card) throw Error(ErrorCode::OutOfRange, "setting for " + node);
  r.measured[i] = false;
  r.passed[i] = setting;
  return r;
}

Regime Regime::swig(const Scenario& s, const std::vector<std::string>& targets, const std::vector<int>& settings) {
  if (targets.size() != settings.size()) throw Error(ErrorCode::DimensionMismatch, "one setting per target");
  Regime r = observational(s);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto i = require_observable(s, targets[k]);
    r.passed[i] = settings[k];
  }
  return r;
}

std::vector<Axis> Regime::axes(const Scenario& s) const {
  std::vector<Axis> out;
  for (std::size_t i = 0; i < s.observables.size(); ++i)
    if (measured[i]) out.push_back({s.observables[i].name, s.observables[i].card});
  return out;
}

DataBundle bundle_from_evaluator(const Scenario& s, const std::vector<std::string>& targets,
                                 const RegimeEvaluator& eval) {
  for (const auto& t : targets) require_observable(s, t);
  DataBundle b;
  b.scenario = s;
  const auto obs = Regime::observational(s);
  b.tables.push_back(make_table(obs.axes(s), eval(obs)));
  for (const auto& t : s.observables) {
    if (std::find(targets.begin(), targets.end(), t.name) == targets.end()) continue;
    for (int v = 0; v < t.card; ++v) {
      const auto r = Regime::intervention(s, t.name, v);
      b.tables.push_back(make_do_table(t.name, v, r.axes(s), eval(r)));
    }
  }
  return b;
}

SwigDistribution swig_from_evaluator(const Scenario& s, const std::vector<std::string>& targets,
                                     const RegimeEvaluator& eval) {
  for (const auto& t : targets) require_observable(s, t);
  SwigDistribution q;
  q.scenario = s;
  // keep targets in scenario order so layouts are canonical
  for (const auto& o : s.observables)
    if (std::find(targets.begin(), targets.end(), o.name) != targets.end()) {
      q.targets.push_back(o.name);
      q.setting_cards.push_back(o.card);
    }
  for (const auto& o : s.observables) q.outcome_axes.push_back({o.name, o.card});
  const std::size_t no = q.outcome_count();
  q.probs.reserve(no * q.setting_count());
  for (std::size_t k = 0; k < q.setting_count(); ++k) {
    const auto block = eval(Regime::swig(s, q.targets, q.setting_values(k)));
    if (block.size() != no) throw Error(ErrorCode::DimensionMismatch, "evaluator block size");
    q.probs.insert(q.probs.end(), block.begin(), block.end());
  }
  return q;
}

DataBundle bundle_from_swig(const SwigDistribution& q, double tol) {
  check_normalized(q, tol);
  const Scenario& s = q.scenario;
  std::vector<std::size_t> tpos;
  for (const auto& t : q.targets) tpos.push_back(require_observable(s, t));

  DataBundle b;
  b.scenario = s;
  b.tables.push_back(make_table(q.outcome_axes, std::vector<double>(q.outcome_count(), 0.0)));
  std::vector<std::size_t> first_do;
  for (std::size_t k = 0; k < q.targets.size(); ++k) {
    first_do.push_back(b.tables.size());
    for (int v = 0; v < q.setting_cards[k]; ++v) {
      const auto r = Regime::intervention(s, q.targets[k], v);
      DataTable t = make_do_table(q.targets[k], v, r.axes(s), {});
      t.probs.assign(t.size(), 0.0);
      b.tables.push_back(std::move(t));
    }
  }
  const std::size_t no = q.outcome_count();
  for (std::size_t sf = 0; sf < q.setting_count(); ++sf) {
    const auto sv = q.setting_values(sf);
    for (std::size_t of = 0; of < no; ++of) {
      const double p = q.probs[sf * no + of];
      const auto ov = q.outcome_values(of);
      std::size_t off_diagonal = 0;
      for (std::size_t k = 0; k < tpos.size(); ++k) off_diagonal += sv[k] != ov[tpos[k]];
      if (off_diagonal == 0) b.tables[0].probs[of] += p;
      for (std::size_t k = 0; k < tpos.size(); ++k) {
        // other settings must sit on the diagonal
        if (off_diagonal - (sv[k] != ov[tpos[k]]) != 0) continue;
        auto& t = b.tables[first_do[k] + sv[k]];
        std::size_t idx = 0;
        for (std::size_t i = 0; i < ov.size(); ++i) {
          if (i == tpos[k]) continue;
          idx = idx * s.observables[i].card + ov[i];
        }
        t.probs[idx] += p;
      }
    }
  }
  return b;
}

}  // namespace fusionlab
