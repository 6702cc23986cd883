#include "response_basis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fusionlab::detail {

ResponseBasis::ResponseBasis(const Scenario& s) : scenario(s) {
  if (const auto rep = validate(s); !rep.ok()) throw Error(ErrorCode::InvalidScenario, rep.summary());
  if (!s.settings.empty()) {
    throw Error(ErrorCode::InvalidScenario, "feasibility solvers take the un-interrupted scenario");
  }
  for (const auto& o : s.observables) {
    spaces.push_back(enumerate_strategies(s, o.name));
    std::vector<std::size_t> pos;
    for (const auto& p : spaces.back().parents) pos.push_back(*s.observable_index(p.name));
    parent_pos.push_back(std::move(pos));
    if (spaces.back().size() > (std::size_t(1) << 40) / config_count) {
      throw Error(ErrorCode::SizeLimit, "response space too large");
    }
    config_count *= spaces.back().size();
  }
  for (const auto& n : s.topological_order()) topo.push_back(*s.observable_index(n));
}

std::vector<std::size_t> ResponseBasis::decode(std::size_t config) const {
  std::vector<std::size_t> out(spaces.size());
  for (std::size_t i = spaces.size(); i-- > 0;) {
    out[i] = config % spaces[i].size();
    config /= spaces[i].size();
  }
  return out;
}

std::size_t ResponseBasis::encode(const std::vector<std::size_t>& strategies) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < spaces.size(); ++i) idx = idx * spaces[i].size() + strategies[i];
  return idx;
}

void ResponseBasis::run(const std::vector<std::size_t>& strategies, const std::vector<int>& passed,
                        std::vector<int>& out) const {
  out.assign(spaces.size(), 0);
  std::vector<int> pv;
  for (std::size_t i : topo) {
    pv.clear();
    for (std::size_t p : parent_pos[i]) pv.push_back(passed[p] >= 0 ? passed[p] : out[p]);
    out[i] = spaces[i].strategies[strategies[i]][spaces[i].config_index(pv)];
  }
}

namespace {

std::vector<std::size_t> axis_positions(const Scenario& s, const std::vector<Axis>& axes) {
  std::vector<std::size_t> pos;
  for (const auto& a : axes) {
    auto i = s.observable_index(a.name);
    if (!i) throw Error(ErrorCode::UnknownAxis, a.name);
    pos.push_back(*i);
  }
  return pos;
}

void fill_bundle_data(DataRows& rows, const DataBundle& b) {
  for (const auto& t : b.tables)
    for (std::size_t e = 0; e < t.probs.size(); ++e) {
      rows.data.push_back(t.probs[e]);
      rows.data_labels.push_back(t.entry_label(e));
      rows.data_exact.push_back(t.exact.empty() ? std::string() : t.exact[e]);
    }
}

}  // namespace

DataRows bundle_rows(const ResponseBasis& rb, const DataBundle& b, const std::vector<std::size_t>& tables) {
  DataRows rows;
  fill_bundle_data(rows, b);
  std::vector<std::size_t> base(b.tables.size());
  for (std::size_t ti = 0, acc = 0; ti < b.tables.size(); ++ti) {
    base[ti] = acc;
    acc += b.tables[ti].probs.size();
  }
  const std::size_t n = rb.config_count;
  std::vector<int> out;
  for (std::size_t ti : tables) {
    if (ti >= b.tables.size()) throw Error(ErrorCode::OutOfRange, "table index " + std::to_string(ti));
    const auto& t = b.tables[ti];
    const auto pos = axis_positions(rb.scenario, t.axes);
    std::vector<int> passed(rb.spaces.size(), -1);
    if (t.kind == TableKind::Interventional) passed[*rb.scenario.observable_index(t.target)] = t.setting;
    const std::size_t first = rows.rhs.size();
    for (std::size_t e = 0; e < t.probs.size(); ++e) {
      rows.coeff.emplace_back(n, 0.0);
      rows.rhs.push_back(t.probs[e]);
      rows.entry.push_back(base[ti] + e);
      rows.label.push_back(t.entry_label(e));
    }
    for (std::size_t r = 0; r < n; ++r) {
      rb.run(rb.decode(r), passed, out);
      std::size_t idx = 0;
      for (std::size_t a = 0; a < pos.size(); ++a) {
        const int v = passed[pos[a]] >= 0 ? passed[pos[a]] : out[pos[a]];
        idx = idx * t.axes[a].card + v;
      }
      rows.coeff[first + idx][r] += 1.0;
    }
  }
  return rows;
}

namespace {

/// hits[r][s] = outcome index of response config r under setting s.
std::vector<std::vector<std::size_t>> swig_hits(const ResponseBasis& rb, const std::vector<std::string>& targets,
                                                const std::vector<int>& setting_cards, std::size_t& setting_count) {
  std::vector<std::size_t> tpos;
  for (const auto& t : targets) {
    auto i = rb.scenario.observable_index(t);
    if (!i) throw Error(ErrorCode::UnknownNode, t);
    tpos.push_back(*i);
  }
  setting_count = 1;
  for (int c : setting_cards) setting_count *= c;
  std::vector<std::vector<std::size_t>> hits(rb.config_count, std::vector<std::size_t>(setting_count));
  std::vector<int> out;
  for (std::size_t r = 0; r < rb.config_count; ++r) {
    const auto strat = rb.decode(r);
    for (std::size_t s = 0; s < setting_count; ++s) {
      std::vector<int> passed(rb.spaces.size(), -1);
      std::size_t rest = s;
      for (std::size_t k = targets.size(); k-- > 0;) {
        passed[tpos[k]] = static_cast<int>(rest % setting_cards[k]);
        rest /= setting_cards[k];
      }
      rb.run(strat, passed, out);
      std::size_t o = 0;
      for (std::size_t i = 0; i < out.size(); ++i) o = o * rb.scenario.observables[i].card + out[i];
      hits[r][s] = o;
    }
  }
  return hits;
}

}  // namespace

DataRows swig_constraint_rows(const ResponseBasis& rb, const DataBundle& b) {
  const auto sys = swig_constraints(b);
  DataRows rows;
  fill_bundle_data(rows, b);
  std::vector<std::size_t> base(b.tables.size());
  for (std::size_t ti = 0, acc = 0; ti < b.tables.size(); ++ti) {
    base[ti] = acc;
    acc += b.tables[ti].probs.size();
  }
  std::size_t ns = 0;
  const auto hits = swig_hits(rb, sys.targets, sys.setting_cards, ns);
  std::size_t no = 1;
  for (const auto& a : sys.outcome_axes) no *= a.card;

  // variable -> equalities containing it
  std::vector<std::vector<std::size_t>> in_rows(sys.variable_count);
  for (std::size_t k = 0; k < sys.equalities.size(); ++k)
    for (std::size_t var : sys.equalities[k].vars) in_rows[var].push_back(k);

  const std::size_t n = rb.config_count;
  for (const auto& eq : sys.equalities) {
    rows.coeff.emplace_back(n, 0.0);
    rows.rhs.push_back(eq.rhs);
    rows.entry.push_back(eq.table < b.tables.size() ? base[eq.table] + eq.entry : kNoEntry);
    rows.label.push_back(eq.label.empty() ? "sum Q(.|setting)" : eq.label);
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t k : in_rows[s * no + hits[r][s]]) rows.coeff[k][r] += 1.0;
  return rows;
}

DataRows swig_rows(const ResponseBasis& rb, const SwigDistribution& q) {
  DataRows rows;
  std::size_t ns = 0;
  const auto hits = swig_hits(rb, q.targets, q.setting_cards, ns);
  const std::size_t no = q.outcome_count();
  if (q.outcome_axes.size() != rb.spaces.size() || q.probs.size() != ns * no) {
    throw Error(ErrorCode::DimensionMismatch, "SWIG distribution does not match its scenario");
  }
  const std::size_t n = rb.config_count;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t o = 0; o < no; ++o) {
      const auto sv = q.setting_values(s);
      const auto ov = q.outcome_values(o);
      std::string label = "Q(";
      for (std::size_t i = 0; i < ov.size(); ++i)
        label += (i ? "," : "") + q.outcome_axes[i].name + "=" + std::to_string(ov[i]);
      label += "|";
      for (std::size_t k = 0; k < sv.size(); ++k)
        label += (k ? "," : "") + setting_name(q.targets[k]) + "=" + std::to_string(sv[k]);
      label += ")";
      rows.coeff.emplace_back(n, 0.0);
      rows.rhs.push_back(q.at(s, o));
      rows.entry.push_back(s * no + o);
      rows.label.push_back(label);
      rows.data.push_back(q.at(s, o));
      rows.data_labels.push_back(label);
      rows.data_exact.emplace_back();
    }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < ns; ++s) rows.coeff[s * no + hits[r][s]][r] += 1.0;
  return rows;
}

void TermBuilder::add(double coeff, std::vector<std::size_t> entries) {
  std::sort(entries.begin(), entries.end());
  for (auto& [k, c] : terms_)
    if (k == entries) {
      c += coeff;
      return;
    }
  terms_.emplace_back(std::move(entries), coeff);
}

void TermBuilder::add_rows(double coeff, const DataRows& rows, std::size_t i, std::size_t j) {
  std::vector<std::size_t> entries;
  for (std::size_t k : {i, j}) {
    if (k == kNoEntry) continue;
    if (rows.entry[k] == kNoEntry) {
      coeff *= rows.rhs[k];
    } else {
      entries.push_back(rows.entry[k]);
    }
  }
  add(coeff, std::move(entries));
}

Certificate TermBuilder::build(const DataRows& rows, double bound, double drop_below) const {
  Certificate c;
  c.bound = bound;
  auto sorted = terms_;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.first.size() != b.first.size() ? a.first.size() < b.first.size() : a.first < b.first;
  });
  for (const auto& [entries, coeff] : sorted) {
    if (std::abs(coeff) <= drop_below) continue;
    Certificate::Term t;
    t.coeff = coeff;
    t.entries = entries;
    if (entries.empty()) t.label = "1";
    for (std::size_t k = 0; k < entries.size(); ++k) t.label += (k ? "*" : "") + rows.data_labels[entries[k]];
    c.terms.push_back(std::move(t));
  }
  c.value = c.evaluate(rows.data);
  return c;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double seconds_since(double start) { return now_seconds() - start; }

}  // namespace fusionlab::detail
