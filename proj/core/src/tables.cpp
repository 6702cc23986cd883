#include "fusionlab/tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fusionlab {

namespace {

std::size_t product_of_cards(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.card);
  return n;
}

std::vector<int> decode(const std::vector<int>& cards, std::size_t flat) {
  std::vector<int> v(cards.size());
  for (std::size_t i = cards.size(); i-- > 0;) {
    v[i] = static_cast<int>(flat % cards[i]);
    flat /= cards[i];
  }
  return v;
}

std::vector<int> cards_of(const std::vector<Axis>& axes) {
  std::vector<int> c;
  for (const auto& a : axes) c.push_back(a.card);
  return c;
}

}  // namespace

std::size_t DataTable::size() const { return product_of_cards(axes); }

std::optional<std::size_t> DataTable::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (axes[i].name == name) return i;
  return std::nullopt;
}

std::size_t DataTable::index(const std::vector<int>& outcome) const {
  if (outcome.size() != axes.size()) throw Error(ErrorCode::DimensionMismatch, "outcome arity for " + label());
  std::size_t idx = 0;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (outcome[i] < 0 || outcome[i] >= axes[i].card) throw Error(ErrorCode::OutOfRange, "outcome value in " + label());
    idx = idx * axes[i].card + outcome[i];
  }
  return idx;
}

std::vector<int> DataTable::outcome(std::size_t flat) const { return decode(cards_of(axes), flat); }

std::string DataTable::label() const {
  std::string s = "P(";
  for (std::size_t i = 0; i < axes.size(); ++i) s += (i ? "," : "") + axes[i].name;
  if (kind == TableKind::Interventional) s += "|do(" + target + "=" + std::to_string(setting) + ")";
  return s + ")";
}

std::string DataTable::entry_label(std::size_t flat) const {
  const auto o = outcome(flat);
  std::string s = "P(";
  for (std::size_t i = 0; i < axes.size(); ++i) s += (i ? "," : "") + axes[i].name + "=" + std::to_string(o[i]);
  if (kind == TableKind::Interventional) s += "|do(" + target + "=" + std::to_string(setting) + ")";
  return s + ")";
}

DataTable make_table(std::vector<Axis> axes, std::vector<double> probs) {
  DataTable t;
  t.kind = TableKind::Observational;
  t.axes = std::move(axes);
  t.probs = std::move(probs);
  return t;
}

DataTable make_do_table(std::string target, int setting, std::vector<Axis> axes, std::vector<double> probs) {
  DataTable t;
  t.kind = TableKind::Interventional;
  t.target = std::move(target);
  t.setting = setting;
  t.axes = std::move(axes);
  t.probs = std::move(probs);
  return t;
}

DataTable marginal(const DataTable& t, const std::vector<std::string>& keep) {
  std::vector<std::size_t> pos;
  DataTable out;
  out.kind = t.kind;
  out.target = t.target;
  out.setting = t.setting;
  for (const auto& name : keep) {
    auto i = t.axis_index(name);
    if (!i) throw Error(ErrorCode::UnknownAxis, "axis '" + name + "' not in " + t.label());
    if (std::find(pos.begin(), pos.end(), *i) != pos.end()) throw Error(ErrorCode::UnknownAxis, "axis '" + name + "' repeated");
    pos.push_back(*i);
    out.axes.push_back(t.axes[*i]);
  }
  out.probs.assign(out.size(), 0.0);
  const auto in_cards = cards_of(t.axes);
  for (std::size_t f = 0; f < t.probs.size(); ++f) {
    const auto o = decode(in_cards, f);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) idx = idx * out.axes[k].card + o[pos[k]];
    out.probs[idx] += t.probs[f];
  }
  return out;
}

const DataTable* DataBundle::observational() const {
  for (const auto& t : tables)
    if (t.kind == TableKind::Observational) return &t;
  return nullptr;
}

const DataTable* DataBundle::interventional(const std::string& target, int setting) const {
  for (const auto& t : tables)
    if (t.kind == TableKind::Interventional && t.target == target && t.setting == setting) return &t;
  return nullptr;
}

std::vector<std::string> DataBundle::targets() const {
  std::vector<std::string> out;
  for (const auto& o : scenario.observables) {
    for (const auto& t : tables)
      if (t.kind == TableKind::Interventional && t.target == o.name) {
        out.push_back(o.name);
        break;
      }
  }
  return out;
}

DataBundle DataBundle::subset(const std::vector<std::size_t>& table_indices) const {
  DataBundle b;
  b.scenario = scenario;
  for (auto i : table_indices) {
    if (i >= tables.size()) throw Error(ErrorCode::OutOfRange, "table index " + std::to_string(i));
    b.tables.push_back(tables[i]);
  }
  return b;
}

std::vector<double> DataBundle::flat() const {
  std::vector<double> v;
  for (const auto& t : tables) v.insert(v.end(), t.probs.begin(), t.probs.end());
  return v;
}

std::size_t DataBundle::entry_count() const {
  std::size_t n = 0;
  for (const auto& t : tables) n += t.probs.size();
  return n;
}

ValidationReport validate_bundle(const DataBundle& b, double tol) {
  ValidationReport r;
  const auto sr = validate(b.scenario);
  for (const auto& d : sr.failures) r.fail(d.property, "scenario:" + d.subject, d.message);

  int observational = 0;
  std::map<std::string, std::set<int>> settings_seen;
  for (const auto& t : b.tables) {
    const std::string who = t.label();
    std::set<std::string> names;
    bool axes_ok = true;
    for (const auto& a : t.axes) {
      if (!names.insert(a.name).second) {
        r.fail("axes", who, "repeated axis " + a.name);
        axes_ok = false;
      }
      auto oi = b.scenario.observable_index(a.name);
      if (!oi) {
        r.fail("axes", who, "axis " + a.name + " is not an observable");
        axes_ok = false;
      } else if (b.scenario.observables[*oi].card != a.card) {
        r.fail("cardinality", who, "axis " + a.name + " cardinality differs from the scenario");
        axes_ok = false;
      }
    }
    if (t.kind == TableKind::Observational) {
      ++observational;
    } else {
      auto oi = b.scenario.observable_index(t.target);
      if (!oi) {
        r.fail("target", who, "target is not an observable");
      } else {
        if (t.setting < 0 || t.setting >= b.scenario.observables[*oi].card) r.fail("target", who, "setting out of range");
        if (!settings_seen[t.target].insert(t.setting).second) r.fail("regimes", who, "duplicate do-table");
      }
      if (names.count(t.target)) r.fail("axes", who, "interventional table contains its target axis");
    }
    if (axes_ok && t.probs.size() != product_of_cards(t.axes)) {
      r.fail("shape", who, "expected " + std::to_string(product_of_cards(t.axes)) + " entries, got " +
                               std::to_string(t.probs.size()));
      continue;
    }
    double sum = 0.0;
    bool finite = true;
    for (double p : t.probs) {
      if (!std::isfinite(p)) finite = false;
      sum += p;
    }
    if (!finite) {
      r.fail("finite", who, "non-finite probability");
      continue;
    }
    const double lo = t.probs.empty() ? 0.0 : *std::min_element(t.probs.begin(), t.probs.end());
    if (lo < -tol) r.fail("nonnegativity", who, "negative entry " + std::to_string(lo));
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os.precision(17);
      os << "entries sum to " << sum;
      r.fail("normalization", who, os.str());
    }
  }
  if (observational > 1) r.fail("regimes", "bundle", "more than one observational table");
  for (const auto& [target, seen] : settings_seen) {
    auto oi = b.scenario.observable_index(target);
    if (!oi) continue;
    for (int s = 0; s < b.scenario.observables[*oi].card; ++s)
      if (!seen.count(s)) r.fail("regimes", target, "missing do(" + target + "=" + std::to_string(s) + ")");
  }
  return r;
}

void require_valid(const DataBundle& b, double tol) {
  const auto r = validate_bundle(b, tol);
  if (!r.ok()) throw Error(ErrorCode::InvalidBundle, r.summary());
}

DataBundle mix(const DataBundle& b1, const DataBundle& b2, double t) {
  if (b1.tables.size() != b2.tables.size()) throw Error(ErrorCode::DimensionMismatch, "bundles differ in table count");
  DataBundle out = b1;
  for (std::size_t i = 0; i < out.tables.size(); ++i) {
    const auto& x = b1.tables[i];
    const auto& y = b2.tables[i];
    if (x.axes != y.axes || x.kind != y.kind || x.target != y.target || x.setting != y.setting) {
      throw Error(ErrorCode::DimensionMismatch, "bundles differ in table layout");
    }
    out.tables[i].exact.clear();
    for (std::size_t k = 0; k < x.probs.size(); ++k) out.tables[i].probs[k] = t * x.probs[k] + (1.0 - t) * y.probs[k];
  }
  return out;
}

std::size_t SwigDistribution::outcome_count() const { return product_of_cards(outcome_axes); }

std::size_t SwigDistribution::setting_count() const {
  std::size_t n = 1;
  for (int c : setting_cards) n *= static_cast<std::size_t>(c);
  return n;
}

std::size_t SwigDistribution::setting_index(const std::vector<int>& settings) const {
  if (settings.size() != setting_cards.size()) throw Error(ErrorCode::DimensionMismatch, "setting arity");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < settings.size(); ++i) idx = idx * setting_cards[i] + settings[i];
  return idx;
}

std::vector<int> SwigDistribution::setting_values(std::size_t flat) const { return decode(setting_cards, flat); }
std::vector<int> SwigDistribution::outcome_values(std::size_t flat) const { return decode(cards_of(outcome_axes), flat); }

void check_normalized(const SwigDistribution& q, double tol) {
  const std::size_t no = q.outcome_count();
  if (q.probs.size() != no * q.setting_count()) throw Error(ErrorCode::DimensionMismatch, "SWIG distribution size");
  for (std::size_t s = 0; s < q.setting_count(); ++s) {
    double sum = 0.0;
    for (std::size_t o = 0; o < no; ++o) {
      const double p = q.probs[s * no + o];
      if (!std::isfinite(p) || p < -tol) throw Error(ErrorCode::NotNormalized, "negative or non-finite entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw Error(ErrorCode::NotNormalized, "setting block " + std::to_string(s) + " sums to " + std::to_string(sum));
    }
  }
}

double SwigConstraintSystem::max_residual(const std::vector<double>& q) const {
  if (q.size() != variable_count) throw Error(ErrorCode::DimensionMismatch, "candidate size");
  double worst = 0.0;
  for (const auto& eq : equalities) {
    double lhs = 0.0;
    for (auto k : eq.vars) lhs += q[k];
    worst = std::max(worst, std::abs(lhs - eq.rhs));
  }
  return worst;
}

SwigConstraintSystem swig_constraints(const DataBundle& b) {
  const DataTable* obs = b.observational();
  if (!obs) throw Error(ErrorCode::MissingRegime, "bundle has no observational table");
  const auto targets = b.targets();
  if (targets.empty()) throw Error(ErrorCode::MissingRegime, "bundle has no interventional tables");

  SwigConstraintSystem sys;
  sys.targets = targets;
  for (const auto& o : b.scenario.observables) sys.outcome_axes.push_back({o.name, o.card});
  std::vector<std::size_t> target_pos;
  for (const auto& t : targets) {
    const auto i = *b.scenario.observable_index(t);
    target_pos.push_back(i);
    sys.setting_cards.push_back(b.scenario.observables[i].card);
    for (int s = 0; s < b.scenario.observables[i].card; ++s)
      if (!b.interventional(t, s)) throw Error(ErrorCode::MissingRegime, "missing do(" + t + "=" + std::to_string(s) + ")");
  }
  const auto out_cards = cards_of(sys.outcome_axes);
  const std::size_t no = product_of_cards(sys.outcome_axes);
  std::size_t ns = 1;
  for (int c : sys.setting_cards) ns *= c;
  sys.variable_count = ns * no;

  // table -> observable position of each axis
  std::vector<std::vector<std::size_t>> axis_pos(b.tables.size());
  std::vector<std::size_t> base(b.tables.size());
  std::size_t rows = 0;
  for (std::size_t ti = 0; ti < b.tables.size(); ++ti) {
    for (const auto& a : b.tables[ti].axes) {
      auto i = b.scenario.observable_index(a.name);
      if (!i) throw Error(ErrorCode::UnknownAxis, a.name);
      axis_pos[ti].push_back(*i);
    }
    base[ti] = rows;
    rows += b.tables[ti].probs.size();
  }
  sys.equalities.resize(rows);
  for (std::size_t ti = 0; ti < b.tables.size(); ++ti) {
    const auto& t = b.tables[ti];
    for (std::size_t e = 0; e < t.probs.size(); ++e) {
      auto& eq = sys.equalities[base[ti] + e];
      eq.rhs = t.probs[e];
      eq.table = ti;
      eq.entry = e;
      eq.label = t.entry_label(e);
    }
  }

  for (std::size_t s = 0; s < ns; ++s) {
    const auto sv = decode(sys.setting_cards, s);
    for (std::size_t o = 0; o < no; ++o) {
      const auto ov = decode(out_cards, o);
      const std::size_t var = s * no + o;
      for (std::size_t ti = 0; ti < b.tables.size(); ++ti) {
        const auto& t = b.tables[ti];
        bool hit = true;
        for (std::size_t k = 0; k < targets.size() && hit; ++k) {
          const bool intervened = t.kind == TableKind::Interventional && t.target == targets[k];
          const int want = intervened ? t.setting : ov[target_pos[k]];
          hit = sv[k] == want;
        }
        if (!hit) continue;
        std::size_t idx = 0;
        for (std::size_t a = 0; a < t.axes.size(); ++a) idx = idx * t.axes[a].card + ov[axis_pos[ti][a]];
        sys.equalities[base[ti] + idx].vars.push_back(var);
      }
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    SwigEquality eq;
    eq.rhs = 1.0;
    for (std::size_t o = 0; o < no; ++o) eq.vars.push_back(s * no + o);
    eq.label = "normalization[" + std::to_string(s) + "]";
    sys.equalities.push_back(std::move(eq));
  }
  return sys;
}

// ---- JSON ----

void to_json(nlohmann::json& j, const DataTable& t) {
  j = nlohmann::json::object();
  j["kind"] = t.kind == TableKind::Observational ? "obs" : "do";
  if (t.kind == TableKind::Interventional) {
    j["target"] = t.target;
    j["setting"] = t.setting;
  }
  std::vector<std::string> names;
  for (const auto& a : t.axes) names.push_back(a.name);
  j["axes"] = names;
  j["probs"] = t.probs;
}

void from_json(const nlohmann::json& j, DataTable& t) {
  t = DataTable{};
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "obs") {
      t.kind = TableKind::Observational;
    } else if (kind == "do") {
      t.kind = TableKind::Interventional;
      t.target = j.at("target").get<std::string>();
      t.setting = j.at("setting").get<int>();
    } else {
      throw Error(ErrorCode::ParseError, "unknown table kind '" + kind + "'");
    }
    for (const auto& n : j.at("axes")) t.axes.push_back({n.get<std::string>(), 0});
    const auto& probs = j.at("probs");
    bool all_strings = !probs.empty();
    for (const auto& p : probs) {
      if (p.is_string()) {
        const auto s = p.get<std::string>();
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::ParseError, "bad probability '" + s + "'");
        t.probs.push_back(v);
        t.exact.push_back(s);
      } else {
        all_strings = false;
        t.probs.push_back(p.get<double>());
      }
    }
    if (!all_strings) t.exact.clear();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("table: ") + ex.what());
  }
}

nlohmann::json bundle_to_json(const DataBundle& b) {
  nlohmann::json j;
  j["scenario"] = b.scenario;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : b.tables) j["tables"].push_back(t);
  return j;
}

DataBundle bundle_from_json(const nlohmann::json& j, const std::string& base_dir) {
  DataBundle b;
  try {
    const auto& sc = j.at("scenario");
    if (sc.is_string()) {
      std::filesystem::path p = sc.get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      b.scenario = load_scenario(p.string());
    } else {
      b.scenario = sc.get<Scenario>();
    }
    for (const auto& t : j.at("tables")) b.tables.push_back(t.get<DataTable>());
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("bundle: ") + ex.what());
  }
  for (auto& t : b.tables)
    for (auto& a : t.axes) {
      auto i = b.scenario.observable_index(a.name);
      if (!i) throw Error(ErrorCode::UnknownAxis, "axis '" + a.name + "' is not in the scenario");
      a.card = b.scenario.observables[*i].card;
    }
  return b;
}

DataBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, path + ": " + ex.what());
  }
  return bundle_from_json(j, std::filesystem::path(path).parent_path().string().empty()
                                 ? "."
                                 : std::filesystem::path(path).parent_path().string());
}

std::string dump_bundle(const DataBundle& b) { return bundle_to_json(b).dump(2); }

nlohmann::json swig_to_json(const SwigDistribution& q) {
  nlohmann::json j;
  j["scenario"] = q.scenario;
  j["targets"] = q.targets;
  std::vector<std::string> names;
  for (const auto& a : q.outcome_axes) names.push_back(a.name);
  j["axes"] = names;
  j["setting_cards"] = q.setting_cards;
  j["layout"] = "settings-major";
  j["probs"] = q.probs;
  return j;
}

SwigDistribution swig_from_json(const nlohmann::json& j) {
  SwigDistribution q;
  try {
    q.scenario = j.at("scenario").get<Scenario>();
    q.targets = j.at("targets").get<std::vector<std::string>>();
    for (const auto& n : j.at("axes")) {
      const auto name = n.get<std::string>();
      q.outcome_axes.push_back({name, q.scenario.card(name)});
    }
    q.setting_cards = j.at("setting_cards").get<std::vector<int>>();
    q.probs = j.at("probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("swig: ") + ex.what());
  }
  return q;
}

}  // namespace fusionlab
