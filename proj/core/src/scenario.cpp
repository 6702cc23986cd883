#include "fusionlab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fusionlab {

namespace {

template <typename T>
std::optional<std::size_t> find_named(const std::vector<T>& items, const std::string& name) {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].name == name) return i;
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> Scenario::observable_index(const std::string& name) const {
  return find_named(observables, name);
}
std::optional<std::size_t> Scenario::setting_index(const std::string& name) const {
  return find_named(settings, name);
}
std::optional<std::size_t> Scenario::latent_index(const std::string& name) const {
  return find_named(latents, name);
}

int Scenario::card(const std::string& name) const {
  if (auto i = observable_index(name)) return observables[*i].card;
  if (auto i = setting_index(name)) return settings[*i].card;
  throw Error(ErrorCode::UnknownNode, "no observable or setting named '" + name + "'");
}

std::vector<ParentSlot> Scenario::parents(const std::string& node) const {
  std::vector<ParentSlot> out;
  for (const auto& e : edges)
    if (e.to == node) out.push_back({e.from, card(e.from)});
  return out;
}

std::vector<std::string> Scenario::latent_parents(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& l : latents)
    if (std::find(l.children.begin(), l.children.end(), node) != l.children.end()) out.push_back(l.name);
  return out;
}

std::vector<std::string> Scenario::children(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.from == node) out.push_back(e.to);
  return out;
}

std::vector<std::string> Scenario::topological_order() const {
  // Kahn's algorithm, ties broken by file order so the result is stable.
  std::map<std::string, int> indeg;
  for (const auto& o : observables) indeg[o.name] = 0;
  for (const auto& e : edges)
    if (indeg.count(e.from) && indeg.count(e.to)) ++indeg[e.to];
  std::vector<std::string> order;
  std::set<std::string> done;
  while (order.size() < observables.size()) {
    bool progressed = false;
    for (const auto& o : observables) {
      if (done.count(o.name) || indeg[o.name] != 0) continue;
      order.push_back(o.name);
      done.insert(o.name);
      for (const auto& e : edges)
        if (e.from == o.name && indeg.count(e.to)) --indeg[e.to];
      progressed = true;
      break;
    }
    if (!progressed) throw Error(ErrorCode::InvalidScenario, "observable edges contain a cycle");
  }
  return order;
}

std::vector<std::string> Scenario::interrupted_nodes() const {
  std::vector<std::string> out;
  for (const auto& s : settings) {
    if (!s.name.empty() && s.name.back() == '#') out.push_back(s.name.substr(0, s.name.size() - 1));
  }
  return out;
}

std::string setting_name(const std::string& node) { return node + "#"; }

ValidationReport validate(const Scenario& s) {
  ValidationReport r;
  std::set<std::string> names;
  auto claim = [&](const std::string& name, const char* kind) {
    if (name.empty()) r.fail("names", kind, "empty node name");
    if (!names.insert(name).second) r.fail("names", name, "duplicate node name");
  };
  for (const auto& o : s.observables) {
    claim(o.name, "observable");
    if (o.card < 2) r.fail("cardinality", o.name, "observable cardinality must be at least 2");
  }
  for (const auto& st : s.settings) {
    claim(st.name, "setting");
    if (st.card < 1) r.fail("cardinality", st.name, "setting cardinality must be positive");
  }
  for (const auto& l : s.latents) {
    claim(l.name, "latent");
    std::set<std::string> kids(l.children.begin(), l.children.end());
    if (kids.size() != l.children.size()) r.fail("latent children", l.name, "repeated child");
    if (kids.size() < 2) r.fail("latent children", l.name, "latent needs at least two children");
    for (const auto& c : l.children)
      if (!s.is_observable(c)) r.fail("latent children", l.name, "child '" + c + "' is not an observable");
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : s.edges) {
    const std::string label = e.from + "->" + e.to;
    if (s.latent_index(e.to)) r.fail("latent exogeneity", e.to, "latent has parent '" + e.from + "'");
    if (s.setting_index(e.to)) r.fail("setting exogeneity", e.to, "setting has parent '" + e.from + "'");
    if (s.latent_index(e.from)) r.fail("edges", label, "latent edges belong in the latent child list");
    const bool from_ok = s.is_observable(e.from) || s.is_setting(e.from);
    const bool to_ok = s.is_observable(e.to) || s.latent_index(e.to) || s.is_setting(e.to);
    if (!from_ok && !s.latent_index(e.from)) r.fail("edges", label, "unknown source node");
    if (!to_ok) r.fail("edges", label, "unknown target node");
    if (e.from == e.to) r.fail("acyclic", label, "self loop");
    if (!seen.insert({e.from, e.to}).second) r.fail("edges", label, "duplicate edge");
  }
  try {
    (void)s.topological_order();
  } catch (const Error&) {
    r.fail("acyclic", "edges", "observable edges contain a cycle");
  }
  return r;
}

Scenario interrupt(const Scenario& s, const std::string& node) {
  if (!s.is_observable(node)) throw Error(ErrorCode::UnknownNode, "cannot interrupt '" + node + "'");
  const std::string hash = setting_name(node);
  if (s.is_setting(hash)) throw Error(ErrorCode::AlreadyInterrupted, "'" + node + "' is already interrupted");
  Scenario out = s;
  out.settings.push_back({hash, s.card(node)});
  for (auto& e : out.edges)
    if (e.from == node) e.from = hash;
  return out;
}

Scenario interrupt(const Scenario& s, const std::vector<std::string>& nodes) {
  Scenario out = s;
  for (const auto& n : nodes) out = interrupt(out, n);
  return out;
}

std::size_t config_count(const std::vector<ParentSlot>& parents) {
  std::size_t n = 1;
  for (const auto& p : parents) n *= static_cast<std::size_t>(p.card);
  return n;
}

std::vector<int> decode_config(const std::vector<ParentSlot>& parents, std::size_t index) {
  std::vector<int> values(parents.size());
  for (std::size_t i = parents.size(); i-- > 0;) {
    values[i] = static_cast<int>(index % parents[i].card);
    index /= parents[i].card;
  }
  return values;
}

std::size_t StrategySpace::config_index(const std::vector<int>& parent_values) const {
  if (parent_values.size() != parents.size()) {
    throw Error(ErrorCode::DimensionMismatch, "parent value count for " + node);
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parent_values[i] < 0 || parent_values[i] >= parents[i].card) {
      throw Error(ErrorCode::OutOfRange, "parent value out of range for " + node);
    }
    idx = idx * parents[i].card + parent_values[i];
  }
  return idx;
}

StrategySpace enumerate_strategies(const Scenario& s, const std::string& node) {
  const auto oi = s.observable_index(node);
  if (!oi) throw Error(ErrorCode::UnknownNode, "no observable named '" + node + "'");
  StrategySpace sp;
  sp.node = node;
  sp.outcome_card = s.observables[*oi].card;
  sp.parents = s.parents(node);
  sp.configs = config_count(sp.parents);

  double count = 1.0;
  for (std::size_t j = 0; j < sp.configs; ++j) count *= sp.outcome_card;
  if (count > double(1u << 22)) throw Error(ErrorCode::SizeLimit, "too many strategies for " + node);
  const auto n = static_cast<std::size_t>(count);

  sp.strategies.assign(n, std::vector<int>(sp.configs, 0));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t rest = k;
    for (std::size_t j = sp.configs; j-- > 0;) {
      sp.strategies[k][j] = static_cast<int>(rest % sp.outcome_card);
      rest /= sp.outcome_card;
    }
  }
  return sp;
}

void to_json(nlohmann::json& j, const Scenario& s) {
  j = nlohmann::json::object();
  j["observables"] = nlohmann::json::array();
  for (const auto& o : s.observables) j["observables"].push_back({{"name", o.name}, {"card", o.card}});
  j["latents"] = nlohmann::json::array();
  for (const auto& l : s.latents) j["latents"].push_back({{"name", l.name}, {"children", l.children}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : s.edges) j["edges"].push_back({e.from, e.to});
  j["settings"] = nlohmann::json::array();
  for (const auto& st : s.settings) j["settings"].push_back({{"name", st.name}, {"card", st.card}});
}

void from_json(const nlohmann::json& j, Scenario& s) {
  s = Scenario{};
  try {
    for (const auto& o : j.at("observables")) s.observables.push_back({o.at("name").get<std::string>(), o.at("card").get<int>()});
    if (j.contains("latents"))
      for (const auto& l : j.at("latents"))
        s.latents.push_back({l.at("name").get<std::string>(), l.at("children").get<std::vector<std::string>>()});
    if (j.contains("edges"))
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, "edge must be a [from, to] pair");
        s.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
      }
    if (j.contains("settings"))
      for (const auto& st : j.at("settings")) s.settings.push_back({st.at("name").get<std::string>(), st.at("card").get<int>()});
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("scenario: ") + ex.what());
  }
}

Scenario parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
  return j.get<Scenario>();
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const Scenario& s) { return nlohmann::json(s).dump(2); }

namespace scenarios {

Scenario triangle_edge() {
  Scenario s;
  s.observables = {{"A", 2}, {"B", 2}, {"C", 2}};
  s.latents = {{"alpha", {"B", "C"}}, {"beta", {"A", "C"}}, {"gamma", {"A", "B"}}};
  s.edges = {{"A", "B"}};
  return s;
}

Scenario uc_relaxation() {
  Scenario s;
  s.observables = {{"A", 2}, {"B", 2}, {"C", 2}};
  s.latents = {{"gamma", {"A", "B"}}, {"alpha", {"B", "C"}}};
  s.edges = {{"B", "A"}, {"B", "C"}, {"A", "C"}};
  return s;
}

Scenario chain() {
  Scenario s;
  s.observables = {{"A", 2}, {"B", 2}, {"C", 2}};
  s.latents = {{"Lambda", {"A", "B", "C"}}};
  s.edges = {{"A", "B"}, {"B", "C"}};
  return s;
}

}  // namespace scenarios

}  // namespace fusionlab
