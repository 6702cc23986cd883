#include "fusionlab/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace fusionlab {

namespace {

struct Layout {
  std::vector<const LatentState*> sorted;  // by latent name
  std::vector<std::size_t> dims;           // global subsystem dims
  std::vector<std::string> owners;
  std::vector<std::size_t> grouped;        // permutation: node-grouped order -> global index
  std::vector<std::size_t> node_dims;      // per observable (scenario order)
};

Layout make_layout(const QuantumCausalModel& m) {
  Layout L;
  for (const auto& ls : m.latents) L.sorted.push_back(&ls);
  std::sort(L.sorted.begin(), L.sorted.end(), [](auto* a, auto* b) { return a->latent < b->latent; });
  for (const auto* ls : L.sorted)
    for (const auto& sub : ls->subsystems) {
      L.dims.push_back(static_cast<std::size_t>(sub.dim));
      L.owners.push_back(sub.owner);
    }
  for (const auto& o : m.scenario.observables) {
    std::size_t d = 1;
    for (std::size_t g = 0; g < L.dims.size(); ++g)
      if (L.owners[g] == o.name) {
        L.grouped.push_back(g);
        d *= L.dims[g];
      }
    L.node_dims.push_back(d);
  }
  return L;
}

ComplexMatrix grouped_state(const Layout& L) {
  ComplexMatrix rho = ComplexMatrix::identity(1);
  for (const auto* ls : L.sorted) rho = kron(rho, ls->rho);
  if (L.grouped.size() != L.dims.size()) {
    throw Error(ErrorCode::InvalidModel, "a source subsystem is owned by no observable");
  }
  return permute_subsystems(rho, L.dims, L.grouped);
}

const EffectFamily* family_for(const QuantumCausalModel& m, const std::string& node) {
  for (const auto& f : m.effects)
    if (f.node == node) return &f;
  return nullptr;
}

ComplexMatrix observable_from(double cx, double cy, double cz) {
  return pauli::X() * Complex(cx) + pauli::Y() * Complex(cy) + pauli::Z() * Complex(cz);
}

ComplexMatrix effect_of(const ComplexMatrix& obs, int outcome) {
  auto [e0, e1] = dichotomic_effects(obs);
  return outcome == 0 ? e0 : e1;
}

ComplexMatrix basis_projector(std::size_t dim, std::size_t k) {
  ComplexMatrix p(dim, dim);
  p(k, k) = 1.0;
  return p;
}

// sum_x |x><x| (x) f(x) for a classical control register of size `dim`.
template <typename F>
ComplexMatrix controlled(std::size_t dim, F f) {
  ComplexMatrix out;
  for (std::size_t x = 0; x < dim; ++x) {
    ComplexMatrix term = kron(basis_projector(dim, x), f(x));
    out = x == 0 ? term : out + term;
  }
  return out;
}

ComplexMatrix classical_bit_pair() {
  // uniform bit copied to both holders: diag(1/2, 0, 0, 1/2)
  const double d[] = {0.5, 0.0, 0.0, 0.5};
  return ComplexMatrix::diagonal(d);
}

}  // namespace

std::size_t QuantumCausalModel::node_dim(const std::string& node) const {
  std::size_t d = 1;
  for (const auto& ls : latents)
    for (const auto& sub : ls.subsystems)
      if (sub.owner == node) d *= static_cast<std::size_t>(sub.dim);
  return d;
}

ValidationReport validate_model(const QuantumCausalModel& m, double tol) {
  ValidationReport r;
  for (const auto& d : validate(m.scenario).failures) r.fail(d.property, "scenario:" + d.subject, d.message);

  std::set<std::string> covered;
  for (const auto& ls : m.latents) {
    const auto li = m.scenario.latent_index(ls.latent);
    if (!li) {
      r.fail("latents", ls.latent, "state for a latent missing from the scenario");
      continue;
    }
    if (!covered.insert(ls.latent).second) r.fail("latents", ls.latent, "duplicate state");
    const auto& kids = m.scenario.latents[*li].children;
    std::size_t dim = 1;
    for (const auto& sub : ls.subsystems) {
      if (sub.dim < 1) r.fail("subsystems", ls.latent, "subsystem dimension must be positive");
      if (std::find(kids.begin(), kids.end(), sub.owner) == kids.end()) {
        r.fail("subsystems", ls.latent, "owner '" + sub.owner + "' is not a child of the latent");
      }
      dim *= static_cast<std::size_t>(std::max(sub.dim, 1));
    }
    if (ls.rho.rows() != dim || ls.rho.cols() != dim) {
      r.fail("dimension", ls.latent, "state size does not match its subsystems");
      continue;
    }
    for (const auto& d : validate_state(ls.rho, tol).failures) r.fail(d.property, ls.latent, d.message);
  }
  for (const auto& l : m.scenario.latents)
    if (!covered.count(l.name)) r.fail("latents", l.name, "no state for latent");

  for (const auto& o : m.scenario.observables) {
    const auto* f = family_for(m, o.name);
    if (!f) {
      r.fail("effects", o.name, "no effect family");
      continue;
    }
    if (f->outcome_card != o.card) r.fail("effects", o.name, "outcome count differs from the scenario");
    if (f->parents != m.scenario.parents(o.name)) r.fail("effects", o.name, "parent signature differs from the scenario");
    const std::size_t configs = config_count(f->parents);
    if (f->effects.size() != configs) {
      r.fail("effects", o.name, "expected one effect list per parent configuration");
      continue;
    }
    const std::size_t dim = m.node_dim(o.name);
    const auto id = ComplexMatrix::identity(dim);
    for (std::size_t c = 0; c < configs; ++c) {
      const std::string who = o.name + "[" + std::to_string(c) + "]";
      if (f->effects[c].size() != static_cast<std::size_t>(o.card)) {
        r.fail("effects", who, "wrong number of outcomes");
        continue;
      }
      ComplexMatrix sum(dim, dim);
      bool sized = true;
      for (const auto& e : f->effects[c]) {
        if (e.rows() != dim || e.cols() != dim) {
          r.fail("dimension", who, "effect does not act on the node space");
          sized = false;
          break;
        }
        for (const auto& d : validate_effect(e, tol).failures) r.fail(d.property, who, d.message);
        sum += e;
      }
      if (sized && sum.max_abs_diff(id) > tol) r.fail("completeness", who, "effects do not sum to the identity");
    }
  }
  for (const auto& f : m.effects)
    if (!m.scenario.is_observable(f.node)) r.fail("effects", f.node, "effect family for unknown node");
  return r;
}

std::vector<double> evaluate(const QuantumCausalModel& m, const Regime& regime) {
  const auto& s = m.scenario;
  const std::size_t n = s.observables.size();
  if (regime.measured.size() != n || regime.passed.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "regime does not match the scenario");
  }
  const Layout L = make_layout(m);
  const ComplexMatrix rho = grouped_state(L);

  std::vector<const EffectFamily*> fam(n);
  std::vector<std::vector<std::size_t>> parent_pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    fam[i] = family_for(m, s.observables[i].name);
    if (!fam[i]) throw Error(ErrorCode::InvalidModel, "no effect family for " + s.observables[i].name);
    for (const auto& p : fam[i]->parents) {
      auto pi = s.observable_index(p.name);
      if (!pi) throw Error(ErrorCode::InvalidModel, "effect parent '" + p.name + "' is not an observable");
      parent_pos[i].push_back(*pi);
    }
  }

  const auto axes = regime.axes(s);
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.card;
  std::vector<double> out(total, 0.0);
  std::vector<int> value(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t i = n; i-- > 0;) {
      if (!regime.measured[i]) continue;
      value[i] = static_cast<int>(rest % s.observables[i].card);
      rest /= s.observables[i].card;
    }
    ComplexMatrix op = ComplexMatrix::identity(1);
    for (std::size_t i = 0; i < n; ++i) {
      if (!regime.measured[i]) {
        op = kron(op, ComplexMatrix::identity(L.node_dims[i]));
        continue;
      }
      std::size_t cfg = 0;
      for (std::size_t k = 0; k < parent_pos[i].size(); ++k) {
        const auto pi = parent_pos[i][k];
        const int seen = regime.passed[pi] >= 0 ? regime.passed[pi] : value[pi];
        cfg = cfg * fam[i]->parents[k].card + seen;
      }
      op = kron(op, fam[i]->effects.at(cfg).at(value[i]));
    }
    if (op.rows() != rho.rows()) throw Error(ErrorCode::InvalidModel, "effect dimensions do not match the sources");
    Complex t = 0.0;
    for (std::size_t a = 0; a < rho.rows(); ++a)
      for (std::size_t b = 0; b < rho.rows(); ++b) t += rho(a, b) * op(b, a);
    if (t.real() < -1e-9 || t.real() > 1.0 + 1e-9 || std::abs(t.imag()) > 1e-9) {
      throw Error(ErrorCode::NonPhysicalProbability, "Born probability " + std::to_string(t.real()));
    }
    out[flat] = std::clamp(t.real(), 0.0, 1.0);
  }
  return out;
}

namespace {
void require_valid_model(const QuantumCausalModel& m) {
  const auto r = validate_model(m);
  if (!r.ok()) throw Error(ErrorCode::InvalidModel, r.summary());
}
}  // namespace

DataBundle generate_bundle(const QuantumCausalModel& m, const std::vector<std::string>& targets) {
  require_valid_model(m);
  return bundle_from_evaluator(m.scenario, targets, [&](const Regime& r) { return evaluate(m, r); });
}

SwigDistribution generate_swig(const QuantumCausalModel& m, const std::vector<std::string>& targets) {
  require_valid_model(m);
  return swig_from_evaluator(m.scenario, targets, [&](const Regime& r) { return evaluate(m, r); });
}

ProtocolId parse_protocol(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "uc_relaxation") return ProtocolId::UcRelaxation;
  if (n == "chain") return ProtocolId::Chain;
  if (n == "fritz_edge_triangle") return ProtocolId::FritzEdgeTriangle;
  throw Error(ErrorCode::UnknownProtocol, "unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(ProtocolId id) {
  switch (id) {
    case ProtocolId::UcRelaxation: return "uc_relaxation";
    case ProtocolId::Chain: return "chain";
    case ProtocolId::FritzEdgeTriangle: return "fritz_edge_triangle";
  }
  return "unknown";
}

std::vector<std::string> default_targets(ProtocolId id) {
  if (id == ProtocolId::FritzEdgeTriangle) return {"A"};
  return {"A", "B"};
}

Scenario protocol_scenario(ProtocolId id) {
  switch (id) {
    case ProtocolId::UcRelaxation: return scenarios::uc_relaxation();
    case ProtocolId::Chain: return scenarios::chain();
    case ProtocolId::FritzEdgeTriangle: return scenarios::triangle_edge();
  }
  throw Error(ErrorCode::UnknownProtocol, "protocol id");
}

ComplexMatrix isotropic(const ComplexMatrix& state, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::OutOfRange, "visibility must lie in [0,1]");
  if (!state.is_square()) throw Error(ErrorCode::DimensionMismatch, "state must be square");
  const auto d = static_cast<double>(state.rows());
  return state * Complex(v) + ComplexMatrix::identity(state.rows()) * Complex((1.0 - v) / d);
}

ComplexMatrix phi_plus() {
  const double h = 1.0 / std::numbers::sqrt2;
  const Complex amp[] = {h, 0.0, 0.0, h};
  return ComplexMatrix::projector(amp);
}

QuantumCausalModel build_protocol(const ProtocolSpec& p) {
  if (!(p.visibility >= 0.0 && p.visibility <= 1.0)) throw Error(ErrorCode::OutOfRange, "visibility must lie in [0,1]");
  const double r2 = 1.0 / std::numbers::sqrt2;
  QuantumCausalModel m;
  m.scenario = protocol_scenario(p.id);

  switch (p.id) {
    case ProtocolId::UcRelaxation: {
      m.latents.push_back({"gamma", isotropic(phi_plus(), p.visibility), {{2, "A"}, {2, "B"}}});
      m.latents.push_back({"alpha", classical_bit_pair(), {{2, "B"}, {2, "C"}}});
      // A: sigma_x if b = 0, sigma_z if b = 1
      EffectFamily A{"A", 2, m.scenario.parents("A"), {}};
      for (int b = 0; b < 2; ++b) {
        const auto obs = b == 0 ? pauli::X() : pauli::Z();
        A.effects.push_back({effect_of(obs, 0), effect_of(obs, 1)});
      }
      // B holds (alpha, gamma_B); measures (X + (-1)^alpha Z)/sqrt2 on gamma_B
      EffectFamily B{"B", 2, {}, {{}}};
      for (int o = 0; o < 2; ++o) {
        B.effects[0].push_back(controlled(2, [&](std::size_t alpha) {
          return effect_of(observable_from(r2, 0.0, alpha == 0 ? r2 : -r2), o);
        }));
      }
      // C copies alpha whatever b and a are
      EffectFamily C{"C", 2, m.scenario.parents("C"), {}};
      for (std::size_t cfg = 0; cfg < config_count(C.parents); ++cfg)
        C.effects.push_back({basis_projector(2, 0), basis_projector(2, 1)});
      m.effects = {A, B, C};
      break;
    }
    case ProtocolId::Chain: {
      const double phase = std::numbers::pi / 8.0;
      const Complex w0 = std::polar(r2, -phase);
      const Complex w1 = std::polar(r2, phase);
      // |psi-> = (|01> - |10>)/sqrt2, |theta+> = (|01> + i|10>)/sqrt2 on BC
      std::vector<Complex> amp(8, 0.0);
      amp[0b001] += w0 * r2;
      amp[0b010] += -w0 * r2;
      amp[0b101] += w1 * r2;
      amp[0b110] += w1 * Complex(0.0, r2);
      m.latents.push_back({"Lambda", isotropic(ComplexMatrix::projector(amp), p.visibility),
                           {{2, "A"}, {2, "B"}, {2, "C"}}});
      EffectFamily A{"A", 2, {}, {{effect_of(pauli::X(), 0), effect_of(pauli::X(), 1)}}};
      auto xy = [&](int bit) { return observable_from(r2, bit == 0 ? r2 : -r2, 0.0); };
      EffectFamily B{"B", 2, m.scenario.parents("B"), {}};
      EffectFamily C{"C", 2, m.scenario.parents("C"), {}};
      for (int v = 0; v < 2; ++v) {
        B.effects.push_back({effect_of(xy(v), 0), effect_of(xy(v), 1)});
        C.effects.push_back({effect_of(xy(v), 0), effect_of(xy(v), 1)});
      }
      m.effects = {A, B, C};
      break;
    }
    case ProtocolId::FritzEdgeTriangle: {
      m.latents.push_back({"alpha", ComplexMatrix::identity(1), {{1, "B"}, {1, "C"}}});
      m.latents.push_back({"beta", classical_bit_pair(), {{2, "A"}, {2, "C"}}});
      m.latents.push_back({"gamma", isotropic(phi_plus(), p.visibility), {{2, "A"}, {2, "B"}}});
      // A holds (x from beta, gamma_A): sigma_z if x = 0, sigma_x if x = 1
      EffectFamily A{"A", 2, {}, {{}}};
      for (int o = 0; o < 2; ++o) {
        A.effects[0].push_back(controlled(2, [&](std::size_t x) {
          return effect_of(x == 0 ? pauli::Z() : pauli::X(), o);
        }));
      }
      // B: (Z + X)/sqrt2 for input 0, (Z - X)/sqrt2 for input 1
      EffectFamily B{"B", 2, m.scenario.parents("B"), {}};
      for (int a = 0; a < 2; ++a) {
        const auto obs = observable_from(a == 0 ? r2 : -r2, 0.0, r2);
        B.effects.push_back({effect_of(obs, 0), effect_of(obs, 1)});
      }
      EffectFamily C{"C", 2, {}, {{basis_projector(2, 0), basis_projector(2, 1)}}};
      m.effects = {A, B, C};
      break;
    }
  }
  return m;
}

}  // namespace fusionlab
