#include "fusionlab/witness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace fusionlab {

double WitnessReport::component(const std::string& name) const {
  for (const auto& [k, v] : components)
    if (k == name) return v;
  for (const auto& [k, v] : auxiliary)
    if (k == name) return v;
  throw Error(ErrorCode::InvalidArgument, "no component '" + name + "' in " + witness);
}

namespace {

void require_binary(const Scenario& s, const char* witness) {
  for (const char* n : {"A", "B", "C"}) {
    auto i = s.observable_index(n);
    if (!i) throw Error(ErrorCode::WrongCardinality, std::string(witness) + " needs observables A, B, C");
    if (s.observables[*i].card != 2) throw Error(ErrorCode::WrongCardinality, std::string(witness) + " needs binary variables");
  }
}

const DataTable& need_obs(const DataBundle& b) {
  const auto* t = b.observational();
  if (!t) throw Error(ErrorCode::MissingRegime, "observational table required");
  return *t;
}

const DataTable& need_do(const DataBundle& b, const std::string& target, int setting) {
  const auto* t = b.interventional(target, setting);
  if (!t) throw Error(ErrorCode::MissingRegime, "do(" + target + "=" + std::to_string(setting) + ") table required");
  return *t;
}

double entry(const DataTable& t, const std::vector<std::string>& keep, const std::vector<int>& values) {
  return marginal(t, keep).at(values);
}

}  // namespace

WitnessReport eval_W(const DataBundle& b) {
  require_binary(b.scenario, "W");
  const auto& obs = need_obs(b);
  const auto& doA0 = need_do(b, "A", 0);
  const auto& doB0 = need_do(b, "B", 0);

  const double P = entry(doB0, {"A"}, {0});
  const double pab00 = entry(obs, {"A", "B"}, {0, 0});
  const double pab01 = entry(obs, {"A", "B"}, {0, 1});
  const double pb0 = entry(obs, {"B"}, {0});
  const double pb1 = entry(obs, {"B"}, {1});
  const double p010 = entry(obs, {"A", "B", "C"}, {0, 1, 0});
  const double p011 = entry(obs, {"A", "B", "C"}, {0, 1, 1});
  const double pbc10 = entry(doA0, {"B", "C"}, {1, 0});

  const double I = 2 * pab00 + pb1 + pbc10 + p011 - 2 * p010;
  const double J = pab00 - 2 * pb0 + 2 * pab00 - 2 * p010;
  const double E = 2 * pab01 * pbc10 + pab00 * pb0 + (2 * pb0 - pab00) * (pbc10 + p011) - pab00 * pab00 - p010 * p010;
  const double E_variant = 2 * pab01 * pbc10 + pab00 * pb0 + (2 * pb0 - pab00) * (pbc10 + p010) - pab00 * pab00 -
                           p010 * p010;

  WitnessReport r;
  r.witness = "W";
  r.value = P * P - P * I + E + J;
  r.bound = 0.0;
  r.violation = r.value - r.bound;
  r.components = {{"P", P}, {"I", I}, {"J", J}, {"E_quad", E}};
  r.auxiliary = {{"E_quad_variant_010", E_variant}, {"W_variant_010", P * P - P * I + E_variant + J}};
  return r;
}

WitnessReport eval_D(const DataBundle& b) {
  require_binary(b.scenario, "D");
  const auto& obs = need_obs(b);
  const auto& doB0 = need_do(b, "B", 0);
  const auto& doA1 = need_do(b, "A", 1);

  const double t1 = entry(obs, {"A", "B", "C"}, {1, 0, 0});
  const double t2 = entry(obs, {"A", "B", "C"}, {1, 1, 1});
  const double t3 = entry(obs, {"A", "C"}, {0, 0});
  const double t4 = entry(doB0, {"A", "C"}, {0, 0});
  const auto bc = marginal(doA1, {"B", "C"});
  const double t5 = bc.at({0, 1}) + bc.at({1, 0});

  WitnessReport r;
  r.witness = "D";
  r.value = t1 + t2 - t3 + t4 + t5;
  r.bound = 1.0;
  r.violation = r.value - r.bound;
  r.components = {{"P_ABC(1,0,0)", t1},
                  {"P_ABC(1,1,1)", t2},
                  {"P_AC(0,0)", t3},
                  {"P_AC(0,0|do(B=0))", t4},
                  {"P_BC(b!=c|do(A=1))", t5}};
  return r;
}

WitnessReport eval_chsh_fritz(const SwigDistribution& q) {
  require_binary(q.scenario, "CHSH");
  if (q.targets != std::vector<std::string>{"A"}) {
    throw Error(ErrorCode::MissingRegime, "CHSH needs a SWIG distribution interrupted on A only");
  }
  const auto ia = *q.scenario.observable_index("A");
  const auto ib = *q.scenario.observable_index("B");
  const auto ic = *q.scenario.observable_index("C");
  WitnessReport r;
  r.witness = "CHSH";
  r.bound = 2.0;
  double S = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int s = 0; s < 2; ++s) {
      double weight = 0.0, corr = 0.0;
      for (std::size_t o = 0; o < q.outcome_count(); ++o) {
        const auto ov = q.outcome_values(o);
        if (ov[ic] != x) continue;
        const double p = q.at(static_cast<std::size_t>(s), o);
        weight += p;
        corr += ((ov[ia] + ov[ib]) % 2 == 0 ? 1.0 : -1.0) * p;
      }
      if (weight <= 0.0) {
        throw Error(ErrorCode::ZeroConditioningEvent,
                    "P(c=" + std::to_string(x) + "|A#=" + std::to_string(s) + ") = 0");
      }
      const double E = corr / weight;
      const std::string tag = std::to_string(x) + std::to_string(s);
      r.components.push_back({"E" + tag, E});
      r.auxiliary.push_back({"P(c=" + std::to_string(x) + "|A#=" + std::to_string(s) + ")", weight});
      S += (x * s == 1 ? -1.0 : 1.0) * E;
    }
  r.value = S;
  r.violation = S - r.bound;
  return r;
}

WitnessId parse_witness(const std::string& name) {
  if (name == "W") return WitnessId::W;
  if (name == "D") return WitnessId::D;
  if (name == "CHSH" || name == "chsh") return WitnessId::CHSH;
  throw Error(ErrorCode::InvalidArgument, "unknown witness '" + name + "' (W, D, CHSH)");
}

std::string_view to_string(WitnessId id) {
  switch (id) {
    case WitnessId::W: return "W";
    case WitnessId::D: return "D";
    case WitnessId::CHSH: return "CHSH";
  }
  return "?";
}

WitnessReport evaluate_witness(ProtocolId protocol, WitnessId witness, double v) {
  const auto model = build_protocol({protocol, v});
  switch (witness) {
    case WitnessId::W: return eval_W(generate_bundle(model, default_targets(protocol)));
    case WitnessId::D: return eval_D(generate_bundle(model, default_targets(protocol)));
    case WitnessId::CHSH: return eval_chsh_fritz(generate_swig(model, {"A"}));
  }
  throw Error(ErrorCode::InvalidArgument, "witness id");
}

unsigned worker_count() {
  if (const char* env = std::getenv("FUSIONLAB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return 1;
}

SweepResult sweep(ProtocolId protocol, WitnessId witness, double v_from, double v_to, int steps, unsigned threads) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "a sweep needs at least 2 steps");
  SweepResult res;
  res.protocol = protocol;
  res.witness = witness;
  res.noise_model = protocol == ProtocolId::Chain ? "v*psi + (1-v)*I/8 on the three-qubit source (artifact choice)"
                                                  : "v*phi+ + (1-v)*I/4 on the entangled source";
  res.rows.resize(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) res.rows[i].v = v_from + (v_to - v_from) * i / (steps - 1);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < res.rows.size(); i = next++) {
      auto& row = res.rows[i];
      try {
        row.report = evaluate_witness(protocol, witness, row.v);
        row.ok = true;
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
    }
  };
  const unsigned n = std::max(1u, threads ? threads : worker_count());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  const SweepRow* prev = nullptr;
  int direction = 0;
  for (const auto& row : res.rows) {
    if (!row.ok) continue;
    if (prev) {
      const double a = prev->report.violation, b = row.report.violation;
      if ((a <= 0 && b > 0) || (a > 0 && b <= 0)) {
        res.crossings.push_back(prev->v + (row.v - prev->v) * (a / (a - b)));
      }
      const int d = b > a ? 1 : (b < a ? -1 : 0);
      if (d != 0) {
        if (direction != 0 && d != direction) res.monotone = false;
        direction = d;
      }
    }
    prev = &row;
  }
  return res;
}

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "v,value,bound,violation";
  const SweepRow* first_ok = nullptr;
  for (const auto& r : s.rows)
    if (r.ok) {
      first_ok = &r;
      break;
    }
  if (first_ok)
    for (const auto& [k, _] : first_ok->report.components) os << "," << k;
  os << ",error\n";
  for (const auto& r : s.rows) {
    os << format17(r.v);
    if (r.ok) {
      os << "," << format17(r.report.value) << "," << format17(r.report.bound) << "," << format17(r.report.violation);
      for (const auto& [_, v] : r.report.components) os << "," << format17(v);
      os << ",\n";
    } else {
      os << ",,,";
      if (first_ok)
        for (std::size_t k = 0; k < first_ok->report.components.size(); ++k) os << ",";
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      os << "," << msg << "\n";
    }
  }
  return os.str();
}

std::string sweep_svg(const SweepResult& s) {
  const double W = 640, H = 400, L = 60, R = 20, T = 20, B = 50;
  double vmin = 1e300, vmax = -1e300, ymin = 0.0, ymax = 0.0;
  for (const auto& r : s.rows) {
    vmin = std::min(vmin, r.v);
    vmax = std::max(vmax, r.v);
    if (!r.ok) continue;
    ymin = std::min(ymin, r.report.violation);
    ymax = std::max(ymax, r.report.violation);
  }
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  if (vmax - vmin < 1e-12) vmax = vmin + 1.0;
  auto px = [&](double v) { return L + (v - vmin) / (vmax - vmin) * (W - L - R); };
  auto py = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0)
     << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (const auto& r : s.rows)
    if (r.ok) os << px(r.v) << "," << py(r.report.violation) << " ";
  os << "\"/>\n";
  os << "<text x=\"" << (W / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"14\">v</text>\n";
  os << "<text x=\"14\" y=\"" << H / 2 << "\" font-size=\"14\" transform=\"rotate(-90 14," << H / 2
     << ")\" text-anchor=\"middle\">" << to_string(s.witness) << " violation</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"11\">" << format17(vmin).substr(0, 6) << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"end\">"
     << format17(vmax).substr(0, 6) << "</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
     << format17(ymax).substr(0, 7) << "</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">"
     << format17(ymin).substr(0, 7) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

nlohmann::json report_to_json(const WitnessReport& r) {
  nlohmann::json j;
  j["witness"] = r.witness;
  j["value"] = r.value;
  j["bound"] = r.bound;
  j["violation"] = r.violation;
  j["components"] = nlohmann::json::object();
  for (const auto& [k, v] : r.components) j["components"][k] = v;
  if (!r.auxiliary.empty()) {
    j["auxiliary"] = nlohmann::json::object();
    for (const auto& [k, v] : r.auxiliary) j["auxiliary"][k] = v;
  }
  return j;
}

}  // namespace fusionlab
