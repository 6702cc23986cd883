#include "fusionlab/feasibility.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "fusionlab/witness.hpp"
#include "response_basis.hpp"

namespace fusionlab {

std::string_view to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return "Feasible";
    case Feasibility::Infeasible: return "Infeasible";
    case Feasibility::Unknown: return "Unknown";
  }
  return "?";
}

double Certificate::evaluate(const std::vector<double>& data) const {
  double total = 0.0;
  for (const auto& t : terms) {
    double v = t.coeff;
    for (std::size_t e : t.entries) {
      if (e >= data.size()) throw Error(ErrorCode::DimensionMismatch, "certificate entry outside the data");
      v *= data[e];
    }
    total += v;
  }
  return total;
}

SolverId parse_solver(const std::string& name) {
  if (name == "lp") return SolverId::Lp;
  if (name == "bnb" || name == "bb") return SolverId::Bnb;
  if (name == "inflation") return SolverId::Inflation;
  throw Error(ErrorCode::InvalidArgument, "unknown solver '" + name + "' (lp, bnb, inflation)");
}

std::string_view to_string(SolverId id) {
  switch (id) {
    case SolverId::Lp: return "lp";
    case SolverId::Bnb: return "bnb";
    case SolverId::Inflation: return "inflation";
  }
  return "?";
}

FeasibilityVerdict run_solver(const ProtocolSpec& p, SolverId solver, const ThresholdOptions& opt) {
  const auto bundle = generate_bundle(build_protocol(p), default_targets(p.id));
  switch (solver) {
    case SolverId::Lp: {
      LpOptions o;
      o.tol = opt.tol;
      return lp_membership(bundle, o);
    }
    case SolverId::Bnb: {
      BnbOptions o;
      o.tol = opt.tol;
      o.budget_seconds = opt.budget_seconds;
      return bb_feasibility(bundle, o);
    }
    case SolverId::Inflation: {
      InflationOptions o;
      o.tol = opt.tol;
      o.order = opt.inflation_order;
      o.use_swig = opt.use_swig;
      return inflation_lp(bundle, o);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "solver id");
}

namespace {

std::string describe(const std::vector<ThresholdProbe>& probes) {
  std::ostringstream os;
  for (const auto& p : probes) os << " v=" << format17(p.v) << ":" << to_string(p.status);
  return os.str();
}

}  // namespace

ThresholdResult visibility_threshold(ProtocolId protocol, SolverId solver, const ThresholdOptions& opt) {
  if (!(opt.precision > 0.0)) throw Error(ErrorCode::InvalidArgument, "precision must be positive");
  ThresholdResult r;
  auto probe = [&](double v) {
    const auto verdict = run_solver({protocol, v}, solver, opt);
    r.probes.push_back({v, verdict.status, verdict.diagnostics.runtime_seconds});
    if (verdict.status == Feasibility::Unknown) {
      throw Error(ErrorCode::NonMonotoneOrBudget, "Unknown verdict; probes:" + describe(r.probes));
    }
    return verdict.status;
  };
  if (probe(0.0) != Feasibility::Feasible || probe(1.0) != Feasibility::Infeasible) {
    throw Error(ErrorCode::NonMonotoneOrBudget, "endpoints do not bracket a boundary; probes:" + describe(r.probes));
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo >= opt.precision) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) == Feasibility::Feasible) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.lo = lo;
  r.hi = hi;
  r.v_star = 0.5 * (lo + hi);
  return r;
}

nlohmann::json verdict_to_json(const FeasibilityVerdict& v) {
  nlohmann::json j;
  j["status"] = std::string(to_string(v.status));
  if (v.model) j["model"] = model_to_json(*v.model);
  if (v.certificate) {
    const auto& c = *v.certificate;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : c.terms) {
      nlohmann::json tj{{"coeff", t.coeff}, {"entries", t.entries}, {"label", t.label}};
      if (!t.exact_coeff.empty()) tj["exact_coeff"] = t.exact_coeff;
      terms.push_back(std::move(tj));
    }
    j["certificate"] = {{"terms", terms}, {"bound", c.bound}, {"value", c.value}, {"separation", c.value - c.bound}};
    if (!c.exact_bound.empty()) j["certificate"]["exact_bound"] = c.exact_bound;
  }
  if (!v.lower_bound_trace.empty()) j["lower_bound_trace"] = v.lower_bound_trace;
  if (v.best_distance) j["best_distance"] = *v.best_distance;
  if (v.relaxation_residual) j["relaxation_residual"] = *v.relaxation_residual;
  j["diagnostics"] = {{"solver", v.diagnostics.solver},
                      {"runtime_seconds", v.diagnostics.runtime_seconds},
                      {"iterations", v.diagnostics.iterations},
                      {"notes", v.diagnostics.notes}};
  return j;
}

nlohmann::json threshold_to_json(const ThresholdResult& r) {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : r.probes)
    probes.push_back({{"v", p.v}, {"status", std::string(to_string(p.status))}, {"runtime_seconds", p.runtime_seconds}});
  return {{"v_star", r.v_star}, {"lo", r.lo}, {"hi", r.hi}, {"probes", probes}};
}

}  // namespace fusionlab
