#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <gmpxx.h>

#include "fusionlab/feasibility.hpp"
#include "fusionlab/simplex.hpp"
#include "fusionlab/witness.hpp"
#include "response_basis.hpp"

namespace fusionlab {

using detail::DataRows;
using detail::ResponseBasis;

std::string table_tag(const DataTable& t) {
  if (t.kind == TableKind::Observational) return "obs";
  return "do" + t.target + std::to_string(t.setting);
}

std::vector<std::size_t> select_tables(const DataBundle& b, const std::string& spec) {
  std::vector<std::size_t> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
    if (tok.empty()) continue;
    // accept do(A=1) as well as doA1
    std::string norm;
    for (char c : tok)
      if (c != '(' && c != ')' && c != '=') norm += c;
    bool found = false;
    for (std::size_t i = 0; i < b.tables.size(); ++i) {
      if (table_tag(b.tables[i]) == norm) {
        if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::InvalidArgument, "bundle has no table '" + tok + "'");
  }
  return out;
}

namespace {

void require_single_latent(const Scenario& s) {
  if (s.latents.size() != 1) {
    throw Error(ErrorCode::WrongTopology, "lp membership needs exactly one latent, scenario has " +
                                              std::to_string(s.latents.size()));
  }
  for (const auto& o : s.observables) {
    const auto& ch = s.latents[0].children;
    if (std::find(ch.begin(), ch.end(), o.name) == ch.end()) {
      throw Error(ErrorCode::WrongTopology, "latent " + s.latents[0].name + " does not reach " + o.name);
    }
  }
}

/// Exact value of a decimal string such as "-1.25e-3".
mpq_class parse_decimal(const std::string& text) {
  std::string mant = text;
  long exp10 = 0;
  if (auto e = mant.find_first_of("eE"); e != std::string::npos) {
    exp10 = std::stol(mant.substr(e + 1));
    mant = mant.substr(0, e);
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant = mant.substr(1);
  }
  std::string digits;
  for (char c : mant) {
    if (c == '.') {
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw Error(ErrorCode::ParseError, "bad decimal '" + text + "'");
    digits += c;
  }
  if (auto dot = mant.find('.'); dot != std::string::npos) exp10 -= static_cast<long>(mant.size() - dot - 1);
  if (digits.empty()) throw Error(ErrorCode::ParseError, "bad decimal '" + text + "'");
  mpz_class num(digits, 10), scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  mpq_class q = exp10 >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
  q.canonicalize();
  return neg ? mpq_class(-q) : q;
}

template <typename Scalar>
lp::Problem<Scalar> membership_problem(const DataRows& rows, std::size_t n, const std::vector<Scalar>& rhs) {
  lp::Problem<Scalar> p;
  p.rows = rows.size();
  p.b = rhs;
  for (std::size_t j = 0; j < n; ++j) {
    lp::Column<Scalar> col;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows.coeff[i][j] != 0.0) {
        col.rows.push_back(i);
        col.values.push_back(Scalar(rows.coeff[i][j]));
      }
    p.add_column(std::move(col));
  }
  return p;
}

ClassicalModel mixture_model(const ResponseBasis& rb, const std::vector<double>& mu, int cardinality,
                             SolverDiagnostics& diag) {
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (mu[j] > 0.0) support.push_back(j);
  int card = static_cast<int>(support.size());
  if (cardinality > 0) {
    if (cardinality >= card) {
      card = cardinality;
    } else {
      diag.notes.push_back("solution support " + std::to_string(support.size()) + " exceeds requested cardinality " +
                           std::to_string(cardinality));
    }
  }
  ClassicalModel m = blank_model(rb.scenario, {card});
  double total = 0.0;
  for (std::size_t j : support) total += mu[j];
  m.latent_weights[0].assign(static_cast<std::size_t>(card), 0.0);
  for (std::size_t k = 0; k < support.size(); ++k) {
    m.latent_weights[0][k] = mu[support[k]] / total;
  }
  for (int k = 0; k < card; ++k) {
    // padding values reuse the first strategy with zero weight
    const auto strat = rb.decode(support.empty() ? 0 : support[std::min<std::size_t>(k, support.size() - 1)]);
    for (std::size_t x = 0; x < rb.spaces.size(); ++x) {
      auto& r = m.responses[x];
      const auto& sp = rb.spaces[x];
      for (std::size_t c = 0; c < sp.configs; ++c) {
        r.probs[(static_cast<std::size_t>(k) * sp.configs + c) * r.outcome_card + sp.strategies[strat[x]][c]] = 1.0;
      }
    }
  }
  return m;
}

/// Column values y^T A_j for every column.
template <typename Scalar>
std::vector<Scalar> column_values(const lp::Problem<Scalar>& p, const std::vector<Scalar>& y) {
  std::vector<Scalar> v(p.cols(), Scalar(0));
  for (std::size_t j = 0; j < p.cols(); ++j)
    for (std::size_t k = 0; k < p.columns[j].rows.size(); ++k) v[j] += y[p.columns[j].rows[k]] * p.columns[j].values[k];
  return v;
}

}  // namespace

FeasibilityVerdict lp_membership(const DataBundle& b, const LpOptions& opt) {
  const double t0 = detail::now_seconds();
  require_single_latent(b.scenario);
  if (opt.cardinality < 0) throw Error(ErrorCode::BadCardinality, "cardinality must be >= 0");
  std::vector<std::size_t> tables = opt.tables;
  if (tables.empty())
    for (std::size_t i = 0; i < b.tables.size(); ++i) tables.push_back(i);
  if (tables.empty()) throw Error(ErrorCode::DegenerateBundle, "no tables to test");

  const ResponseBasis rb(b.scenario);
  const DataRows rows = detail::bundle_rows(rb, b, tables);
  // the first selected table's rows absorb the shift that puts the bound at 0
  const auto& first = b.tables[tables[0]];
  const std::size_t first_rows = first.probs.size();

  FeasibilityVerdict v;
  v.diagnostics.solver = opt.exact ? "lp-exact" : "lp";
  lp::Options lpo;
  lpo.tol = 1e-11;

  if (!opt.exact) {
    const auto prob = membership_problem<double>(rows, rb.config_count, rows.rhs);
    const auto res = lp::solve(prob, lpo);
    v.diagnostics.iterations = res.iterations;
    if (res.status == lp::Status::Optimal) {
      v.model = mixture_model(rb, res.x, opt.cardinality, v.diagnostics);
      const double err = replay_error(*v.model, b.subset(tables));
      v.diagnostics.notes.push_back("replay error " + format17(err));
      v.status = err <= 1e-7 ? Feasibility::Feasible : Feasibility::Unknown;
    } else if (res.status == lp::Status::Infeasible) {
      std::vector<double> y = res.farkas;
      double scale = 0.0;
      for (double a : y) scale = std::max(scale, std::abs(a));
      if (scale > 0)
        for (double& a : y) a /= scale;
      const auto cv = column_values(prob, y);
      const double shift = -*std::max_element(cv.begin(), cv.end());
      for (std::size_t i = 0; i < first_rows; ++i) y[i] += shift;
      detail::TermBuilder tb;
      for (std::size_t i = 0; i < rows.size(); ++i) tb.add_rows(y[i], rows, i);
      v.certificate = tb.build(rows, 0.0);
      v.status = v.certificate->value > opt.tol ? Feasibility::Infeasible : Feasibility::Unknown;
      if (v.status == Feasibility::Unknown) v.diagnostics.notes.push_back("Farkas ray does not separate the data");
    } else {
      v.diagnostics.notes.push_back("simplex stopped: " + lp::to_string(res.status));
    }
  } else {
    std::vector<mpq_class> rhs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& ex = rows.data_exact[rows.entry[i]];
      rhs.push_back(ex.empty() ? mpq_class(rows.rhs[i]) : parse_decimal(ex));
    }
    const auto prob = membership_problem<mpq_class>(rows, rb.config_count, rhs);
    lp::Options exact = lpo;
    exact.bland = true;
    const auto res = lp::solve(prob, exact);
    v.diagnostics.iterations = res.iterations;
    if (res.status == lp::Status::Optimal) {
      std::vector<double> mu;
      for (const auto& x : res.x) mu.push_back(x.get_d());
      v.model = mixture_model(rb, mu, opt.cardinality, v.diagnostics);
      const double err = replay_error(*v.model, b.subset(tables));
      v.diagnostics.notes.push_back("replay error " + format17(err));
      v.status = err <= 1e-7 ? Feasibility::Feasible : Feasibility::Unknown;
    } else if (res.status == lp::Status::Infeasible) {
      std::vector<mpq_class> y = res.farkas;
      const auto cv = column_values(prob, y);
      const mpq_class shift = -*std::max_element(cv.begin(), cv.end());
      for (std::size_t i = 0; i < first_rows; ++i) y[i] += shift;
      mpq_class value = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) value += y[i] * rhs[i];
      // present the inequality with the largest coefficient at magnitude 1
      mpq_class scale = 0;
      for (const auto& a : y) scale = std::max(scale, mpq_class(abs(a)));
      Certificate c;
      c.bound = 0.0;
      c.exact_bound = "0";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const mpq_class coeff = scale > 0 ? mpq_class(y[i] / scale) : y[i];
        if (coeff == 0) continue;
        Certificate::Term t;
        t.coeff = coeff.get_d();
        t.exact_coeff = coeff.get_str();
        t.entries = {rows.entry[i]};
        t.label = rows.data_labels[rows.entry[i]];
        c.terms.push_back(std::move(t));
      }
      c.value = c.evaluate(rows.data);
      v.diagnostics.notes.push_back("exact value " + mpq_class(scale > 0 ? mpq_class(value / scale) : value).get_str());
      v.certificate = std::move(c);
      v.status = value > 0 && v.certificate->value > opt.tol ? Feasibility::Infeasible : Feasibility::Unknown;
    } else {
      v.diagnostics.notes.push_back("simplex stopped: " + lp::to_string(res.status));
    }
  }
  v.diagnostics.runtime_seconds = detail::seconds_since(t0);
  return v;
}

double lp_maximize(const DataBundle& layout, const std::vector<double>& coeff) {
  require_single_latent(layout.scenario);
  std::vector<std::size_t> tables;
  for (std::size_t i = 0; i < layout.tables.size(); ++i) tables.push_back(i);
  const ResponseBasis rb(layout.scenario);
  const DataRows rows = detail::bundle_rows(rb, layout, tables);
  if (coeff.size() != rows.size()) throw Error(ErrorCode::DimensionMismatch, "coefficient vector size");
  lp::Problem<double> p;
  p.rows = 1;
  p.b = {1.0};
  for (std::size_t j = 0; j < rb.config_count; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) c += coeff[i] * rows.coeff[i][j];
    p.add_column({{0}, {1.0}}, -c);
  }
  const auto res = lp::solve(p);
  if (res.status != lp::Status::Optimal) throw Error(ErrorCode::InvalidArgument, "vertex LP failed");
  return -res.objective;
}

}  // namespace fusionlab
